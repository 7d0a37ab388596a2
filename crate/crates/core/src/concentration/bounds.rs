//! Concentration bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::forms::PolyForm;
use crate::error::{Error, Result};

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Sharp linear bound `C(k, floor(k/2)) / 2^k`: the largest possible point
/// mass of `Σ a_i z_i` over fair 0/1 entries when `k` coefficients are
/// non-zero (and of any half-open interval of length `c` when `k`
/// coefficients satisfy `|a_i| >= c`).
pub fn erdos_bound(k: u64) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Config("erdos_bound needs k >= 1".into()));
    }
    Ok(BigRational::new(binomial(k, k / 2), BigInt::one() << k))
}

/// `C * (|S|^(-1/2) + |S|^(-1) Σ_{i∈S} d_i^(-1/2))^(1/4)`.
pub fn quad_lo_bound(s_size: usize, d_values: &[u64], c: f64) -> Result<f64> {
    if s_size == 0 {
        return Err(Error::Config("|S| must be positive".into()));
    }
    if d_values.len() != s_size {
        return Err(Error::DimensionMismatch {
            expected: s_size,
            found: d_values.len(),
        });
    }
    if let Some(&d) = d_values.iter().find(|&&d| d < 1) {
        return Err(Error::Config(format!("every d_i must be at least 1, got {d}")));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::Config(format!("constant must be positive, got {c}")));
    }
    let s = s_size as f64;
    let sum: f64 = d_values.iter().map(|&d| (d as f64).powf(-0.5)).sum();
    Ok(c * (s.powf(-0.5) + sum / s).powf(0.25))
}

/// Exponent `2^(-(k^2 + k)/2)` of the degree-`k` bound `O(m^(-a_k))`.
pub fn poly_lo_exponent(k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Config("degree must be at least 1".into()));
    }
    let e = (k * k + k) / 2;
    Ok(BigRational::new(BigInt::one(), BigInt::one() << e))
}

/// The sets `U_1`, `S` and counts `d_i` used for a quadratic bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadPartition {
    pub u1: Vec<usize>,
    pub s: Vec<usize>,
    pub d_values: Vec<u64>,
}

/// Greedy partition for a quadratic form: `U_1` is the half (rounded down,
/// at least one) of the variables with the most large couplings, ties to the
/// lower index; `U_2` is the rest; `S` keeps the rows of `U_1` with at least
/// one large coupling into `U_2`. A pair counts as large when the
/// symmetrized coefficient `(c_ij + c_ji)/2` has absolute value at least
/// `scale`. `None` when `S` would be empty or the form has fewer than two
/// variables.
pub fn greedy_partition(f: &PolyForm, scale: &BigRational) -> Option<QuadPartition> {
    assert_eq!(f.degree(), 2, "greedy partition is for quadratic forms");
    let n = f.num_vars();
    if n < 2 {
        return None;
    }
    let large = |i: usize, j: usize| i != j && f.symmetric_coupling(i, j).abs() >= *scale;
    let mut order: Vec<(usize, usize)> = (0..n)
        .map(|i| ((0..n).filter(|&j| large(i, j)).count(), i))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let half = (n / 2).max(1);
    let mut u1: Vec<usize> = order[..half].iter().map(|&(_, i)| i).collect();
    u1.sort_unstable();
    let in_u1 = |j: usize| u1.binary_search(&j).is_ok();
    let mut s = Vec::new();
    let mut d_values = Vec::new();
    for &i in &u1 {
        let d = (0..n).filter(|&j| !in_u1(j) && large(i, j)).count() as u64;
        if d >= 1 {
            s.push(i);
            d_values.push(d);
        }
    }
    if s.is_empty() {
        return None;
    }
    Some(QuadPartition { u1, s, d_values })
}
