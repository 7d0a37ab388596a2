//! Exact value distributions of forms in independent entries.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::forms::{Interval, LinearForm, PolyForm};
use crate::dist::EntryDistribution;
use crate::error::{Error, Result};

/// Largest variable count accepted by full enumeration.
pub const ENUMERATION_MAX_VARS: usize = 24;

/// Exact law of a form: value -> probability, sorted by value.
pub type ValueLaw = BTreeMap<BigRational, BigRational>;

fn enumeration_guard(n: usize, dist: &EntryDistribution) -> Result<()> {
    if n > ENUMERATION_MAX_VARS {
        return Err(Error::GuardExceeded {
            what: "variables for exact enumeration",
            got: n as u128,
            limit: ENUMERATION_MAX_VARS as u128,
        });
    }
    let outcomes = (dist.atoms().len() as f64).powi(n as i32);
    if outcomes > (1u64 << ENUMERATION_MAX_VARS) as f64 {
        return Err(Error::GuardExceeded {
            what: "outcomes for exact enumeration",
            got: outcomes as u128,
            limit: 1 << ENUMERATION_MAX_VARS,
        });
    }
    if n as f64 * (dist.denominator() as f64).log2() > 126.0 {
        return Err(Error::Capability(
            "outcome weights exceed 126 bits; use Monte Carlo".into(),
        ));
    }
    Ok(())
}

/// Visits every outcome of `n` i.i.d. entries with its integer weight over
/// `denominator^n`.
fn for_each_outcome(n: usize, dist: &EntryDistribution, mut visit: impl FnMut(&[i64], u128)) {
    let values: Vec<i64> = dist.values().collect();
    let weights = dist.weights();
    let k = values.len();
    let mut digits = vec![0usize; n];
    let mut z = vec![values[0]; n];
    loop {
        let w = digits.iter().fold(1u128, |acc, &d| acc * weights[d] as u128);
        visit(&z, w);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            digits[i] += 1;
            if digits[i] < k {
                z[i] = values[digits[i]];
                break;
            }
            digits[i] = 0;
            z[i] = values[0];
            i += 1;
        }
    }
}

fn total_weight(n: usize, dist: &EntryDistribution) -> BigInt {
    BigInt::from(dist.denominator()).pow(n as u32)
}

/// Law of an integer-coefficient linear form by dynamic programming over
/// achievable partial sums.
pub fn linear_law_dp(f: &LinearForm, dist: &EntryDistribution) -> Result<ValueLaw> {
    if !f.is_integral() {
        return Err(Error::Capability(
            "the partial-sum recursion needs integer coefficients".into(),
        ));
    }
    let mut sums: HashMap<BigInt, BigInt> = HashMap::new();
    sums.insert(BigInt::zero(), BigInt::from(1));
    for a in f.coeffs() {
        let a = a.to_integer();
        let mut next: HashMap<BigInt, BigInt> = HashMap::with_capacity(sums.len() * 2);
        for (s, w) in &sums {
            for ((v, _), &wt) in dist.atoms().iter().zip(dist.weights()) {
                *next.entry(s + &a * *v).or_insert_with(BigInt::zero) += w * wt;
            }
        }
        sums = next;
    }
    let total = total_weight(f.len(), dist);
    Ok(sums
        .into_iter()
        .map(|(s, w)| (BigRational::from_integer(s), BigRational::new(w, total.clone())))
        .collect())
}

/// Law of a linear form by listing every outcome.
pub fn linear_law_enumerated(f: &LinearForm, dist: &EntryDistribution) -> Result<ValueLaw> {
    enumeration_guard(f.len(), dist)?;
    let total = total_weight(f.len(), dist);
    let small: Option<Vec<i128>> = f
        .coeffs()
        .iter()
        .map(|a| if a.is_integer() { a.to_integer().to_i64().map(i128::from) } else { None })
        .collect();
    let max_v = dist.values().map(|v| v.unsigned_abs() as u128).max().unwrap_or(0);
    let fits = |a: &Vec<i128>| {
        let max_a = a.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        max_a
            .checked_mul(max_v)
            .and_then(|m| m.checked_mul(a.len() as u128))
            .is_some_and(|m| m <= i128::MAX as u128)
    };
    if let Some(a) = small.filter(fits) {
        let mut acc: BTreeMap<i128, u128> = BTreeMap::new();
        for_each_outcome(f.len(), dist, |z, w| {
            let v: i128 = a.iter().zip(z).map(|(a, &x)| a * x as i128).sum();
            *acc.entry(v).or_insert(0) += w;
        });
        return Ok(acc
            .into_iter()
            .map(|(v, w)| (BigRational::from_integer(v.into()), BigRational::new(w.into(), total.clone())))
            .collect());
    }
    let mut acc: BTreeMap<BigRational, u128> = BTreeMap::new();
    for_each_outcome(f.len(), dist, |z, w| {
        let v: BigRational = f
            .coeffs()
            .iter()
            .zip(z)
            .map(|(a, &x)| a * BigRational::from_integer(x.into()))
            .sum();
        *acc.entry(v).or_insert(0) += w;
    });
    Ok(acc
        .into_iter()
        .map(|(v, w)| (v, BigRational::new(w.into(), total.clone())))
        .collect())
}

/// Exact law of a polynomial form by listing every outcome.
pub fn poly_law(f: &PolyForm, dist: &EntryDistribution) -> Result<ValueLaw> {
    enumeration_guard(f.num_vars(), dist)?;
    let max_abs = dist.values().map(|v| v.abs()).max().unwrap_or(1);
    let compiled = f.compile(max_abs)?;
    let mut acc: HashMap<i128, u128> = HashMap::new();
    let mut nz = Vec::new();
    for_each_outcome(f.num_vars(), dist, |z, w| {
        *acc.entry(compiled.scaled_value(z, &mut nz)).or_insert(0) += w;
    });
    let total = total_weight(f.num_vars(), dist);
    Ok(acc
        .into_iter()
        .map(|(v, w)| (compiled.to_rational(v), BigRational::new(w.into(), total.clone())))
        .collect())
}

pub fn law_mass_in(law: &ValueLaw, interval: &Interval) -> BigRational {
    law.iter()
        .filter(|(v, _)| interval.contains(v))
        .map(|(_, p)| p.clone())
        .sum()
}

/// Most likely value, smallest value on ties.
pub fn law_max_atom(law: &ValueLaw) -> Option<(BigRational, BigRational)> {
    let mut best: Option<(&BigRational, &BigRational)> = None;
    for (v, p) in law {
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((v, p));
        }
    }
    best.map(|(v, p)| (v.clone(), p.clone()))
}

/// `P(f ∈ I)` exactly: by dynamic programming for integer coefficients,
/// otherwise by enumeration of at most 24 variables.
pub fn atom_linear_exact(f: &LinearForm, interval: &Interval, dist: &EntryDistribution) -> Result<BigRational> {
    let law = if f.is_integral() {
        linear_law_dp(f, dist)?
    } else {
        linear_law_enumerated(f, dist).map_err(|e| match e {
            Error::GuardExceeded { .. } => Error::Capability(
                "non-integer coefficients over more than 24 variables; use Monte Carlo".into(),
            ),
            other => other,
        })?
    };
    Ok(law_mass_in(&law, interval))
}

/// Approximate `f64` of a probability, for reporting.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn linear_examples() {
        let b = EntryDistribution::bernoulli01();
        let f = LinearForm::from_integers(&[1, 1, 1, 1]).unwrap();
        assert_eq!(atom_linear_exact(&f, &Interval::point_int(2), &b).unwrap(), q(6, 16));
        let f = LinearForm::from_integers(&[1]).unwrap();
        assert_eq!(atom_linear_exact(&f, &Interval::point_int(0), &b).unwrap(), q(1, 2));
        let f = LinearForm::from_integers(&[1, 1]).unwrap();
        let unit = Interval::half_open(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(atom_linear_exact(&f, &unit, &b).unwrap(), q(1, 4));
    }

    #[test]
    fn rational_coefficients_use_enumeration() {
        let b = EntryDistribution::bernoulli01();
        let f = LinearForm::new(vec![q(1, 2), q(1, 3)]).unwrap();
        assert_eq!(
            atom_linear_exact(&f, &Interval::point(q(5, 6)), &b).unwrap(),
            q(1, 4)
        );
        let wide = LinearForm::new(vec![q(1, 2); 25]).unwrap();
        assert!(matches!(
            atom_linear_exact(&wide, &Interval::point_int(0), &b),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn poly_examples() {
        let b = EntryDistribution::bernoulli01();
        let r = EntryDistribution::rademacher();
        let prod = PolyForm::quadratic(&[vec![0, 1], vec![0, 0]]).unwrap();
        let law = poly_law(&prod, &b).unwrap();
        assert_eq!(law_mass_in(&law, &Interval::point_int(0)), q(3, 4));
        let law = poly_law(&prod, &r).unwrap();
        assert_eq!(law_mass_in(&law, &Interval::point_int(1)), q(1, 2));
        let zero = PolyForm::zero(3, 2);
        assert_eq!(law_mass_in(&poly_law(&zero, &b).unwrap(), &Interval::point_int(0)), q(1, 1));
    }

    #[test]
    fn weighted_distribution() {
        let d: EntryDistribution = "custom:0:7/10,1:3/10".parse().unwrap();
        let f = LinearForm::from_integers(&[1, 1]).unwrap();
        let law = linear_law_dp(&f, &d).unwrap();
        assert_eq!(law[&q(0, 1)], q(49, 100));
        assert_eq!(law[&q(1, 1)], q(42, 100));
        assert_eq!(law, linear_law_enumerated(&f, &d).unwrap());
    }

    proptest! {
        #[test]
        fn dp_agrees_with_enumeration(coeffs in prop::collection::vec(-6i64..=6, 1..10)) {
            let f = LinearForm::from_integers(&coeffs).unwrap();
            for d in [EntryDistribution::bernoulli01(), "custom:-1:1/4,0:1/2,1:1/4".parse().unwrap()] {
                let dp = linear_law_dp(&f, &d).unwrap();
                prop_assert_eq!(&dp, &linear_law_enumerated(&f, &d).unwrap());
                let total: BigRational = dp.values().cloned().sum();
                prop_assert!(total.is_one());
            }
        }
    }
}
