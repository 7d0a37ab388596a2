//! Fraction-free (Bareiss) elimination over the integers.
//!
//! Every intermediate entry is a minor of the input, so the computation
//! first runs in `i128` with overflow checks and restarts in `BigInt` only
//! when a product no longer fits.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::matrix::{IntMatrix, SymMatrix};

/// Result of a full elimination pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub rank: usize,
    /// Determinant for square inputs, `None` otherwise.
    pub det: Option<BigInt>,
}

fn bareiss_i128(data: &[i64], rows: usize, cols: usize) -> Option<(usize, i128, bool)> {
    let mut m: Vec<i128> = data.iter().map(|&v| v as i128).collect();
    let mut prev: i128 = 1;
    let mut rank = 0;
    let mut negate = false;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..cols {
                m.swap(piv * cols + j, rank * cols + j);
            }
            negate = !negate;
        }
        let p = m[rank * cols + c];
        for i in rank + 1..rows {
            let lead = m[i * cols + c];
            for j in c + 1..cols {
                let a = p.checked_mul(m[i * cols + j])?;
                let b = lead.checked_mul(m[rank * cols + j])?;
                m[i * cols + j] = a.checked_sub(b)? / prev;
            }
            m[i * cols + c] = 0;
        }
        prev = p;
        rank += 1;
    }
    Some((rank, prev, negate))
}

fn bareiss_big(data: &[i64], rows: usize, cols: usize) -> (usize, BigInt, bool) {
    let mut m: Vec<BigInt> = data.iter().map(|&v| BigInt::from(v)).collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    let mut negate = false;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !m[r * cols + c].is_zero()) else {
            continue;
        };
        if piv != rank {
            for j in 0..cols {
                m.swap(piv * cols + j, rank * cols + j);
            }
            negate = !negate;
        }
        let p = m[rank * cols + c].clone();
        for i in rank + 1..rows {
            let lead = std::mem::take(&mut m[i * cols + c]);
            if lead.is_zero() {
                // The update reduces to a rescale by p / prev.
                for j in c + 1..cols {
                    let v = &m[i * cols + j];
                    if !v.is_zero() {
                        m[i * cols + j] = (v * &p) / &prev;
                    }
                }
                continue;
            }
            for j in c + 1..cols {
                let v = &m[i * cols + j] * &p - &lead * &m[rank * cols + j];
                m[i * cols + j] = v / &prev;
            }
        }
        prev = p;
        rank += 1;
    }
    (rank, prev, negate)
}

/// Rank (and determinant, when square) of a row-major integer array.
pub fn eliminate(data: &[i64], rows: usize, cols: usize) -> Elimination {
    let (rank, last, negate) = match bareiss_i128(data, rows, cols) {
        Some((r, p, s)) => (r, BigInt::from(p), s),
        None => bareiss_big(data, rows, cols),
    };
    let det = (rows == cols).then(|| {
        if rank < rows {
            BigInt::zero()
        } else if rows == 0 {
            BigInt::from(1)
        } else if negate {
            -last
        } else {
            last
        }
    });
    Elimination { rank, det }
}

/// Rank over the rationals.
pub fn rank_exact(a: &SymMatrix) -> usize {
    eliminate(a.entries(), a.n(), a.n()).rank
}

pub fn rank_exact_general(a: &IntMatrix) -> usize {
    eliminate(a.data(), a.rows(), a.cols()).rank
}

/// Exact determinant. The empty matrix has determinant 1.
pub fn det_exact(a: &SymMatrix) -> BigInt {
    eliminate(a.entries(), a.n(), a.n()).det.expect("square")
}

pub fn det_exact_general(a: &IntMatrix) -> Option<BigInt> {
    eliminate(a.data(), a.rows(), a.cols()).det
}

/// Natural log of `|x|` for non-zero `x`, accurate to double precision.
pub fn ln_abs(x: &BigInt) -> f64 {
    assert!(!x.is_zero(), "log of zero");
    let a = x.abs();
    let bits = a.bits();
    if bits <= 1000 {
        return a.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (&a >> shift).to_f64().expect("fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::EntryDistribution;
    use crate::matrix::sample_symmetric;
    use proptest::prelude::*;

    /// Laplace expansion along the first row.
    fn det_cofactor(m: &[Vec<i64>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::from(1);
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m[0][j] == 0 {
                continue;
            }
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                .collect();
            let term = BigInt::from(m[0][j]) * det_cofactor(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn small_examples() {
        let swap = SymMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(rank_exact(&swap), 2);
        assert_eq!(det_exact(&swap), BigInt::from(-1));
        let ones = SymMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(rank_exact(&ones), 1);
        for n in 0..7 {
            assert_eq!(det_exact(&SymMatrix::identity(n)), BigInt::from(1));
        }
        assert_eq!(rank_exact(&SymMatrix::zeros(3)), 0);
    }

    #[test]
    fn half_of_2x2_symmetric_01_matrices_are_singular() {
        let singular = (0..8u32)
            .filter(|bits| {
                let up: Vec<i64> = (0..3).map(|k| ((bits >> k) & 1) as i64).collect();
                rank_exact(&SymMatrix::from_upper(2, &up).unwrap()) < 2
            })
            .count();
        assert_eq!(singular, 4);
    }

    #[test]
    fn det_matches_cofactor_expansion_at_8() {
        let d = EntryDistribution::bernoulli01();
        for seed in 0..30 {
            let m = sample_symmetric(8, &d, seed);
            assert_eq!(det_exact(&m), det_cofactor(&m.to_rows()));
        }
    }

    #[test]
    fn big_integer_fallback() {
        // Hilbert-like growth: large entries force the BigInt path.
        let n = 6;
        let big = 1i64 << 40;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| big / (1 + i as i64 + j as i64) + (i * j) as i64).collect())
            .collect();
        let m = SymMatrix::from_rows(&rows).unwrap();
        assert!(bareiss_i128(m.entries(), n, n).is_none());
        assert_eq!(det_exact(&m), det_cofactor(&rows));
    }

    #[test]
    fn rectangular_rank() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(rank_exact_general(&m), 1);
        assert_eq!(rank_exact_general(&m.transpose()), 1);
        assert_eq!(det_exact_general(&m), None);
    }

    #[test]
    fn ln_abs_matches_float() {
        let x = BigInt::from(-123_456_789i64);
        assert!((ln_abs(&x) - 123_456_789f64.ln()).abs() < 1e-12);
        let huge = BigInt::from(3) << 2000usize;
        let expect = 3f64.ln() + 2000.0 * std::f64::consts::LN_2;
        assert!((ln_abs(&huge) - expect).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn full_rank_iff_nonzero_det(n in 1usize..9, seed in any::<u64>()) {
            let m = sample_symmetric(n, &EntryDistribution::bernoulli01(), seed);
            let e = eliminate(m.entries(), n, n);
            prop_assert_eq!(e.rank == n, !e.det.unwrap().is_zero());
        }
    }
}
