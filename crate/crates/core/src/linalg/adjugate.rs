use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::exact::eliminate;
use super::nullspace::{integer_rref, nullspace_rational};
use crate::matrix::SymMatrix;

/// Exact adjugate (transposed cofactor matrix), so that
/// `A * adj(A) == det(A) * I`.
///
/// Non-singular inputs go through `det(A) * A^-1`; a corank-one symmetric
/// input has `adj(A) = λ k kᵀ` for its null vector `k`; larger corank gives
/// the zero matrix.
pub fn adjugate(a: &SymMatrix) -> Vec<Vec<BigInt>> {
    let n = a.n();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let e = eliminate(a.entries(), n, n);
    let det = e.det.expect("square");
    if e.rank == n {
        return scaled_inverse(a, &det);
    }
    let zero = vec![vec![BigInt::zero(); n]; n];
    if e.rank + 1 < n {
        return zero;
    }
    let k = nullspace_rational(&a.as_int_matrix())
        .pop()
        .expect("corank one");
    let i = k.iter().position(|x| !x.is_zero()).expect("non-zero null vector");
    let minor = principal_minor(a, i);
    let c_ii = eliminate(&minor, n - 1, n - 1).det.expect("square");
    let lambda = BigRational::new(c_ii, &k[i] * &k[i]);
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let v = &lambda * BigRational::from_integer(&k[r] * &k[c]);
                    assert!(v.is_integer(), "adjugate entries are integers");
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

fn principal_minor(a: &SymMatrix, skip: usize) -> Vec<i64> {
    let n = a.n();
    (0..n)
        .filter(|&r| r != skip)
        .flat_map(|r| (0..n).filter(move |&c| c != skip).map(move |c| a.get(r, c)))
        .collect()
}

fn scaled_inverse(a: &SymMatrix, det: &BigInt) -> Vec<Vec<BigInt>> {
    let n = a.n();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigInt> = a.row(i).iter().map(|&v| BigInt::from(v)).collect();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let (rref, pivots) = integer_rref(rows, 2 * n);
    let mut out = vec![Vec::new(); n];
    for (row, &p) in rref.iter().zip(&pivots) {
        debug_assert!(p < n);
        let d = &row[p];
        out[p] = row[n..].iter().map(|x| (det * x) / d).collect();
    }
    out
}

/// Row `i` of the adjugate holds the cofactors `C_ji`; by symmetry this is
/// also column `i`. Counts its non-zero entries.
pub fn adjugate_row_support(adj: &[Vec<BigInt>], i: usize) -> usize {
    adj[i].iter().filter(|x| !x.is_zero()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::EntryDistribution;
    use crate::linalg::exact::det_exact;
    use crate::matrix::sample_symmetric;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check_identity(a: &SymMatrix) {
        let n = a.n();
        let adj = adjugate(a);
        let det = det_exact(a);
        for i in 0..n {
            for j in 0..n {
                let s: BigInt = (0..n).map(|k| BigInt::from(a.get(i, k)) * &adj[k][j]).sum();
                let want = if i == j { det.clone() } else { BigInt::zero() };
                assert_eq!(s, want, "entry ({i},{j}) of A adj(A) for {:?}", a.to_rows());
            }
        }
    }

    /// Cofactors straight from the definition.
    fn adjugate_by_minors(a: &SymMatrix) -> Vec<Vec<BigInt>> {
        let n = a.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // adj[i][j] = (-1)^(i+j) det(A without row j, column i)
                        let m: Vec<i64> = (0..n)
                            .filter(|&r| r != j)
                            .flat_map(|r| (0..n).filter(move |&c| c != i).map(move |c| a.get(r, c)))
                            .collect();
                        let d = eliminate(&m, n - 1, n - 1).det.unwrap();
                        if (i + j) % 2 == 0 { d } else { -d }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn closed_form_at_two() {
        let (a, b, c) = (3, -5, 7);
        let m = SymMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap();
        assert_eq!(adjugate(&m), big(&[vec![c, -b], vec![-b, a]]));
        let singular = SymMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(adjugate(&singular), big(&[vec![1, -1], vec![-1, 1]]));
    }

    #[test]
    fn identity_adjugate() {
        for n in 1..6 {
            let id = SymMatrix::identity(n);
            let want: Vec<Vec<i64>> =
                (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            assert_eq!(adjugate(&id), big(&want));
        }
    }

    #[test]
    fn low_rank_is_zero() {
        assert_eq!(adjugate(&SymMatrix::zeros(3)), vec![vec![BigInt::zero(); 3]; 3]);
    }

    #[test]
    fn random_six_by_six() {
        let d = EntryDistribution::bernoulli01();
        for seed in 0..50 {
            let a = sample_symmetric(6, &d, seed);
            check_identity(&a);
            assert_eq!(adjugate(&a), adjugate_by_minors(&a));
        }
    }

    proptest! {
        #[test]
        fn adjugate_identity_up_to_ten(n in 1usize..=10, seed in any::<u64>()) {
            let a = sample_symmetric(n, &EntryDistribution::bernoulli01(), seed);
            check_identity(&a);
        }

        #[test]
        fn corank_paths_match_minors(n in 2usize..=6, seed in any::<u64>()) {
            // {0,1} entries on a small n are singular often enough to hit every branch.
            let d: EntryDistribution = "custom:0:3/4,1:1/4".parse().unwrap();
            let a = sample_symmetric(n, &d, seed);
            prop_assert_eq!(adjugate(&a), adjugate_by_minors(&a));
        }
    }
}
