//! Exact right nullspaces with canonical integer basis vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// Divides `v` by the gcd of its entries and makes the first non-zero
/// entry positive.
pub fn make_primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return;
    }
    let negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in v.iter_mut() {
        *x /= &g;
        if negative {
            *x = -std::mem::take(x);
        }
    }
}

/// Reduced row echelon form over the integers: each pivot column holds a
/// single non-zero entry, and each row is primitive. Returns the rows and the
/// pivot column of each row.
pub fn integer_rref(rows: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m = rows;
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(piv, r);
        for i in 0..nrows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let a = m[r][c].clone();
            let b = m[i][c].clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            let (head, tail) = if i < r {
                let (lo, hi) = m.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for j in 0..cols {
                let v = &a * &tail[j] - &b * &head[j];
                tail[j] = v;
            }
            make_primitive(tail);
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Basis of `{x : A x = 0}` over the rationals.
///
/// One vector per free column `f`: `x_f` is set, the other free coordinates
/// are zero, and the vector is scaled to a primitive integer vector whose
/// first non-zero entry is positive. Empty iff `A` has full column rank.
pub fn nullspace_rational(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let rows = (0..a.rows())
        .map(|i| a.row(i).iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    nullspace_of_rows(rows, a.cols())
}

/// [`nullspace_rational`] for big-integer rows.
pub fn nullspace_of_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let (rref, pivots) = integer_rref(rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let lcm = pivots
        .iter()
        .zip(&rref)
        .fold(BigInt::one(), |acc, (&p, row)| acc.lcm(&row[p]));
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![BigInt::zero(); cols];
            v[f] = lcm.clone();
            for (&p, row) in pivots.iter().zip(&rref) {
                // row[p] * x_p + row[f] * x_f = 0
                if !row[f].is_zero() {
                    v[p] = -(&row[f] * (&lcm / &row[p]));
                }
            }
            make_primitive(&mut v);
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::EntryDistribution;
    use crate::matrix::sample_symmetric;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn examples() {
        let id = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(nullspace_rational(&id).is_empty());

        let ones = IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(nullspace_rational(&ones), vec![ints(&[1, -1])]);

        let row = IntMatrix::from_rows(&[vec![1, 2]]).unwrap();
        assert_eq!(nullspace_rational(&row), vec![ints(&[2, -1])]);

        let zero = IntMatrix::zeros(2, 3);
        assert_eq!(
            nullspace_rational(&zero),
            vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]
        );
    }

    proptest! {
        #[test]
        fn basis_annihilates_and_has_right_size(
            rows in 1usize..7, cols in 1usize..7, seed in any::<u64>()
        ) {
            let d: EntryDistribution = "custom:-1:1/3,0:1/3,2:1/3".parse().unwrap();
            let s = sample_symmetric(rows.max(cols), &d, seed);
            let data: Vec<i64> = (0..rows).flat_map(|i| s.row(i)[..cols].to_vec()).collect();
            let a = IntMatrix::from_vec(rows, cols, data).unwrap();
            let basis = nullspace_rational(&a);
            prop_assert_eq!(basis.len(), cols - crate::linalg::exact::rank_exact_general(&a));
            for v in &basis {
                let first = v.iter().find(|x| !x.is_zero()).unwrap();
                prop_assert!(first.is_positive());
                let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
                prop_assert!(g.is_one());
                for i in 0..rows {
                    let dot: BigInt = (0..cols).map(|j| BigInt::from(a.get(i, j)) * &v[j]).sum();
                    prop_assert!(dot.is_zero());
                }
            }
        }
    }
}
