//! Structural classes of symmetric matrices.
//!
//! A singular matrix is *abnormal* when some fewer than `N` of its rows admit
//! a vanishing combination with all coefficients non-zero (a circuit of the
//! row matroid), and *normal* otherwise. A non-singular matrix is *perfect*
//! when deleting any single row leaves a column null combination of support
//! at least `N`, and *imperfect* otherwise. Both pairs are only defined in
//! their own regime; asking for the wrong one is an error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::adjugate::adjugate;
use crate::linalg::certify::certify_rank;
use crate::linalg::exact::rank_exact_general;
use crate::linalg::modp::{default_primes, rank_mod_p_general};
use crate::linalg::nullspace::{make_primitive, nullspace_of_rows, nullspace_rational};
use crate::matrix::{IntMatrix, SymMatrix};

/// Largest row count accepted by the exhaustive circuit search.
pub const CIRCUIT_SEARCH_MAX_ROWS: usize = 32;
/// Largest ambient dimension for `{0,1}` point counting.
pub const POINT_COUNT_MAX_DIM: usize = 24;
/// Upper limit on candidate sets examined by one circuit search.
pub const CIRCUIT_SEARCH_MAX_WORK: u128 = 50_000_000;

/// The degree threshold `N = max(1, ceil(n^(1-epsilon)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeThreshold {
    pub n: usize,
    pub epsilon: f64,
    #[serde(rename = "threshold")]
    pub big_n: usize,
}

impl DegreeThreshold {
    /// A threshold with an explicit `N`, for tests and sweeps.
    pub fn with_value(n: usize, big_n: usize) -> Self {
        Self {
            n,
            epsilon: f64::NAN,
            big_n: big_n.max(1),
        }
    }
}

/// Computes `N` for dimension `n`. Powers that land within `1e-9` (relative)
/// of an integer are snapped to it before taking the ceiling, so `100^0.5`
/// gives 10.
pub fn compute_n(n: usize, epsilon: f64) -> Result<DegreeThreshold> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let x = (n as f64).powf(1.0 - epsilon);
    let r = x.round();
    let c = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok(DegreeThreshold {
        n,
        epsilon,
        big_n: (c as usize).max(1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    SingularNormal,
    SingularAbnormal,
    NonsingularPerfect,
    NonsingularImperfect,
}

impl ClassTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::SingularNormal => "SingularNormal",
            ClassTag::SingularAbnormal => "SingularAbnormal",
            ClassTag::NonsingularPerfect => "NonsingularPerfect",
            ClassTag::NonsingularImperfect => "NonsingularImperfect",
        }
    }
}

/// A minimal vanishing row combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    /// Row indices, ascending.
    pub rows: Vec<usize>,
    /// Primitive integer coefficients, first one positive, all non-zero.
    #[serde(with = "crate::bigser::big_vec")]
    pub coefficients: Vec<BigInt>,
}

impl Circuit {
    pub fn degree(&self) -> usize {
        self.rows.len()
    }

    /// `Σ c_k row_{rows[k]}` evaluated exactly.
    pub fn combine(&self, a: &IntMatrix) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); a.cols()];
        for (&r, c) in self.rows.iter().zip(&self.coefficients) {
            for (slot, &x) in acc.iter_mut().zip(a.row(r)) {
                *slot += c * x;
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Circuit(Circuit),
    BadRow { row: usize, support: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralClass {
    pub tag: ClassTag,
    pub witness: Option<Witness>,
}

fn combinations(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// Advances `idx` to the next k-combination of `0..m` in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < m - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Which exhaustive strategy to run for [`min_circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitSearch {
    /// Pick the cheaper of the two below.
    Auto,
    /// Increasing subset size over rows in the null-vector support.
    BySize,
    /// Every choice of `d - 1` forced zeros in the `d`-dimensional space of
    /// vanishing combinations; each circuit arises from one such choice.
    ByZeroSet,
}

/// Minimum-size circuit of the rows of `a` with fewer than `bound` rows;
/// ties go to the lexicographically smallest sorted row set.
pub fn min_dependent_support(a: &SymMatrix, bound: usize) -> Result<Option<Circuit>> {
    min_circuit(&a.as_int_matrix(), bound, CircuitSearch::Auto)
}

pub fn min_circuit(a: &IntMatrix, bound: usize, strategy: CircuitSearch) -> Result<Option<Circuit>> {
    let rows = a.rows();
    if rows > CIRCUIT_SEARCH_MAX_ROWS {
        return Err(Error::GuardExceeded {
            what: "rows for circuit search",
            got: rows as u128,
            limit: CIRCUIT_SEARCH_MAX_ROWS as u128,
        });
    }
    if bound <= 1 {
        return Ok(None);
    }
    // Vanishing row combinations are the left nullspace.
    let combos = nullspace_rational(&a.transpose());
    let d = combos.len();
    if d == 0 {
        return Ok(None);
    }
    let candidates: Vec<usize> = (0..rows)
        .filter(|&r| combos.iter().any(|v| !v[r].is_zero()))
        .collect();
    let m = candidates.len();
    let max_k = (bound - 1).min(m);
    let size_work: u128 = (1..=max_k).map(|k| combinations(m, k)).sum();
    let zero_work = combinations(m, d - 1);
    let strategy = match strategy {
        CircuitSearch::Auto if zero_work < size_work => CircuitSearch::ByZeroSet,
        CircuitSearch::Auto => CircuitSearch::BySize,
        s => s,
    };
    let work = if strategy == CircuitSearch::ByZeroSet { zero_work } else { size_work };
    if work > CIRCUIT_SEARCH_MAX_WORK {
        return Err(Error::GuardExceeded {
            what: "candidate sets for circuit search",
            got: work,
            limit: CIRCUIT_SEARCH_MAX_WORK,
        });
    }
    match strategy {
        CircuitSearch::ByZeroSet => Ok(search_by_zero_set(&combos, &candidates, bound)),
        _ => Ok(search_by_size(a, &candidates, max_k)),
    }
}

fn search_by_size(a: &IntMatrix, candidates: &[usize], max_k: usize) -> Option<Circuit> {
    let p = default_primes()[0];
    for k in 1..=max_k {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let rows: Vec<usize> = idx.iter().map(|&i| candidates[i]).collect();
            let sub = a.select_rows(&rows);
            // A full rank modulo p proves independence over the rationals.
            if rank_mod_p_general(&sub, p).expect("prime") < k && rank_exact_general(&sub) < k {
                let mut coeffs = nullspace_rational(&sub.transpose());
                debug_assert_eq!(coeffs.len(), 1);
                let coefficients = coeffs.pop().expect("one-dimensional");
                debug_assert!(coefficients.iter().all(|c| !c.is_zero()));
                return Some(Circuit { rows, coefficients });
            }
            if !next_combination(&mut idx, candidates.len()) {
                break;
            }
        }
    }
    None
}

fn search_by_zero_set(combos: &[Vec<BigInt>], candidates: &[usize], bound: usize) -> Option<Circuit> {
    let d = combos.len();
    let m = candidates.len();
    let mut best: Option<Vec<BigInt>> = None;
    let mut best_support: Vec<usize> = Vec::new();
    let mut idx: Vec<usize> = (0..d - 1).collect();
    loop {
        // λ with (Σ_l λ_l combos[l])_z = 0 for every forced zero z.
        let constraints: Vec<Vec<BigInt>> = idx
            .iter()
            .map(|&i| combos.iter().map(|v| v[candidates[i]].clone()).collect())
            .collect();
        let lambdas = nullspace_of_rows(constraints, d);
        if lambdas.len() == 1 {
            let lambda = &lambdas[0];
            let mut v = vec![BigInt::zero(); combos[0].len()];
            for (l, basis) in lambda.iter().zip(combos) {
                if l.is_zero() {
                    continue;
                }
                for (slot, b) in v.iter_mut().zip(basis) {
                    *slot += l * b;
                }
            }
            let support: Vec<usize> = (0..v.len()).filter(|&r| !v[r].is_zero()).collect();
            let better = match &best {
                None => true,
                Some(_) => (support.len(), &support) < (best_support.len(), &best_support),
            };
            if better {
                best = Some(v);
                best_support = support;
            }
        }
        if d == 1 || !next_combination(&mut idx, m) {
            break;
        }
    }
    let v = best?;
    if best_support.len() >= bound {
        return None;
    }
    let mut coefficients: Vec<BigInt> = best_support.iter().map(|&r| v[r].clone()).collect();
    make_primitive(&mut coefficients);
    Some(Circuit {
        rows: best_support,
        coefficients,
    })
}

fn require_singular(a: &SymMatrix, singular: bool) -> Result<()> {
    let cert = certify_rank(a, &default_primes(), false)?;
    match (cert.is_singular(a.n()), singular) {
        (true, false) => Err(Error::ContractViolation(
            "perfect/imperfect is only defined for non-singular matrices".into(),
        )),
        (false, true) => Err(Error::ContractViolation(
            "normal/abnormal is only defined for singular matrices".into(),
        )),
        _ => Ok(()),
    }
}

/// Normal or abnormal, for a singular matrix.
pub fn classify_singular(a: &SymMatrix, thr: &DegreeThreshold) -> Result<StructuralClass> {
    require_singular(a, true)?;
    classify_singular_unchecked(a, thr)
}

fn classify_singular_unchecked(a: &SymMatrix, thr: &DegreeThreshold) -> Result<StructuralClass> {
    Ok(match min_dependent_support(a, thr.big_n)? {
        Some(c) => StructuralClass {
            tag: ClassTag::SingularAbnormal,
            witness: Some(Witness::Circuit(c)),
        },
        None => StructuralClass {
            tag: ClassTag::SingularNormal,
            witness: None,
        },
    })
}

/// Support of the column null combination left after deleting row `i`.
pub fn row_null_support(a: &SymMatrix, i: usize) -> Result<usize> {
    if i >= a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: i,
        });
    }
    require_singular(a, false)?;
    let basis = nullspace_rational(&a.as_int_matrix().without_row(i));
    debug_assert_eq!(basis.len(), 1);
    Ok(basis[0].iter().filter(|x| !x.is_zero()).count())
}

/// Perfect or imperfect, for a non-singular matrix.
///
/// Row supports are read off the adjugate: deleting row `i` leaves column
/// `i` of `A^-1` as the null combination, and that column is proportional
/// to row `i` of the adjugate by symmetry.
pub fn classify_nonsingular(a: &SymMatrix, thr: &DegreeThreshold) -> Result<StructuralClass> {
    require_singular(a, false)?;
    Ok(classify_nonsingular_unchecked(a, thr))
}

fn classify_nonsingular_unchecked(a: &SymMatrix, thr: &DegreeThreshold) -> StructuralClass {
    let supports = row_supports(a);
    match supports.iter().position(|&s| s < thr.big_n) {
        Some(row) => StructuralClass {
            tag: ClassTag::NonsingularImperfect,
            witness: Some(Witness::BadRow {
                row,
                support: supports[row],
            }),
        },
        None => StructuralClass {
            tag: ClassTag::NonsingularPerfect,
            witness: None,
        },
    }
}

/// Count of non-zero cofactors in each row of a non-singular matrix.
///
/// Every cofactor is bounded by the product of the row norms (Hadamard).
/// When that bound is below half the default prime, a cofactor vanishes iff
/// it vanishes modulo the prime, and the support pattern comes from a single
/// modular inversion. Otherwise the exact adjugate is used.
pub fn row_supports(a: &SymMatrix) -> Vec<usize> {
    let n = a.n();
    let p = default_primes()[0];
    let log2_bound: f64 = (0..n)
        .map(|i| {
            let sq: f64 = a.row(i).iter().map(|&x| (x as f64) * (x as f64)).sum();
            0.5 * sq.max(1.0).log2()
        })
        .sum();
    if log2_bound < 60.0 {
        if let Some(pattern) = inverse_support_mod_p(a, p) {
            return pattern;
        }
    }
    let adj = adjugate(a);
    adj.iter().map(|r| r.iter().filter(|x| !x.is_zero()).count()).collect()
}

fn inverse_support_mod_p(a: &SymMatrix, p: u64) -> Option<Vec<usize>> {
    let n = a.n();
    let pp = p as u128;
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % pp) as u64;
    let inv = |x: u64| {
        let (mut b, mut e, mut r) = (x, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let w = 2 * n;
    let mut m = vec![0u64; n * w];
    for i in 0..n {
        for j in 0..n {
            m[i * w + j] = (a.get(i, j) as i128).rem_euclid(p as i128) as u64;
        }
        m[i * w + n + i] = 1;
    }
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r * w + c] != 0)?;
        if piv != c {
            for j in 0..w {
                m.swap(piv * w + j, c * w + j);
            }
        }
        let iv = inv(m[c * w + c]);
        for j in 0..w {
            m[c * w + j] = mul(m[c * w + j], iv);
        }
        for r in 0..n {
            let f = m[r * w + c];
            if r == c || f == 0 {
                continue;
            }
            for j in 0..w {
                let t = mul(f, m[c * w + j]);
                let v = m[r * w + j];
                m[r * w + j] = if v >= t { v - t } else { v + (p - t) };
            }
        }
    }
    Some(
        (0..n)
            .map(|i| (0..n).filter(|&j| m[i * w + n + j] != 0).count())
            .collect(),
    )
}

/// Classifies by singularity first, then by the matching definition.
pub fn classify(a: &SymMatrix, thr: &DegreeThreshold) -> Result<StructuralClass> {
    let cert = certify_rank(a, &default_primes(), false)?;
    if cert.is_singular(a.n()) {
        classify_singular_unchecked(a, thr)
    } else {
        Ok(classify_nonsingular_unchecked(a, thr))
    }
}

/// Number of `{0,1}^n` points in the rational span of `basis`.
///
/// Enumerates all `2^n` points in Gray-code order against a basis of the
/// orthogonal complement, so each step updates the running dot products by
/// one column.
pub fn count_01_points_in_span(basis: &[Vec<BigRational>], n: usize) -> Result<u64> {
    if n > POINT_COUNT_MAX_DIM {
        return Err(Error::GuardExceeded {
            what: "dimension for {0,1} point counting",
            got: n as u128,
            limit: POINT_COUNT_MAX_DIM as u128,
        });
    }
    if let Some(v) = basis.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let rows: Vec<Vec<BigInt>> = basis.iter().map(|v| clear_denominators(v)).collect();
    let complement = nullspace_of_rows(rows, n);
    let bound_ok = complement.iter().all(|c| {
        let s: BigInt = c.iter().map(|x| x.abs()).sum();
        s.bits() < 120
    });
    if !bound_ok {
        return Err(Error::Capability(
            "orthogonal complement coefficients exceed 120 bits".into(),
        ));
    }
    let comp: Vec<Vec<i128>> = complement
        .iter()
        .map(|c| c.iter().map(|x| x.to_i128().expect("bounded")).collect())
        .collect();
    let mut dots = vec![0i128; comp.len()];
    let mut x = vec![false; n];
    let mut count = 1u64; // the origin
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        x[bit] = !x[bit];
        for (dot, c) in dots.iter_mut().zip(&comp) {
            if x[bit] {
                *dot += c[bit];
            } else {
                *dot -= c[bit];
            }
        }
        if dots.iter().all(|&d| d == 0) {
            count += 1;
        }
    }
    Ok(count)
}

fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    v.iter().map(|q| q.numer() * (&l / q.denom())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::EntryDistribution;
    use crate::linalg::exact::rank_exact;
    use crate::matrix::sample_symmetric;
    use proptest::prelude::*;

    fn sym(rows: &[Vec<i64>]) -> SymMatrix {
        SymMatrix::from_rows(rows).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Every subset, smallest first, checked by exact rank.
    fn brute_force_circuit(a: &IntMatrix, bound: usize) -> Option<Vec<usize>> {
        let r = a.rows();
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u64..(1 << r) {
            let rows: Vec<usize> = (0..r).filter(|&i| mask >> i & 1 == 1).collect();
            if rows.len() >= bound || rank_exact_general(&a.select_rows(&rows)) == rows.len() {
                continue;
            }
            // minimal: every proper subset independent iff removing any row restores full rank
            let minimal = (0..rows.len()).all(|k| {
                let mut sub = rows.clone();
                sub.remove(k);
                rank_exact_general(&a.select_rows(&sub)) == sub.len()
            });
            if minimal {
                let better = match &best {
                    None => true,
                    Some(b) => (rows.len(), &rows) < (b.len(), b),
                };
                if better {
                    best = Some(rows);
                }
            }
        }
        best
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(compute_n(1, 0.1).unwrap().big_n, 1);
        assert_eq!(compute_n(100, 0.5).unwrap().big_n, 10);
        assert_eq!(compute_n(10, 0.1).unwrap().big_n, 8);
        assert_eq!(compute_n(0, 0.1).unwrap().big_n, 1);
        assert!(compute_n(10, 0.0).is_err());
        assert!(compute_n(10, 1.0).is_err());
        assert!(compute_n(10, f64::NAN).is_err());
    }

    #[test]
    fn circuit_examples() {
        assert_eq!(min_dependent_support(&SymMatrix::identity(4), 5).unwrap(), None);

        let zero_row = sym(&[vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 0]]);
        let c = min_dependent_support(&zero_row, 2).unwrap().unwrap();
        assert_eq!(c.rows, vec![0]);
        assert_eq!(c.coefficients, vec![BigInt::one()]);

        let dup = sym(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        let c = min_dependent_support(&dup, 3).unwrap().unwrap();
        assert_eq!(c.rows, vec![0, 1]);
        assert_eq!(c.coefficients, vec![BigInt::one(), -BigInt::one()]);
        assert_eq!(min_dependent_support(&dup, 2).unwrap(), None);
    }

    #[test]
    fn guard_on_rows() {
        let big = SymMatrix::zeros(33);
        assert!(min_dependent_support(&big, 3).unwrap_err().is_guard());
    }

    #[test]
    fn singular_classification() {
        let z = SymMatrix::zeros(2);
        let c = classify_singular(&z, &DegreeThreshold::with_value(2, 1)).unwrap();
        assert_eq!(c.tag, ClassTag::SingularNormal);
        let c = classify_singular(&z, &DegreeThreshold::with_value(2, 2)).unwrap();
        assert_eq!(c.tag, ClassTag::SingularAbnormal);
        match c.witness {
            Some(Witness::Circuit(c)) => assert_eq!(c.degree(), 1),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(matches!(
            classify_singular(&SymMatrix::identity(2), &DegreeThreshold::with_value(2, 2)),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn nonsingular_classification() {
        let id = SymMatrix::identity(4);
        let c = classify_nonsingular(&id, &DegreeThreshold::with_value(4, 2)).unwrap();
        assert_eq!(c.tag, ClassTag::NonsingularImperfect);
        assert_eq!(c.witness, Some(Witness::BadRow { row: 0, support: 1 }));
        let c = classify_nonsingular(&id, &DegreeThreshold::with_value(4, 1)).unwrap();
        assert_eq!(c.tag, ClassTag::NonsingularPerfect);
        assert!(classify_nonsingular(&SymMatrix::zeros(2), &DegreeThreshold::with_value(2, 1)).is_err());
    }

    #[test]
    fn row_support_examples() {
        for i in 0..3 {
            assert_eq!(row_null_support(&SymMatrix::identity(3), i).unwrap(), 1);
        }
        assert_eq!(row_null_support(&sym(&[vec![0, 1], vec![1, 0]]), 0).unwrap(), 1);
        assert!(row_null_support(&SymMatrix::zeros(2), 0).is_err());
    }

    #[test]
    fn row_supports_agree_with_adjugate_at_8() {
        let d = EntryDistribution::bernoulli01();
        let mut checked = 0;
        for seed in 0..200 {
            let a = sample_symmetric(8, &d, seed);
            if rank_exact(&a) < 8 {
                continue;
            }
            let adj = adjugate(&a);
            let fast = row_supports(&a);
            for i in 0..8 {
                let via_null = row_null_support(&a, i).unwrap();
                assert_eq!(via_null, crate::linalg::adjugate::adjugate_row_support(&adj, i));
                assert_eq!(via_null, fast[i]);
            }
            checked += 1;
        }
        assert!(checked > 50);
    }

    #[test]
    fn point_count_examples() {
        let e1 = vec![vec![q(1), q(0)]];
        assert_eq!(count_01_points_in_span(&e1, 2).unwrap(), 2);
        let full: Vec<Vec<BigRational>> =
            (0..5).map(|i| (0..5).map(|j| q(i64::from(i == j))).collect()).collect();
        assert_eq!(count_01_points_in_span(&full, 5).unwrap(), 32);
        assert_eq!(count_01_points_in_span(&[], 3).unwrap(), 1);
        let diag = vec![vec![q(1), q(1), q(1)]];
        assert_eq!(count_01_points_in_span(&diag, 3).unwrap(), 2);
        assert!(count_01_points_in_span(&[], 25).unwrap_err().is_guard());
        assert!(count_01_points_in_span(&e1, 3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn search_strategies_match_brute_force(n in 1usize..8, seed in any::<u64>(), bound in 1usize..9) {
            let d: EntryDistribution = "custom:0:2/3,1:1/3".parse().unwrap();
            let a = sample_symmetric(n, &d, seed).as_int_matrix();
            let by_size = min_circuit(&a, bound, CircuitSearch::BySize).unwrap();
            let by_zero = min_circuit(&a, bound, CircuitSearch::ByZeroSet).unwrap();
            prop_assert_eq!(&by_size, &by_zero);
            prop_assert_eq!(by_size.as_ref().map(|c| c.rows.clone()), brute_force_circuit(&a, bound));
            if let Some(c) = by_size {
                prop_assert!(c.combine(&a).iter().all(|x| x.is_zero()));
                prop_assert!(c.coefficients.iter().all(|x| !x.is_zero()));
            }
        }

        #[test]
        fn abnormality_is_monotone_in_threshold(n in 2usize..9, seed in any::<u64>()) {
            let a = sample_symmetric(n, &EntryDistribution::bernoulli01(), seed);
            prop_assume!(rank_exact(&a) < n);
            let mut seen = false;
            for big_n in 1..=n + 1 {
                let c = classify_singular(&a, &DegreeThreshold::with_value(n, big_n)).unwrap();
                let abnormal = c.tag == ClassTag::SingularAbnormal;
                prop_assert!(!seen || abnormal);
                seen |= abnormal;
            }
        }

        #[test]
        fn subspace_point_bound(n in 1usize..=10, d in 0usize..=5, seed in any::<u64>()) {
            let dist: EntryDistribution = "custom:-1:1/4,0:1/2,1:1/4".parse().unwrap();
            let s = sample_symmetric(n.max(d), &dist, seed);
            let basis: Vec<Vec<BigRational>> =
                (0..d.min(n)).map(|i| s.row(i)[..n].iter().map(|&x| q(x)).collect()).collect();
            let dim = if basis.is_empty() {
                0
            } else {
                let data: Vec<i64> = (0..basis.len()).flat_map(|i| s.row(i)[..n].to_vec()).collect();
                rank_exact_general(&IntMatrix::from_vec(basis.len(), n, data).unwrap())
            };
            let count = count_01_points_in_span(&basis, n).unwrap();
            prop_assert!(count <= 1u64 << dim);
        }
    }
}
