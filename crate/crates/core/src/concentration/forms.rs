use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::parse_rational;
use crate::error::{Error, Result};

/// `a_1 z_1 + ... + a_n z_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vec<BigRational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput("linear form needs at least one coefficient"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Number of coefficients with `|a_i| >= scale`.
    pub fn large_count(&self, scale: &BigRational) -> usize {
        self.coeffs.iter().filter(|c| c.abs() >= *scale).count()
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

/// Half-open `[left, left + length)`, or the single point `{left}` when the
/// length is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::bigser::rational")]
    pub left: BigRational,
    #[serde(with = "crate::bigser::rational")]
    pub length: BigRational,
}

impl Interval {
    pub fn point(c: BigRational) -> Self {
        Self {
            left: c,
            length: BigRational::zero(),
        }
    }

    pub fn point_int(c: i64) -> Self {
        Self::point(BigRational::from_integer(c.into()))
    }

    pub fn half_open(left: BigRational, length: BigRational) -> Result<Self> {
        if length.is_negative() {
            return Err(Error::Config(format!("interval length {length} is negative")));
        }
        Ok(Self { left, length })
    }

    pub fn is_point(&self) -> bool {
        self.length.is_zero()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        if self.is_point() {
            *x == self.left
        } else {
            *x >= self.left && *x < &self.left + &self.length
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{{{}}}", self.left)
        } else {
            write!(f, "[{}, {})", self.left, &self.left + &self.length)
        }
    }
}

/// Parses the `Display` form: `{c}` or `[a, b)`.
impl std::str::FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an interval: {s:?}"));
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            return Ok(Interval::point(parse_rational(inner.trim())?));
        }
        let inner = s.strip_prefix('[').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let left = parse_rational(a.trim())?;
        let right = parse_rational(b.trim())?;
        Interval::half_open(left.clone(), right - left)
    }
}

/// `Σ c_{i_1..i_k} z_{i_1} ... z_{i_k}` over `n` variables (indices from 0).
///
/// Index tuples are stored as given; `(0, 1)` and `(1, 0)` are distinct
/// terms that both contribute `z_0 z_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, BigRational>,
}

impl PolyForm {
    pub fn new(n: usize, degree: usize, terms: BTreeMap<Vec<usize>, BigRational>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Config("polynomial degree must be at least 1".into()));
        }
        for idx in terms.keys() {
            if idx.len() != degree {
                return Err(Error::DimensionMismatch {
                    expected: degree,
                    found: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad,
                });
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { n, degree, terms })
    }

    /// `Σ_ij c[i][j] z_i z_j`.
    pub fn quadratic(c: &[Vec<i64>]) -> Result<Self> {
        let n = c.len();
        let mut terms = BTreeMap::new();
        for (i, row) in c.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    terms.insert(vec![i, j], BigRational::from_integer(v.into()));
                }
            }
        }
        Self::new(n, 2, terms)
    }

    pub fn linear(f: &LinearForm) -> Self {
        let terms = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (vec![i], c.clone()))
            .collect();
        Self::new(f.len(), 1, terms).expect("valid linear form")
    }

    /// The zero form of the given degree.
    pub fn zero(n: usize, degree: usize) -> Self {
        Self::new(n, degree, BTreeMap::new()).expect("valid zero form")
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, BigRational> {
        &self.terms
    }

    /// Symmetrized pair coefficient `(c_ij + c_ji) / 2` for a quadratic form.
    pub fn symmetric_coupling(&self, i: usize, j: usize) -> BigRational {
        assert_eq!(self.degree, 2);
        let get = |a: usize, b: usize| self.terms.get(&vec![a, b]).cloned().unwrap_or_else(BigRational::zero);
        (get(i, j) + get(j, i)) / BigRational::from_integer(2.into())
    }

    pub fn evaluate(&self, z: &[i64]) -> BigRational {
        self.terms
            .iter()
            .map(|(idx, c)| {
                let prod: i128 = idx.iter().map(|&i| z[i] as i128).product();
                c * BigRational::from_integer(prod.into())
            })
            .sum()
    }

    /// Integer-coefficient copy with a common denominator, for fast
    /// evaluation. Fails when values could leave `i128` for the given atom
    /// magnitude.
    pub fn compile(&self, max_abs_atom: i64) -> Result<CompiledForm> {
        let scale = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut bound = BigInt::zero();
        let atom_pow = BigInt::from(max_abs_atom.max(1)).pow(self.degree as u32);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (idx, c) in &self.terms {
            let v = c.numer() * (&scale / c.denom());
            bound += v.abs() * &atom_pow;
            terms.push((idx.clone(), v));
        }
        if bound.bits() > 125 {
            return Err(Error::Capability(
                "form values exceed the 125-bit evaluation range".into(),
            ));
        }
        let terms: Vec<(Vec<usize>, i128)> = terms
            .into_iter()
            .map(|(idx, v)| (idx, v.to_i128().expect("bounded")))
            .collect();
        let dense = (self.degree == 2).then(|| {
            let mut m = vec![0i128; self.n * self.n];
            for (idx, v) in &terms {
                m[idx[0] * self.n + idx[1]] += v;
            }
            m
        });
        Ok(CompiledForm {
            n: self.n,
            terms,
            dense,
            scale,
        })
    }
}

/// A form scaled to integer coefficients: `f = value / scale`.
#[derive(Debug, Clone)]
pub struct CompiledForm {
    n: usize,
    terms: Vec<(Vec<usize>, i128)>,
    dense: Option<Vec<i128>>,
    scale: BigInt,
}

impl CompiledForm {
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// `scale * f(z)`.
    #[inline]
    pub fn scaled_value(&self, z: &[i64], nz: &mut Vec<usize>) -> i128 {
        if let Some(m) = &self.dense {
            nz.clear();
            nz.extend((0..self.n).filter(|&i| z[i] != 0));
            let mut acc = 0i128;
            for &i in nz.iter() {
                let row = &m[i * self.n..(i + 1) * self.n];
                let mut s = 0i128;
                for &j in nz.iter() {
                    s += row[j] * z[j] as i128;
                }
                acc += s * z[i] as i128;
            }
            return acc;
        }
        self.terms
            .iter()
            .map(|(idx, c)| idx.iter().fold(*c, |acc, &i| acc * z[i] as i128))
            .sum()
    }

    pub fn to_rational(&self, v: i128) -> BigRational {
        BigRational::new(BigInt::from(v), self.scale.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn interval_membership() {
        let i = Interval::half_open(q(0, 1), q(1, 1)).unwrap();
        assert!(i.contains(&q(0, 1)));
        assert!(i.contains(&q(1, 2)));
        assert!(!i.contains(&q(1, 1)));
        let p = Interval::point_int(2);
        assert!(p.contains(&q(2, 1)) && !p.contains(&q(3, 1)));
        assert!(Interval::half_open(q(0, 1), q(-1, 1)).is_err());
        assert_eq!(i.to_string(), "[0, 1)");
        assert_eq!(p.to_string(), "{2}");
    }

    #[test]
    fn poly_validation() {
        let mut t = BTreeMap::new();
        t.insert(vec![0, 3], q(1, 1));
        assert!(PolyForm::new(3, 2, t.clone()).is_err());
        assert!(PolyForm::new(4, 3, t.clone()).is_err());
        assert!(PolyForm::new(4, 2, t).is_ok());
        assert!(LinearForm::new(vec![]).is_err());
    }

    #[test]
    fn compiled_matches_rational_evaluation() {
        let mut t = BTreeMap::new();
        t.insert(vec![0, 1], q(1, 2));
        t.insert(vec![1, 1], q(-3, 1));
        t.insert(vec![2, 0], q(2, 3));
        let f = PolyForm::new(3, 2, t).unwrap();
        let c = f.compile(2).unwrap();
        let mut nz = Vec::new();
        for z in [[0, 0, 0], [1, 1, 1], [-1, 2, 1], [2, -2, 0]] {
            assert_eq!(c.to_rational(c.scaled_value(&z, &mut nz)), f.evaluate(&z));
        }
        let mut t = BTreeMap::new();
        t.insert(vec![0, 1, 2], q(5, 1));
        let cubic = PolyForm::new(3, 3, t).unwrap();
        let c = cubic.compile(1).unwrap();
        assert_eq!(c.scaled_value(&[1, 1, -1], &mut nz), -5);
    }

    #[test]
    fn symmetric_coupling_averages() {
        let f = PolyForm::quadratic(&[vec![0, 2], vec![0, 0]]).unwrap();
        assert_eq!(f.symmetric_coupling(0, 1), q(1, 1));
        assert_eq!(f.symmetric_coupling(1, 0), q(1, 1));
    }
}
