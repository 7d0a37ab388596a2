//! Finite atomic entry distributions with exact rational probabilities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistName {
    Bernoulli01,
    Rademacher,
    Custom,
}

/// A distribution on finitely many integers.
///
/// Atoms are kept sorted by value with distinct values; probabilities are
/// positive, sum to exactly one, and at least two atoms are present, so the
/// largest atom probability (the ρ of the distribution) is below one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryDistribution {
    name: DistName,
    atoms: Vec<(i64, BigRational)>,
    // Integer weights over the common denominator, used for exact sampling.
    weights: Vec<u64>,
    denominator: u64,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl EntryDistribution {
    /// Values 0 and 1 with probability 1/2 each.
    pub fn bernoulli01() -> Self {
        Self::build(DistName::Bernoulli01, vec![(0, ratio(1, 2)), (1, ratio(1, 2))])
            .expect("bernoulli01 is valid")
    }

    /// Values -1 and +1 with probability 1/2 each.
    pub fn rademacher() -> Self {
        Self::build(DistName::Rademacher, vec![(-1, ratio(1, 2)), (1, ratio(1, 2))])
            .expect("rademacher is valid")
    }

    /// A custom distribution. Repeated values are merged.
    pub fn custom(atoms: Vec<(i64, BigRational)>) -> Result<Self> {
        Self::build(DistName::Custom, atoms)
    }

    fn build(name: DistName, mut atoms: Vec<(i64, BigRational)>) -> Result<Self> {
        if atoms.iter().any(|(_, p)| !p.is_positive()) {
            return Err(Error::InvalidDistribution(
                "atom probabilities must be positive".into(),
            ));
        }
        atoms.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(i64, BigRational)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some((lv, lp)) if *lv == v => *lp += p,
                _ => merged.push((v, p)),
            }
        }
        let total: BigRational = merged.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if merged.len() < 2 {
            return Err(Error::InvalidDistribution(
                "at least two distinct atoms are required".into(),
            ));
        }
        let lcm = merged
            .iter()
            .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
        let denominator = lcm.to_u64().ok_or_else(|| {
            Error::InvalidDistribution("common denominator does not fit in 64 bits".into())
        })?;
        let weights = merged
            .iter()
            .map(|(_, p)| {
                (p.numer() * (&lcm / p.denom()))
                    .to_u64()
                    .expect("weight bounded by denominator")
            })
            .collect();
        Ok(Self {
            name,
            atoms: merged,
            weights,
            denominator,
        })
    }

    pub fn name(&self) -> DistName {
        self.name
    }

    pub fn atoms(&self) -> &[(i64, BigRational)] {
        &self.atoms
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.atoms.iter().map(|(v, _)| *v)
    }

    pub fn contains(&self, value: i64) -> bool {
        self.atoms.binary_search_by_key(&value, |(v, _)| *v).is_ok()
    }

    /// Integer weights of the atoms over [`Self::denominator`].
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// True when every atom has the same probability.
    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|&w| w == self.weights[0])
    }

    /// Index of a sampled atom.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.gen_range(0..self.denominator);
        for (i, &w) in self.weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        unreachable!("weights sum to the denominator")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.atoms[self.sample_index(rng)].0
    }
}

/// Largest atom probability of `dist`.
pub fn rho_of(dist: &EntryDistribution) -> BigRational {
    dist.atoms
        .iter()
        .map(|(_, p)| p)
        .max()
        .cloned()
        .unwrap_or_else(BigRational::zero)
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name {
            DistName::Bernoulli01 => f.write_str("bernoulli01"),
            DistName::Rademacher => f.write_str("rademacher"),
            DistName::Custom => {
                f.write_str("custom:")?;
                for (i, (v, p)) in self.atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}:{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `p/q` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Accepts `bernoulli01`, `rademacher` or `custom:v:p,v:p,...`.
impl FromStr for EntryDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bernoulli01" => Ok(Self::bernoulli01()),
            "rademacher" => Ok(Self::rademacher()),
            other => {
                let body = other.strip_prefix("custom:").ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown distribution {other:?} (expected bernoulli01, rademacher or custom:v:p,...)"
                    ))
                })?;
                let atoms = body
                    .split(',')
                    .map(|pair| {
                        let (v, p) = pair.split_once(':').ok_or_else(|| {
                            Error::Parse(format!("atom {pair:?} is not of the form value:probability"))
                        })?;
                        let v: i64 = v
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad atom value {v:?}")))?;
                        Ok((v, parse_rational(p)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::custom(atoms)
            }
        }
    }
}

impl Serialize for EntryDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntryDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
