//! Maximum point mass of a family of forms as the size grows.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::exact::{law_max_atom, poly_law};
use super::forms::{Interval, PolyForm};
use super::montecarlo::monte_carlo_law;
use super::{default_bound, describe, ConcentrationReport, Method, Probability};
use crate::dist::EntryDistribution;
use crate::error::{Error, Result};
use crate::seed::{derive, Domain};

/// A form for every size `m`.
pub trait FormFamily {
    fn name(&self) -> String;
    fn form(&self, m: usize) -> Result<PolyForm>;
}

/// Built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `Σ_{i≠j} z_i z_j`.
    AllOnesOffDiagonal,
    /// `Σ_i z_i^2`.
    DiagonalOnly,
    /// `Σ_i z_i`.
    LinearOnes,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-ones" | "all-ones-off-diagonal" => Ok(Family::AllOnesOffDiagonal),
            "diagonal" | "diagonal-only" => Ok(Family::DiagonalOnly),
            "linear-ones" => Ok(Family::LinearOnes),
            other => Err(Error::Parse(format!(
                "unknown family {other:?} (expected all-ones, diagonal or linear-ones)"
            ))),
        }
    }
}

impl FormFamily for Family {
    fn name(&self) -> String {
        match self {
            Family::AllOnesOffDiagonal => "all-ones-off-diagonal",
            Family::DiagonalOnly => "diagonal-only",
            Family::LinearOnes => "linear-ones",
        }
        .to_string()
    }

    fn form(&self, m: usize) -> Result<PolyForm> {
        let one = BigRational::one();
        let mut terms = BTreeMap::new();
        let degree = match self {
            Family::AllOnesOffDiagonal => {
                for i in 0..m {
                    for j in 0..m {
                        if i != j {
                            terms.insert(vec![i, j], one.clone());
                        }
                    }
                }
                2
            }
            Family::DiagonalOnly => {
                for i in 0..m {
                    terms.insert(vec![i, i], one.clone());
                }
                2
            }
            Family::LinearOnes => {
                for i in 0..m {
                    terms.insert(vec![i], one.clone());
                }
                1
            }
        };
        PolyForm::new(m, degree, terms)
    }
}

#[derive(Debug, Clone)]
pub struct LoExperiment {
    pub sizes: Vec<usize>,
    pub dist: EntryDistribution,
    pub trials: u64,
    pub seed: u64,
    /// Sizes up to this are enumerated exactly.
    pub exact_limit: usize,
}

/// For each size, the largest point mass of the family's form and the
/// bound at that size (unit constant). Sizes within `exact_limit` are
/// exact; the others use Monte Carlo with the most frequent sampled value
/// as the candidate atom.
pub fn lo_experiment<F: FormFamily + ?Sized>(family: &F, cfg: &LoExperiment) -> Result<Vec<ConcentrationReport>> {
    cfg.sizes
        .iter()
        .map(|&m| {
            let f = family.form(m)?;
            let (method, value, probability) = if m <= cfg.exact_limit {
                let law = poly_law(&f, &cfg.dist)?;
                let (v, p) = law_max_atom(&law).expect("non-empty law");
                (Method::ExactEnum, v, Probability::Exact { value: p })
            } else {
                let seed = derive(cfg.seed, Domain::Forms, m as u64);
                let law = monte_carlo_law(&f, &cfg.dist, cfg.trials, seed)?;
                let (v, mean, stderr) = law.max_atom().expect("at least one trial");
                (Method::MonteCarlo, v, Probability::Estimate { mean, stderr })
            };
            let interval = Interval::point(value);
            let bound = default_bound(&f, &interval);
            Ok(ConcentrationReport {
                form: format!("{} {}", family.name(), describe(&f)),
                size: m,
                interval,
                method,
                probability,
                bound,
                hypothesis_met: bound.is_some(),
            })
        })
        .collect()
}

/// Constant making the bound tight at the first report.
pub fn fit_constant(reports: &[ConcentrationReport]) -> Option<f64> {
    let first = reports.first()?;
    Some(first.probability.point() / first.bound?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn all_ones_at_four() {
        let cfg = LoExperiment {
            sizes: vec![4],
            dist: EntryDistribution::bernoulli01(),
            trials: 1,
            seed: 0,
            exact_limit: 16,
        };
        let r = lo_experiment(&Family::AllOnesOffDiagonal, &cfg).unwrap();
        // Q = s(s-1) with s ~ Bin(4, 1/2): Q=2 iff s=2, probability 6/16.
        assert_eq!(
            r[0].probability,
            Probability::Exact {
                value: BigRational::new(BigInt::from(3), BigInt::from(8))
            }
        );
        assert_eq!(r[0].interval, Interval::point_int(2));
        assert!(r[0].hypothesis_met);
    }

    #[test]
    fn diagonal_family_flags_unmet_hypothesis() {
        let cfg = LoExperiment {
            sizes: vec![3, 5],
            dist: EntryDistribution::bernoulli01(),
            trials: 1000,
            seed: 0,
            exact_limit: 3,
        };
        let r = lo_experiment(&Family::DiagonalOnly, &cfg).unwrap();
        assert!(r.iter().all(|x| !x.hypothesis_met && x.bound.is_none()));
        assert_eq!(r[1].method, Method::MonteCarlo);
    }
}
