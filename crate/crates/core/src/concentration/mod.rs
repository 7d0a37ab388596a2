//! Concentration of linear, quadratic and higher-degree forms in
//! independent entries: exact laws, Monte Carlo estimates, bounds and the
//! decoupling inequality.

pub mod bounds;
pub mod decoupling;
pub mod exact;
pub mod experiment;
pub mod forms;
pub mod montecarlo;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use bounds::{erdos_bound, greedy_partition, poly_lo_exponent, quad_lo_bound, QuadPartition};
pub use decoupling::{decoupling_check, DecouplingOutcome, ProductDistribution};
pub use exact::atom_linear_exact;
pub use experiment::{fit_constant, lo_experiment, Family, FormFamily, LoExperiment};
pub use forms::{Interval, LinearForm, PolyForm};

use crate::dist::EntryDistribution;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ExactDp,
    ExactEnum,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactDp => "ExactDP",
            Method::ExactEnum => "ExactEnum",
            Method::MonteCarlo => "MonteCarlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Probability {
    Exact {
        #[serde(with = "crate::bigser::rational")]
        value: BigRational,
    },
    Estimate { mean: f64, stderr: f64 },
}

impl Probability {
    pub fn point(&self) -> f64 {
        match self {
            Probability::Exact { value } => exact::to_f64(value),
            Probability::Estimate { mean, .. } => *mean,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Probability::Exact { .. } => 0.0,
            Probability::Estimate { stderr, .. } => *stderr,
        }
    }

    /// Exact values in `[0, 1]`; estimates within three standard errors of it.
    pub fn is_consistent(&self) -> bool {
        match self {
            Probability::Exact { value } => !value.is_negative() && *value <= BigRational::one(),
            Probability::Estimate { mean, stderr } => {
                mean + 3.0 * stderr >= 0.0 && mean - 3.0 * stderr <= 1.0
            }
        }
    }
}

/// Probability of a form landing in an interval, with the matching bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub form: String,
    /// Variable count of the form.
    pub size: usize,
    pub interval: Interval,
    pub method: Method,
    pub probability: Probability,
    /// Theoretical bound at this size, when its hypotheses hold.
    pub bound: Option<f64>,
    pub hypothesis_met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomMode {
    ExactEnum,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Bound matching a form and interval, with unit constant where the bound
/// is an `O(.)` statement:
/// degree 1 uses the sharp linear bound (non-zero coefficients for point
/// intervals, `|a_i| >= 1` for intervals of length at most 1), degree 2 the
/// quadratic bound over the greedy partition. Other cases have none.
pub fn default_bound(f: &PolyForm, interval: &Interval) -> Option<f64> {
    let one = BigRational::one();
    match f.degree() {
        1 => {
            let coeffs: Vec<BigRational> = (0..f.num_vars())
                .map(|i| f.terms().get(&vec![i]).cloned().unwrap_or_else(BigRational::zero))
                .collect();
            let lf = LinearForm::new(coeffs).ok()?;
            let k = if interval.is_point() {
                lf.nonzero_count()
            } else if interval.length <= one {
                lf.large_count(&one)
            } else {
                return None;
            };
            (k >= 1).then(|| exact::to_f64(&erdos_bound(k as u64).expect("k >= 1")))
        }
        2 => {
            let p = greedy_partition(f, &one)?;
            quad_lo_bound(p.s.len(), &p.d_values, 1.0).ok()
        }
        _ => None,
    }
}

/// `P(f ∈ I)` by full enumeration or by seeded Monte Carlo.
pub fn atom_poly(
    f: &PolyForm,
    interval: &Interval,
    dist: &EntryDistribution,
    mode: AtomMode,
) -> Result<ConcentrationReport> {
    let (method, probability) = match mode {
        AtomMode::ExactEnum => {
            let law = exact::poly_law(f, dist)?;
            (
                Method::ExactEnum,
                Probability::Exact {
                    value: exact::law_mass_in(&law, interval),
                },
            )
        }
        AtomMode::MonteCarlo { trials, seed } => {
            let law = montecarlo::monte_carlo_law(f, dist, trials, seed)?;
            let (mean, stderr) = law.mass_in(interval);
            (Method::MonteCarlo, Probability::Estimate { mean, stderr })
        }
    };
    let bound = default_bound(f, interval);
    Ok(ConcentrationReport {
        form: describe(f),
        size: f.num_vars(),
        interval: interval.clone(),
        method,
        probability,
        bound,
        hypothesis_met: bound.is_some(),
    })
}

pub fn describe(f: &PolyForm) -> String {
    format!("poly(n={}, degree={}, terms={})", f.num_vars(), f.degree(), f.terms().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn atom_poly_exact_examples() {
        let b = EntryDistribution::bernoulli01();
        let f = PolyForm::quadratic(&[vec![0, 1], vec![0, 0]]).unwrap();
        let r = atom_poly(&f, &Interval::point_int(0), &b, AtomMode::ExactEnum).unwrap();
        assert_eq!(r.probability, Probability::Exact { value: q(3, 4) });
        assert_eq!(r.method, Method::ExactEnum);
        let r = atom_poly(&f, &Interval::point_int(1), &EntryDistribution::rademacher(), AtomMode::ExactEnum).unwrap();
        assert_eq!(r.probability, Probability::Exact { value: q(1, 2) });
        let z = PolyForm::zero(4, 2);
        let r = atom_poly(&z, &Interval::point_int(0), &b, AtomMode::ExactEnum).unwrap();
        assert_eq!(r.probability, Probability::Exact { value: q(1, 1) });
        assert!(!r.hypothesis_met);
    }

    #[test]
    fn exact_enum_guard() {
        let f = PolyForm::zero(25, 2);
        let r = atom_poly(&f, &Interval::point_int(0), &EntryDistribution::bernoulli01(), AtomMode::ExactEnum);
        assert!(r.unwrap_err().is_guard());
    }

    #[test]
    fn monte_carlo_report_is_consistent() {
        let f = PolyForm::quadratic(&[vec![0, 1], vec![1, 0]]).unwrap();
        let r = atom_poly(
            &f,
            &Interval::point_int(0),
            &EntryDistribution::bernoulli01(),
            AtomMode::MonteCarlo { trials: 20_000, seed: 1 },
        )
        .unwrap();
        assert!(r.probability.is_consistent());
        assert!((r.probability.point() - 0.75).abs() < 4.0 * r.probability.stderr());
    }

    #[test]
    fn linear_bound_uses_nonzero_count_for_points() {
        let f = PolyForm::linear(&LinearForm::from_integers(&[3, 0, -2, 5]).unwrap());
        let b = default_bound(&f, &Interval::point_int(0)).unwrap();
        assert_eq!(b, 3.0 / 8.0);
    }
}
