//! Exact checks of the decoupling inequality
//! `P(E(X_1..X_k)) <= P(⋀_S E(X_1^S..X_k^S))^(1/2^k)`, where `X_i^S` is
//! `X_i` for `i ∈ S` and an independent copy `X_i'` otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{unit_rng, Domain};
use rand::Rng;

/// Upper limit on the replicated outcome space `Π |supp X_i|^2`.
pub const DECOUPLING_MAX_OUTCOMES: u128 = 1 << 24;

/// Independent finite random variables `X_1, .., X_k` taking integer values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDistribution {
    components: Vec<Vec<(i64, BigRational)>>,
    // per component: integer weights and their common denominator
    weights: Vec<Vec<u128>>,
    denominators: Vec<u128>,
}

impl ProductDistribution {
    pub fn new(marginals: Vec<Vec<(i64, BigRational)>>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::EmptyInput("at least one component"));
        }
        let mut weights = Vec::new();
        let mut denominators = Vec::new();
        for m in &marginals {
            if m.is_empty() || m.iter().any(|(_, p)| !p.is_positive()) {
                return Err(Error::InvalidDistribution(
                    "component probabilities must be positive".into(),
                ));
            }
            let total: BigRational = m.iter().map(|(_, p)| p.clone()).sum();
            if !total.is_one() {
                return Err(Error::InvalidDistribution(format!(
                    "component probabilities sum to {total}"
                )));
            }
            let l = m.iter().fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
            let d = l.to_u128().ok_or_else(|| {
                Error::Capability("component denominator exceeds 128 bits".into())
            })?;
            weights.push(
                m.iter()
                    .map(|(_, p)| (p.numer() * (&l / p.denom())).to_u128().expect("<= d"))
                    .collect(),
            );
            denominators.push(d);
        }
        Ok(Self {
            components: marginals,
            weights,
            denominators,
        })
    }

    /// Component `i` uniform on `0 .. 2^bits[i]`.
    pub fn uniform_bits(bits: &[u32]) -> Result<Self> {
        Self::new(
            bits.iter()
                .map(|&b| {
                    let size = 1i64 << b;
                    (0..size)
                        .map(|v| (v, BigRational::new(BigInt::one(), BigInt::from(size))))
                        .collect()
                })
                .collect(),
        )
    }

    /// Accepts an explicit joint table over `k`-tuples; rejects it unless it
    /// equals the product of its marginals.
    pub fn from_joint_table(table: &[(Vec<i64>, BigRational)]) -> Result<Self> {
        let k = table
            .first()
            .map(|(x, _)| x.len())
            .ok_or(Error::EmptyInput("joint table"))?;
        let mut marginals: Vec<std::collections::BTreeMap<i64, BigRational>> = vec![Default::default(); k];
        for (x, p) in table {
            if x.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: x.len(),
                });
            }
            for (i, &v) in x.iter().enumerate() {
                *marginals[i].entry(v).or_insert_with(BigRational::zero) += p;
            }
        }
        let marginals: Vec<Vec<(i64, BigRational)>> = marginals
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        let dist = Self::new(marginals)?;
        let mut joint: std::collections::HashMap<&[i64], BigRational> = Default::default();
        for (x, p) in table {
            *joint.entry(x.as_slice()).or_insert_with(BigRational::zero) += p;
        }
        let mut independent = true;
        dist.for_each(|x, _| {
            let prod: BigRational = x
                .iter()
                .zip(&dist.components)
                .map(|(v, comp)| comp.iter().find(|(a, _)| a == v).expect("in support").1.clone())
                .product();
            let got = joint.get(x).cloned().unwrap_or_else(BigRational::zero);
            independent &= got == prod;
        });
        if !independent {
            return Err(Error::DependentComponents);
        }
        Ok(dist)
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    /// Number of joint outcomes.
    pub fn outcome_count(&self) -> u128 {
        self.components.iter().map(|c| c.len() as u128).product()
    }

    /// Visits every outcome with its integer weight over `Π denominators`.
    fn for_each(&self, mut visit: impl FnMut(&[i64], u128)) {
        let k = self.arity();
        let mut digits = vec![0usize; k];
        let mut x: Vec<i64> = self.components.iter().map(|c| c[0].0).collect();
        loop {
            let w = digits
                .iter()
                .enumerate()
                .fold(1u128, |acc, (i, &d)| acc * self.weights[i][d]);
            visit(&x, w);
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                digits[i] += 1;
                if digits[i] < self.components[i].len() {
                    x[i] = self.components[i][digits[i]].0;
                    break;
                }
                digits[i] = 0;
                x[i] = self.components[i][0].0;
                i += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingOutcome {
    /// `P(E)`.
    #[serde(with = "crate::bigser::rational")]
    pub lhs: BigRational,
    /// `P(⋀_S E(X^S))`, the `2^k`-fold event.
    #[serde(with = "crate::bigser::rational")]
    pub fold_probability: BigRational,
    /// `fold_probability^(1/2^k)`, rounded; only the exact comparison is
    /// used for `holds`.
    pub rhs: f64,
    /// `lhs^(2^k) <= fold_probability`, decided exactly.
    pub holds: bool,
}

/// Checks the decoupling inequality for one event by exact enumeration.
pub fn decoupling_check<E>(joint: &ProductDistribution, event: E, k: usize) -> Result<DecouplingOutcome>
where
    E: Fn(&[i64]) -> bool,
{
    if k != joint.arity() {
        return Err(Error::DimensionMismatch {
            expected: joint.arity(),
            found: k,
        });
    }
    let outcomes = joint.outcome_count();
    let replicated = outcomes.saturating_mul(outcomes);
    if replicated > DECOUPLING_MAX_OUTCOMES {
        return Err(Error::GuardExceeded {
            what: "replicated outcomes for decoupling",
            got: replicated,
            limit: DECOUPLING_MAX_OUTCOMES,
        });
    }
    let denom: u128 = joint
        .denominators
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d).and_then(|v| v.checked_mul(d)))
        .ok_or_else(|| Error::Capability("replicated denominators exceed 128 bits".into()))?;
    let single: u128 = joint.denominators.iter().product();

    // Flatten outcomes once.
    let mut outs: Vec<(Vec<i64>, u128, bool)> = Vec::with_capacity(outcomes as usize);
    joint.for_each(|x, w| outs.push((x.to_vec(), w, event(x))));

    let lhs_w: u128 = outs.iter().filter(|o| o.2).map(|o| o.1).sum();

    let masks: Vec<u32> = (0..1u32 << k).collect();
    let mut mixed = vec![0i64; k];
    let mut fold_w: u128 = 0;
    for (x, wx, ex) in &outs {
        // S = everything: the original event must hold.
        if !ex {
            continue;
        }
        'copy: for (y, wy, ey) in &outs {
            if !ey {
                continue;
            }
            for &s in &masks {
                for i in 0..k {
                    mixed[i] = if s >> i & 1 == 1 { x[i] } else { y[i] };
                }
                if !event(&mixed) {
                    continue 'copy;
                }
            }
            fold_w += wx * wy;
        }
    }
    let lhs = BigRational::new(BigInt::from(lhs_w), BigInt::from(single));
    let fold_probability = BigRational::new(BigInt::from(fold_w), BigInt::from(denom));
    let power = 1u32 << k;
    let holds = num_traits::pow(lhs.clone(), power as usize) <= fold_probability;
    let rhs = fold_probability.to_f64().unwrap_or(f64::NAN).powf(1.0 / power as f64);
    Ok(DecouplingOutcome {
        lhs,
        fold_probability,
        rhs,
        holds,
    })
}

/// Summary of a sweep over many events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub arity: usize,
    pub events: u64,
    pub holding: u64,
    /// Smallest `fold_probability - lhs^(2^k)` seen.
    pub min_slack: f64,
}

impl SweepSummary {
    pub fn all_hold(&self) -> bool {
        self.events == self.holding
    }
}

/// Checks every event on the joint outcome space (outcomes index the bits
/// of the event mask in enumeration order). At most 2^20 events.
pub fn sweep_all_events(joint: &ProductDistribution) -> Result<SweepSummary> {
    let outcomes = joint.outcome_count();
    if outcomes > 20 {
        return Err(Error::GuardExceeded {
            what: "outcomes for an all-events sweep",
            got: outcomes,
            limit: 20,
        });
    }
    let masks = 1u64 << outcomes;
    sweep_masks(joint, 0..masks)
}

/// Checks the events given as outcome bitmasks.
pub fn sweep_masks(joint: &ProductDistribution, masks: impl IntoIterator<Item = u64>) -> Result<SweepSummary> {
    let index = outcome_index(joint);
    let k = joint.arity();
    let mut summary = SweepSummary {
        arity: k,
        events: 0,
        holding: 0,
        min_slack: f64::INFINITY,
    };
    for mask in masks {
        let out = decoupling_check(joint, |x| mask >> index(x) & 1 == 1, k)?;
        summary.events += 1;
        if out.holds {
            summary.holding += 1;
        }
        let slack = &out.fold_probability - num_traits::pow(out.lhs.clone(), 1 << k);
        summary.min_slack = summary.min_slack.min(slack.to_f64().unwrap_or(f64::NAN));
    }
    Ok(summary)
}

/// Checks `events` events drawn uniformly from all subsets of the outcome
/// space, using the generator for `seed` in the concentration domain.
pub fn sweep_random(joint: &ProductDistribution, events: u64, seed: u64) -> Result<SweepSummary> {
    let outcomes = joint.outcome_count();
    if outcomes > 64 {
        return Err(Error::GuardExceeded {
            what: "outcomes for a random-event sweep",
            got: outcomes,
            limit: 64,
        });
    }
    let mut rng = unit_rng(seed, Domain::Concentration, outcomes as u64);
    let masks: Vec<u64> = (0..events)
        .map(|_| {
            let m: u64 = rng.gen();
            if outcomes == 64 { m } else { m & ((1u64 << outcomes) - 1) }
        })
        .collect();
    sweep_masks(joint, masks)
}

/// Mixed-radix position of an outcome, first component fastest.
fn outcome_index(joint: &ProductDistribution) -> impl Fn(&[i64]) -> u64 + '_ {
    move |x: &[i64]| {
        let mut idx = 0u64;
        let mut radix = 1u64;
        for (v, comp) in x.iter().zip(&joint.components) {
            let pos = comp.iter().position(|(a, _)| a == v).expect("in support") as u64;
            idx += pos * radix;
            radix *= comp.len() as u64;
        }
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn always_true_event() {
        let j = ProductDistribution::uniform_bits(&[1, 1]).unwrap();
        let out = decoupling_check(&j, |_| true, 2).unwrap();
        assert_eq!(out.lhs, q(1, 1));
        assert_eq!(out.fold_probability, q(1, 1));
        assert_eq!(out.rhs, 1.0);
        assert!(out.holds);
    }

    #[test]
    fn equality_event() {
        let j = ProductDistribution::uniform_bits(&[1, 1]).unwrap();
        let out = decoupling_check(&j, |x| x[0] == x[1], 2).unwrap();
        assert_eq!(out.lhs, q(1, 2));
        assert_eq!(out.fold_probability, q(1, 8));
        assert!(out.holds);
    }

    #[test]
    fn all_sixteen_events_on_two_bits() {
        let j = ProductDistribution::uniform_bits(&[1, 1]).unwrap();
        let s = sweep_all_events(&j).unwrap();
        assert_eq!(s.events, 16);
        assert!(s.all_hold());
    }

    #[test]
    fn dependent_table_rejected() {
        let half = q(1, 2);
        let table = vec![(vec![0, 0], half.clone()), (vec![1, 1], half)];
        assert!(matches!(
            ProductDistribution::from_joint_table(&table),
            Err(Error::DependentComponents)
        ));
        let quarter = q(1, 4);
        let table: Vec<(Vec<i64>, BigRational)> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|x| (x.to_vec(), quarter.clone()))
            .collect();
        let j = ProductDistribution::from_joint_table(&table).unwrap();
        assert_eq!(j, ProductDistribution::uniform_bits(&[1, 1]).unwrap());
    }

    #[test]
    fn arity_and_guard() {
        let j = ProductDistribution::uniform_bits(&[1, 1]).unwrap();
        assert!(decoupling_check(&j, |_| true, 3).is_err());
        let big = ProductDistribution::uniform_bits(&[7, 6]).unwrap();
        assert!(decoupling_check(&big, |_| true, 2).unwrap_err().is_guard());
    }

    #[test]
    fn non_uniform_components() {
        let j = ProductDistribution::new(vec![
            vec![(0, q(1, 3)), (1, q(2, 3))],
            vec![(0, q(1, 5)), (1, q(4, 5))],
            vec![(5, q(1, 1))],
        ])
        .unwrap();
        let s = sweep_all_events(&j).unwrap();
        assert!(s.all_hold());
        assert_eq!(s.events, 16);
    }
}
