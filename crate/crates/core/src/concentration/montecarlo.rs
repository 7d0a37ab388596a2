//! Seeded Monte Carlo estimates of form laws.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::forms::{CompiledForm, Interval, PolyForm};
use crate::dist::EntryDistribution;
use crate::error::{Error, Result};
use crate::seed::{unit_rng, Domain};

/// Trials per independently seeded batch.
pub const BATCH: u64 = 4096;

/// Empirical counts of `scale * f` over `trials` draws.
#[derive(Debug, Clone)]
pub struct EmpiricalLaw {
    pub counts: BTreeMap<i128, u64>,
    pub trials: u64,
    compiled: CompiledForm,
}

fn estimate(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl EmpiricalLaw {
    /// `(estimate, standard error)` of `P(f ∈ I)`.
    pub fn mass_in(&self, interval: &Interval) -> (f64, f64) {
        let hits = self
            .counts
            .iter()
            .filter(|(v, _)| interval.contains(&self.compiled.to_rational(**v)))
            .map(|(_, c)| c)
            .sum();
        estimate(hits, self.trials)
    }

    /// The most frequent value with its estimate and standard error; the
    /// smallest value wins ties.
    pub fn max_atom(&self) -> Option<(num_rational::BigRational, f64, f64)> {
        let mut best: Option<(i128, u64)> = None;
        for (&v, &c) in &self.counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((v, c));
            }
        }
        best.map(|(v, c)| {
            let (p, se) = estimate(c, self.trials);
            (self.compiled.to_rational(v), p, se)
        })
    }
}

/// Draws `trials` independent entry vectors in batches of [`BATCH`]; batch
/// `b` uses the generator derived from `(seed, b)`, so the counts do not
/// depend on the number of worker threads.
pub fn monte_carlo_law(f: &PolyForm, dist: &EntryDistribution, trials: u64, seed: u64) -> Result<EmpiricalLaw> {
    if trials == 0 {
        return Err(Error::Config("Monte Carlo needs at least one trial".into()));
    }
    let max_abs = dist.values().map(|v| v.abs()).max().unwrap_or(1);
    let compiled = f.compile(max_abs)?;
    let n = f.num_vars();
    let batches = trials.div_ceil(BATCH);
    let partial: Vec<BTreeMap<i128, u64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = unit_rng(seed, Domain::Concentration, b);
            let count = BATCH.min(trials - b * BATCH);
            let mut z = vec![0i64; n];
            let mut nz = Vec::with_capacity(n);
            let mut counts = BTreeMap::new();
            for _ in 0..count {
                for x in z.iter_mut() {
                    *x = dist.sample(&mut rng);
                }
                *counts.entry(compiled.scaled_value(&z, &mut nz)).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut counts = BTreeMap::new();
    for part in partial {
        for (v, c) in part {
            *counts.entry(v).or_insert(0) += c;
        }
    }
    Ok(EmpiricalLaw {
        counts,
        trials,
        compiled,
    })
}
