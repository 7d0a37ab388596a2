//! Singularity probability and determinant growth of independent samples.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::EntryDistribution;
use crate::error::{Error, Result};
use crate::linalg::exact::{eliminate, ln_abs};
use crate::matrix::{MatrixModel, SymMatrix};
use crate::seed::{unit_rng, Domain};

/// Trials per work unit.
const BATCH: u64 = 4096;
/// Largest `log2` of the number of matrices enumerated exhaustively.
pub const EXHAUSTIVE_MAX_LOG2: u32 = 28;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub n: usize,
    pub trials: u64,
    pub singular_count: u64,
    #[serde(with = "crate::bigser::rational")]
    pub p_hat: BigRational,
    pub stderr: f64,
    /// Mean of `ln|det| / (n ln n)` over the non-singular samples; absent
    /// for `n = 1` or when every sample was singular.
    pub mean_log_det_scaled: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    trials: u64,
    singular: u64,
    log_det_sum: f64,
}

impl Tally {
    fn record(&mut self, a: &SymMatrix) {
        self.trials += 1;
        let det = eliminate(a.entries(), a.n(), a.n()).det.expect("square");
        if det.is_zero() {
            self.singular += 1;
        } else {
            self.log_det_sum += ln_abs(&det);
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.singular += o.singular;
        self.log_det_sum += o.log_det_sum;
        self
    }

    fn into_row(self, n: usize, exact: bool) -> SurveyRow {
        let p = self.singular as f64 / self.trials as f64;
        let nonsingular = self.trials - self.singular;
        let scale = n as f64 * (n as f64).ln();
        SurveyRow {
            n,
            trials: self.trials,
            singular_count: self.singular,
            p_hat: BigRational::new(BigInt::from(self.singular), BigInt::from(self.trials)),
            stderr: if exact { 0.0 } else { (p * (1.0 - p) / self.trials as f64).sqrt() },
            mean_log_det_scaled: (nonsingular > 0 && n > 1).then(|| self.log_det_sum / nonsingular as f64 / scale),
        }
    }
}

/// Unit index for batch `b` at dimension `n`.
fn unit_index(n: usize, b: u64) -> u64 {
    ((n as u64) << 40) | b
}

/// Samples `trials` independent `Q_n` for each `n` in `ns` and certifies
/// each one exactly.
///
/// Batches of trials are the work units; their seeds come from
/// `(seed, n, batch)` in the survey domain, and tallies are merged in
/// batch order, so the rows do not depend on the thread count.
pub fn survey_singularity(ns: &[usize], trials: u64, dist: &EntryDistribution, seed: u64) -> Result<Vec<SurveyRow>> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let model = MatrixModel::iid(dist.clone());
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Config("dimensions must be positive".into()));
            }
            let batches = trials.div_ceil(BATCH);
            let tallies: Vec<Tally> = (0..batches)
                .into_par_iter()
                .map(|b| {
                    let mut rng = unit_rng(seed, Domain::Survey, unit_index(n, b));
                    let count = BATCH.min(trials - b * BATCH);
                    let mut t = Tally::default();
                    for _ in 0..count {
                        t.record(&model.sample_with(n, &mut rng));
                    }
                    t
                })
                .collect();
            Ok(tallies.into_iter().fold(Tally::default(), Tally::merge).into_row(n, false))
        })
        .collect()
}

/// Determinant-growth survey with `±1` entries.
pub fn det_growth_survey(ns: &[usize], trials: u64, seed: u64) -> Result<Vec<SurveyRow>> {
    survey_singularity(ns, trials, &EntryDistribution::rademacher(), seed)
}

fn check_exhaustive(n: usize, dist: &EntryDistribution) -> Result<(u64, usize)> {
    if n == 0 {
        return Err(Error::Config("dimensions must be positive".into()));
    }
    if !dist.is_uniform() {
        return Err(Error::Capability(format!(
            "exhaustive enumeration needs a uniform distribution, got {dist}"
        )));
    }
    let k = dist.atoms().len() as u64;
    let cells = n * (n + 1) / 2;
    let log2 = cells as f64 * (k as f64).log2();
    if log2 > EXHAUSTIVE_MAX_LOG2 as f64 + 1e-9 {
        return Err(Error::GuardExceeded {
            what: "log2 of matrices to enumerate",
            got: log2.ceil() as u128,
            limit: EXHAUSTIVE_MAX_LOG2 as u128,
        });
    }
    Ok((k.pow(cells as u32), cells))
}

/// Survey row over every symmetric matrix with entries from a uniform
/// distribution: `p_hat` is the exact singular fraction.
pub fn survey_exhaustive(n: usize, dist: &EntryDistribution) -> Result<SurveyRow> {
    let (total, cells) = check_exhaustive(n, dist)?;
    let values: Vec<i64> = dist.values().collect();
    let k = values.len() as u64;
    const CHUNK: u64 = 1 << 14;
    let tallies: Vec<Tally> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            let mut upper = vec![0i64; cells];
            for idx in c * CHUNK..(c * CHUNK + CHUNK).min(total) {
                let mut x = idx;
                for u in upper.iter_mut() {
                    *u = values[(x % k) as usize];
                    x /= k;
                }
                t.record(&SymMatrix::from_upper(n, &upper).expect("sized"));
            }
            t
        })
        .collect();
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge).into_row(n, true))
}

/// Exact probability that a uniform symmetric 0/1 matrix of size `n` is
/// singular, by enumeration of all `2^(n(n+1)/2)` matrices.
pub fn exhaustive_singularity(n: usize) -> Result<BigRational> {
    Ok(survey_exhaustive(n, &EntryDistribution::bernoulli01())?.p_hat)
}

impl SurveyRow {
    pub fn p_hat_f64(&self) -> f64 {
        self.p_hat.to_f64().unwrap_or(f64::NAN)
    }
}
