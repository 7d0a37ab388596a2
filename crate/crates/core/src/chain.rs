//! The nested random chain `Q_1 ⊂ Q_2 ⊂ ...`.
//!
//! `Q_{n+1}` borders `Q_n` with a fresh random column and corner entry, so
//! `rank(Q_n) <= rank(Q_{n+1}) <= rank(Q_n) + 2` at every step. The chain
//! records ranks, the functional `X_n` (zero when `Q_n` is non-singular,
//! `1.1^(n - rank)` otherwise) and, up to a dimension guard, the structural
//! class of each `Q_n`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::EntryDistribution;
use crate::error::{Error, Result};
use crate::linalg::certify_rank;
use crate::matrix::{augment, AugmentationVector, MatrixModel, SymMatrix};
use crate::seed::{derive, unit_rng, Domain};
use crate::structure::{classify, compute_n, ClassTag, StructuralClass};

/// Default dimension guard for classification inside chains.
pub const DEFAULT_CLASSIFY_UP_TO: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub n: usize,
    pub rank: usize,
    /// Rank gain over the previous step; absent at `n = 1`.
    pub increment: Option<u8>,
    /// `None` when the step was not classified.
    pub class: Option<StructuralClass>,
    pub x_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub seed: u64,
    pub distribution: EntryDistribution,
    pub epsilon: f64,
    pub steps: Vec<ChainStep>,
}

/// `X_n` for a matrix of dimension `n` and the given rank.
pub fn x_value(n: usize, rank: usize) -> f64 {
    if rank >= n {
        0.0
    } else {
        1.1f64.powi((n - rank) as i32)
    }
}

/// Parameters of one chain run.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub n_max: usize,
    pub dist: EntryDistribution,
    pub epsilon: f64,
    /// Steps with `n` above this are left unclassified.
    pub classify_up_to: usize,
    /// If set, classify only these dimensions (still subject to the guard).
    pub classify_only: Option<BTreeSet<usize>>,
    pub primes: Vec<u64>,
}

impl ChainConfig {
    pub fn new(n_max: usize, dist: EntryDistribution, epsilon: f64) -> Self {
        Self {
            n_max,
            dist,
            epsilon,
            classify_up_to: DEFAULT_CLASSIFY_UP_TO,
            classify_only: None,
            primes: crate::linalg::default_primes(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        if self.primes.is_empty() {
            return Err(Error::EmptyPrimes);
        }
        Ok(())
    }

    fn wants_class(&self, n: usize) -> bool {
        n <= self.classify_up_to && self.classify_only.as_ref().is_none_or(|s| s.contains(&n))
    }
}

/// Runs one chain to `cfg.n_max`, drawing all randomness from `seed`.
///
/// The rank step condition is checked on every step; a violation is
/// reported as [`Error::InvariantViolation`] rather than recorded.
pub fn run_chain(cfg: &ChainConfig, seed: u64) -> Result<ChainTrace> {
    cfg.validate()?;
    let model = MatrixModel::iid(cfg.dist.clone());
    let mut rng = unit_rng(seed, Domain::Chain, 0);
    let mut q = SymMatrix::from_rows(&[vec![cfg.dist.sample(&mut rng)]])?;
    let mut steps: Vec<ChainStep> = Vec::with_capacity(cfg.n_max);
    loop {
        let n = q.n();
        let rank = certify_rank(&q, &cfg.primes, false)?.rank;
        let increment = match steps.last() {
            None => None,
            Some(prev) => {
                if rank < prev.rank || rank > prev.rank + 2 {
                    return Err(Error::InvariantViolation(format!(
                        "rank went from {} to {} at n = {n}",
                        prev.rank, rank
                    )));
                }
                Some((rank - prev.rank) as u8)
            }
        };
        let class = if cfg.wants_class(n) {
            Some(classify(&q, &compute_n(n, cfg.epsilon)?)?)
        } else {
            None
        };
        steps.push(ChainStep {
            n,
            rank,
            increment,
            class,
            x_value: x_value(n, rank),
        });
        if n == cfg.n_max {
            break;
        }
        let v = AugmentationVector::sample(n, &model, &mut rng);
        q = augment(&q, &v)?;
    }
    Ok(ChainTrace {
        seed,
        distribution: cfg.dist.clone(),
        epsilon: cfg.epsilon,
        steps,
    })
}

/// Seed of chain `index` under `master`.
pub fn chain_seed(master: u64, index: u64) -> u64 {
    derive(master, Domain::Chain, index)
}

/// `count` independent chains; chain `i` uses [`chain_seed`]`(master, i)`.
pub fn run_chains(cfg: &ChainConfig, master: u64, count: u64) -> Result<Vec<ChainTrace>> {
    (0..count)
        .into_par_iter()
        .map(|i| run_chain(cfg, chain_seed(master, i)))
        .collect()
}

/// Re-derives every recorded quantity that a trace can be checked against
/// without the matrices: consecutive dimensions, rank bounds, increments,
/// and `X_n`.
pub fn check_trace(t: &ChainTrace) -> Result<()> {
    let bad = |m: String| Err(Error::InvariantViolation(m));
    for (i, s) in t.steps.iter().enumerate() {
        if s.n != i + 1 {
            return bad(format!("step {i} has dimension {}", s.n));
        }
        if s.rank > s.n {
            return bad(format!("rank {} exceeds n = {}", s.rank, s.n));
        }
        let expected = if i == 0 { None } else { Some(s.rank as i64 - t.steps[i - 1].rank as i64) };
        if s.increment.map(|x| x as i64) != expected || expected.is_some_and(|d| !(0..=2).contains(&d)) {
            return bad(format!("increment {:?} at n = {}", s.increment, s.n));
        }
        if s.x_value != x_value(s.n, s.rank) {
            return bad(format!("X = {} at n = {}, rank = {}", s.x_value, s.n, s.rank));
        }
    }
    Ok(())
}

/// Counts of the next increment, keyed by the predecessor's dimension and
/// class. Counts add, so stats of disjoint trace sets merge into the stats
/// of their union.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementStats {
    counts: BTreeMap<(usize, ClassTag), [u64; 3]>,
}

/// One line of an increment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementRow {
    /// Predecessor dimension, or `None` when pooled over dimensions.
    pub n: Option<usize>,
    pub class: ClassTag,
    pub increment: u8,
    pub count: u64,
    pub total: u64,
    pub frequency: f64,
    pub stderr: f64,
}

impl IncrementStats {
    pub fn add_trace(&mut self, t: &ChainTrace) {
        for w in t.steps.windows(2) {
            let (Some(class), Some(inc)) = (&w[0].class, w[1].increment) else {
                continue;
            };
            self.counts.entry((w[0].n, class.tag)).or_default()[inc as usize] += 1;
        }
    }

    pub fn merge(&mut self, other: &IncrementStats) {
        for (k, c) in &other.counts {
            let e = self.counts.entry(*k).or_default();
            for i in 0..3 {
                e[i] += c[i];
            }
        }
    }

    /// Counts of increments 0, 1, 2 after a step of dimension `n` and class `tag`.
    pub fn counts_at(&self, n: usize, tag: ClassTag) -> [u64; 3] {
        self.counts.get(&(n, tag)).copied().unwrap_or_default()
    }

    /// Counts pooled over all dimensions.
    pub fn counts_for(&self, tag: ClassTag) -> [u64; 3] {
        let mut out = [0; 3];
        for ((_, t), c) in &self.counts {
            if *t == tag {
                for i in 0..3 {
                    out[i] += c[i];
                }
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Frequency and binomial standard error of `increment` after `(n, tag)`.
    pub fn frequency(&self, n: usize, tag: ClassTag, increment: u8) -> Option<(f64, f64)> {
        freq(self.counts_at(n, tag), increment).map(|(f, s, _)| (f, s))
    }

    /// Table rows: per dimension when `per_n`, else pooled by class.
    pub fn rows(&self, per_n: bool) -> Vec<IncrementRow> {
        let keyed: Vec<(Option<usize>, ClassTag, [u64; 3])> = if per_n {
            self.counts.iter().map(|((n, t), c)| (Some(*n), *t, *c)).collect()
        } else {
            let tags: BTreeSet<ClassTag> = self.counts.keys().map(|k| k.1).collect();
            tags.into_iter().map(|t| (None, t, self.counts_for(t))).collect()
        };
        let mut out = Vec::new();
        for (n, class, c) in keyed {
            for inc in 0..3u8 {
                let (frequency, stderr, total) = freq(c, inc).expect("non-empty cell");
                out.push(IncrementRow {
                    n,
                    class,
                    increment: inc,
                    count: c[inc as usize],
                    total,
                    frequency,
                    stderr,
                });
            }
        }
        out
    }
}

fn freq(c: [u64; 3], inc: u8) -> Option<(f64, f64, u64)> {
    let total: u64 = c.iter().sum();
    if total == 0 {
        return None;
    }
    let f = c[inc as usize] as f64 / total as f64;
    Some((f, (f * (1.0 - f) / total as f64).sqrt(), total))
}

/// Conditional increment statistics over classified steps. Unclassified
/// predecessors are skipped.
pub fn conditional_increment_stats(traces: &[ChainTrace]) -> Result<IncrementStats> {
    if traces.is_empty() {
        return Err(Error::EmptyInput("traces"));
    }
    let mut s = IncrementStats::default();
    for t in traces {
        s.add_trace(t);
    }
    Ok(s)
}

/// Mean of `X_n` over chains reaching dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XDecayRow {
    pub n: usize,
    pub chains: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Per-dimension mean of `X_n` with its standard error.
pub fn x_decay_estimate(traces: &[ChainTrace]) -> Vec<XDecayRow> {
    let mut acc: BTreeMap<usize, (u64, f64, f64)> = BTreeMap::new();
    for t in traces {
        for s in &t.steps {
            let e = acc.entry(s.n).or_default();
            e.0 += 1;
            e.1 += s.x_value;
            e.2 += s.x_value * s.x_value;
        }
    }
    acc.into_iter()
        .map(|(n, (k, sum, sq))| {
            let mean = sum / k as f64;
            let var = if k > 1 { ((sq - k as f64 * mean * mean) / (k - 1) as f64).max(0.0) } else { 0.0 };
            XDecayRow {
                n,
                chains: k,
                mean,
                stderr: (var / k as f64).sqrt(),
            }
        })
        .collect()
}
