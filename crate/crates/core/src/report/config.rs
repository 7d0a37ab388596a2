//! Experiment configuration shared by the command line and replayed
//! manifests.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::table::Format;
use crate::concentration::Family;
use crate::dist::EntryDistribution;
use crate::error::{Error, Result};
use crate::linalg::is_prime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Survey,
    Chain,
    Classify,
    Concentration,
    Decoupling,
    Oracle,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Survey => "survey",
            CommandKind::Chain => "chain",
            CommandKind::Classify => "classify",
            CommandKind::Concentration => "concentration",
            CommandKind::Decoupling => "decoupling",
            CommandKind::Oracle => "oracle",
        }
    }
}

/// Comma-separated list whose items are values or inclusive ranges `a..b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

impl<T: fmt::Display> Serialize for List<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, T> Deserialize<'de> for List<T>
where
    T: FromStr + Copy + Into<u64> + TryFrom<u64>,
{
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl<T> FromStr for List<T>
where
    T: FromStr + Copy + Into<u64> + TryFrom<u64>,
{
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |x: &str| Error::Parse(format!("bad list item {x:?} in {s:?}"));
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim) {
            if let Some((a, b)) = item.split_once("..") {
                let a: u64 = a.trim().parse().map_err(|_| bad(item))?;
                let b: u64 = b.trim().parse().map_err(|_| bad(item))?;
                if a > b || b - a > 1 << 20 {
                    return Err(bad(item));
                }
                for v in a..=b {
                    out.push(T::try_from(v).map_err(|_| bad(item))?);
                }
            } else {
                out.push(item.parse().map_err(|_| bad(item))?);
            }
        }
        Ok(List(out))
    }
}

impl<T: fmt::Display> fmt::Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&items.join(","))
    }
}

/// Dimensions are `usize`, which has no `From<usize> for u64`; this keeps
/// the list parser generic over the widths that do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dim(pub u32);

impl From<Dim> for u64 {
    fn from(d: Dim) -> u64 {
        d.0 as u64
    }
}

impl TryFrom<u64> for Dim {
    type Error = std::num::TryFromIntError;

    fn try_from(v: u64) -> std::result::Result<Self, Self::Error> {
        u32::try_from(v).map(Dim)
    }
}

impl FromStr for Dim {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(Dim)
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Flags accepted by every subcommand. Which ones a command uses is
/// checked by [`ExperimentConfig::validate`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default)]
pub struct RunArgs {
    /// Dimensions or form sizes, e.g. `4,6,8` or `1..6`.
    #[arg(long, value_name = "LIST")]
    pub n: Option<List<Dim>>,
    /// Largest chain dimension.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Trials per dimension (chains for `chain`, samples for Monte Carlo).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, visible_alias = "seeds")]
    pub seed: Option<u64>,
    /// `bernoulli01`, `rademacher` or `custom:v:p,...`.
    #[arg(long)]
    pub dist: Option<EntryDistribution>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Primes for modular rank, comma-separated.
    #[arg(long, value_name = "LIST")]
    pub primes: Option<List<u64>>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Enumerate every matrix instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    /// Default to `±1` entries (determinant growth).
    #[arg(long)]
    pub det_growth: bool,
    /// Classify chain steps up to this dimension.
    #[arg(long)]
    pub classify_up_to: Option<usize>,
    /// `all-ones`, `diagonal` or `linear-ones`.
    #[arg(long)]
    pub family: Option<Family>,
    /// Largest form size computed exactly.
    #[arg(long)]
    pub exact_limit: Option<usize>,
    /// Bit widths of the components for an all-events sweep, e.g. `2,2`.
    #[arg(long, value_name = "LIST")]
    pub exhaustive_bits: Option<List<u32>>,
    /// Bit widths of the components for a random-event sweep.
    #[arg(long, value_name = "LIST")]
    pub bits: Option<List<u32>>,
    /// Number of random events.
    #[arg(long)]
    pub events: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub args: RunArgs,
}

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_EXACT_LIMIT: usize = 16;

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn new(command: CommandKind, args: RunArgs) -> Self {
        Self { command, args }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.args.n.as_ref().map_or_else(Vec::new, |l| l.0.iter().map(|d| d.0 as usize).collect())
    }

    pub fn format(&self) -> Format {
        self.args.format.unwrap_or_default()
    }

    pub fn epsilon(&self) -> f64 {
        self.args.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn dist(&self) -> EntryDistribution {
        self.args.dist.clone().unwrap_or_else(|| {
            if self.args.det_growth {
                EntryDistribution::rademacher()
            } else {
                EntryDistribution::bernoulli01()
            }
        })
    }

    pub fn primes(&self) -> Vec<u64> {
        self.args
            .primes
            .as_ref()
            .map_or_else(crate::linalg::default_primes, |l| l.0.clone())
    }

    pub fn exact_limit(&self) -> usize {
        self.args.exact_limit.unwrap_or(DEFAULT_EXACT_LIMIT)
    }

    /// Names of flags that are set.
    fn set_flags(&self) -> Vec<&'static str> {
        let a = &self.args;
        let mut v = Vec::new();
        let mut mark = |on: bool, name| {
            if on {
                v.push(name)
            }
        };
        mark(a.n.is_some(), "n");
        mark(a.n_max.is_some(), "n-max");
        mark(a.trials.is_some(), "trials");
        mark(a.seed.is_some(), "seed");
        mark(a.dist.is_some(), "dist");
        mark(a.epsilon.is_some(), "epsilon");
        mark(a.primes.is_some(), "primes");
        mark(a.exhaustive, "exhaustive");
        mark(a.det_growth, "det-growth");
        mark(a.classify_up_to.is_some(), "classify-up-to");
        mark(a.family.is_some(), "family");
        mark(a.exact_limit.is_some(), "exact-limit");
        mark(a.exhaustive_bits.is_some(), "exhaustive-bits");
        mark(a.bits.is_some(), "bits");
        mark(a.events.is_some(), "events");
        v
    }

    /// Checks the flags against the command, with a message naming the
    /// offending flag.
    pub fn validate(&self) -> Result<()> {
        use CommandKind::*;
        let a = &self.args;
        let allowed: &[&str] = match self.command {
            Survey => &["n", "trials", "seed", "dist", "exhaustive", "det-growth"],
            Chain => &["n", "n-max", "trials", "seed", "dist", "epsilon", "primes", "classify-up-to"],
            Classify => &["n", "trials", "seed", "dist", "epsilon", "primes"],
            Concentration => &["n", "trials", "seed", "dist", "family", "exact-limit"],
            Decoupling => &["exhaustive-bits", "bits", "events", "seed"],
            Oracle => &["n", "exhaustive"],
        };
        if let Some(f) = self.set_flags().into_iter().find(|f| !allowed.contains(f)) {
            return Err(config(format!("--{f} does not apply to `{}`", self.command.as_str())));
        }
        if a.threads == Some(0) {
            return Err(config("--threads must be at least 1"));
        }
        if a.trials == Some(0) {
            return Err(config("--trials must be at least 1"));
        }
        if let Some(e) = a.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::EpsilonOutOfRange(e));
            }
        }
        if let Some(p) = &a.primes {
            if p.0.is_empty() {
                return Err(Error::EmptyPrimes);
            }
            if let Some(&q) = p.0.iter().find(|&&q| !is_prime(q)) {
                return Err(Error::NotPrime(q));
            }
        }
        let dims = self.dims();
        if dims.contains(&0) {
            return Err(config("dimensions must be positive"));
        }
        let need_seed = || a.seed.ok_or_else(|| config("this run is randomized; pass an explicit --seed"));
        let need_trials = || a.trials.ok_or_else(|| config("--trials is required"));
        let need_n = || {
            if dims.is_empty() {
                Err(config("--n is required"))
            } else {
                Ok(())
            }
        };
        match self.command {
            Survey => {
                need_n()?;
                if a.exhaustive {
                    if a.trials.is_some() || a.seed.is_some() {
                        return Err(config("--exhaustive enumerates every matrix; drop --trials and --seed"));
                    }
                } else {
                    need_trials()?;
                    need_seed()?;
                }
            }
            Chain => {
                if a.n.is_some() == a.n_max.is_some() {
                    return Err(config("give the chain length with exactly one of --n-max or --n"));
                }
                if a.n.is_some() && dims.len() != 1 {
                    return Err(config("`chain` takes a single dimension"));
                }
                if a.n_max == Some(0) {
                    return Err(config("--n-max must be at least 1"));
                }
                need_seed()?;
            }
            Classify => {
                need_n()?;
                need_trials()?;
                need_seed()?;
            }
            Concentration => {
                need_n()?;
                if dims.iter().any(|&m| m > self.exact_limit()) {
                    need_trials()?;
                    need_seed()?;
                }
            }
            Decoupling => match (&a.exhaustive_bits, &a.bits) {
                (Some(_), None) => {
                    if a.events.is_some() || a.seed.is_some() {
                        return Err(config("--exhaustive-bits sweeps every event; drop --events and --seed"));
                    }
                }
                (None, Some(_)) => {
                    if a.events.is_none() {
                        return Err(config("--bits needs --events"));
                    }
                    need_seed()?;
                }
                _ => return Err(config("give exactly one of --exhaustive-bits or --bits")),
            },
            Oracle => need_n()?,
        }
        Ok(())
    }

    /// Chain length.
    pub fn n_max(&self) -> usize {
        self.args.n_max.unwrap_or_else(|| self.dims().first().copied().unwrap_or(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: CommandKind, f: impl FnOnce(&mut RunArgs)) -> ExperimentConfig {
        let mut a = RunArgs::default();
        f(&mut a);
        ExperimentConfig::new(command, a)
    }

    #[test]
    fn lists() {
        let l: List<Dim> = "1..4,8".parse().unwrap();
        assert_eq!(l.to_string(), "1,2,3,4,8");
        assert!("4..1".parse::<List<Dim>>().is_err());
        assert!("x".parse::<List<u64>>().is_err());
    }

    #[test]
    fn validation_messages() {
        let c = cfg(CommandKind::Survey, |a| {
            a.n = Some("4".parse().unwrap());
            a.trials = Some(10);
        });
        assert!(c.validate().unwrap_err().to_string().contains("--seed"));
        let c = cfg(CommandKind::Oracle, |a| {
            a.n = Some("4".parse().unwrap());
            a.seed = Some(1);
        });
        assert!(c.validate().unwrap_err().to_string().contains("--seed does not apply"));
        let c = cfg(CommandKind::Chain, |a| {
            a.n_max = Some(5);
            a.seed = Some(1);
            a.primes = Some("9".parse().unwrap());
        });
        assert!(matches!(c.validate(), Err(Error::NotPrime(9))));
        let c = cfg(CommandKind::Chain, |a| {
            a.n_max = Some(5);
            a.seed = Some(1);
            a.epsilon = Some(0.1);
        });
        c.validate().unwrap();
    }

    #[test]
    fn serde_round_trip() {
        let c = cfg(CommandKind::Chain, |a| {
            a.n = Some("7".parse().unwrap());
            a.seed = Some(u64::MAX);
            a.dist = Some("custom:0:1/3,1:2/3".parse().unwrap());
        });
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&s).unwrap(), c);
    }
}
