//! Dispatch, output files and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{CommandKind, ExperimentConfig};
use super::table::{render_table, ClassificationRow, DecouplingRow, Format, OracleRow, Record, RecordKind, StepRow};
use crate::chain::{conditional_increment_stats, run_chains, x_decay_estimate, ChainConfig};
use crate::concentration::decoupling::{sweep_all_events, sweep_random};
use crate::concentration::{fit_constant, lo_experiment, Family, LoExperiment, ProductDistribution};
use crate::error::{Error, Result};
use crate::linalg::certify_rank;
use crate::matrix::sample_symmetric;
use crate::seed::{derive, Domain};
use crate::structure::{classify, compute_n};
use crate::survey::{survey_exhaustive, survey_singularity};

/// Records produced by one command, before rendering.
#[derive(Debug, Clone)]
pub struct RunData {
    pub kind: RecordKind,
    pub records: Vec<Record>,
    pub total_trials: u64,
    pub summary: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub schema: u64,
    pub config: ExperimentConfig,
    pub wall_time_secs: f64,
    pub total_trials: u64,
    pub records: u64,
    pub summary: Value,
}

impl RunManifest {
    /// Reads a manifest, or a bare [`ExperimentConfig`], and returns the config.
    pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let v: Value = serde_json::from_str(&text)?;
        let cfg = match v.get("config") {
            Some(c) => c.clone(),
            None => v,
        };
        Ok(serde_json::from_value(cfg)?)
    }
}

/// Where the manifest of an output file goes.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Runs the command described by `cfg` in a pool of `cfg.args.threads`
/// threads (the global pool when unset).
pub fn execute(cfg: &ExperimentConfig) -> Result<RunData> {
    cfg.validate()?;
    match cfg.args.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &ExperimentConfig) -> Result<RunData> {
    match cfg.command {
        CommandKind::Survey => survey(cfg),
        CommandKind::Chain => chain(cfg),
        CommandKind::Classify => classify_cmd(cfg),
        CommandKind::Concentration => concentration(cfg),
        CommandKind::Decoupling => decoupling(cfg),
        CommandKind::Oracle => oracle(cfg),
    }
}

fn survey(cfg: &ExperimentConfig) -> Result<RunData> {
    let dist = cfg.dist();
    let ns = cfg.dims();
    let rows = if cfg.args.exhaustive {
        ns.iter().map(|&n| survey_exhaustive(n, &dist)).collect::<Result<Vec<_>>>()?
    } else {
        survey_singularity(&ns, cfg.args.trials.unwrap_or(1), &dist, cfg.args.seed.unwrap_or(0))?
    };
    let total_trials = rows.iter().map(|r| r.trials).sum();
    let summary = json!({
        "distribution": dist.to_string(),
        "exhaustive": cfg.args.exhaustive,
        "singular": rows.iter().map(|r| r.singular_count).sum::<u64>(),
    });
    Ok(RunData {
        kind: RecordKind::Survey,
        records: rows.into_iter().map(Record::Survey).collect(),
        total_trials,
        summary,
    })
}

fn chain(cfg: &ExperimentConfig) -> Result<RunData> {
    let mut cc = ChainConfig::new(cfg.n_max(), cfg.dist(), cfg.epsilon());
    if let Some(g) = cfg.args.classify_up_to {
        cc.classify_up_to = g;
    }
    cc.primes = cfg.primes();
    let count = cfg.args.trials.unwrap_or(1);
    let traces = run_chains(&cc, cfg.args.seed.unwrap_or(0), count)?;
    let stats = conditional_increment_stats(&traces)?;
    let summary = json!({
        "distribution": cc.dist.to_string(),
        "classify_up_to": cc.classify_up_to,
        "x_decay": x_decay_estimate(&traces),
        "increments": stats.rows(false),
    });
    let (kind, records) = match cfg.format() {
        Format::Jsonl => (RecordKind::Trace, traces.into_iter().map(Record::Trace).collect()),
        Format::Csv => (
            RecordKind::Step,
            traces
                .iter()
                .enumerate()
                .flat_map(|(i, t)| StepRow::from_trace(i as u64, t))
                .map(Record::Step)
                .collect(),
        ),
    };
    Ok(RunData {
        kind,
        records,
        total_trials: count,
        summary,
    })
}

fn classify_cmd(cfg: &ExperimentConfig) -> Result<RunData> {
    let dist = cfg.dist();
    let primes = cfg.primes();
    let trials = cfg.args.trials.unwrap_or(1);
    let master = cfg.args.seed.unwrap_or(0);
    let mut rows = Vec::new();
    for n in cfg.dims() {
        let thr = compute_n(n, cfg.epsilon())?;
        let batch: Vec<ClassificationRow> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive(master, Domain::Classify, ((n as u64) << 40) | t);
                let a = sample_symmetric(n, &dist, seed);
                let rank = certify_rank(&a, &primes, false)?.rank;
                let c = classify(&a, &thr)?;
                Ok(ClassificationRow {
                    index: t,
                    seed,
                    n,
                    rank,
                    threshold: thr.big_n,
                    class: c.tag,
                    witness: c.witness,
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(batch);
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in &rows {
        *counts.entry(format!("{}:{}", r.n, r.class.as_str())).or_default() += 1;
    }
    Ok(RunData {
        kind: RecordKind::Classification,
        total_trials: rows.len() as u64,
        records: rows.into_iter().map(Record::Classification).collect(),
        summary: json!({ "distribution": dist.to_string(), "class_counts": counts }),
    })
}

fn concentration(cfg: &ExperimentConfig) -> Result<RunData> {
    let family = cfg.args.family.unwrap_or(Family::AllOnesOffDiagonal);
    let exp = LoExperiment {
        sizes: cfg.dims(),
        dist: cfg.dist(),
        trials: cfg.args.trials.unwrap_or(1),
        seed: cfg.args.seed.unwrap_or(0),
        exact_limit: cfg.exact_limit(),
    };
    let reports = lo_experiment(&family, &exp)?;
    let mc = exp.sizes.iter().filter(|&&m| m > exp.exact_limit).count() as u64;
    Ok(RunData {
        kind: RecordKind::Concentration,
        total_trials: mc * exp.trials,
        summary: json!({
            "family": family,
            "distribution": exp.dist.to_string(),
            "fitted_constant": fit_constant(&reports),
        }),
        records: reports.into_iter().map(Record::Concentration).collect(),
    })
}

fn decoupling(cfg: &ExperimentConfig) -> Result<RunData> {
    let (bits, exhaustive) = match (&cfg.args.exhaustive_bits, &cfg.args.bits) {
        (Some(b), _) => (b.0.clone(), true),
        (_, Some(b)) => (b.0.clone(), false),
        _ => unreachable!("validated"),
    };
    let joint = ProductDistribution::uniform_bits(&bits)?;
    let s = if exhaustive {
        sweep_all_events(&joint)?
    } else {
        sweep_random(&joint, cfg.args.events.unwrap_or(0), cfg.args.seed.unwrap_or(0))?
    };
    let row = DecouplingRow {
        bits,
        exhaustive,
        events: s.events,
        holding: s.holding,
        min_slack: s.min_slack,
        all_hold: s.all_hold(),
    };
    let verdict = if row.all_hold {
        format!("all {} events hold", row.events)
    } else {
        format!("{} of {} events hold", row.holding, row.events)
    };
    Ok(RunData {
        kind: RecordKind::Decoupling,
        total_trials: row.events,
        summary: json!({ "verdict": verdict }),
        records: vec![Record::Decoupling(row)],
    })
}

fn oracle(cfg: &ExperimentConfig) -> Result<RunData> {
    let dist = cfg.dist();
    let rows = cfg
        .dims()
        .into_iter()
        .map(|n| {
            let r = survey_exhaustive(n, &dist)?;
            Ok(OracleRow {
                n,
                matrices: r.trials,
                singular: r.singular_count,
                p_n: r.p_hat,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunData {
        kind: RecordKind::Oracle,
        total_trials: rows.iter().map(|r| r.matrices).sum(),
        summary: json!({
            "p_n": rows.iter().map(|r| (r.n.to_string(), r.p_n.to_string())).collect::<BTreeMap<_, _>>(),
        }),
        records: rows.into_iter().map(Record::Oracle).collect(),
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` through a sibling temporary file, so a failed write
/// never leaves a partial file at `path`.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let res = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(io_err(path));
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}

/// What [`run`] produced.
#[derive(Debug)]
pub struct RunOutput {
    pub data: String,
    pub manifest: RunManifest,
}

/// Executes `cfg`, renders its records and, when an output path is set,
/// writes the data file and its manifest next to it. On failure nothing is
/// left at the output path.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let d = execute(cfg)?;
    let data = render_table(d.kind, &d.records, cfg.format())?;
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema: super::table::SCHEMA_VERSION,
        config: cfg.clone(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        total_trials: d.total_trials,
        records: d.records.len() as u64,
        summary: d.summary,
    };
    if let Some(path) = &cfg.args.output {
        write_atomic(path, data.as_bytes())?;
        let m = serde_json::to_string_pretty(&manifest)? + "\n";
        if let Err(e) = write_atomic(&manifest_path(path), m.as_bytes()) {
            let _ = fs::remove_file(path);
            return Err(e);
        }
    }
    Ok(RunOutput { data, manifest })
}
