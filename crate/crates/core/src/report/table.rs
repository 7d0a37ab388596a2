//! Record types, CSV tables and schema-versioned JSONL.

use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::chain::{ChainTrace, IncrementRow, XDecayRow};
use crate::concentration::{ConcentrationReport, Interval, Method, Probability};
use crate::dist::parse_rational;
use crate::error::{Error, Result};
use crate::structure::{ClassTag, Witness};
use crate::survey::SurveyRow;

/// Version stamped on every JSONL line.
pub const SCHEMA_VERSION: u64 = 1;

/// One chain step, flattened for tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub chain: u64,
    pub seed: u64,
    pub n: usize,
    pub rank: usize,
    pub increment: Option<u8>,
    pub class: Option<ClassTag>,
    pub x_value: f64,
}

impl StepRow {
    pub fn from_trace(chain: u64, t: &ChainTrace) -> Vec<StepRow> {
        t.steps
            .iter()
            .map(|s| StepRow {
                chain,
                seed: t.seed,
                n: s.n,
                rank: s.rank,
                increment: s.increment,
                class: s.class.as_ref().map(|c| c.tag),
                x_value: s.x_value,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub index: u64,
    /// Seed that regenerates the matrix via `sample_symmetric`.
    pub seed: u64,
    pub n: usize,
    pub rank: usize,
    pub threshold: usize,
    pub class: ClassTag,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingRow {
    pub bits: Vec<u32>,
    pub exhaustive: bool,
    pub events: u64,
    pub holding: u64,
    pub min_slack: f64,
    pub all_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub n: usize,
    pub matrices: u64,
    pub singular: u64,
    #[serde(with = "crate::bigser::rational")]
    pub p_n: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Survey(SurveyRow),
    Trace(ChainTrace),
    Step(StepRow),
    Increment(IncrementRow),
    XDecay(XDecayRow),
    Classification(ClassificationRow),
    Concentration(ConcentrationReport),
    Decoupling(DecouplingRow),
    Oracle(OracleRow),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Survey,
    Trace,
    Step,
    Increment,
    XDecay,
    Classification,
    Concentration,
    Decoupling,
    Oracle,
}

const ALL_KINDS: [RecordKind; 9] = [
    RecordKind::Survey,
    RecordKind::Trace,
    RecordKind::Step,
    RecordKind::Increment,
    RecordKind::XDecay,
    RecordKind::Classification,
    RecordKind::Concentration,
    RecordKind::Decoupling,
    RecordKind::Oracle,
];

impl RecordKind {
    /// CSV header. Traces nest steps and witnesses, so they have none.
    pub fn columns(self) -> Option<&'static [&'static str]> {
        Some(match self {
            RecordKind::Survey => &["n", "trials", "singular", "p_hat", "stderr", "logdet_scaled"],
            RecordKind::Trace => return None,
            RecordKind::Step => &["chain", "seed", "n", "rank", "increment", "class", "x_value"],
            RecordKind::Increment => &["n", "class", "increment", "count", "total", "frequency", "stderr"],
            RecordKind::XDecay => &["n", "chains", "mean_x", "stderr"],
            RecordKind::Classification => &["index", "seed", "n", "rank", "threshold", "class", "witness"],
            RecordKind::Concentration => &[
                "form",
                "size",
                "interval",
                "method",
                "probability",
                "stderr",
                "bound",
                "hypothesis_met",
            ],
            RecordKind::Decoupling => &["bits", "exhaustive", "events", "holding", "min_slack", "all_hold"],
            RecordKind::Oracle => &["n", "matrices", "singular", "p_n"],
        })
    }
}

impl Record {
    pub fn kind(&self) -> RecordKind {
        match self {
            Record::Survey(_) => RecordKind::Survey,
            Record::Trace(_) => RecordKind::Trace,
            Record::Step(_) => RecordKind::Step,
            Record::Increment(_) => RecordKind::Increment,
            Record::XDecay(_) => RecordKind::XDecay,
            Record::Classification(_) => RecordKind::Classification,
            Record::Concentration(_) => RecordKind::Concentration,
            Record::Decoupling(_) => RecordKind::Decoupling,
            Record::Oracle(_) => RecordKind::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

/// Six significant digits: fixed notation for exponents in `-5..6`,
/// scientific otherwise.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        sci
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(String::new, ToString::to_string)
}

fn cells(r: &Record) -> Vec<String> {
    match r {
        Record::Survey(s) => vec![
            s.n.to_string(),
            s.trials.to_string(),
            s.singular_count.to_string(),
            s.p_hat.to_string(),
            fmt_real(s.stderr),
            opt(&s.mean_log_det_scaled.map(fmt_real)),
        ],
        Record::Trace(_) => unreachable!("traces have no table form"),
        Record::Step(s) => vec![
            s.chain.to_string(),
            s.seed.to_string(),
            s.n.to_string(),
            s.rank.to_string(),
            opt(&s.increment),
            opt(&s.class.map(ClassTag::as_str)),
            fmt_real(s.x_value),
        ],
        Record::Increment(s) => vec![
            opt(&s.n),
            s.class.as_str().into(),
            s.increment.to_string(),
            s.count.to_string(),
            s.total.to_string(),
            fmt_real(s.frequency),
            fmt_real(s.stderr),
        ],
        Record::XDecay(s) => vec![s.n.to_string(), s.chains.to_string(), fmt_real(s.mean), fmt_real(s.stderr)],
        Record::Classification(s) => vec![
            s.index.to_string(),
            s.seed.to_string(),
            s.n.to_string(),
            s.rank.to_string(),
            s.threshold.to_string(),
            s.class.as_str().into(),
            s.witness
                .as_ref()
                .map(|w| serde_json::to_string(w).expect("witness serializes"))
                .unwrap_or_default(),
        ],
        Record::Concentration(s) => {
            let (p, se) = match &s.probability {
                Probability::Exact { value } => (value.to_string(), "0".to_string()),
                Probability::Estimate { mean, stderr } => (fmt_real(*mean), fmt_real(*stderr)),
            };
            vec![
                s.form.clone(),
                s.size.to_string(),
                s.interval.to_string(),
                s.method.as_str().into(),
                p,
                se,
                opt(&s.bound.map(fmt_real)),
                s.hypothesis_met.to_string(),
            ]
        }
        Record::Decoupling(s) => vec![
            s.bits.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            s.exhaustive.to_string(),
            s.events.to_string(),
            s.holding.to_string(),
            fmt_real(s.min_slack),
            s.all_hold.to_string(),
        ],
        Record::Oracle(s) => vec![
            s.n.to_string(),
            s.matrices.to_string(),
            s.singular.to_string(),
            s.p_n.to_string(),
        ],
    }
}

/// Renders records of one kind. CSV gets a header (alone for an empty
/// list); JSONL gets one schema-stamped object per line.
pub fn render_table(kind: RecordKind, records: &[Record], format: Format) -> Result<String> {
    if records.iter().any(|r| r.kind() != kind) {
        return Err(Error::MixedRecords);
    }
    match format {
        Format::Jsonl => {
            let mut out = String::new();
            for r in records {
                out.push_str(&to_jsonl_line(r)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let columns = kind.columns().ok_or_else(|| {
                Error::Capability("chain traces have no CSV form; write steps instead".into())
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(columns)?;
            for r in records {
                w.write_record(cells(r))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("utf-8 cells"))
        }
    }
}

pub fn to_jsonl_line(r: &Record) -> Result<String> {
    let Value::Object(mut m) = serde_json::to_value(r)? else {
        unreachable!("records are objects")
    };
    m.insert("schema".into(), Value::from(SCHEMA_VERSION));
    Ok(serde_json::to_string(&Value::Object(m))?)
}

/// Parses JSONL written by [`render_table`]; blank lines are skipped.
pub fn parse_jsonl(text: &str) -> Result<Vec<Record>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut m: Map<String, Value> = serde_json::from_str(line)?;
            match m.remove("schema").and_then(|v| v.as_u64()) {
                Some(SCHEMA_VERSION) => {}
                other => {
                    return Err(Error::Parse(format!(
                        "unsupported schema {other:?}, expected {SCHEMA_VERSION}"
                    )))
                }
            }
            Ok(serde_json::from_value(Value::Object(m))?)
        })
        .collect()
}

fn parse_class(s: &str) -> Result<ClassTag> {
    [
        ClassTag::SingularNormal,
        ClassTag::SingularAbnormal,
        ClassTag::NonsingularPerfect,
        ClassTag::NonsingularImperfect,
    ]
    .into_iter()
    .find(|t| t.as_str() == s)
    .ok_or_else(|| Error::Parse(format!("unknown class {s:?}")))
}

fn parse_method(s: &str) -> Result<Method> {
    [Method::ExactDp, Method::ExactEnum, Method::MonteCarlo]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
}

fn num<T: FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

fn real(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => num(s),
    }
}

fn opt_cell<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

fn boolean(s: &str) -> Result<bool> {
    num(s)
}

fn from_cells(kind: RecordKind, c: &csv::StringRecord) -> Result<Record> {
    let g = |i: usize| c.get(i).unwrap_or("");
    Ok(match kind {
        RecordKind::Survey => Record::Survey(SurveyRow {
            n: num(g(0))?,
            trials: num(g(1))?,
            singular_count: num(g(2))?,
            p_hat: parse_rational(g(3))?,
            stderr: real(g(4))?,
            mean_log_det_scaled: opt_cell(g(5), real)?,
        }),
        RecordKind::Trace => unreachable!("no CSV header for traces"),
        RecordKind::Step => Record::Step(StepRow {
            chain: num(g(0))?,
            seed: num(g(1))?,
            n: num(g(2))?,
            rank: num(g(3))?,
            increment: opt_cell(g(4), num)?,
            class: opt_cell(g(5), parse_class)?,
            x_value: real(g(6))?,
        }),
        RecordKind::Increment => Record::Increment(IncrementRow {
            n: opt_cell(g(0), num)?,
            class: parse_class(g(1))?,
            increment: num(g(2))?,
            count: num(g(3))?,
            total: num(g(4))?,
            frequency: real(g(5))?,
            stderr: real(g(6))?,
        }),
        RecordKind::XDecay => Record::XDecay(XDecayRow {
            n: num(g(0))?,
            chains: num(g(1))?,
            mean: real(g(2))?,
            stderr: real(g(3))?,
        }),
        RecordKind::Classification => Record::Classification(ClassificationRow {
            index: num(g(0))?,
            seed: num(g(1))?,
            n: num(g(2))?,
            rank: num(g(3))?,
            threshold: num(g(4))?,
            class: parse_class(g(5))?,
            witness: opt_cell(g(6), |s| Ok(serde_json::from_str(s)?))?,
        }),
        RecordKind::Concentration => {
            let method = parse_method(g(3))?;
            let probability = match method {
                Method::MonteCarlo => Probability::Estimate {
                    mean: real(g(4))?,
                    stderr: real(g(5))?,
                },
                _ => Probability::Exact {
                    value: parse_rational(g(4))?,
                },
            };
            Record::Concentration(ConcentrationReport {
                form: g(0).to_string(),
                size: num(g(1))?,
                interval: g(2).parse::<Interval>()?,
                method,
                probability,
                bound: opt_cell(g(6), real)?,
                hypothesis_met: boolean(g(7))?,
            })
        }
        RecordKind::Decoupling => Record::Decoupling(DecouplingRow {
            bits: g(0).split(',').map(num).collect::<Result<_>>()?,
            exhaustive: boolean(g(1))?,
            events: num(g(2))?,
            holding: num(g(3))?,
            min_slack: real(g(4))?,
            all_hold: boolean(g(5))?,
        }),
        RecordKind::Oracle => Record::Oracle(OracleRow {
            n: num(g(0))?,
            matrices: num(g(1))?,
            singular: num(g(2))?,
            p_n: parse_rational(g(3))?,
        }),
    })
}

/// Parses a CSV table; the record kind is recognised from the header.
///
/// Integers, rationals, flags and text come back exactly. Reals were
/// written with six significant digits and come back at that precision.
pub fn parse_csv(text: &str) -> Result<(RecordKind, Vec<Record>)> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let kind = ALL_KINDS
        .into_iter()
        .find(|k| k.columns().is_some_and(|c| c.iter().eq(header.iter())))
        .ok_or_else(|| Error::Parse(format!("unrecognised header {header:?}")))?;
    let records = rdr
        .records()
        .map(|r| from_cells(kind, &r?))
        .collect::<Result<Vec<_>>>()?;
    Ok((kind, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn survey_row() -> SurveyRow {
        SurveyRow {
            n: 2,
            trials: 8,
            singular_count: 4,
            p_hat: BigRational::new(BigInt::from(1), BigInt::from(2)),
            stderr: 0.0,
            mean_log_det_scaled: Some(0.5),
        }
    }

    #[test]
    fn reals() {
        assert_eq!(fmt_real(0.5), "0.500000");
        assert_eq!(fmt_real(123456.7), "123457");
        assert_eq!(fmt_real(999999.7), "1.00000e6");
        assert_eq!(fmt_real(-0.000123456789), "-0.000123457");
        assert_eq!(fmt_real(1.5e-7), "1.50000e-7");
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(1.21), "1.21000");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = render_table(RecordKind::Survey, &[], Format::Csv).unwrap();
        assert_eq!(t, "n,trials,singular,p_hat,stderr,logdet_scaled\n");
        assert_eq!(render_table(RecordKind::Survey, &[], Format::Jsonl).unwrap(), "");
    }

    #[test]
    fn one_survey_row() {
        let t = render_table(RecordKind::Survey, &[Record::Survey(survey_row())], Format::Csv).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "2,8,4,1/2,0,0.500000");
    }

    #[test]
    fn mixed_records_rejected() {
        let recs = [
            Record::Survey(survey_row()),
            Record::XDecay(XDecayRow {
                n: 1,
                chains: 1,
                mean: 0.0,
                stderr: 0.0,
            }),
        ];
        assert!(matches!(
            render_table(RecordKind::Survey, &recs, Format::Csv),
            Err(Error::MixedRecords)
        ));
    }

    #[test]
    fn jsonl_round_trip_and_schema() {
        let recs = vec![Record::Survey(survey_row())];
        let t = render_table(RecordKind::Survey, &recs, Format::Jsonl).unwrap();
        assert!(t.contains("\"schema\":1") && t.contains("\"p_hat\":\"1/2\""));
        assert_eq!(parse_jsonl(&t).unwrap(), recs);
        let bumped = t.replace("\"schema\":1", "\"schema\":2");
        assert!(parse_jsonl(&bumped).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![Record::Survey(survey_row())];
        let t = render_table(RecordKind::Survey, &recs, Format::Csv).unwrap();
        assert_eq!(parse_csv(&t).unwrap(), (RecordKind::Survey, recs));
    }
}
