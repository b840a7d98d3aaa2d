//! Result rows and their CSV/JSON serialization.
//!
//! Floating-point values are rounded to 12 significant digits on output, so
//! identical records always produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

use super::config::{ExperimentKind, Format};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub d: u32,
    pub sampler: String,
    pub n: u32,
    pub trials: u64,
    pub mean: f64,
    pub max: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub p: f64,
    pub lower: f64,
    pub source: String,
    pub k: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub d: u32,
    /// `interval` or `gap`.
    pub item: String,
    pub k: Option<u32>,
    pub lo: f64,
    pub hi: f64,
    pub overlaps_next: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierRow {
    pub d: u32,
    pub sampler: String,
    pub n: u32,
    pub a: f64,
    pub c: f64,
    pub trials: u64,
    pub surviving: u64,
    pub fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub capped: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopiesRow {
    pub d: u32,
    pub sampler: String,
    pub n: u32,
    pub trials: u64,
    pub fully_open: u64,
    /// Trials where the best copy fell below the pigeonhole bound. Always 0.
    pub violations: u64,
    pub mean_best_copy: f64,
    /// Smallest best-copy average among fully open trials.
    pub min_best_copy_open: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalRow {
    pub d: u32,
    pub sampler: String,
    pub depth: u32,
    pub trials: u64,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exact: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub d: u32,
    pub p: f64,
    pub n: u32,
    /// `E[M_n] / n`.
    pub mean_density: f64,
    /// `P(M_n = n)`.
    pub fully_open: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResultRecord {
    DensitySweep(DensityRow),
    BoundsCurve(BoundsRow),
    Coverage(CoverageRow),
    Barrier(BarrierRow),
    Copies(CopiesRow),
    Marginal(MarginalRow),
    Survival(SurvivalRow),
}

impl ResultRecord {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ResultRecord::DensitySweep(_) => ExperimentKind::DensitySweep,
            ResultRecord::BoundsCurve(_) => ExperimentKind::BoundsCurve,
            ResultRecord::Coverage(_) => ExperimentKind::Coverage,
            ResultRecord::Barrier(_) => ExperimentKind::Barrier,
            ResultRecord::Copies(_) => ExperimentKind::Copies,
            ResultRecord::Marginal(_) => ExperimentKind::Marginal,
            ResultRecord::Survival(_) => ExperimentKind::Survival,
        }
    }

    fn fields(&self) -> Vec<String> {
        let kind = self.kind().name().to_owned();
        match self {
            ResultRecord::DensitySweep(r) => vec![
                kind,
                r.d.to_string(),
                r.sampler.clone(),
                r.n.to_string(),
                r.trials.to_string(),
                num(r.mean),
                num(r.max),
                num(r.ci_lo),
                num(r.ci_hi),
                num(r.seconds),
            ],
            ResultRecord::BoundsCurve(r) => vec![num(r.p), num(r.lower), r.source.clone(), opt(r.k)],
            ResultRecord::Coverage(r) => vec![
                r.d.to_string(),
                r.item.clone(),
                opt(r.k),
                num(r.lo),
                num(r.hi),
                opt(r.overlaps_next),
            ],
            ResultRecord::Barrier(r) => vec![
                kind,
                r.d.to_string(),
                r.sampler.clone(),
                r.n.to_string(),
                num(r.a),
                num(r.c),
                r.trials.to_string(),
                r.surviving.to_string(),
                num(r.fraction),
                num(r.ci_lo),
                num(r.ci_hi),
                r.capped.to_string(),
                num(r.seconds),
            ],
            ResultRecord::Copies(r) => vec![
                kind,
                r.d.to_string(),
                r.sampler.clone(),
                r.n.to_string(),
                r.trials.to_string(),
                r.fully_open.to_string(),
                r.violations.to_string(),
                num(r.mean_best_copy),
                r.min_best_copy_open.map(num).unwrap_or_default(),
                num(r.seconds),
            ],
            ResultRecord::Marginal(r) => vec![
                kind,
                r.d.to_string(),
                r.sampler.clone(),
                r.depth.to_string(),
                r.trials.to_string(),
                num(r.mean),
                num(r.ci_lo),
                num(r.ci_hi),
                num(r.exact),
                num(r.seconds),
            ],
            ResultRecord::Survival(r) => vec![
                r.d.to_string(),
                num(r.p),
                r.n.to_string(),
                num(r.mean_density),
                num(r.fully_open),
                num(r.limit),
            ],
        }
    }
}

pub fn csv_header(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::DensitySweep => &[
            "kind", "d", "sampler", "n", "trials", "mean", "max", "ci_lo", "ci_hi", "seconds",
        ],
        ExperimentKind::BoundsCurve => &["p", "lower", "source", "k"],
        ExperimentKind::Coverage => &["d", "item", "k", "lo", "hi", "overlaps_next"],
        ExperimentKind::Barrier => &[
            "kind",
            "d",
            "sampler",
            "n",
            "a",
            "c",
            "trials",
            "surviving",
            "fraction",
            "ci_lo",
            "ci_hi",
            "capped",
            "seconds",
        ],
        ExperimentKind::Copies => &[
            "kind",
            "d",
            "sampler",
            "n",
            "trials",
            "fully_open",
            "violations",
            "mean_best_copy",
            "min_best_copy_open",
            "seconds",
        ],
        ExperimentKind::Marginal => &[
            "kind", "d", "sampler", "depth", "trials", "mean", "ci_lo", "ci_hi", "exact", "seconds",
        ],
        ExperimentKind::Survival => &["d", "p", "n", "mean_density", "fully_open", "limit"],
    }
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn num(x: f64) -> String {
    format!("{}", sig12(x))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig12(n.as_f64().expect("f64 number"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

pub fn render_csv(kind: ExperimentKind, records: &[ResultRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(csv_header(kind)).map_err(csv_err)?;
    for r in records {
        if r.kind() != kind {
            return Err(Error::Config(format!(
                "cannot mix {} rows into a {} table",
                r.kind(),
                kind
            )));
        }
        w.write_record(r.fields()).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
}

pub fn render_json(records: &[ResultRecord]) -> Result<Vec<u8>> {
    let mut value = serde_json::to_value(records).map_err(|e| Error::Config(e.to_string()))?;
    round_numbers(&mut value);
    let mut out = serde_json::to_vec_pretty(&value).map_err(|e| Error::Config(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn render(kind: ExperimentKind, records: &[ResultRecord], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => render_csv(kind, records),
        Format::Json => render_json(records),
    }
}

pub fn emit(kind: ExperimentKind, records: &[ResultRecord], format: Format, path: &Path) -> Result<()> {
    let bytes = render(kind, records, format)?;
    let io = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(&bytes).map_err(io)?;
    file.flush().map_err(io)
}

pub fn read_json(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}
