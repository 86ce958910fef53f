//! End-to-end studies behind the `momentum` command.
//!
//! Each `run_*` function takes a loaded [`MatchDataset`] and a [`RunConfig`]
//! and returns a [`StudyReport`]; [`write_outputs`] turns a report into files.
//! Keeping the two apart lets tests run studies without touching the disk.

mod chart;
mod config;
mod studies;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{read_match_file, IngestError, MatchDataset, Schema};
use crate::logreg::{ConfusionMatrix, InferenceTable, LogisticModel, LogregError};
use crate::stats::{CorrelationReport, Factor, PcaResult, StatsError};
use crate::topsis::{MomentumSeries, TopsisError};

pub use chart::{emit_chart, ChartMode, ChartSlice};
pub use config::{parse_config_text, Formats, PlayerSelector, RunConfig, CONFIG_KEYS};
pub use studies::{
    advantage_phase, run_factors, run_momentum, run_randomness, run_swing, Phase, FACTOR_VARIABLES,
    RANDOMNESS_FEATURES,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("selection error: {0}")]
    Selector(String),
    #[error("empty subset: {0}")]
    EmptySubset(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Topsis(#[from] TopsisError),
    #[error(transparent)]
    Logreg(#[from] LogregError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
}

impl PipelineError {
    /// 1 usage, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Topsis(TopsisError::Weights(_)) => 1,
            PipelineError::Logreg(LogregError::Config(_)) => 1,
            PipelineError::Logreg(LogregError::Numerical(_)) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Momentum,
    Randomness,
    Swing,
    Factors,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Momentum => "momentum",
            Study::Randomness => "randomness",
            Study::Swing => "swing",
            Study::Factors => "factors",
        }
    }
}

/// Row accounting: `rows_in = rows_used + rows_dropped`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub matches: Vec<String>,
    pub player: String,
    pub rows_in: usize,
    pub rows_used: usize,
    pub rows_dropped: usize,
}

/// Fitted model with its inference table and classification results.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    #[serde(serialize_with = "model_json")]
    pub model: LogisticModel,
    pub inference: InferenceTable,
    pub training: ConfusionMatrix,
    /// Evaluation rows, when separate from training.
    pub holdout: Option<ConfusionMatrix>,
}

fn model_json<S: serde::Serializer>(m: &LogisticModel, s: S) -> Result<S::Ok, S::Error> {
    m.to_json().serialize(s)
}

impl Classification {
    /// Confusion matrix used for verdicts: holdout when present.
    pub fn evaluation(&self) -> &ConfusionMatrix {
        self.holdout.as_ref().unwrap_or(&self.training)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomnessResult {
    pub classification: Classification,
    pub threshold: f64,
    pub non_random: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseResult {
    pub phase: Phase,
    pub train_rows: usize,
    pub test_rows: usize,
    pub classification: Option<Classification>,
    /// Test-match confusion matrix.
    pub test: Option<ConfusionMatrix>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SwingResult {
    pub train_matches: Vec<String>,
    pub test_match: String,
    pub key_rule: String,
    pub phases: Vec<PhaseResult>,
    /// One model over both phases, for comparison.
    pub pooled: Option<ConfusionMatrix>,
    /// Points with neither player ahead, excluded from both phases.
    pub tied_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorResult {
    pub correlation: CorrelationReport,
    pub threshold: f64,
    pub selected: Vec<String>,
    pub pca: Option<PcaResult>,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Momentum(MomentumSeries),
    Randomness(RandomnessResult),
    Swing(SwingResult),
    Factors(FactorResult),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chart {
    pub file: String,
    #[serde(skip)]
    pub svg: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub study: Study,
    pub fingerprint: Fingerprint,
    pub payload: Payload,
    pub warnings: Vec<String>,
    pub charts: Vec<Chart>,
}

/// Read and merge every input file.
pub fn load_inputs(config: &RunConfig) -> Result<MatchDataset, PipelineError> {
    if config.inputs.is_empty() {
        return Err(PipelineError::Config("no input file given".into()));
    }
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for path in &config.inputs {
        let ds = read_match_file(path, &Schema::default())?;
        diagnostics.extend(ds.diagnostics.iter().cloned());
        records.extend(ds.records().iter().cloned());
    }
    let mut ds = MatchDataset::from_records(records)?;
    if config.inputs.len() > 1 {
        ds.diagnostics = diagnostics;
    }
    Ok(ds)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], written: &mut Vec<PathBuf>) -> io::Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    written.push(path);
    Ok(())
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn write_classification(
    dir: &Path,
    prefix: &str,
    c: &Classification,
    written: &mut Vec<PathBuf>,
) -> io::Result<()> {
    write_file(
        dir,
        &format!("{prefix}_coefficients.csv"),
        &csv_bytes(|b| c.inference.write_csv(b))?,
        written,
    )?;
    write_file(
        dir,
        &format!("{prefix}_model_summary.csv"),
        &csv_bytes(|b| c.inference.write_summary_csv(b))?,
        written,
    )?;
    write_file(
        dir,
        &format!("{prefix}_confusion_training.csv"),
        &csv_bytes(|b| c.training.write_csv(b))?,
        written,
    )?;
    if let Some(h) = &c.holdout {
        write_file(
            dir,
            &format!("{prefix}_confusion_holdout.csv"),
            &csv_bytes(|b| h.write_csv(b))?,
            written,
        )?;
    }
    Ok(())
}

/// Write the report in the configured formats into `config.out_dir`.
/// Returns the written paths in creation order.
pub fn write_outputs(
    report: &StudyReport,
    config: &RunConfig,
) -> Result<Vec<PathBuf>, PipelineError> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    let name = report.study.name();
    let mut written = Vec::new();
    if config.formats.csv {
        match &report.payload {
            Payload::Momentum(series) => {
                write_file(
                    dir,
                    &format!("{name}_series.csv"),
                    &csv_bytes(|b| series.write_csv(b))?,
                    &mut written,
                )?;
            }
            Payload::Randomness(r) => {
                write_classification(dir, name, &r.classification, &mut written)?
            }
            Payload::Swing(s) => {
                for p in &s.phases {
                    let prefix = format!("{name}_{}", p.phase.name());
                    if let Some(c) = &p.classification {
                        write_classification(dir, &prefix, c, &mut written)?;
                    }
                    if let Some(t) = &p.test {
                        write_file(
                            dir,
                            &format!("{prefix}_confusion_test.csv"),
                            &csv_bytes(|b| t.write_csv(b))?,
                            &mut written,
                        )?;
                    }
                }
            }
            Payload::Factors(f) => {
                write_file(
                    dir,
                    &format!("{name}_spearman_rho.csv"),
                    &csv_bytes(|b| f.correlation.write_rho_csv(b))?,
                    &mut written,
                )?;
                write_file(
                    dir,
                    &format!("{name}_spearman_p.csv"),
                    &csv_bytes(|b| f.correlation.write_p_csv(b))?,
                    &mut written,
                )?;
                if let Some(p) = &f.pca {
                    write_file(
                        dir,
                        &format!("{name}_pca.csv"),
                        &csv_bytes(|b| p.write_csv(b))?,
                        &mut written,
                    )?;
                }
                let mut text = String::from("rank,variable,loading,target_p\n");
                for (i, fac) in f.factors.iter().enumerate() {
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        i + 1,
                        crate::report::csv_field(&fac.name),
                        crate::report::sig6(fac.loading),
                        crate::report::sig6(fac.target_p)
                    ));
                }
                write_file(
                    dir,
                    &format!("{name}_factors.csv"),
                    text.as_bytes(),
                    &mut written,
                )?;
            }
        }
    }
    if config.formats.svg {
        for c in &report.charts {
            write_file(dir, &c.file, c.svg.as_bytes(), &mut written)?;
        }
    }
    if config.formats.json {
        let mut json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
        json.push('\n');
        write_file(
            dir,
            &format!("{name}_report.json"),
            json.as_bytes(),
            &mut written,
        )?;
    }
    Ok(written)
}

/// Load inputs, run `study`, write outputs.
pub fn run(study: Study, config: &RunConfig) -> Result<(StudyReport, Vec<PathBuf>), PipelineError> {
    config.validate()?;
    let dataset = load_inputs(config)?;
    let report = match study {
        Study::Momentum => run_momentum(config, &dataset)?,
        Study::Randomness => run_randomness(config, &dataset)?,
        Study::Swing => run_swing(config, &dataset)?,
        Study::Factors => run_factors(config, &dataset)?,
    };
    let written = write_outputs(&report, config)?;
    Ok((report, written))
}
