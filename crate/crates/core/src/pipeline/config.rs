use std::path::PathBuf;

use serde::Serialize;

use super::chart::ChartMode;
use super::PipelineError;
use crate::ingest::{CategoricalEncoding, KeyGameRule, PointRecord, Side};
use crate::logreg::TrainConfig;
use crate::topsis::WeightVector;

/// Player chosen by number (`1`/`2`) or by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PlayerSelector {
    Number(Side),
    Name(String),
}

impl PlayerSelector {
    pub fn parse(s: &str) -> Self {
        match s.trim() {
            "1" => PlayerSelector::Number(Side::One),
            "2" => PlayerSelector::Number(Side::Two),
            name => PlayerSelector::Name(name.to_string()),
        }
    }

    /// Side of the selected player in the match of `r`, if present.
    pub fn resolve(&self, r: &PointRecord) -> Option<Side> {
        match self {
            PlayerSelector::Number(side) => Some(*side),
            PlayerSelector::Name(name) => Side::BOTH.into_iter().find(|&s| r.player(s) == name),
        }
    }
}

impl Default for PlayerSelector {
    fn default() -> Self {
        PlayerSelector::Number(Side::One)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            csv: true,
            json: true,
            svg: true,
        }
    }
}

impl Formats {
    pub fn parse(s: &str) -> Result<Self, PipelineError> {
        let mut f = Formats {
            csv: false,
            json: false,
            svg: false,
        };
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => return Err(PipelineError::Config(format!("unknown format {other:?}"))),
            }
        }
        if !(f.csv || f.json || f.svg) {
            return Err(PipelineError::Config("no output format selected".into()));
        }
        Ok(f)
    }
}

/// Everything a study run needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub match_id: Option<String>,
    pub player: PlayerSelector,
    pub set_no: Option<u32>,
    pub weights: WeightVector,
    pub train: TrainConfig,
    pub key_rule: KeyGameRule,
    pub train_matches: Vec<String>,
    pub test_match: Option<String>,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub encoding: CategoricalEncoding,
    /// Overall percent correct above which a sequence is called non-random.
    pub nonrandom_threshold: f64,
    /// Trailing fraction of rows held out for evaluation.
    pub holdout: Option<f64>,
    /// Target p-value below which a variable enters the PCA.
    pub factor_threshold: f64,
    pub top_k: usize,
    pub chart_mode: ChartMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            match_id: None,
            player: PlayerSelector::default(),
            set_no: None,
            weights: WeightVector::momentum_default(),
            train: TrainConfig::default(),
            key_rule: KeyGameRule::default(),
            train_matches: Vec::new(),
            test_match: None,
            out_dir: PathBuf::from("out"),
            formats: Formats::default(),
            encoding: CategoricalEncoding::OneHot,
            nonrandom_threshold: 70.0,
            holdout: None,
            factor_threshold: 0.05,
            top_k: 3,
            chart_mode: ChartMode::Closeness,
        }
    }
}

/// Keys accepted by [`RunConfig::apply`], matching the long CLI flags.
pub const CONFIG_KEYS: [&str; 20] = [
    "input",
    "match",
    "player",
    "set",
    "weights",
    "alpha",
    "max-iter",
    "tol",
    "cutoff",
    "key-rule",
    "train",
    "test",
    "out",
    "format",
    "encoding",
    "threshold",
    "holdout",
    "factor-threshold",
    "top-k",
    "chart",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, PipelineError> {
    value
        .trim()
        .parse()
        .map_err(|_| PipelineError::Config(format!("{key}: cannot parse {value:?}")))
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

impl RunConfig {
    /// Set one option from its textual form. Later calls override earlier
    /// ones; `input` and `train` replace rather than append.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "input" => self.inputs = list(v).into_iter().map(PathBuf::from).collect(),
            "match" => self.match_id = Some(v.to_string()),
            "player" => self.player = PlayerSelector::parse(v),
            "set" => self.set_no = Some(number(&key, v)?),
            "weights" => {
                self.weights = v
                    .parse()
                    .map_err(|e| PipelineError::Config(format!("weights: {e}")))?
            }
            "alpha" => self.train.alpha = number(&key, v)?,
            "max-iter" => self.train.max_iter = number(&key, v)?,
            "tol" => self.train.tol = number(&key, v)?,
            "cutoff" => self.train.cutoff = number(&key, v)?,
            "key-rule" => {
                self.key_rule = v
                    .parse()
                    .map_err(|e| PipelineError::Config(format!("key-rule: {e}")))?
            }
            "train" => self.train_matches = list(v),
            "test" => self.test_match = Some(v.to_string()),
            "out" => self.out_dir = PathBuf::from(v),
            "format" => self.formats = Formats::parse(v)?,
            "encoding" => {
                self.encoding = match v {
                    "onehot" | "one-hot" => CategoricalEncoding::OneHot,
                    "ordinal" => CategoricalEncoding::Ordinal,
                    other => {
                        return Err(PipelineError::Config(format!(
                            "encoding: unknown {other:?}"
                        )))
                    }
                }
            }
            "threshold" => self.nonrandom_threshold = number(&key, v)?,
            "holdout" => {
                let f: f64 = number(&key, v)?;
                if !(f > 0.0 && f < 1.0) {
                    return Err(PipelineError::Config(format!(
                        "holdout must lie in (0, 1), got {f}"
                    )));
                }
                self.holdout = Some(f);
            }
            "factor-threshold" => self.factor_threshold = number(&key, v)?,
            "top-k" => self.top_k = number(&key, v)?,
            "chart" => {
                self.chart_mode = match v {
                    "closeness" => ChartMode::Closeness,
                    "raw" | "points" => ChartMode::RawPoints,
                    other => {
                        return Err(PipelineError::Config(format!(
                            "chart: unknown mode {other:?}"
                        )))
                    }
                }
            }
            other => return Err(PipelineError::Config(format!("unknown option {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.train
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))
    }
}

/// Parse `key = value` lines. Blank lines and lines starting with `#` are
/// skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, PipelineError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(i, line)| {
            line.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    PipelineError::Config(format!("config line {}: expected key = value", i + 1))
                })
        })
        .collect()
}
