//! Momentum analysis for point-by-point tennis match data.
//!
//! The crate is split along the four analyses it supports:
//!
//! - [`ingest`]: parse and validate match CSV files, encode features.
//! - [`topsis`]: weighted TOPSIS closeness scores and per-player momentum series.
//! - [`logreg`]: binary logistic regression fitted by gradient descent, with
//!   Wald inference tables and confusion matrices.
//! - [`stats`]: Spearman rank correlation matrices and correlation-matrix PCA.
//! - [`pipeline`]: the end-to-end studies behind the `momentum` CLI.
//!
//! Data-parallel inner loops (per-row TOPSIS distances, per-row loss and
//! gradient terms, correlation pairs) run on rayon when the `parallel`
//! feature is enabled, and sequentially otherwise. Reductions are chunked
//! with a fixed order, so results are bit-identical either way.

pub mod ingest;
pub mod logreg;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synth;
pub mod topsis;

pub use ingest::{
    encode_score, one_hot_encode, parse_match_csv, select_key_games, write_match_csv, FeatureTable,
    KeyGameRule, MatchDataset, PointRecord, Schema, Side,
};
pub use logreg::{ConfusionMatrix, InferenceTable, LogisticModel, TrainConfig};
pub use stats::{CorrelationReport, PcaResult};
pub use topsis::{DecisionMatrix, MomentumSeries, TopsisResult, WeightVector};
