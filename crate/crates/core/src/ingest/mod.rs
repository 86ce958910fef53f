//! Parsing, validation and numeric encoding of point-by-point match data.

mod csv_io;
mod dataset;
mod features;
mod key_games;
mod record;

use thiserror::Error;

pub use csv_io::{parse_match_csv, read_match_file, write_match_csv, Schema, COLUMNS};
pub use dataset::{Diagnostic, MatchDataset, MatchInfo};
pub use features::{
    one_hot_encode, CategoricalEncoding, FeatureColumn, FeatureSpec, FeatureTable, Provenance,
};
pub use key_games::{select_key_games, KeyGameRule};
pub use record::{
    canonical_column, encode_score, format_elapsed, parse_elapsed, GameScore, PlayerPoint,
    PointRecord, ReturnDepth, Score, ServeDepth, ServeWidth, ShotType, Side, CATEGORICAL_COLUMNS,
    NO_WINNER_LEVEL,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("row {row}: column {column}: {message}")]
    Row {
        row: usize,
        column: String,
        message: String,
    },
    #[error("dataset contains no data rows")]
    EmptyDataset,
    #[error("cannot encode {column} token {token:?}")]
    Encoding { column: String, token: String },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("duplicate point {match_id} set {set_no} game {game_no} point {point_no}")]
    DuplicatePoint {
        match_id: String,
        set_no: u32,
        game_no: u32,
        point_no: u32,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
