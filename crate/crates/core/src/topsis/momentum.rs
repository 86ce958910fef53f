use std::io::Write;

use serde::Serialize;

use super::{evaluate, DecisionMatrix, Direction, Matrix, TopsisError, WeightVector};
use crate::ingest::{MatchDataset, PointRecord, Side};
use crate::par;

/// Criteria per (point, player) alternative, all benefit-type.
pub const MOMENTUM_CRITERIA: [&str; 4] = ["sets", "games", "points_won", "is_server"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub elapsed_seconds: u32,
    pub set_no: u32,
    pub game_no: u32,
    pub point_no: u32,
    /// Indexed by [`Side::index`].
    pub closeness: [f64; 2],
    pub points_won: [u32; 2],
}

/// Per-point relative closeness of both players over one match.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumSeries {
    pub match_id: String,
    pub players: [String; 2],
    pub weights: Vec<f64>,
    pub points: Vec<SeriesPoint>,
    pub warnings: Vec<String>,
}

/// Score every (point, player) pair of a single-match dataset.
///
/// Every point contributes two alternatives to one decision matrix, so
/// closeness values are comparable across the whole match.
pub fn momentum_series(
    dataset: &MatchDataset,
    w: &WeightVector,
) -> Result<MomentumSeries, TopsisError> {
    match dataset.matches() {
        [] => Err(TopsisError::EmptySeries("dataset has no points".into())),
        [_] => series_for(dataset.records(), w),
        many => Err(TopsisError::Dimension(format!(
            "dataset covers {} matches; select one",
            many.len()
        ))),
    }
}

/// One series per match, in dataset order.
pub fn momentum_series_all(
    dataset: &MatchDataset,
    w: &WeightVector,
) -> Vec<Result<MomentumSeries, TopsisError>> {
    let groups: Vec<&[PointRecord]> = dataset.iter_matches().map(|(_, r)| r).collect();
    par::map_slice(&groups, |records| series_for(records, w))
}

fn criteria_row(r: &PointRecord, side: Side) -> Vec<f64> {
    let i = side.index();
    vec![
        f64::from(r.sets[i]),
        f64::from(r.games[i]),
        f64::from(r.points_won[i]),
        if r.server == side { 1.0 } else { 0.0 },
    ]
}

fn series_for(records: &[PointRecord], w: &WeightVector) -> Result<MomentumSeries, TopsisError> {
    let first = records
        .first()
        .ok_or_else(|| TopsisError::EmptySeries("no points".into()))?;
    let rows: Vec<Vec<f64>> = records
        .iter()
        .flat_map(|r| Side::BOTH.map(|s| criteria_row(r, s)))
        .collect();
    let x = DecisionMatrix::with_criteria(
        Matrix::from_rows(&rows)?,
        MOMENTUM_CRITERIA.iter().map(|s| s.to_string()).collect(),
        vec![Direction::Benefit; MOMENTUM_CRITERIA.len()],
    )?;
    let result = evaluate(&x, w)?;
    let points = records
        .iter()
        .enumerate()
        .map(|(k, r)| SeriesPoint {
            elapsed_seconds: r.elapsed_seconds,
            set_no: r.set_no,
            game_no: r.game_no,
            point_no: r.point_no,
            closeness: [result.closeness[2 * k], result.closeness[2 * k + 1]],
            points_won: r.points_won,
        })
        .collect();
    Ok(MomentumSeries {
        match_id: first.match_id.clone(),
        players: [first.player1.clone(), first.player2.clone()],
        weights: w.as_slice().to_vec(),
        points,
        warnings: result.warnings,
    })
}

impl MomentumSeries {
    pub const CSV_HEADER: &'static str = "elapsed_seconds,set_no,game_no,point_no,player,closeness";

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn closeness(&self, side: Side) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.closeness[side.index()])
            .collect()
    }

    /// Points of one set. Closeness values are those of the full match.
    pub fn set(&self, set_no: u32) -> MomentumSeries {
        MomentumSeries {
            points: self
                .points
                .iter()
                .filter(|p| p.set_no == set_no)
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    pub fn set_numbers(&self) -> Vec<u32> {
        let mut sets: Vec<u32> = self.points.iter().map(|p| p.set_no).collect();
        sets.dedup();
        sets
    }

    /// Long format: two rows per point, player 1 first.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            for side in Side::BOTH {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.elapsed_seconds,
                    p.set_no,
                    p.game_no,
                    p.point_no,
                    side.number(),
                    p.closeness[side.index()]
                )?;
            }
        }
        Ok(())
    }
}
