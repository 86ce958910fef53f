use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::Serialize;

use super::{IngestError, PointRecord};

/// Non-fatal message produced while reading or transforming data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based data row (header excluded), when the message is row-specific.
    pub row: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn row(row: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            row: Some(row),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Diagnostic {
            row: None,
            message: message.into(),
        }
    }
}

impl Serialize for Diagnostic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "row {r}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchInfo {
    pub match_id: String,
    pub player1: String,
    pub player2: String,
    pub points: usize,
    range: Range<usize>,
}

/// Points of one or more matches.
///
/// Matches keep their first-appearance order; points within a match are
/// sorted by `(set_no, game_no, point_no)` and unique on that key.
#[derive(Debug, Clone, Default)]
pub struct MatchDataset {
    records: Vec<PointRecord>,
    matches: Vec<MatchInfo>,
    pub diagnostics: Vec<Diagnostic>,
    pub unknown_columns: Vec<String>,
}

impl MatchDataset {
    /// Group, order and validate records.
    pub fn from_records(records: Vec<PointRecord>) -> Result<Self, IngestError> {
        let mut order: Vec<String> = Vec::new();
        let mut groups: HashMap<String, Vec<PointRecord>> = HashMap::new();
        for r in records {
            if !groups.contains_key(&r.match_id) {
                order.push(r.match_id.clone());
            }
            groups.entry(r.match_id.clone()).or_default().push(r);
        }

        let mut out = MatchDataset::default();
        for id in order {
            let mut group = groups.remove(&id).unwrap_or_default();
            group.sort_by_key(|r| (r.set_no, r.game_no, r.point_no));
            for w in group.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if (a.set_no, a.game_no, a.point_no) == (b.set_no, b.game_no, b.point_no) {
                    return Err(IngestError::DuplicatePoint {
                        match_id: id,
                        set_no: a.set_no,
                        game_no: a.game_no,
                        point_no: a.point_no,
                    });
                }
            }
            let start = out.records.len();
            let first = &group[0];
            let info = MatchInfo {
                match_id: id.clone(),
                player1: first.player1.clone(),
                player2: first.player2.clone(),
                points: group.len(),
                range: start..start + group.len(),
            };
            out.check_match(&group);
            out.records.extend(group);
            out.matches.push(info);
        }
        Ok(out)
    }

    fn check_match(&mut self, group: &[PointRecord]) {
        let id = &group[0].match_id;
        for (i, w) in group.windows(2).enumerate() {
            if w[1].elapsed_seconds < w[0].elapsed_seconds {
                self.diagnostics.push(Diagnostic::general(format!(
                    "match {id}: elapsed_time decreases at point {}",
                    i + 2
                )));
            }
        }
        for (i, r) in group.iter().enumerate() {
            let total = r.points_won[0] + r.points_won[1];
            if total as usize != i + 1 {
                self.diagnostics.push(Diagnostic::general(format!(
                    "match {id}: points won total {total} at point {} of the match",
                    i + 1
                )));
                break;
            }
        }
    }

    pub fn records(&self) -> &[PointRecord] {
        &self.records
    }

    pub fn matches(&self) -> &[MatchInfo] {
        &self.matches
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn match_info(&self, match_id: &str) -> Option<&MatchInfo> {
        self.matches.iter().find(|m| m.match_id == match_id)
    }

    pub fn match_records(&self, match_id: &str) -> Option<&[PointRecord]> {
        self.match_info(match_id)
            .map(|m| &self.records[m.range.clone()])
    }

    /// Iterate over `(info, points)` per match.
    pub fn iter_matches(&self) -> impl Iterator<Item = (&MatchInfo, &[PointRecord])> {
        self.matches
            .iter()
            .map(move |m| (m, &self.records[m.range.clone()]))
    }

    /// Dataset restricted to records satisfying `keep`. Diagnostics are not
    /// carried over.
    pub fn filter(&self, keep: impl Fn(&PointRecord) -> bool) -> MatchDataset {
        let records = self.records.iter().filter(|r| keep(r)).cloned().collect();
        // Order and uniqueness already hold for any subset; the running-total
        // checks do not, so their messages are discarded.
        let mut out =
            MatchDataset::from_records(records).expect("subset of a valid dataset is valid");
        out.diagnostics.clear();
        out
    }

    /// Single match as its own dataset.
    pub fn single_match(&self, match_id: &str) -> Option<MatchDataset> {
        self.match_info(match_id)?;
        Some(self.filter(|r| r.match_id == match_id))
    }
}
