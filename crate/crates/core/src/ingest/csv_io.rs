use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use super::record::{format_elapsed, parse_elapsed};
use super::{
    Diagnostic, IngestError, MatchDataset, PlayerPoint, PointRecord, ReturnDepth, Score,
    ServeDepth, ServeWidth, ShotType, Side,
};

/// Every column of the point-by-point schema, in file order.
pub const COLUMNS: [&str; 46] = [
    "match_id",
    "player1",
    "player2",
    "elapsed_time",
    "set_no",
    "game_no",
    "point_no",
    "p1_sets",
    "p2_sets",
    "p1_games",
    "p2_games",
    "p1_score",
    "p2_score",
    "server",
    "serve_no",
    "point_victor",
    "p1_points_won",
    "p2_points_won",
    "game_victor",
    "set_victor",
    "p1_ace",
    "p2_ace",
    "p1_winner",
    "p2_winner",
    "winner_shot_type",
    "p1_double_fault",
    "p2_double_fault",
    "p1_unf_err",
    "p2_unf_err",
    "p1_net_pt",
    "p2_net_pt",
    "p1_net_pt_won",
    "p2_net_pt_won",
    "p1_break_pt",
    "p2_break_pt",
    "p1_break_pt_won",
    "p2_break_pt_won",
    "p1_break_pt_missed",
    "p2_break_pt_missed",
    "p1_distance_run",
    "p2_distance_run",
    "rally_count",
    "speed_mph",
    "serve_width",
    "serve_depth",
    "return_depth",
];

/// Scoring columns every file must carry.
const CORE_COLUMNS: [&str; 20] = [
    "match_id",
    "player1",
    "player2",
    "elapsed_time",
    "set_no",
    "game_no",
    "point_no",
    "p1_sets",
    "p2_sets",
    "p1_games",
    "p2_games",
    "p1_score",
    "p2_score",
    "server",
    "serve_no",
    "point_victor",
    "p1_points_won",
    "p2_points_won",
    "game_victor",
    "set_victor",
];

/// Which schema columns must be present in the header. Columns that are
/// allowed to be absent read as missing (numeric, categorical) or 0 (flags).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    required: Vec<&'static str>,
}

impl Schema {
    /// Every column required.
    pub fn strict() -> Self {
        Schema {
            required: COLUMNS.to_vec(),
        }
    }

    /// Only the match/score columns required.
    pub fn scoring_only() -> Self {
        Schema {
            required: CORE_COLUMNS.to_vec(),
        }
    }

    pub fn required(&self) -> &[&'static str] {
        &self.required
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::scoring_only()
    }
}

fn is_missing(token: &str) -> bool {
    matches!(token.trim(), "" | "NA" | "NaN" | "nan" | "N/A")
}

struct Row<'a> {
    number: usize,
    record: &'a csv::StringRecord,
    index: &'a HashMap<&'static str, usize>,
}

impl Row<'_> {
    fn cell(&self, col: &'static str) -> Option<&str> {
        self.index
            .get(col)
            .map(|&i| self.record.get(i).unwrap_or("").trim())
    }

    fn err(&self, col: &str, message: impl Into<String>) -> IngestError {
        IngestError::Row {
            row: self.number,
            column: col.to_string(),
            message: message.into(),
        }
    }

    fn text(&self, col: &'static str) -> Result<String, IngestError> {
        match self.cell(col) {
            Some(t) if !t.is_empty() => Ok(t.to_string()),
            _ => Err(self.err(col, "missing value")),
        }
    }

    fn int<T: std::str::FromStr>(&self, col: &'static str) -> Result<T, IngestError> {
        let t = self.cell(col).unwrap_or("");
        if is_missing(t) {
            return Err(self.err(col, "missing value"));
        }
        // Integer columns occasionally arrive as "3.0".
        t.parse::<T>()
            .ok()
            .or_else(|| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.fract() == 0.0 && *v >= 0.0)
                    .and_then(|v| format!("{v:.0}").parse().ok())
            })
            .ok_or_else(|| self.err(col, format!("not an integer: {t:?}")))
    }

    fn bounded(&self, col: &'static str, lo: u32, hi: u32) -> Result<u32, IngestError> {
        let v: u32 = self.int(col)?;
        if v < lo || v > hi {
            return Err(self.err(col, format!("{v} outside {lo}..={hi}")));
        }
        Ok(v)
    }

    fn side(&self, col: &'static str) -> Result<Side, IngestError> {
        let v = self.bounded(col, 1, 2)?;
        Ok(Side::from_number(v as u8).expect("bounded"))
    }

    fn optional_side(&self, col: &'static str) -> Result<Option<Side>, IngestError> {
        if self.cell(col).is_none() {
            return Ok(None);
        }
        Ok(Side::from_number(self.bounded(col, 0, 2)? as u8))
    }

    fn flag(&self, col: &'static str) -> Result<bool, IngestError> {
        match self.cell(col) {
            None => Ok(false),
            Some(_) => Ok(self.bounded(col, 0, 1)? == 1),
        }
    }

    fn real(&self, col: &'static str) -> Result<Option<f64>, IngestError> {
        match self.cell(col) {
            None => Ok(None),
            Some(t) if is_missing(t) => Ok(None),
            Some(t) => match t.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
                _ => Err(self.err(col, format!("not a nonnegative number: {t:?}"))),
            },
        }
    }

    fn token<T>(
        &self,
        col: &'static str,
        parse: fn(&str) -> Option<T>,
    ) -> Result<Option<T>, IngestError> {
        match self.cell(col) {
            None => Ok(None),
            Some(t) if is_missing(t) => Ok(None),
            Some(t) => parse(t)
                .map(Some)
                .ok_or_else(|| self.err(col, format!("unknown token {t:?}"))),
        }
    }

    /// At 6-6 in games every token is a tie-break point count, so "0"
    /// and "15" are not read as game scores.
    fn score(&self, col: &'static str, tiebreak: bool) -> Result<Score, IngestError> {
        let t = self.cell(col).unwrap_or("").trim();
        let parsed = if tiebreak {
            t.parse::<u16>().ok().map(Score::TieBreak)
        } else {
            Score::parse(t)
        };
        parsed.ok_or_else(|| self.err(col, format!("unknown score token {t:?}")))
    }

    fn player(&self, prefix: &str) -> Result<PlayerPoint, IngestError> {
        // Column names are static; look them up through the schema list.
        let col = |suffix: &str| -> &'static str {
            let name = format!("{prefix}_{suffix}");
            super::COLUMNS
                .iter()
                .copied()
                .find(|c| *c == name)
                .expect("schema column")
        };
        let mut p = PlayerPoint::default();
        for name in PlayerPoint::FLAG_NAMES {
            *p.flag_mut(name).expect("flag") = self.flag(col(name))?;
        }
        p.distance_run = self.real(col("distance_run"))?;
        Ok(p)
    }

    fn parse(&self) -> Result<PointRecord, IngestError> {
        let elapsed = self.cell("elapsed_time").unwrap_or("");
        let elapsed_seconds = parse_elapsed(elapsed).ok_or_else(|| {
            self.err("elapsed_time", format!("expected H:MM:SS, got {elapsed:?}"))
        })?;
        let winner_shot_type = match self.cell("winner_shot_type") {
            None => None,
            Some(t) if is_missing(t) || t == super::NO_WINNER_LEVEL => None,
            Some(t) => Some(
                ShotType::parse(t)
                    .ok_or_else(|| self.err("winner_shot_type", format!("unknown token {t:?}")))?,
            ),
        };
        let rally_count = match self.real("rally_count")? {
            Some(v) if v.fract() != 0.0 || v < 1.0 => {
                return Err(self.err("rally_count", format!("expected a count >= 1, got {v}")))
            }
            v => v.map(|v| v as u32),
        };
        let games = [
            self.bounded("p1_games", 0, 7)? as u8,
            self.bounded("p2_games", 0, 7)? as u8,
        ];
        let tiebreak = games == [6, 6];
        Ok(PointRecord {
            match_id: self.text("match_id")?,
            player1: self.text("player1")?,
            player2: self.text("player2")?,
            elapsed_seconds,
            set_no: self.bounded("set_no", 1, u32::MAX)?,
            game_no: self.bounded("game_no", 1, u32::MAX)?,
            point_no: self.bounded("point_no", 1, u32::MAX)?,
            sets: [
                self.bounded("p1_sets", 0, 2)? as u8,
                self.bounded("p2_sets", 0, 2)? as u8,
            ],
            games,
            score: [
                self.score("p1_score", tiebreak)?,
                self.score("p2_score", tiebreak)?,
            ],
            server: self.side("server")?,
            serve_no: self.bounded("serve_no", 1, 2)? as u8,
            point_victor: self.side("point_victor")?,
            points_won: [self.int("p1_points_won")?, self.int("p2_points_won")?],
            game_victor: self.optional_side("game_victor")?,
            set_victor: self.optional_side("set_victor")?,
            players: [self.player("p1")?, self.player("p2")?],
            rally_count,
            speed_mph: self.real("speed_mph")?,
            winner_shot_type,
            serve_width: self.token("serve_width", ServeWidth::parse)?,
            serve_depth: self.token("serve_depth", ServeDepth::parse)?,
            return_depth: self.token("return_depth", ReturnDepth::parse)?,
        })
    }
}

/// Read a point-by-point CSV file.
///
/// Unknown columns are ignored and listed in `unknown_columns`; row-level
/// problems that do not prevent parsing end up in `diagnostics`.
pub fn parse_match_csv<R: Read>(source: R, schema: &Schema) -> Result<MatchDataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::Headers)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(IngestError::Schema("empty header row".into()));
    }

    let mut index: HashMap<&'static str, usize> = HashMap::new();
    let mut unknown = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        let name = super::canonical_column(h.trim_start_matches('\u{feff}'));
        match COLUMNS.iter().copied().find(|c| *c == name) {
            Some(c) => {
                if index.insert(c, i).is_some() {
                    return Err(IngestError::Schema(format!("duplicate column {c:?}")));
                }
            }
            None => unknown.push(h.to_string()),
        }
    }
    let missing: Vec<&str> = schema
        .required()
        .iter()
        .copied()
        .filter(|c| !index.contains_key(c))
        .collect();
    if !missing.is_empty() {
        return Err(IngestError::Schema(format!(
            "missing required columns: {}",
            missing.join(", ")
        )));
    }

    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = Row {
            number: i + 1,
            record: &rec,
            index: &index,
        };
        records.push(row.parse()?);
    }
    if records.is_empty() {
        return Err(IngestError::EmptyDataset);
    }

    let mut dataset = MatchDataset::from_records(records)?;
    if !unknown.is_empty() {
        dataset.diagnostics.insert(
            0,
            Diagnostic::general(format!(
                "ignored {} unknown column(s): {}",
                unknown.len(),
                unknown.join(", ")
            )),
        );
    }
    dataset.unknown_columns = unknown;
    Ok(dataset)
}

pub fn read_match_file(
    path: impl AsRef<Path>,
    schema: &Schema,
) -> Result<MatchDataset, IngestError> {
    let file = std::fs::File::open(path)?;
    parse_match_csv(std::io::BufReader::new(file), schema)
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Write every record with the full column set, in [`COLUMNS`] order.
pub fn write_match_csv<W: Write>(dataset: &MatchDataset, sink: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(COLUMNS)?;
    for r in dataset.records() {
        let mut row: Vec<String> = vec![
            r.match_id.clone(),
            r.player1.clone(),
            r.player2.clone(),
            format_elapsed(r.elapsed_seconds),
            r.set_no.to_string(),
            r.game_no.to_string(),
            r.point_no.to_string(),
            r.sets[0].to_string(),
            r.sets[1].to_string(),
            r.games[0].to_string(),
            r.games[1].to_string(),
            r.score[0].token(),
            r.score[1].token(),
            r.server.to_string(),
            r.serve_no.to_string(),
            r.point_victor.to_string(),
            r.points_won[0].to_string(),
            r.points_won[1].to_string(),
            r.game_victor.map_or(0, Side::number).to_string(),
            r.set_victor.map_or(0, Side::number).to_string(),
        ];
        let [p1, p2] = &r.players;
        let pair = |name: &str| {
            [
                flag(p1.flag(name).expect("flag")).to_string(),
                flag(p2.flag(name).expect("flag")).to_string(),
            ]
        };
        row.extend(pair("ace"));
        row.extend(pair("winner"));
        row.push(
            r.winner_shot_type
                .map_or(super::NO_WINNER_LEVEL, ShotType::as_str)
                .to_string(),
        );
        for name in &PlayerPoint::FLAG_NAMES[2..] {
            row.extend(pair(name));
        }
        row.push(opt_num(p1.distance_run));
        row.push(opt_num(p2.distance_run));
        row.push(r.rally_count.map_or_else(|| "NA".into(), |c| c.to_string()));
        row.push(opt_num(r.speed_mph));
        row.push(r.serve_width.map_or("NA", ServeWidth::as_str).to_string());
        row.push(r.serve_depth.map_or("NA", ServeDepth::as_str).to_string());
        row.push(r.return_depth.map_or("NA", ReturnDepth::as_str).to_string());
        debug_assert_eq!(row.len(), COLUMNS.len());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
