use std::fmt;

use serde::Serialize;

use super::IngestError;

/// One of the two players in a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn opponent(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn from_number(n: u8) -> Option<Side> {
        match n {
            1 => Some(Side::One),
            2 => Some(Side::Two),
            _ => None,
        }
    }

    /// Column prefix used by the CSV schema (`p1`/`p2`).
    pub fn prefix(self) -> &'static str {
        match self {
            Side::One => "p1",
            Side::Two => "p2",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Regular in-game score. Ordered by game progress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GameScore {
    Love,
    Fifteen,
    Thirty,
    Forty,
    Advantage,
}

impl GameScore {
    pub const ALL: [GameScore; 5] = [
        GameScore::Love,
        GameScore::Fifteen,
        GameScore::Thirty,
        GameScore::Forty,
        GameScore::Advantage,
    ];

    pub fn token(self) -> &'static str {
        match self {
            GameScore::Love => "0",
            GameScore::Fifteen => "15",
            GameScore::Thirty => "30",
            GameScore::Forty => "40",
            GameScore::Advantage => "AD",
        }
    }

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn from_token(token: &str) -> Option<GameScore> {
        GameScore::ALL.into_iter().find(|s| s.token() == token)
    }
}

/// Score cell as it appears in the data. Tie-break games carry plain point
/// counts instead of the 0/15/30/40/AD tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Score {
    Game(GameScore),
    TieBreak(u16),
}

impl Score {
    pub fn parse(token: &str) -> Option<Score> {
        let token = token.trim();
        if let Some(s) = GameScore::from_token(token) {
            return Some(Score::Game(s));
        }
        token.parse::<u16>().ok().map(Score::TieBreak)
    }

    pub fn token(&self) -> String {
        match self {
            Score::Game(s) => s.token().to_string(),
            Score::TieBreak(n) => n.to_string(),
        }
    }

    /// Ordinal for regular game scores, `None` inside a tie-break.
    pub fn ordinal(&self) -> Option<u8> {
        match self {
            Score::Game(s) => Some(s.ordinal()),
            Score::TieBreak(_) => None,
        }
    }
}

/// Map a score token to its position in the order 0, 15, 30, 40, AD.
pub fn encode_score(token: &str) -> Result<u8, IngestError> {
    GameScore::from_token(token.trim())
        .map(GameScore::ordinal)
        .ok_or_else(|| IngestError::Encoding {
            column: "score".into(),
            token: token.to_string(),
        })
}

macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $tok:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $tok),+ }
            }

            pub fn parse(token: &str) -> Option<$name> {
                match token.trim() { $($tok => Some($name::$variant),)+ _ => None }
            }
        }
    };
}

token_enum!(
    /// Forehand or backhand winner.
    ShotType { Forehand => "F", Backhand => "B" }
);
token_enum!(
    /// Direction of serve.
    ServeWidth { Body => "B", BodyCenter => "BC", BodyWide => "BW", Center => "C", Wide => "W" }
);
token_enum!(
    /// Close to line / not close to line.
    ServeDepth { CloseToLine => "CTL", NotCloseToLine => "NCTL" }
);
token_enum!(
    /// Deep / not deep.
    ReturnDepth { Deep => "D", NotDeep => "ND" }
);

/// Per-player event flags and running distance for a single point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlayerPoint {
    pub ace: bool,
    pub winner: bool,
    pub double_fault: bool,
    pub unf_err: bool,
    pub net_pt: bool,
    pub net_pt_won: bool,
    pub break_pt: bool,
    pub break_pt_won: bool,
    pub break_pt_missed: bool,
    pub distance_run: Option<f64>,
}

impl PlayerPoint {
    /// Flag columns in schema order, without the `pN_` prefix.
    pub const FLAG_NAMES: [&'static str; 9] = [
        "ace",
        "winner",
        "double_fault",
        "unf_err",
        "net_pt",
        "net_pt_won",
        "break_pt",
        "break_pt_won",
        "break_pt_missed",
    ];

    pub fn flag(&self, name: &str) -> Option<bool> {
        Some(match name {
            "ace" => self.ace,
            "winner" => self.winner,
            "double_fault" => self.double_fault,
            "unf_err" => self.unf_err,
            "net_pt" => self.net_pt,
            "net_pt_won" => self.net_pt_won,
            "break_pt" => self.break_pt,
            "break_pt_won" => self.break_pt_won,
            "break_pt_missed" => self.break_pt_missed,
            _ => return None,
        })
    }

    pub fn flag_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "ace" => &mut self.ace,
            "winner" => &mut self.winner,
            "double_fault" => &mut self.double_fault,
            "unf_err" => &mut self.unf_err,
            "net_pt" => &mut self.net_pt,
            "net_pt_won" => &mut self.net_pt_won,
            "break_pt" => &mut self.break_pt,
            "break_pt_won" => &mut self.break_pt_won,
            "break_pt_missed" => &mut self.break_pt_missed,
            _ => return None,
        })
    }
}

/// One row of point-by-point match data.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub match_id: String,
    pub player1: String,
    pub player2: String,
    /// Seconds since the first point of the match.
    pub elapsed_seconds: u32,
    pub set_no: u32,
    pub game_no: u32,
    pub point_no: u32,
    /// Sets won, indexed by [`Side::index`].
    pub sets: [u8; 2],
    /// Games won in the current set.
    pub games: [u8; 2],
    pub score: [Score; 2],
    pub server: Side,
    pub serve_no: u8,
    pub point_victor: Side,
    /// Cumulative match points won, including this point.
    pub points_won: [u32; 2],
    pub game_victor: Option<Side>,
    pub set_victor: Option<Side>,
    pub players: [PlayerPoint; 2],
    pub rally_count: Option<u32>,
    pub speed_mph: Option<f64>,
    pub winner_shot_type: Option<ShotType>,
    pub serve_width: Option<ServeWidth>,
    pub serve_depth: Option<ServeDepth>,
    pub return_depth: Option<ReturnDepth>,
}

/// Level used for `winner_shot_type` on points without a winner.
pub const NO_WINNER_LEVEL: &str = "0";

/// Categorical columns that can be one-hot or ordinal encoded.
pub const CATEGORICAL_COLUMNS: [&str; 4] = [
    "winner_shot_type",
    "serve_width",
    "serve_depth",
    "return_depth",
];

/// Names accepted in place of the canonical column names.
pub fn canonical_column(name: &str) -> &str {
    match name {
        "serve_4idth" => "serve_width",
        "return_1epth" => "return_depth",
        other => other,
    }
}

impl PointRecord {
    pub fn player(&self, side: Side) -> &str {
        match side {
            Side::One => &self.player1,
            Side::Two => &self.player2,
        }
    }

    pub fn stats(&self, side: Side) -> &PlayerPoint {
        &self.players[side.index()]
    }

    pub fn won_by(&self, side: Side) -> bool {
        self.point_victor == side
    }

    /// Points won by `side` before this point was played.
    pub fn points_before(&self, side: Side) -> u32 {
        self.points_won[side.index()] - u32::from(self.won_by(side))
    }

    /// Categorical value of `name`. `winner_shot_type` is never missing:
    /// points without a winner report [`NO_WINNER_LEVEL`].
    pub fn categorical(&self, name: &str) -> Result<Option<&'static str>, IngestError> {
        Ok(match canonical_column(name) {
            "winner_shot_type" => Some(
                self.winner_shot_type
                    .map(ShotType::as_str)
                    .unwrap_or(NO_WINNER_LEVEL),
            ),
            "serve_width" => self.serve_width.map(ServeWidth::as_str),
            "serve_depth" => self.serve_depth.map(ServeDepth::as_str),
            "return_depth" => self.return_depth.map(ReturnDepth::as_str),
            _ => return Err(IngestError::UnknownColumn(name.to_string())),
        })
    }

    pub fn is_categorical(name: &str) -> bool {
        CATEGORICAL_COLUMNS.contains(&canonical_column(name))
    }

    /// Whether [`PointRecord::numeric`] accepts `name`.
    pub fn is_numeric(name: &str) -> bool {
        const PLAYER: [&str; 5] = ["distance_run", "sets", "games", "points_won", "score"];
        const OTHER: [&str; 15] = [
            "elapsed_time",
            "elapsed_seconds",
            "set_no",
            "game_no",
            "point_no",
            "server",
            "serve_no",
            "point_victor",
            "game_victor",
            "set_victor",
            "rally_count",
            "speed_mph",
            "is_server",
            "won_point",
            "points_before",
        ];
        let name = canonical_column(name);
        let player = |n: &str| PlayerPoint::FLAG_NAMES.contains(&n) || PLAYER.contains(&n);
        let prefixed = name
            .strip_prefix("p1_")
            .or_else(|| name.strip_prefix("p2_"))
            .is_some_and(player);
        prefixed || player(name) || OTHER.contains(&name)
    }

    /// Numeric value of a column, viewed from `side`.
    ///
    /// Absolute schema names (`p2_ace`, `speed_mph`, `point_victor`) ignore
    /// `side`. Player-relative names (`ace`, `distance_run`, `sets`,
    /// `won_point`, ...) resolve against `side`. Missing values are `None`.
    pub fn numeric(&self, name: &str, side: Side) -> Result<Option<f64>, IngestError> {
        let name = canonical_column(name);
        if !Self::is_numeric(name) {
            return Err(IngestError::UnknownColumn(name.to_string()));
        }
        let flag = |b: bool| Some(if b { 1.0 } else { 0.0 });
        if let Some(rest) = name.strip_prefix("p1_") {
            if let Some(v) = self.player_numeric(rest, Side::One) {
                return Ok(v);
            }
        }
        if let Some(rest) = name.strip_prefix("p2_") {
            if let Some(v) = self.player_numeric(rest, Side::Two) {
                return Ok(v);
            }
        }
        if let Some(v) = self.player_numeric(name, side) {
            return Ok(v);
        }
        Ok(match name {
            "elapsed_time" | "elapsed_seconds" => Some(f64::from(self.elapsed_seconds)),
            "set_no" => Some(f64::from(self.set_no)),
            "game_no" => Some(f64::from(self.game_no)),
            "point_no" => Some(f64::from(self.point_no)),
            "server" => Some(f64::from(self.server.number())),
            "serve_no" => Some(f64::from(self.serve_no)),
            "point_victor" => Some(f64::from(self.point_victor.number())),
            "game_victor" => Some(f64::from(self.game_victor.map_or(0, Side::number))),
            "set_victor" => Some(f64::from(self.set_victor.map_or(0, Side::number))),
            "rally_count" => self.rally_count.map(f64::from),
            "speed_mph" => self.speed_mph,
            "is_server" => flag(self.server == side),
            "won_point" => flag(self.won_by(side)),
            "points_before" => Some(f64::from(self.points_before(side))),
            _ => unreachable!("checked by is_numeric"),
        })
    }

    /// Per-player columns without prefix; `None` when `name` is not one.
    fn player_numeric(&self, name: &str, side: Side) -> Option<Option<f64>> {
        let i = side.index();
        let stats = &self.players[i];
        if let Some(b) = stats.flag(name) {
            return Some(Some(if b { 1.0 } else { 0.0 }));
        }
        Some(match name {
            "distance_run" => stats.distance_run,
            "sets" => Some(f64::from(self.sets[i])),
            "games" => Some(f64::from(self.games[i])),
            "points_won" => Some(f64::from(self.points_won[i])),
            "score" => self.score[i].ordinal().map(f64::from),
            _ => return None,
        })
    }
}

/// Parse `H:MM:SS` (hours unbounded) into seconds.
pub fn parse_elapsed(text: &str) -> Option<u32> {
    let mut parts = text.trim().split(':');
    let h: u32 = parts.next()?.parse().ok()?;
    let m: u32 = parts.next()?.parse().ok()?;
    let s: u32 = parts.next()?.parse().ok()?;
    if parts.next().is_some() || m >= 60 || s >= 60 {
        return None;
    }
    h.checked_mul(3600)?.checked_add(m * 60 + s)
}

pub fn format_elapsed(seconds: u32) -> String {
    format!(
        "{}:{:02}:{:02}",
        seconds / 3600,
        (seconds / 60) % 60,
        seconds % 60
    )
}
