use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{MatchDataset, PointRecord};

/// Which games count as key games.
///
/// A game is key when any of its points carries a break point (either
/// player), or when either player's game count in the current set reaches
/// `min_games`. Disabling both criteria selects nothing; [`KeyGameRule::all`]
/// selects every game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KeyGameRule {
    pub break_points: bool,
    pub min_games: Option<u8>,
    pub every_game: bool,
}

impl Default for KeyGameRule {
    fn default() -> Self {
        KeyGameRule {
            break_points: true,
            min_games: Some(5),
            every_game: false,
        }
    }
}

impl KeyGameRule {
    pub fn all() -> Self {
        KeyGameRule {
            break_points: false,
            min_games: None,
            every_game: true,
        }
    }

    fn point_qualifies(&self, r: &PointRecord) -> bool {
        self.every_game
            || (self.break_points && (r.players[0].break_pt || r.players[1].break_pt))
            || self
                .min_games
                .is_some_and(|g| r.games[0] >= g || r.games[1] >= g)
    }
}

impl fmt::Display for KeyGameRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.every_game {
            return f.write_str("all");
        }
        let mut parts = Vec::new();
        if self.break_points {
            parts.push("break".to_string());
        }
        if let Some(g) = self.min_games {
            parts.push(format!("games>={g}"));
        }
        if parts.is_empty() {
            parts.push("none".into());
        }
        f.write_str(&parts.join(","))
    }
}

impl FromStr for KeyGameRule {
    type Err = String;

    /// Comma-separated terms: `break`, `games>=N`, `all`, `none`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rule = KeyGameRule {
            break_points: false,
            min_games: None,
            every_game: false,
        };
        for term in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match term {
                "break" => rule.break_points = true,
                "all" => rule.every_game = true,
                "none" => {}
                t => {
                    let n = t
                        .strip_prefix("games>=")
                        .and_then(|n| n.trim().parse::<u8>().ok())
                        .ok_or_else(|| {
                            format!(
                                "unknown key-game term {t:?} (expected break, games>=N, all, none)"
                            )
                        })?;
                    rule.min_games = Some(n);
                }
            }
        }
        Ok(rule)
    }
}

/// Points belonging to key games, in dataset order.
pub fn select_key_games(dataset: &MatchDataset, rule: &KeyGameRule) -> MatchDataset {
    let key: HashSet<(&str, u32, u32)> = dataset
        .records()
        .iter()
        .filter(|r| rule.point_qualifies(r))
        .map(|r| (r.match_id.as_str(), r.set_no, r.game_no))
        .collect();
    dataset.filter(|r| key.contains(&(r.match_id.as_str(), r.set_no, r.game_no)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{GameScore, PlayerPoint, Score, Side};

    fn point(game_no: u32, point_no: u32, games: [u8; 2], p2_break: bool) -> PointRecord {
        let mut players = [PlayerPoint::default(); 2];
        players[1].break_pt = p2_break;
        PointRecord {
            match_id: "m".into(),
            player1: "A".into(),
            player2: "B".into(),
            elapsed_seconds: game_no * 100 + point_no,
            set_no: 1,
            game_no,
            point_no,
            sets: [0, 0],
            games,
            score: [Score::Game(GameScore::Love); 2],
            server: Side::One,
            serve_no: 1,
            point_victor: Side::One,
            points_won: [0, 0],
            game_victor: None,
            set_victor: None,
            players,
            rally_count: Some(1),
            speed_mph: None,
            winner_shot_type: None,
            serve_width: None,
            serve_depth: None,
            return_depth: None,
        }
    }

    fn ds(records: Vec<PointRecord>) -> MatchDataset {
        MatchDataset::from_records(records).unwrap()
    }

    #[test]
    fn no_break_points_early_games_is_empty() {
        let d = ds((1..=4).map(|p| point(1, p, [0, 0], false)).collect());
        assert!(select_key_games(&d, &KeyGameRule::default()).is_empty());
    }

    #[test]
    fn break_point_pulls_in_whole_game() {
        let mut recs: Vec<_> = (1..=4).map(|p| point(1, p, [1, 0], p == 3)).collect();
        recs.extend((1..=4).map(|p| point(2, p, [1, 1], false)));
        let sel = select_key_games(&ds(recs), &KeyGameRule::default());
        assert_eq!(sel.len(), 4);
        assert!(sel.records().iter().all(|r| r.game_no == 1));
    }

    #[test]
    fn five_games_qualifies() {
        let mut recs: Vec<_> = (1..=4).map(|p| point(9, p, [5, 3], false)).collect();
        recs.extend((1..=4).map(|p| point(2, p, [1, 0], false)));
        let sel = select_key_games(&ds(recs), &KeyGameRule::default());
        assert_eq!(sel.len(), 4);
        assert!(sel.records().iter().all(|r| r.game_no == 9));
    }

    #[test]
    fn rule_parsing_round_trips() {
        for text in ["break,games>=5", "break", "games>=4", "all", "none"] {
            let rule: KeyGameRule = text.parse().unwrap();
            assert_eq!(rule.to_string(), text);
        }
        assert_eq!(
            "break,games>=5".parse::<KeyGameRule>().unwrap(),
            KeyGameRule::default()
        );
        assert!("tiebreak".parse::<KeyGameRule>().is_err());
    }
}
