//! Seeded point-by-point match simulator.
//!
//! Produces schema-complete [`PointRecord`]s with real tennis scoring
//! (deuce/advantage games, 7-point tie-breaks at 6–6, alternating serve) so
//! that fixtures exercise the same invariants as recorded matches. The
//! probability that player 1 wins each point comes from a pluggable
//! [`VictorLaw`], which lets tests plant known structure.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::ingest::{
    GameScore, MatchDataset, PlayerPoint, PointRecord, ReturnDepth, Score, ServeDepth, ServeWidth,
    ShotType, Side,
};

/// Pre-point state visible to a [`VictorLaw`].
#[derive(Debug, Clone)]
pub struct PointContext {
    pub server: Side,
    pub serve_no: u8,
    pub speed_mph: Option<f64>,
    pub serve_width: ServeWidth,
    pub serve_depth: ServeDepth,
    pub sets: [u8; 2],
    pub games: [u8; 2],
    /// Match points won before this point.
    pub points_before: [u32; 2],
    pub set_no: u32,
    pub game_no: u32,
}

type LawFn = dyn Fn(&PointContext) -> f64 + Send + Sync;

/// Probability that player 1 wins a point.
#[derive(Clone)]
pub enum VictorLaw {
    /// Server wins with `first` on first serve, `second` on second serve.
    ServeBias {
        first: f64,
        second: f64,
    },
    Custom(Arc<LawFn>),
}

impl VictorLaw {
    pub fn custom(f: impl Fn(&PointContext) -> f64 + Send + Sync + 'static) -> Self {
        VictorLaw::Custom(Arc::new(f))
    }

    fn p1_wins(&self, ctx: &PointContext) -> f64 {
        let p = match self {
            VictorLaw::ServeBias { first, second } => {
                let server_wins = if ctx.serve_no == 1 { *first } else { *second };
                match ctx.server {
                    Side::One => server_wins,
                    Side::Two => 1.0 - server_wins,
                }
            }
            VictorLaw::Custom(f) => f(ctx),
        };
        p.clamp(0.0, 1.0)
    }
}

impl Default for VictorLaw {
    fn default() -> Self {
        VictorLaw::ServeBias {
            first: 0.70,
            second: 0.55,
        }
    }
}

impl fmt::Debug for VictorLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VictorLaw::ServeBias { first, second } => f
                .debug_struct("ServeBias")
                .field("first", first)
                .field("second", second)
                .finish(),
            VictorLaw::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub match_id: String,
    pub player1: String,
    pub player2: String,
    /// Sets needed to win the match is `best_of / 2 + 1`.
    pub best_of: u8,
    /// Stop after this many points even if the match is unfinished.
    pub max_points: Option<usize>,
    /// Multiplier on ace/winner/error/net-approach rates. 0 disables events.
    pub event_rate: f64,
    /// Probability that a serve speed is unrecorded.
    pub missing_speed: f64,
    pub law: VictorLaw,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            match_id: "synthetic-0001".into(),
            player1: "Player One".into(),
            player2: "Player Two".into(),
            best_of: 5,
            max_points: None,
            event_rate: 1.0,
            missing_speed: 0.02,
            law: VictorLaw::default(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct GameState {
    points: [u16; 2],
    tiebreak: bool,
}

impl GameState {
    fn score(&self, side: Side) -> Score {
        let me = self.points[side.index()];
        if self.tiebreak {
            return Score::TieBreak(me);
        }
        let them = self.points[side.opponent().index()];
        let s = match me {
            0 => GameScore::Love,
            1 => GameScore::Fifteen,
            2 => GameScore::Thirty,
            _ if me > them => GameScore::Advantage,
            _ => GameScore::Forty,
        };
        Score::Game(s)
    }

    /// `side` wins the game if it wins the next point.
    fn at_game_point(&self, side: Side) -> bool {
        let me = self.points[side.index()];
        let them = self.points[side.opponent().index()];
        let target = if self.tiebreak { 6 } else { 3 };
        me >= target && me > them
    }

    fn winner(&self) -> Option<Side> {
        let target = if self.tiebreak { 7 } else { 4 };
        Side::BOTH.into_iter().find(|&s| {
            let me = self.points[s.index()];
            let them = self.points[s.opponent().index()];
            me >= target && me >= them + 2
        })
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T], weights: &[f64]) -> T {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (item, w) in items.iter().zip(weights) {
        if u < *w {
            return *item;
        }
        u -= w;
    }
    *items.last().expect("nonempty")
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Simulate one match.
pub fn simulate(config: &SynthConfig) -> Vec<PointRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let first_speed = Normal::new(118.0, 7.0).expect("valid normal");
    let second_speed = Normal::new(96.0, 6.0).expect("valid normal");
    let noise = Normal::new(0.0, 2.0).expect("valid normal");
    let rate = |p: f64| (p * config.event_rate).clamp(0.0, 1.0);
    let sets_to_win = config.best_of / 2 + 1;

    let mut out = Vec::new();
    let mut sets = [0u8; 2];
    let mut games = [0u8; 2];
    let mut points_won = [0u32; 2];
    let mut set_no = 1;
    let mut game_no = 1;
    let mut point_no = 1;
    let mut game_server = Side::One;
    let mut game = GameState {
        points: [0, 0],
        tiebreak: false,
    };
    let mut elapsed = 0u32;

    while sets[0] < sets_to_win && sets[1] < sets_to_win {
        if config.max_points.is_some_and(|m| out.len() >= m) {
            break;
        }
        let server = if game.tiebreak {
            // Tie-break: first point by game_server, then two each.
            let played = u32::from(game.points[0] + game.points[1]);
            if played.div_ceil(2) % 2 == 0 {
                game_server
            } else {
                game_server.opponent()
            }
        } else {
            game_server
        };
        let returner = server.opponent();

        let serve_no = if rng.random_bool(0.62) { 1 } else { 2 };
        let speed = if rng.random_bool(config.missing_speed.clamp(0.0, 1.0)) {
            None
        } else {
            let d = if serve_no == 1 {
                &first_speed
            } else {
                &second_speed
            };
            let v: f64 = d.sample(&mut rng);
            Some(v.round().max(60.0))
        };
        let serve_width = pick(&mut rng, ServeWidth::ALL, &[0.1, 0.15, 0.15, 0.3, 0.3]);
        let serve_depth = pick(&mut rng, ServeDepth::ALL, &[0.35, 0.65]);

        let points_before = points_won;
        let ctx = PointContext {
            server,
            serve_no,
            speed_mph: speed,
            serve_width,
            serve_depth,
            sets,
            games,
            points_before,
            set_no,
            game_no,
        };
        let victor = if rng.random_bool(config.law.p1_wins(&ctx)) {
            Side::One
        } else {
            Side::Two
        };
        let loser = victor.opponent();

        let mut players = [PlayerPoint::default(); 2];
        let ace = victor == server && serve_no == 1 && rng.random_bool(rate(0.12));
        let double_fault =
            !ace && victor == returner && serve_no == 2 && rng.random_bool(rate(0.15));
        players[server.index()].ace = ace;
        players[server.index()].double_fault = double_fault;
        let short = ace || double_fault;

        let rally_count = if short {
            1
        } else {
            let mut n = 2;
            while n < 40 && rng.random_bool(0.7) {
                n += 1;
            }
            n
        };
        let return_depth = if short {
            None
        } else {
            Some(pick(&mut rng, ReturnDepth::ALL, &[0.55, 0.45]))
        };
        let mut winner_shot_type = None;
        if !short {
            if rng.random_bool(rate(0.2)) {
                players[victor.index()].winner = true;
                winner_shot_type = Some(pick(&mut rng, ShotType::ALL, &[0.65, 0.35]));
            } else if rng.random_bool(rate(0.3)) {
                players[loser.index()].unf_err = true;
            }
            for side in Side::BOTH {
                if rng.random_bool(rate(0.12)) {
                    players[side.index()].net_pt = true;
                    players[side.index()].net_pt_won = side == victor;
                }
            }
        }
        for side in Side::BOTH {
            let base = if short { 1.5 } else { 3.2 * rally_count as f64 };
            let d = (base + noise.sample(&mut rng)).max(0.3);
            players[side.index()].distance_run = Some(round3(d));
        }

        let break_pt = !game.tiebreak && game.at_game_point(returner);
        if break_pt {
            let p = &mut players[returner.index()];
            p.break_pt = true;
            p.break_pt_won = victor == returner;
            p.break_pt_missed = victor == server;
        }

        let score = [game.score(Side::One), game.score(Side::Two)];
        points_won[victor.index()] += 1;
        game.points[victor.index()] += 1;

        let mut game_victor = None;
        let mut set_victor = None;
        let game_winner = game.winner();
        if let Some(w) = game_winner {
            game_victor = Some(w);
            let mut g = games;
            g[w.index()] += 1;
            let (a, b) = (g[w.index()], g[w.opponent().index()]);
            if (a >= 6 && a >= b + 2) || (game.tiebreak && a == 7) {
                set_victor = Some(w);
            }
        }

        out.push(PointRecord {
            match_id: config.match_id.clone(),
            player1: config.player1.clone(),
            player2: config.player2.clone(),
            elapsed_seconds: elapsed,
            set_no,
            game_no,
            point_no,
            sets,
            games,
            score,
            server,
            serve_no,
            point_victor: victor,
            points_won,
            game_victor,
            set_victor,
            players,
            rally_count: Some(rally_count),
            speed_mph: speed,
            winner_shot_type,
            serve_width: Some(serve_width),
            serve_depth: Some(serve_depth),
            return_depth,
        });

        elapsed += 15 + 3 * rally_count + rng.random_range(0..10);
        point_no += 1;
        if let Some(w) = game_winner {
            elapsed += 25;
            let was_tiebreak = game.tiebreak;
            games[w.index()] += 1;
            game_server = game_server.opponent();
            game_no += 1;
            point_no = 1;
            if let Some(sw) = set_victor {
                sets[sw.index()] += 1;
                games = [0, 0];
                set_no += 1;
                game_no = 1;
                elapsed += 120;
            }
            game = GameState {
                points: [0, 0],
                tiebreak: set_victor.is_none() && !was_tiebreak && games == [6, 6],
            };
        }
    }
    out
}

/// Simulate one match as a dataset.
pub fn generate(config: &SynthConfig) -> MatchDataset {
    generate_many(std::slice::from_ref(config))
}

/// Simulate several matches into one dataset, in the given order.
pub fn generate_many(configs: &[SynthConfig]) -> MatchDataset {
    let records = configs.iter().flat_map(simulate).collect();
    MatchDataset::from_records(records).expect("simulated points are unique and ordered")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let c = SynthConfig {
            seed: 3,
            ..SynthConfig::default()
        };
        assert_eq!(simulate(&c), simulate(&c));
    }

    #[test]
    fn full_match_is_consistent() {
        let ds = generate(&SynthConfig {
            seed: 5,
            ..SynthConfig::default()
        });
        assert!(ds.diagnostics.is_empty(), "{:?}", ds.diagnostics);
        let recs = ds.records();
        let last = recs.last().unwrap();
        let sets_after = {
            let mut s = last.sets;
            if let Some(w) = last.set_victor {
                s[w.index()] += 1;
            }
            s
        };
        assert_eq!(sets_after.iter().max(), Some(&3));
        for (i, r) in recs.iter().enumerate() {
            assert_eq!((r.points_won[0] + r.points_won[1]) as usize, i + 1);
            assert!(r.games.iter().all(|&g| g <= 7));
            assert!(r.sets.iter().all(|&s| s <= 2));
            let bp = [r.players[0].break_pt, r.players[1].break_pt];
            assert!(!(bp[0] && bp[1]));
            if bp[0] {
                assert_eq!(r.server, Side::Two);
            }
        }
        assert!(recs
            .windows(2)
            .all(|w| w[0].elapsed_seconds < w[1].elapsed_seconds));
    }

    #[test]
    fn max_points_truncates() {
        let ds = generate(&SynthConfig {
            seed: 1,
            max_points: Some(300),
            ..SynthConfig::default()
        });
        assert_eq!(ds.len(), 300);
    }

    #[test]
    fn zero_event_rate_disables_flags() {
        let ds = generate(&SynthConfig {
            seed: 9,
            max_points: Some(200),
            event_rate: 0.0,
            ..SynthConfig::default()
        });
        assert!(ds
            .records()
            .iter()
            .all(|r| r.players.iter().all(|p| !p.ace && !p.winner && !p.unf_err)));
    }
}
