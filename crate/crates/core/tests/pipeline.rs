use std::path::Path;

use momentum_core::ingest::{MatchDataset, PointRecord, Side};
use momentum_core::pipeline::{
    advantage_phase, emit_chart, run_factors, run_momentum, run_randomness, run_swing, ChartMode,
    ChartSlice, Payload, Phase, RunConfig,
};
use momentum_core::synth::{generate, generate_many, PointContext, SynthConfig, VictorLaw};
use momentum_core::topsis::{MomentumSeries, SeriesPoint};
use rand::seq::SliceRandom;
use rand::SeedableRng;

const GOLDEN: &str = "tests/golden/momentum_10_points.svg";

fn synth(seed: u64, id: &str, points: usize) -> SynthConfig {
    SynthConfig {
        seed,
        match_id: id.into(),
        max_points: Some(points),
        ..SynthConfig::default()
    }
}

fn fixture_series() -> MomentumSeries {
    let c = [0.50, 0.62, 0.55, 0.41, 0.47, 0.58, 0.66, 0.52, 0.38, 0.44];
    MomentumSeries {
        match_id: "fixture".into(),
        players: ["Left <A>".into(), "Right".into()],
        weights: vec![0.4, 0.25, 0.2, 0.15],
        points: c
            .iter()
            .enumerate()
            .map(|(i, &v)| SeriesPoint {
                elapsed_seconds: 40 * i as u32 + 7 * (i as u32 % 3),
                set_no: 1 + u32::from(i >= 6),
                game_no: 1 + i as u32 / 3,
                point_no: i as u32 + 1,
                closeness: [v, 1.0 - v],
                points_won: [(i as u32 + 1) / 2, i as u32 / 2 + 1],
            })
            .collect(),
        warnings: vec![],
    }
}

/// Set MOMENTUM_UPDATE_GOLDEN=1 to rewrite the frozen chart.
#[test]
fn chart_matches_golden_file() {
    let svg = emit_chart(&fixture_series(), ChartSlice::Whole, ChartMode::Closeness).unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN);
    if std::env::var_os("MOMENTUM_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &svg).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden chart missing");
    assert_eq!(svg, golden);
}

#[test]
fn ten_point_match_gives_ten_point_series_and_charts() {
    let ds = generate(&synth(10, "ten", 10));
    let r = run_momentum(&RunConfig::default(), &ds).unwrap();
    let Payload::Momentum(s) = &r.payload else {
        panic!()
    };
    assert_eq!(s.len(), 10);
    assert_eq!(s.closeness(Side::One).len(), 10);
    assert_eq!(s.closeness(Side::Two).len(), 10);
    assert!(r
        .charts
        .iter()
        .any(|c| c.file == "momentum_ten_whole.svg" && c.svg.contains("<polyline")));
}

/// Permute point winners across rows, cutting any link to the features.
fn shuffled_labels(ds: &MatchDataset, seed: u64) -> MatchDataset {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut victors: Vec<Side> = ds.records().iter().map(|r| r.point_victor).collect();
    victors.shuffle(&mut rng);
    let records: Vec<PointRecord> = ds
        .records()
        .iter()
        .zip(victors)
        .map(|(r, v)| PointRecord {
            point_victor: v,
            ..r.clone()
        })
        .collect();
    MatchDataset::from_records(records).unwrap()
}

#[test]
fn shuffled_labels_predict_at_chance_on_holdout() {
    let ds = shuffled_labels(
        &generate(&SynthConfig {
            missing_speed: 0.0,
            ..synth(21, "m", 300)
        }),
        7,
    );
    let mut c = RunConfig::default();
    c.holdout = Some(0.5);
    let r = run_randomness(&c, &ds).unwrap();
    let Payload::Randomness(res) = &r.payload else {
        panic!()
    };
    let pct = res
        .classification
        .holdout
        .as_ref()
        .unwrap()
        .overall_percent();
    assert!((40.0..=60.0).contains(&pct), "held-out accuracy {pct}");
    assert!(!res.non_random);
}

#[test]
fn labels_fixed_by_serve_speed_are_separable() {
    let ds = generate(&SynthConfig {
        missing_speed: 0.0,
        law: VictorLaw::custom(|ctx: &PointContext| {
            if ctx.speed_mph.unwrap() >= 110.0 {
                1.0
            } else {
                0.0
            }
        }),
        ..synth(3, "m", 250)
    });
    let r = run_randomness(&RunConfig::default(), &ds).unwrap();
    let Payload::Randomness(res) = &r.payload else {
        panic!()
    };
    assert_eq!(res.classification.training.overall_percent(), 100.0);
    assert!(!res.classification.model.separating.is_empty());
    assert!(
        r.warnings.iter().any(|w| w.contains("separat")),
        "{:?}",
        r.warnings
    );
    assert!(res.non_random);
}

/// Player 1 wins fast serves when ahead and slow serves when behind.
fn phase_law(ctx: &PointContext) -> f64 {
    let me = (ctx.sets[0], ctx.games[0], ctx.points_before[0]);
    let them = (ctx.sets[1], ctx.games[1], ctx.points_before[1]);
    let fast = ctx.speed_mph.unwrap_or(110.0) >= 110.0;
    match me.cmp(&them) {
        std::cmp::Ordering::Greater => {
            if fast {
                0.95
            } else {
                0.05
            }
        }
        std::cmp::Ordering::Less => {
            if fast {
                0.05
            } else {
                0.95
            }
        }
        std::cmp::Ordering::Equal => 0.5,
    }
}

#[test]
fn planted_phase_signal_beats_pooled_model() {
    let configs: Vec<SynthConfig> = ["a", "b", "c", "d"]
        .iter()
        .enumerate()
        .map(|(i, id)| SynthConfig {
            event_rate: 0.0,
            missing_speed: 0.0,
            law: VictorLaw::custom(phase_law),
            ..synth(100 + i as u64, id, 250)
        })
        .collect();
    let ds = generate_many(&configs);
    let mut c = RunConfig::default();
    c.train_matches = vec!["a".into(), "b".into(), "c".into()];
    c.test_match = Some("d".into());
    c.key_rule = "all".parse().unwrap();
    let r = run_swing(&c, &ds).unwrap();
    let Payload::Swing(s) = &r.payload else {
        panic!()
    };

    // A set lead persists, so the test match may visit one phase only; both
    // sides are scored on the same test points.
    let (mut right, mut total) = (0, 0);
    for t in s.phases.iter().filter_map(|p| p.test.as_ref()) {
        right += t.n00 + t.n11;
        total += t.total();
    }
    assert!(total > 0);
    let per_phase = 100.0 * right as f64 / total as f64;
    let pooled = s.pooled.as_ref().unwrap();
    assert_eq!(pooled.total(), total);
    assert!(
        per_phase > pooled.overall_percent(),
        "per-phase {per_phase} vs pooled {}",
        pooled.overall_percent()
    );
    assert!(per_phase > 80.0);
    assert_eq!(
        r.fingerprint.rows_in,
        r.fingerprint.rows_used + r.fingerprint.rows_dropped
    );
    let phase_rows: usize = s.phases.iter().map(|p| p.train_rows + p.test_rows).sum();
    assert_eq!(phase_rows, r.fingerprint.rows_used);
}

#[test]
fn phase_is_antisymmetric_between_players() {
    let ds = generate(&synth(8, "m", 400));
    for r in ds.records() {
        let flip = |p: Option<Phase>| {
            p.map(|p| match p {
                Phase::Advantage => Phase::Disadvantage,
                Phase::Disadvantage => Phase::Advantage,
            })
        };
        assert_eq!(
            advantage_phase(r, Side::Two),
            flip(advantage_phase(r, Side::One))
        );
    }
}

#[test]
fn warnings_reach_the_report() {
    let ds = generate(&SynthConfig {
        event_rate: 0.0,
        ..synth(12, "m", 200)
    });
    let r = run_randomness(&RunConfig::default(), &ds).unwrap();
    let Payload::Randomness(res) = &r.payload else {
        panic!()
    };
    for w in res
        .classification
        .model
        .warnings
        .iter()
        .chain(&res.classification.inference.notes)
    {
        assert!(r.warnings.contains(w), "missing {w}");
    }
    assert!(r
        .warnings
        .iter()
        .any(|w| w.contains("p1_winner") && w.contains("constant")));

    let f = run_factors(&RunConfig::default(), &ds).unwrap();
    let Payload::Factors(res) = &f.payload else {
        panic!()
    };
    for w in &res.correlation.warnings {
        assert!(f.warnings.contains(w));
    }
}

#[test]
fn reports_are_deterministic() {
    let ds = generate(&synth(30, "m", 300));
    let json = |c: &RunConfig| {
        [
            serde_json::to_string(&run_momentum(c, &ds).unwrap()).unwrap(),
            serde_json::to_string(&run_randomness(c, &ds).unwrap()).unwrap(),
            serde_json::to_string(&run_factors(c, &ds).unwrap()).unwrap(),
        ]
    };
    let c = RunConfig::default();
    assert_eq!(json(&c), json(&c));
}
