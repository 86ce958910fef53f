use std::collections::BTreeSet;

use serde::Serialize;

use super::chart::{emit_chart, ChartSlice};
use super::{
    Chart, Classification, FactorResult, Fingerprint, Payload, PhaseResult, PipelineError,
    PlayerSelector, RandomnessResult, RunConfig, Study, StudyReport, SwingResult,
};
use crate::ingest::{
    select_key_games, CategoricalEncoding, FeatureSpec, FeatureTable, MatchDataset, PlayerPoint,
    PointRecord, Side,
};
use crate::logreg::{confusion, fit, wald_inference};
use crate::stats::{correlation_from_columns, pca, top_factors, Factor, StatsError};
use crate::topsis::momentum_series;

/// Per-player indicators used by the randomness and swing models.
pub const RANDOMNESS_FEATURES: [&str; 14] = [
    "ace",
    "winner",
    "winner_shot_type",
    "double_fault",
    "unf_err",
    "net_pt",
    "net_pt_won",
    "break_pt",
    "break_pt_won",
    "distance_run",
    "speed_mph",
    "serve_width",
    "serve_depth",
    "return_depth",
];

/// Indicators correlated against the point outcome in the factor study.
pub const FACTOR_VARIABLES: [&str; 15] = [
    "ace",
    "winner",
    "winner_shot_type",
    "double_fault",
    "unf_err",
    "net_pt",
    "net_pt_won",
    "break_pt",
    "break_pt_won",
    "break_pt_missed",
    "distance_run",
    "speed_mph",
    "serve_width",
    "serve_depth",
    "return_depth",
];

const TARGET: &str = "point_victor";

/// Whether the player leads or trails before a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Advantage,
    Disadvantage,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Advantage => "advantage",
            Phase::Disadvantage => "disadvantage",
        }
    }
}

/// Compare sets, then games in the set, then points won before the point.
/// `None` when all three are level.
pub fn advantage_phase(r: &PointRecord, side: Side) -> Option<Phase> {
    let key = |s: Side| (r.sets[s.index()], r.games[s.index()], r.points_before(s));
    match key(side).cmp(&key(side.opponent())) {
        std::cmp::Ordering::Greater => Some(Phase::Advantage),
        std::cmp::Ordering::Less => Some(Phase::Disadvantage),
        std::cmp::Ordering::Equal => None,
    }
}

fn is_player_relative(var: &str) -> bool {
    PlayerPoint::FLAG_NAMES.contains(&var) || var == "distance_run"
}

/// Column name of `var`: `pN_var` for player-relative indicators when every
/// row views the same side, plain `var` otherwise.
fn column_name(var: &str, side: Option<Side>) -> String {
    match side {
        Some(s) if is_player_relative(var) => format!("{}_{var}", s.prefix()),
        _ => var.to_string(),
    }
}

fn feature_spec(vars: &[&str], encoding: CategoricalEncoding, side: Option<Side>) -> FeatureSpec {
    vars.iter().fold(FeatureSpec::new(), |spec, v| {
        if PointRecord::is_categorical(v) {
            spec.categorical(v, encoding)
        } else {
            spec.numeric_as(v, &column_name(v, side))
        }
    })
}

fn describe(selector: &PlayerSelector) -> String {
    match selector {
        PlayerSelector::Number(s) => format!("player {}", s.number()),
        PlayerSelector::Name(n) => n.clone(),
    }
}

fn select_matches(
    config: &RunConfig,
    dataset: &MatchDataset,
    single: bool,
) -> Result<MatchDataset, PipelineError> {
    let ds = match &config.match_id {
        Some(id) => dataset
            .single_match(id)
            .ok_or_else(|| unknown_match(id, dataset))?,
        None if single && dataset.matches().len() > 1 => {
            return Err(PipelineError::Selector(format!(
                "input holds {} matches; choose one with --match",
                dataset.matches().len()
            )))
        }
        None => dataset.clone(),
    };
    let mut ds = match config.set_no {
        Some(s) if !single => ds.filter(|r| r.set_no == s),
        _ => ds,
    };
    ds.diagnostics = dataset.diagnostics.clone();
    if ds.is_empty() {
        return Err(PipelineError::EmptySubset(format!(
            "no points in set {}",
            config.set_no.unwrap_or_default()
        )));
    }
    Ok(ds)
}

fn unknown_match(id: &str, dataset: &MatchDataset) -> PipelineError {
    let ids: Vec<&str> = dataset
        .matches()
        .iter()
        .take(5)
        .map(|m| m.match_id.as_str())
        .collect();
    let more = if dataset.matches().len() > 5 {
        ", ..."
    } else {
        ""
    };
    PipelineError::Selector(format!(
        "unknown match id {id:?}; available: {}{more}",
        ids.join(", ")
    ))
}

/// Points of matches featuring the selected player, each with that player's side.
fn player_rows<'a>(
    dataset: &'a MatchDataset,
    selector: &PlayerSelector,
) -> Result<Vec<(&'a PointRecord, Side)>, PipelineError> {
    let mut rows = Vec::new();
    for (_, records) in dataset.iter_matches() {
        if let Some(side) = records.first().and_then(|r| selector.resolve(r)) {
            rows.extend(records.iter().map(|r| (r, side)));
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::Selector(format!(
            "{} does not appear in the selected matches",
            describe(selector)
        )));
    }
    Ok(rows)
}

fn uniform_side(rows: &[(&PointRecord, Side)]) -> Option<Side> {
    let first = rows.first()?.1;
    rows.iter().all(|r| r.1 == first).then_some(first)
}

fn match_ids(rows: &[(&PointRecord, Side)]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for (r, _) in rows {
        if ids.last() != Some(&r.match_id) && !ids.contains(&r.match_id) {
            ids.push(r.match_id.clone());
        }
    }
    ids
}

fn labels_for(table: &FeatureTable, rows: &[(&PointRecord, Side)]) -> Vec<f64> {
    table
        .source_rows()
        .iter()
        .map(|&i| f64::from(u8::from(rows[i].0.won_by(rows[i].1))))
        .collect()
}

fn pick(values: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| values[i]).collect()
}

fn classify(
    train: &FeatureTable,
    train_y: &[f64],
    eval: Option<(&FeatureTable, &[f64])>,
    config: &RunConfig,
    warnings: &mut Vec<String>,
) -> Result<Classification, PipelineError> {
    let model = fit(train, train_y, &config.train)?;
    let inference = wald_inference(&model, train, train_y)?;
    let training = confusion(&model, train, train_y, config.train.cutoff)?;
    let holdout = eval
        .map(|(t, y)| confusion(&model, t, y, config.train.cutoff))
        .transpose()?;
    warnings.extend(model.warnings.iter().cloned());
    warnings.extend(inference.notes.iter().cloned());
    Ok(Classification {
        model,
        inference,
        training,
        holdout,
    })
}

fn dedup(warnings: Vec<String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    warnings
        .into_iter()
        .filter(|w| seen.insert(w.clone()))
        .collect()
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// TOPSIS momentum series of one match with whole-match and per-set charts.
pub fn run_momentum(
    config: &RunConfig,
    dataset: &MatchDataset,
) -> Result<StudyReport, PipelineError> {
    let ds = select_matches(config, dataset, true)?;
    let full = momentum_series(&ds, &config.weights)?;
    let mut warnings: Vec<String> = ds.diagnostics.iter().map(ToString::to_string).collect();
    warnings.extend(full.warnings.iter().cloned());

    let stem = format!("momentum_{}", file_safe(&full.match_id));
    let slices: Vec<ChartSlice> = match config.set_no {
        Some(n) => vec![ChartSlice::Set(n)],
        None => std::iter::once(ChartSlice::Whole)
            .chain(full.set_numbers().into_iter().map(ChartSlice::Set))
            .collect(),
    };
    let mut charts = Vec::new();
    for slice in slices {
        let file = match slice {
            ChartSlice::Whole => format!("{stem}_whole.svg"),
            ChartSlice::Set(n) => format!("{stem}_set{n}.svg"),
        };
        match emit_chart(&full, slice, config.chart_mode) {
            Some(svg) => charts.push(Chart { file, svg }),
            None => warnings.push(format!("no points for chart {file}; skipped")),
        }
    }
    let series = match config.set_no {
        Some(n) => full.set(n),
        None => full,
    };
    if series.is_empty() {
        return Err(PipelineError::EmptySubset(format!(
            "no points in set {}",
            config.set_no.unwrap_or_default()
        )));
    }
    let n = ds.len();
    Ok(StudyReport {
        study: Study::Momentum,
        fingerprint: Fingerprint {
            matches: vec![series.match_id.clone()],
            player: "both".into(),
            rows_in: n,
            rows_used: n,
            rows_dropped: 0,
        },
        payload: Payload::Momentum(series),
        warnings: dedup(warnings),
        charts,
    })
}

/// Point-outcome model for one player; the sequence is called non-random
/// when the evaluation accuracy exceeds the configured threshold.
pub fn run_randomness(
    config: &RunConfig,
    dataset: &MatchDataset,
) -> Result<StudyReport, PipelineError> {
    let ds = select_matches(config, dataset, false)?;
    let rows = player_rows(&ds, &config.player)?;
    let side = uniform_side(&rows);
    let table =
        feature_spec(&RANDOMNESS_FEATURES, config.encoding, side).build(rows.iter().copied())?;
    let y = labels_for(&table, &rows);
    let mut warnings: Vec<String> = ds.diagnostics.iter().map(ToString::to_string).collect();
    warnings.extend(table.warnings.iter().map(ToString::to_string));

    let n = table.n_rows();
    let classification = match config.holdout {
        Some(f) => {
            let n_test = ((n as f64) * f).round() as usize;
            if n_test < 1 || n - n_test < 2 {
                return Err(PipelineError::EmptySubset(format!(
                    "{n} usable rows cannot be split with holdout fraction {f}"
                )));
            }
            let train_idx: Vec<usize> = (0..n - n_test).collect();
            let test_idx: Vec<usize> = (n - n_test..n).collect();
            let (train, test) = (table.subset_rows(&train_idx), table.subset_rows(&test_idx));
            let (ty, ey) = (pick(&y, &train_idx), pick(&y, &test_idx));
            classify(&train, &ty, Some((&test, &ey)), config, &mut warnings)?
        }
        None => classify(&table, &y, None, config, &mut warnings)?,
    };
    let overall = classification.evaluation().overall_percent();
    let non_random = overall > config.nonrandom_threshold;
    let verdict = format!(
        "{:.1}% correct on {} rows; {} (heuristic threshold {:.1}%)",
        overall,
        if config.holdout.is_some() {
            "held-out"
        } else {
            "training"
        },
        if non_random {
            "non-random"
        } else {
            "consistent with random"
        },
        config.nonrandom_threshold
    );
    Ok(StudyReport {
        study: Study::Randomness,
        fingerprint: Fingerprint {
            matches: match_ids(&rows),
            player: describe(&config.player),
            rows_in: table.rows_in(),
            rows_used: n,
            rows_dropped: table.rows_dropped(),
        },
        payload: Payload::Randomness(RandomnessResult {
            classification,
            threshold: config.nonrandom_threshold,
            non_random,
            verdict,
        }),
        warnings: dedup(warnings),
        charts: Vec::new(),
    })
}

fn trainable(y: &[f64]) -> Option<String> {
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if y.len() < 2 {
        Some(format!("{} training row(s)", y.len()))
    } else if ones == 0 || ones == y.len() {
        Some(format!(
            "all {} training labels are {}",
            y.len(),
            u8::from(ones > 0)
        ))
    } else {
        None
    }
}

/// Key-game models split by advantage phase, trained on some matches and
/// evaluated on another.
pub fn run_swing(config: &RunConfig, dataset: &MatchDataset) -> Result<StudyReport, PipelineError> {
    let test_id = config
        .test_match
        .clone()
        .ok_or_else(|| PipelineError::Config("swing needs a test match (--test)".into()))?;
    if config.train_matches.is_empty() {
        return Err(PipelineError::Config(
            "swing needs at least one training match (--train)".into(),
        ));
    }
    if config.train_matches.contains(&test_id) {
        return Err(PipelineError::Config(format!(
            "match {test_id} is both a training and the test match"
        )));
    }
    for id in config.train_matches.iter().chain([&test_id]) {
        let info = dataset
            .match_info(id)
            .ok_or_else(|| unknown_match(id, dataset))?;
        if let PlayerSelector::Name(name) = &config.player {
            if &info.player1 != name && &info.player2 != name {
                return Err(PipelineError::Selector(format!(
                    "{name} does not play in match {id}"
                )));
            }
        }
    }

    let key = select_key_games(dataset, &config.key_rule);
    let in_train = |r: &PointRecord| config.train_matches.contains(&r.match_id);
    let train_key = key.filter(|r| in_train(r));
    let test_key = key.filter(|r| r.match_id == test_id);
    let relax = "relax the rule, e.g. --key-rule all";
    if train_key.is_empty() {
        return Err(PipelineError::EmptySubset(format!(
            "no key games in the training matches under rule {}; {relax}",
            config.key_rule
        )));
    }
    if test_key.is_empty() {
        return Err(PipelineError::EmptySubset(format!(
            "no key games in test match {test_id} under rule {}; {relax}",
            config.key_rule
        )));
    }

    let mut rows: Vec<(&PointRecord, Side)> = Vec::new();
    let mut phases = Vec::new();
    let mut is_test = Vec::new();
    let mut tied = 0;
    for (ds, test) in [(&train_key, false), (&test_key, true)] {
        for (r, side) in player_rows(ds, &config.player)? {
            match advantage_phase(r, side) {
                Some(p) => {
                    rows.push((r, side));
                    phases.push(p);
                    is_test.push(test);
                }
                None => tied += 1,
            }
        }
    }
    let side = uniform_side(&rows);
    let table =
        feature_spec(&RANDOMNESS_FEATURES, config.encoding, side).build(rows.iter().copied())?;
    let y = labels_for(&table, &rows);
    let mut warnings: Vec<String> = dataset
        .diagnostics
        .iter()
        .map(ToString::to_string)
        .collect();
    warnings.extend(table.warnings.iter().map(ToString::to_string));
    if tied > 0 {
        warnings.push(format!(
            "{tied} key-game point(s) with neither player ahead excluded"
        ));
    }

    let split = |want: Option<Phase>, test: bool| -> Vec<usize> {
        table
            .source_rows()
            .iter()
            .enumerate()
            .filter(|(_, &src)| is_test[src] == test && want.is_none_or(|p| phases[src] == p))
            .map(|(i, _)| i)
            .collect()
    };

    let mut results = Vec::new();
    for phase in [Phase::Advantage, Phase::Disadvantage] {
        let (tr, te) = (split(Some(phase), false), split(Some(phase), true));
        let ty = pick(&y, &tr);
        let mut result = PhaseResult {
            phase,
            train_rows: tr.len(),
            test_rows: te.len(),
            classification: None,
            test: None,
            skipped: None,
        };
        if let Some(reason) = trainable(&ty) {
            warnings.push(format!("{} phase skipped: {reason}", phase.name()));
            result.skipped = Some(reason);
            results.push(result);
            continue;
        }
        let train = table.subset_rows(&tr);
        let c = classify(&train, &ty, None, config, &mut warnings)?;
        if te.is_empty() {
            warnings.push(format!("{} phase has no test points", phase.name()));
        } else {
            result.test = Some(confusion(
                &c.model,
                &table.subset_rows(&te),
                &pick(&y, &te),
                config.train.cutoff,
            )?);
        }
        result.classification = Some(c);
        results.push(result);
    }

    let (tr, te) = (split(None, false), split(None, true));
    let ty = pick(&y, &tr);
    let pooled = match trainable(&ty) {
        Some(reason) => {
            warnings.push(format!("pooled model skipped: {reason}"));
            None
        }
        None if te.is_empty() => None,
        None => {
            let model = fit(&table.subset_rows(&tr), &ty, &config.train)?;
            Some(confusion(
                &model,
                &table.subset_rows(&te),
                &pick(&y, &te),
                config.train.cutoff,
            )?)
        }
    };

    let rows_in = rows.len() + tied;
    Ok(StudyReport {
        study: Study::Swing,
        fingerprint: Fingerprint {
            matches: config
                .train_matches
                .iter()
                .cloned()
                .chain([test_id.clone()])
                .collect(),
            player: describe(&config.player),
            rows_in,
            rows_used: table.n_rows(),
            rows_dropped: rows_in - table.n_rows(),
        },
        payload: Payload::Swing(SwingResult {
            train_matches: config.train_matches.clone(),
            test_match: test_id,
            key_rule: config.key_rule.to_string(),
            phases: results,
            pooled,
            tied_points: tied,
        }),
        warnings: dedup(warnings),
        charts: Vec::new(),
    })
}

/// Column of `var` viewed from each row's side; categorical levels are
/// numbered in sorted order. Missing values are `NaN`.
fn indicator_column(var: &str, rows: &[(&PointRecord, Side)]) -> Result<Vec<f64>, PipelineError> {
    if PointRecord::is_categorical(var) {
        let cells = rows
            .iter()
            .map(|(r, _)| r.categorical(var))
            .collect::<Result<Vec<_>, _>>()?;
        let levels: Vec<&str> = cells
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(cells
            .iter()
            .map(|c| {
                c.map_or(f64::NAN, |l| {
                    levels.iter().position(|x| *x == l).unwrap_or(0) as f64
                })
            })
            .collect())
    } else {
        rows.iter()
            .map(|(r, s)| Ok(r.numeric(var, *s)?.unwrap_or(f64::NAN)))
            .collect()
    }
}

/// Spearman screen of indicators against the point outcome, then PCA over
/// the variables below the p-value threshold.
pub fn run_factors(
    config: &RunConfig,
    dataset: &MatchDataset,
) -> Result<StudyReport, PipelineError> {
    let ds = select_matches(config, dataset, false)?;
    let rows = player_rows(&ds, &config.player)?;
    let side = uniform_side(&rows);

    let mut names: Vec<String> = FACTOR_VARIABLES
        .iter()
        .map(|v| column_name(v, side))
        .collect();
    let mut columns = FACTOR_VARIABLES
        .iter()
        .map(|v| indicator_column(v, &rows))
        .collect::<Result<Vec<_>, _>>()?;
    names.push(TARGET.to_string());
    columns.push(
        rows.iter()
            .map(|(r, s)| f64::from(u8::from(r.won_by(*s))))
            .collect(),
    );

    // Listwise deletion, as for the models: a row missing any indicator is dropped.
    let keep: Vec<usize> = (0..rows.len())
        .filter(|&i| columns.iter().all(|c| !c[i].is_nan()))
        .collect();
    let columns: Vec<Vec<f64>> = columns.iter().map(|c| pick(c, &keep)).collect();
    let rows_used = keep.len();
    let mut warnings: Vec<String> = ds.diagnostics.iter().map(ToString::to_string).collect();
    if rows_used < rows.len() {
        warnings.push(format!(
            "dropped {} of {} rows with missing values",
            rows.len() - rows_used,
            rows.len()
        ));
    }

    let correlation = correlation_from_columns(&names, &columns, TARGET)?;
    let k = FACTOR_VARIABLES.len();
    if correlation.constant[..k].iter().all(|&c| c) {
        return Err(StatsError::Domain("every indicator column is constant".into()).into());
    }
    warnings.extend(correlation.warnings.iter().cloned());

    let threshold = config.factor_threshold;
    let selected = correlation.select_below(threshold);
    if selected.is_empty() {
        return Err(PipelineError::EmptySubset(format!(
            "no indicator has a target p-value below the factor threshold {threshold}; nothing to analyse"
        )));
    }
    let (pca_result, factors) = if selected.len() == 1 {
        warnings.push(format!(
            "only {} passes the factor threshold; PCA skipped",
            selected[0]
        ));
        let f = Factor {
            name: selected[0].clone(),
            loading: f64::NAN,
            target_p: correlation.target_p(&selected[0]).unwrap_or(f64::NAN),
        };
        (None, vec![f].into_iter().take(config.top_k).collect())
    } else {
        let idx: Vec<usize> = selected
            .iter()
            .map(|s| correlation.index(s).expect("selected from report"))
            .collect();
        let table = FeatureTable::from_columns(
            selected.clone(),
            idx.iter().map(|&j| columns[j].clone()).collect(),
        )?;
        let refs: Vec<&str> = selected.iter().map(String::as_str).collect();
        let result = pca(&table, &refs)?;
        let factors = top_factors(&correlation, &result, config.top_k);
        (Some(result), factors)
    };

    Ok(StudyReport {
        study: Study::Factors,
        fingerprint: Fingerprint {
            matches: match_ids(&rows),
            player: describe(&config.player),
            rows_in: rows.len(),
            rows_used,
            rows_dropped: rows.len() - rows_used,
        },
        payload: Payload::Factors(FactorResult {
            correlation,
            threshold,
            selected,
            pca: pca_result,
            factors,
        }),
        warnings: dedup(warnings),
        charts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, generate_many, SynthConfig};

    fn synth(seed: u64, id: &str, points: usize) -> SynthConfig {
        SynthConfig {
            seed,
            match_id: id.into(),
            max_points: Some(points),
            ..SynthConfig::default()
        }
    }

    #[test]
    fn phase_compares_sets_then_games_then_points() {
        let ds = generate(&synth(3, "m", 200));
        for r in ds.records() {
            let a = advantage_phase(r, Side::One);
            let b = advantage_phase(r, Side::Two);
            match a {
                Some(Phase::Advantage) => assert_eq!(b, Some(Phase::Disadvantage)),
                Some(Phase::Disadvantage) => assert_eq!(b, Some(Phase::Advantage)),
                None => assert_eq!(b, None),
            }
            if r.sets[0] != r.sets[1] {
                assert_eq!(a == Some(Phase::Advantage), r.sets[0] > r.sets[1]);
            }
        }
        assert_eq!(advantage_phase(&ds.records()[0], Side::One), None);
    }

    #[test]
    fn momentum_needs_one_match() {
        let ds = generate_many(&[synth(1, "a", 60), synth(2, "b", 60)]);
        let mut c = RunConfig::default();
        assert!(matches!(
            run_momentum(&c, &ds),
            Err(PipelineError::Selector(_))
        ));
        c.match_id = Some("zz".into());
        let err = run_momentum(&c, &ds).unwrap_err();
        assert!(err.to_string().contains("a, b"));
        c.match_id = Some("b".into());
        let r = run_momentum(&c, &ds).unwrap();
        assert_eq!(r.fingerprint.rows_in, 60);
        assert_eq!(r.charts[0].file, "momentum_b_whole.svg");
        assert!(r.charts.len() >= 2);
    }

    #[test]
    fn randomness_row_accounting() {
        let ds = generate(&SynthConfig {
            missing_speed: 0.1,
            ..synth(5, "m", 300)
        });
        let r = run_randomness(&RunConfig::default(), &ds).unwrap();
        let f = &r.fingerprint;
        assert_eq!(f.rows_in, 300);
        assert_eq!(f.rows_in, f.rows_used + f.rows_dropped);
        assert!(f.rows_dropped > 0);
        let Payload::Randomness(res) = &r.payload else {
            panic!()
        };
        assert!(res.classification.holdout.is_none());
        assert!(res
            .classification
            .model
            .names
            .iter()
            .any(|n| n == "p1_winner"));
    }

    #[test]
    fn unknown_player_name_is_a_selector_error() {
        let ds = generate(&synth(5, "m", 50));
        let mut c = RunConfig::default();
        c.player = PlayerSelector::Name("Nobody".into());
        let err = run_randomness(&c, &ds).unwrap_err();
        assert!(matches!(err, PipelineError::Selector(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn swing_requires_train_and_test() {
        let ds = generate_many(&[synth(1, "a", 80), synth(2, "b", 80)]);
        let mut c = RunConfig::default();
        assert_eq!(run_swing(&c, &ds).unwrap_err().exit_code(), 1);
        c.test_match = Some("b".into());
        c.train_matches = vec!["a".into()];
        c.key_rule = "break".parse().unwrap();
        match run_swing(&c, &ds) {
            Ok(r) => assert_eq!(
                r.fingerprint.rows_in,
                r.fingerprint.rows_used + r.fingerprint.rows_dropped
            ),
            Err(e) => assert!(e.to_string().contains("--key-rule")),
        }
    }

    #[test]
    fn factor_threshold_excluding_everything_is_named() {
        let ds = generate(&synth(9, "m", 200));
        let mut c = RunConfig::default();
        c.factor_threshold = 0.0;
        let err = run_factors(&c, &ds).unwrap_err();
        assert!(err.to_string().contains("factor threshold 0"));
    }

    #[test]
    fn unreturned_serves_leave_ace_constant() {
        // Aces and double faults have no return depth, so listwise deletion
        // removes every ace.
        let r = run_factors(&RunConfig::default(), &generate(&synth(9, "m", 300))).unwrap();
        let Payload::Factors(f) = &r.payload else {
            panic!()
        };
        let j = f.correlation.index("p1_ace").unwrap();
        assert!(f.correlation.constant[j]);
        assert!(f.correlation.rho[j].iter().all(|v| v.is_nan()));
        assert!(r.warnings.iter().any(|w| w.contains("p1_ace")));
        assert_eq!(
            r.fingerprint.rows_in,
            r.fingerprint.rows_used + r.fingerprint.rows_dropped
        );
    }
}
