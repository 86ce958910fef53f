//! `momentum`: run one of the four studies on point-by-point match data.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momentum_core::pipeline::{
    self, parse_config_text, Payload, PipelineError, RunConfig, Study, StudyReport,
};

#[derive(Parser)]
#[command(
    name = "momentum",
    version,
    about = "Momentum analysis for point-by-point tennis data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// TOPSIS closeness series of one match, with charts.
    Momentum {
        #[command(flatten)]
        common: Common,
        /// Criterion weights for sets, games, points won, serving.
        #[arg(long, value_name = "W1,W2,W3,W4")]
        weights: Option<String>,
        /// Chart y axis: closeness or raw (cumulative points).
        #[arg(long, value_name = "MODE")]
        chart: Option<String>,
    },
    /// Logistic model of point outcomes; checks whether scoring looks random.
    Randomness {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: Train,
        /// Percent correct above which the sequence is called non-random.
        #[arg(long, value_name = "PERCENT")]
        threshold: Option<String>,
        /// Trailing fraction of rows held out for evaluation.
        #[arg(long, value_name = "FRACTION")]
        holdout: Option<String>,
    },
    /// Key-game models per advantage phase, trained and tested on different matches.
    Swing {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: Train,
        /// Training match ids, comma separated.
        #[arg(long = "train", value_name = "IDS")]
        train_matches: Option<String>,
        /// Test match id.
        #[arg(long, value_name = "ID")]
        test: Option<String>,
        /// Key-game rule: comma-separated terms from break, games>=N, all, none.
        #[arg(long, value_name = "SPEC")]
        key_rule: Option<String>,
    },
    /// Spearman screen against the point outcome, then PCA of the survivors.
    Factors {
        #[command(flatten)]
        common: Common,
        /// Target p-value below which a variable enters the PCA.
        #[arg(long, value_name = "P")]
        factor_threshold: Option<String>,
        /// Number of factors to report.
        #[arg(long, value_name = "K")]
        top_k: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Match CSV; repeat or comma-separate for several files.
    #[arg(long, value_name = "CSV")]
    input: Vec<String>,
    /// Match id to analyse.
    #[arg(long = "match", value_name = "ID")]
    match_id: Option<String>,
    /// Player 1, 2 or a player name.
    #[arg(long, value_name = "1|2|NAME")]
    player: Option<String>,
    /// Restrict to one set.
    #[arg(long, value_name = "N")]
    set: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    /// Output formats, comma separated from csv, json, svg.
    #[arg(long, value_name = "LIST")]
    format: Option<String>,
    /// Categorical encoding: onehot or ordinal.
    #[arg(long, value_name = "ENC")]
    encoding: Option<String>,
    /// File of `key = value` lines using the long flag names; flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Train {
    /// Initial gradient-descent step size.
    #[arg(long, value_name = "ALPHA")]
    alpha: Option<String>,
    #[arg(long, value_name = "N")]
    max_iter: Option<String>,
    /// Convergence tolerance on the loss change.
    #[arg(long, value_name = "TOL")]
    tol: Option<String>,
    /// Probability at or above which class 1 is predicted.
    #[arg(long, value_name = "P")]
    cutoff: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !self.input.is_empty() {
            out.push(("input", self.input.join(",")));
        }
        push(&mut out, "match", &self.match_id);
        push(&mut out, "player", &self.player);
        push(&mut out, "set", &self.set);
        push(&mut out, "out", &self.out);
        push(&mut out, "format", &self.format);
        push(&mut out, "encoding", &self.encoding);
        out
    }
}

impl Train {
    fn pairs(&self, out: &mut Vec<(&'static str, String)>) {
        push(out, "alpha", &self.alpha);
        push(out, "max-iter", &self.max_iter);
        push(out, "tol", &self.tol);
        push(out, "cutoff", &self.cutoff);
    }
}

fn push(out: &mut Vec<(&'static str, String)>, key: &'static str, value: &Option<String>) {
    if let Some(v) = value {
        out.push((key, v.clone()));
    }
}

/// Study, config file and flag pairs in application order.
fn flatten(command: &Command) -> (Study, Option<&PathBuf>, Vec<(&'static str, String)>) {
    match command {
        Command::Momentum {
            common,
            weights,
            chart,
        } => {
            let mut p = common.pairs();
            push(&mut p, "weights", weights);
            push(&mut p, "chart", chart);
            (Study::Momentum, common.config.as_ref(), p)
        }
        Command::Randomness {
            common,
            train,
            threshold,
            holdout,
        } => {
            let mut p = common.pairs();
            train.pairs(&mut p);
            push(&mut p, "threshold", threshold);
            push(&mut p, "holdout", holdout);
            (Study::Randomness, common.config.as_ref(), p)
        }
        Command::Swing {
            common,
            train,
            train_matches,
            test,
            key_rule,
        } => {
            let mut p = common.pairs();
            train.pairs(&mut p);
            push(&mut p, "train", train_matches);
            push(&mut p, "test", test);
            push(&mut p, "key-rule", key_rule);
            (Study::Swing, common.config.as_ref(), p)
        }
        Command::Factors {
            common,
            factor_threshold,
            top_k,
        } => {
            let mut p = common.pairs();
            push(&mut p, "factor-threshold", factor_threshold);
            push(&mut p, "top-k", top_k);
            (Study::Factors, common.config.as_ref(), p)
        }
    }
}

fn build_config(command: &Command) -> Result<(Study, RunConfig), PipelineError> {
    let (study, file, flags) = flatten(command);
    let mut config = RunConfig::default();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (k, v) in parse_config_text(&text)? {
            config.apply(&k, &v)?;
        }
    }
    for (k, v) in &flags {
        config.apply(k, v)?;
    }
    Ok((study, config))
}

fn summary(report: &StudyReport) -> String {
    let f = &report.fingerprint;
    let head = format!(
        "{}: {} rows in, {} used, {} dropped",
        report.study.name(),
        f.rows_in,
        f.rows_used,
        f.rows_dropped
    );
    let tail = match &report.payload {
        Payload::Momentum(s) => format!("{} points", s.len()),
        Payload::Randomness(r) => r.verdict.clone(),
        Payload::Swing(s) => s
            .phases
            .iter()
            .map(|p| match &p.test {
                Some(c) => format!("{} {:.1}% on test", p.phase.name(), c.overall_percent()),
                None => format!("{} skipped", p.phase.name()),
            })
            .collect::<Vec<_>>()
            .join(", "),
        Payload::Factors(r) => {
            let names: Vec<&str> = r.factors.iter().map(|f| f.name.as_str()).collect();
            format!("top factors: {}", names.join(", "))
        }
    };
    format!("{head}; {tail}")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result =
        build_config(&cli.command).and_then(|(study, config)| pipeline::run(study, &config));
    match result {
        Ok((report, written)) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", summary(&report));
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
