//! Spearman rank correlation and correlation-matrix PCA.

mod pca;

use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::ingest::FeatureTable;
use crate::par;
use crate::report::{self, csv_field, sig6};

pub use pca::{pca, top_factors, Factor, PcaResult};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("insufficient data: {n} complete pairs, need at least 3")]
    InsufficientData { n: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
}

/// Largest sample for [`spearman_exact_p`].
pub const EXACT_MAX_N: usize = 10;

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spearman {
    /// `NaN` when either input is constant.
    #[serde(serialize_with = "report::f64")]
    pub rho: f64,
    #[serde(serialize_with = "report::f64")]
    pub p: f64,
    /// Complete pairs used.
    pub n: usize,
}

impl Spearman {
    pub fn is_defined(&self) -> bool {
        !self.rho.is_nan()
    }
}

fn complete_pairs(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::Dimension(format!(
            "lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(a, b)| (*a, *b))
        .unzip())
}

/// Two-sided p-value of `rho` from the t approximation with `n − 2` df.
pub fn t_test_p(rho: f64, n: usize) -> f64 {
    if rho.is_nan() {
        return f64::NAN;
    }
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.cdf(-t.abs())).clamp(0.0, 1.0)
}

/// Rank correlation over pairs where neither value is `NaN`.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Spearman, StatsError> {
    let (x, y) = complete_pairs(x, y)?;
    let n = x.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { n });
    }
    let rho = pearson(&average_ranks(&x), &average_ranks(&y));
    Ok(Spearman {
        rho,
        p: t_test_p(rho, n),
        n,
    })
}

/// Exact two-sided permutation p-value: share of orderings of `y` whose
/// `|rho|` reaches the observed one. Limited to `n ≤ 10`.
pub fn spearman_exact_p(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let (x, y) = complete_pairs(x, y)?;
    let n = x.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { n });
    }
    if n > EXACT_MAX_N {
        return Err(StatsError::Domain(format!(
            "exact p-value needs n <= {EXACT_MAX_N}, got {n}"
        )));
    }
    let rx = average_ranks(&x);
    let mut ry = average_ranks(&y);
    let observed = pearson(&rx, &ry);
    if observed.is_nan() {
        return Ok(f64::NAN);
    }
    let target = observed.abs() - 1e-12;
    let (mut hits, mut total) = (0u64, 0u64);
    // Heap's algorithm.
    let mut c = vec![0; n];
    let mut visit = |ry: &[f64]| {
        total += 1;
        if pearson(&rx, ry).abs() >= target {
            hits += 1;
        }
    };
    visit(&ry);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            visit(&ry);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

/// One variable's correlation with the target column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetEntry {
    pub name: String,
    #[serde(serialize_with = "report::f64")]
    pub rho: f64,
    #[serde(serialize_with = "report::f64")]
    pub p: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub names: Vec<String>,
    #[serde(serialize_with = "report::mat_f64")]
    pub rho: Vec<Vec<f64>>,
    #[serde(serialize_with = "report::mat_f64")]
    pub p: Vec<Vec<f64>>,
    /// Complete pairs behind each entry.
    pub n: Vec<Vec<usize>>,
    /// Columns constant over their non-missing values.
    pub constant: Vec<bool>,
    pub target: String,
    /// Other variables against the target, by p-value ascending; undefined
    /// entries last.
    pub target_ranking: Vec<TargetEntry>,
    pub warnings: Vec<String>,
}

impl CorrelationReport {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Target-column p-value of `name`.
    pub fn target_p(&self, name: &str) -> Option<f64> {
        let t = self.index(&self.target)?;
        Some(self.p[t][self.index(name)?])
    }

    /// Variables whose target p-value is below `threshold`, in ranking order.
    pub fn select_below(&self, threshold: f64) -> Vec<String> {
        self.target_ranking
            .iter()
            .filter(|e| e.p < threshold)
            .map(|e| e.name.clone())
            .collect()
    }

    fn write_matrix<W: Write>(
        &self,
        mut out: W,
        cell: impl Fn(usize, usize) -> String,
    ) -> std::io::Result<()> {
        let header: Vec<String> = self.names.iter().map(|n| csv_field(n)).collect();
        writeln!(out, ",{}", header.join(","))?;
        for (i, name) in self.names.iter().enumerate() {
            let row: Vec<String> = (0..self.names.len()).map(|j| cell(i, j)).collect();
            writeln!(out, "{},{}", csv_field(name), row.join(","))?;
        }
        Ok(())
    }

    pub fn write_rho_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.write_matrix(out, |i, j| sig6(self.rho[i][j]))
    }

    pub fn write_p_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.write_matrix(out, |i, j| sig6(self.p[i][j]))
    }
}

/// All-pairs Spearman over named columns. `NaN` marks a missing value;
/// each pair uses the rows where both are present.
pub fn correlation_from_columns(
    names: &[String],
    columns: &[Vec<f64>],
    target: &str,
) -> Result<CorrelationReport, StatsError> {
    let k = names.len();
    if k < 2 {
        return Err(StatsError::Dimension(format!(
            "need at least 2 columns, got {k}"
        )));
    }
    if columns.len() != k {
        return Err(StatsError::Dimension(format!(
            "{k} names for {} columns",
            columns.len()
        )));
    }
    let t = names
        .iter()
        .position(|n| n == target)
        .ok_or_else(|| StatsError::UnknownColumn(target.to_string()))?;
    let constant: Vec<bool> = columns
        .iter()
        .map(|c| {
            let mut present = c.iter().filter(|v| !v.is_nan());
            match present.next() {
                Some(first) => present.all(|v| v == first),
                None => true,
            }
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let results = par::map_slice(&pairs, |&(i, j)| spearman(&columns[i], &columns[j]));
    let mut rho = vec![vec![f64::NAN; k]; k];
    let mut p = vec![vec![f64::NAN; k]; k];
    let mut n = vec![vec![0; k]; k];
    for (&(i, j), r) in pairs.iter().zip(results) {
        let mut s = r?;
        if i == j && s.is_defined() {
            s.rho = 1.0;
            s.p = 0.0;
        }
        if constant[i] || constant[j] {
            s.rho = f64::NAN;
            s.p = f64::NAN;
        }
        rho[i][j] = s.rho;
        rho[j][i] = s.rho;
        p[i][j] = s.p;
        p[j][i] = s.p;
        n[i][j] = s.n;
        n[j][i] = s.n;
    }

    let mut warnings: Vec<String> = names
        .iter()
        .zip(&constant)
        .filter(|(_, &c)| c)
        .map(|(name, _)| format!("column {name} is constant; its correlations are undefined"))
        .collect();
    let mut target_ranking: Vec<TargetEntry> = (0..k)
        .filter(|&j| j != t)
        .map(|j| TargetEntry {
            name: names[j].clone(),
            rho: rho[t][j],
            p: p[t][j],
            n: n[t][j],
        })
        .collect();
    target_ranking.sort_by(|a, b| match (a.p.is_nan(), b.p.is_nan()) {
        (false, false) => a.p.total_cmp(&b.p),
        (x, y) => x.cmp(&y),
    });
    if constant[t] {
        warnings.push(format!("target {target} is constant"));
    }
    Ok(CorrelationReport {
        names: names.to_vec(),
        rho,
        p,
        n,
        constant,
        target: target.to_string(),
        target_ranking,
        warnings,
    })
}

/// [`correlation_from_columns`] over the columns of a feature table.
pub fn correlation_matrix(
    table: &FeatureTable,
    target: &str,
) -> Result<CorrelationReport, StatsError> {
    let columns: Vec<Vec<f64>> = (0..table.n_cols()).map(|j| table.column(j)).collect();
    correlation_from_columns(table.names(), &columns, target)
}
