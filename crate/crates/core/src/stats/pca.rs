use std::cmp::Ordering;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{CorrelationReport, StatsError};
use crate::ingest::FeatureTable;
use crate::report::{self, csv_field, sig6};

/// Principal components of the correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    pub variables: Vec<String>,
    /// `variables × components`; each component column has unit norm.
    #[serde(serialize_with = "report::mat_f64")]
    pub loadings: Vec<Vec<f64>>,
    #[serde(serialize_with = "report::vec_f64")]
    pub eigenvalues: Vec<f64>,
    #[serde(serialize_with = "report::vec_f64")]
    pub contribution: Vec<f64>,
    #[serde(serialize_with = "report::vec_f64")]
    pub cumulative: Vec<f64>,
    #[serde(serialize_with = "report::mat_f64")]
    pub correlation: Vec<Vec<f64>>,
    pub n_rows: usize,
}

impl PcaResult {
    pub fn n_components(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Loadings of component `k` (0-based).
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.loadings.iter().map(|row| row[k]).collect()
    }

    /// Smallest number of leading components reaching `share` of the variance.
    pub fn components_for(&self, share: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| c >= share - 1e-12)
            .map_or(self.n_components(), |k| k + 1)
    }

    /// Loadings table with `F1..Fm` columns followed by eigenvalue,
    /// contribution-rate and cumulative rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = self.n_components();
        let header: Vec<String> = (1..=m).map(|k| format!("F{k}")).collect();
        writeln!(out, ",{}", header.join(","))?;
        let line = |v: &[f64]| v.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(",");
        for (name, row) in self.variables.iter().zip(&self.loadings) {
            writeln!(out, "{},{}", csv_field(name), line(row))?;
        }
        writeln!(out, "Eigenvalue,{}", line(&self.eigenvalues))?;
        writeln!(out, "Contribution Rate,{}", line(&self.contribution))?;
        writeln!(out, "Cumulative Contribution,{}", line(&self.cumulative))
    }
}

/// Correlation-matrix PCA over `variables` using the rows of `table`.
///
/// Components are ordered by eigenvalue, descending; components with equal
/// eigenvalues are ordered by absolute loading on the first variable, then
/// the second, and so on. Each component is signed so that its
/// largest-magnitude loading is positive.
pub fn pca(table: &FeatureTable, variables: &[&str]) -> Result<PcaResult, StatsError> {
    let k = variables.len();
    if k < 2 {
        return Err(StatsError::Dimension(format!(
            "need at least 2 variables, got {k}"
        )));
    }
    let n = table.n_rows();
    if n < k + 1 {
        return Err(StatsError::Dimension(format!(
            "need at least {} complete rows for {k} variables, got {n}",
            k + 1
        )));
    }
    let mut z = Vec::with_capacity(k);
    for name in variables {
        let col = table
            .column_by_name(name)
            .ok_or_else(|| StatsError::UnknownColumn(name.to_string()))?;
        let mean = col.iter().sum::<f64>() / n as f64;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        if sd.is_nan() || sd <= 0.0 {
            return Err(StatsError::Domain(format!(
                "column {name} is constant; exclude it before PCA"
            )));
        }
        z.push(col.iter().map(|v| (v - mean) / sd).collect::<Vec<f64>>());
    }
    let mut corr = DMatrix::<f64>::identity(k, k);
    for a in 0..k {
        for b in a + 1..k {
            let r = z[a].iter().zip(&z[b]).map(|(x, y)| x * y).sum::<f64>() / (n - 1) as f64;
            corr[(a, b)] = r;
            corr[(b, a)] = r;
        }
    }

    let eig = SymmetricEigen::new(corr.clone());
    let mut comps: Vec<(f64, Vec<f64>)> = (0..k)
        .map(|c| {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let lead = v.iter().enumerate().fold(
                0,
                |best, (i, x)| if x.abs() > v[best].abs() { i } else { best },
            );
            if v[lead] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (eig.eigenvalues[c], v)
        })
        .collect();
    comps.sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-12 * k as f64 {
            return b.0.total_cmp(&a.0);
        }
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| y.abs().total_cmp(&x.abs()))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });

    let eigenvalues: Vec<f64> = comps.iter().map(|c| c.0).collect();
    let total: f64 = eigenvalues.iter().sum();
    let contribution: Vec<f64> = eigenvalues.iter().map(|l| l / total).collect();
    let cumulative: Vec<f64> = contribution
        .iter()
        .scan(0.0, |acc, c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let loadings = (0..k)
        .map(|i| comps.iter().map(|c| c.1[i]).collect())
        .collect();
    Ok(PcaResult {
        variables: variables.iter().map(|s| s.to_string()).collect(),
        loadings,
        eigenvalues,
        contribution,
        cumulative,
        correlation: (0..k)
            .map(|a| (0..k).map(|b| corr[(a, b)]).collect())
            .collect(),
        n_rows: n,
    })
}

/// A variable ranked by its first-component loading.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub name: String,
    #[serde(serialize_with = "report::f64")]
    pub loading: f64,
    /// p-value against the correlation target; `NaN` when unknown.
    #[serde(serialize_with = "report::f64")]
    pub target_p: f64,
}

/// Top `k` variables by absolute loading on the first component. Loadings
/// within `1e-9` of each other are ordered by target p-value.
pub fn top_factors(report: &CorrelationReport, pca: &PcaResult, k: usize) -> Vec<Factor> {
    let mut factors: Vec<Factor> = pca
        .variables
        .iter()
        .zip(&pca.loadings)
        .map(|(name, row)| Factor {
            name: name.clone(),
            loading: row[0],
            target_p: report.target_p(name).unwrap_or(f64::NAN),
        })
        .collect();
    factors.sort_by(|a, b| {
        if (a.loading.abs() - b.loading.abs()).abs() > 1e-9 {
            b.loading.abs().total_cmp(&a.loading.abs())
        } else {
            a.target_p.total_cmp(&b.target_p)
        }
    });
    factors.truncate(k);
    factors
}
