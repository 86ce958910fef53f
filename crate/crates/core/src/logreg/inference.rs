use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{log_likelihood, LogisticModel, LogregError};
use crate::ingest::FeatureTable;
use crate::par;
use crate::report::{self, csv_field, sig6};

/// Relative eigenvalue floor below which the information matrix is treated
/// as singular.
const SINGULAR_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub name: String,
    #[serde(serialize_with = "report::f64")]
    pub b: f64,
    #[serde(serialize_with = "report::f64")]
    pub se: f64,
    #[serde(serialize_with = "report::f64")]
    pub wald: f64,
    pub df: u32,
    #[serde(serialize_with = "report::f64")]
    pub p_value: f64,
    #[serde(serialize_with = "report::f64")]
    pub exp_b: f64,
}

/// Likelihood-ratio test of all slopes against the intercept-only model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Omnibus {
    #[serde(serialize_with = "report::f64")]
    pub chi_square: f64,
    pub df: usize,
    #[serde(serialize_with = "report::f64")]
    pub significance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceTable {
    pub rows: Vec<CoefficientRow>,
    pub omnibus: Omnibus,
    pub n: usize,
    #[serde(serialize_with = "report::f64")]
    pub log_likelihood: f64,
    #[serde(serialize_with = "report::f64")]
    pub minus_two_log_likelihood: f64,
    #[serde(serialize_with = "report::f64")]
    pub null_log_likelihood: f64,
    #[serde(serialize_with = "report::f64")]
    pub cox_snell_r2: f64,
    #[serde(serialize_with = "report::f64")]
    pub nagelkerke_r2: f64,
    pub notes: Vec<String>,
}

fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let d = ChiSquared::new(df).expect("df > 0");
    d.sf(x).clamp(0.0, 1.0)
}

/// Observed information `Xᵀ diag(h(1−h)) X` on the reporting scale, with a
/// leading intercept column.
fn information(model: &LogisticModel, table: &FeatureTable, idx: &[usize]) -> DMatrix<f64> {
    let k = idx.len() + 1;
    let sums = par::chunked_sum(table.n_rows(), k * k, |i, acc| {
        let row = table.row(i);
        let mut x = Vec::with_capacity(k);
        x.push(1.0);
        x.extend(idx.iter().map(|&j| row[j]));
        let h = model.probability(&x[1..]);
        let w = h * (1.0 - h);
        for a in 0..k {
            for b in 0..k {
                acc[a * k + b] += w * x[a] * x[b];
            }
        }
    });
    DMatrix::from_row_slice(k, k, &sums)
}

/// Inverse of a symmetric positive semi-definite matrix, or `None` when it
/// is numerically singular.
fn spd_inverse(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m);
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if max <= 0.0 || min <= max * SINGULAR_RATIO {
        return None;
    }
    let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
    Some(&eig.eigenvectors * inv_diag * eig.eigenvectors.transpose())
}

/// Standard errors from the inverse observed information, Wald tests, and
/// whole-model fit statistics.
///
/// Coefficients flagged as separating get an infinite standard error, a
/// Wald statistic of 0 and a p-value of 1.
pub fn wald_inference(
    model: &LogisticModel,
    features: &FeatureTable,
    labels: &[f64],
) -> Result<InferenceTable, LogregError> {
    let m = features.n_rows();
    if m == 0 {
        return Err(LogregError::Domain("no rows".into()));
    }
    if labels.len() != m {
        return Err(LogregError::Domain(format!(
            "{} labels for {m} rows",
            labels.len()
        )));
    }
    let idx = model.align(features)?;
    let k = idx.len() + 1;
    let mut notes = Vec::new();

    let se: Vec<f64> = match spd_inverse(information(model, features, &idx)) {
        Some(inv) => (0..k).map(|j| inv[(j, j)].max(0.0).sqrt()).collect(),
        None => {
            notes.push(
                "information matrix is singular; standard errors reported as infinite (separation)"
                    .into(),
            );
            vec![f64::INFINITY; k]
        }
    };
    let mut se = se;
    for &j in &model.separating {
        se[j] = f64::INFINITY;
    }
    if !model.separating.is_empty() {
        let names: Vec<&str> = model
            .separating
            .iter()
            .map(|&j| model.names[j].as_str())
            .collect();
        notes.push(format!(
            "separation: maximum-likelihood estimates do not exist for {}; their standard errors are unbounded",
            names.join(", ")
        ));
    }

    let rows = (0..k)
        .map(|j| {
            let b = model.theta[j];
            let wald = if se[j].is_finite() && se[j] > 0.0 {
                (b / se[j]).powi(2)
            } else {
                0.0
            };
            CoefficientRow {
                name: model.names[j].clone(),
                b,
                se: se[j],
                wald,
                df: 1,
                p_value: chi2_sf(wald, 1.0),
                exp_b: b.exp(),
            }
        })
        .collect();

    let ll = log_likelihood(model, features, &idx, labels);
    let ybar = labels.iter().sum::<f64>() / m as f64;
    let xlogx = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
    let ll_null = m as f64 * (xlogx(ybar) + xlogx(1.0 - ybar));
    let chi_square = (2.0 * (ll - ll_null)).max(0.0);
    let df = k - 1;
    let significance = if df == 0 {
        1.0
    } else {
        chi2_sf(chi_square, df as f64)
    };
    let mf = m as f64;
    let cox_snell = 1.0 - ((2.0 / mf) * (ll_null - ll)).exp();
    let max_cox_snell = 1.0 - ((2.0 / mf) * ll_null).exp();
    let nagelkerke = if max_cox_snell > 0.0 {
        cox_snell / max_cox_snell
    } else {
        f64::NAN
    };

    Ok(InferenceTable {
        rows,
        omnibus: Omnibus {
            chi_square: if df == 0 { 0.0 } else { chi_square },
            df,
            significance,
        },
        n: m,
        log_likelihood: ll,
        minus_two_log_likelihood: -2.0 * ll,
        null_log_likelihood: ll_null,
        cox_snell_r2: cox_snell,
        nagelkerke_r2: nagelkerke,
        notes,
    })
}

impl InferenceTable {
    pub fn row(&self, name: &str) -> Option<&CoefficientRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Coefficient table, six significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "variable,B,Standard Error,Wald,df,P-Value,Exp(B)")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&r.name),
                sig6(r.b),
                sig6(r.se),
                sig6(r.wald),
                r.df,
                sig6(r.p_value),
                sig6(r.exp_b)
            )?;
        }
        Ok(())
    }

    /// Model-level statistics as `statistic,value` rows.
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "statistic,value")?;
        let rows = [
            ("n", self.n.to_string()),
            ("log_likelihood", sig6(self.log_likelihood)),
            (
                "minus_two_log_likelihood",
                sig6(self.minus_two_log_likelihood),
            ),
            ("null_log_likelihood", sig6(self.null_log_likelihood)),
            ("omnibus_chi_square", sig6(self.omnibus.chi_square)),
            ("omnibus_df", self.omnibus.df.to_string()),
            ("omnibus_significance", sig6(self.omnibus.significance)),
            ("cox_snell_r2", sig6(self.cox_snell_r2)),
            ("nagelkerke_r2", sig6(self.nagelkerke_r2)),
        ];
        for (k, v) in rows {
            writeln!(out, "{k},{v}")?;
        }
        Ok(())
    }
}
