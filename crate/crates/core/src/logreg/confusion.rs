use std::io::Write;

use serde::Serialize;

use super::{predict_table, LogisticModel, LogregError};
use crate::ingest::FeatureTable;
use crate::report;

/// Measured (rows) by predicted (columns) counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub n00: usize,
    pub n01: usize,
    pub n10: usize,
    pub n11: usize,
}

impl ConfusionMatrix {
    pub fn from_counts(n00: usize, n01: usize, n10: usize, n11: usize) -> Self {
        ConfusionMatrix { n00, n01, n10, n11 }
    }

    pub fn from_pairs(measured: &[u8], predicted: &[u8]) -> Result<Self, LogregError> {
        if measured.is_empty() {
            return Err(LogregError::Domain("no predictions to tabulate".into()));
        }
        if measured.len() != predicted.len() {
            return Err(LogregError::Domain(format!(
                "{} labels for {} predictions",
                measured.len(),
                predicted.len()
            )));
        }
        let mut c = ConfusionMatrix::from_counts(0, 0, 0, 0);
        for (&m, &p) in measured.iter().zip(predicted) {
            match (m, p) {
                (0, 0) => c.n00 += 1,
                (0, 1) => c.n01 += 1,
                (1, 0) => c.n10 += 1,
                (1, 1) => c.n11 += 1,
                _ => {
                    return Err(LogregError::Domain(format!(
                        "class pair ({m}, {p}) is not binary"
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    /// Percent of measured-`class` rows predicted correctly; `None` when the
    /// class is absent.
    pub fn percent_correct(&self, class: u8) -> Option<f64> {
        let (hit, miss) = if class == 0 {
            (self.n00, self.n01)
        } else {
            (self.n11, self.n10)
        };
        let rows = hit + miss;
        (rows > 0).then(|| 100.0 * hit as f64 / rows as f64)
    }

    pub fn overall_percent(&self) -> f64 {
        100.0 * (self.n00 + self.n11) as f64 / self.total() as f64
    }

    /// Layout of a classification table: one row per measured class, then
    /// the overall percentage. Percentages have one decimal.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let pct = |p: Option<f64>| p.map_or_else(String::new, |v| format!("{v:.1}"));
        writeln!(out, "observed,predicted_0,predicted_1,percent_correct")?;
        writeln!(
            out,
            "0,{},{},{}",
            self.n00,
            self.n01,
            pct(self.percent_correct(0))
        )?;
        writeln!(
            out,
            "1,{},{},{}",
            self.n10,
            self.n11,
            pct(self.percent_correct(1))
        )?;
        writeln!(out, "overall,,,{:.1}", self.overall_percent())
    }
}

#[derive(Serialize)]
struct Json {
    n00: usize,
    n01: usize,
    n10: usize,
    n11: usize,
    #[serde(serialize_with = "report::opt_f64")]
    percent_correct_0: Option<f64>,
    #[serde(serialize_with = "report::opt_f64")]
    percent_correct_1: Option<f64>,
    #[serde(serialize_with = "report::f64")]
    overall_percent: f64,
}

impl Serialize for ConfusionMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Json {
            n00: self.n00,
            n01: self.n01,
            n10: self.n10,
            n11: self.n11,
            percent_correct_0: self.percent_correct(0),
            percent_correct_1: self.percent_correct(1),
            overall_percent: self.overall_percent(),
        }
        .serialize(s)
    }
}

/// Classify every row of `features` and tabulate against `labels`.
pub fn confusion(
    model: &LogisticModel,
    features: &FeatureTable,
    labels: &[f64],
    cutoff: f64,
) -> Result<ConfusionMatrix, LogregError> {
    if features.n_rows() == 0 {
        return Err(LogregError::Domain("no rows to classify".into()));
    }
    let predicted: Vec<u8> = predict_table(model, features, cutoff)?
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    let measured: Vec<u8> = labels.iter().map(|&y| u8::from(y == 1.0)).collect();
    ConfusionMatrix::from_pairs(&measured, &predicted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_decimal(v: f64) -> String {
        format!("{v:.1}")
    }

    #[test]
    fn published_classification_tables() {
        let a = ConfusionMatrix::from_counts(108, 34, 21, 136);
        assert_eq!(one_decimal(a.percent_correct(0).unwrap()), "76.1");
        assert_eq!(one_decimal(a.percent_correct(1).unwrap()), "86.6");
        assert_eq!(one_decimal(a.overall_percent()), "81.6");
        let b = ConfusionMatrix::from_counts(144, 14, 39, 103);
        assert_eq!(one_decimal(b.percent_correct(0).unwrap()), "91.1");
        assert_eq!(one_decimal(b.percent_correct(1).unwrap()), "72.5");
        assert_eq!(one_decimal(b.overall_percent()), "82.3");
    }

    #[test]
    fn perfect_and_empty() {
        let c = ConfusionMatrix::from_pairs(&[0, 1, 1], &[0, 1, 1]).unwrap();
        assert_eq!(c.overall_percent(), 100.0);
        assert!(ConfusionMatrix::from_pairs(&[], &[]).is_err());
        let only_ones = ConfusionMatrix::from_pairs(&[1, 1], &[1, 0]).unwrap();
        assert_eq!(only_ones.percent_correct(0), None);
    }

    #[test]
    fn csv_and_json_layout() {
        let c = ConfusionMatrix::from_counts(108, 34, 21, 136);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "observed,predicted_0,predicted_1,percent_correct\n0,108,34,76.1\n1,21,136,86.6\noverall,,,81.6\n"
        );
        let v = serde_json::to_value(c).unwrap();
        assert_eq!(v["n11"], 136);
        assert!((v["overall_percent"].as_f64().unwrap() - 81.605).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn percentages_match_brute_force(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..200)) {
            let measured: Vec<u8> = pairs.iter().map(|p| p.0).collect();
            let predicted: Vec<u8> = pairs.iter().map(|p| p.1).collect();
            let c = ConfusionMatrix::from_pairs(&measured, &predicted).unwrap();
            let correct = pairs.iter().filter(|p| p.0 == p.1).count();
            prop_assert_eq!(c.overall_percent(), 100.0 * correct as f64 / pairs.len() as f64);
            for class in 0..2u8 {
                let rows: Vec<_> = pairs.iter().filter(|p| p.0 == class).collect();
                let hits = rows.iter().filter(|p| p.1 == class).count();
                let want = (!rows.is_empty()).then(|| 100.0 * hits as f64 / rows.len() as f64);
                prop_assert_eq!(c.percent_correct(class), want);
            }
        }
    }
}
