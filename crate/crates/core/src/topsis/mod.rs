//! Weighted TOPSIS: rank alternatives by relative closeness to the ideal
//! solution.
//!
//! The pipeline is the textbook one: vector-normalize each criterion column,
//! scale by the criterion weights, take the per-column best and worst values
//! as the ideal and negative-ideal points, measure Euclidean distances to
//! both, and score each alternative with `C = D− / (D+ + D−)`.
//!
//! Two conventions cover inputs the formulas leave undefined:
//!
//! - an all-zero column normalizes to zeros instead of dividing by zero, so
//!   it never influences distances;
//! - an alternative at distance zero from both ideal points (every
//!   alternative identical) scores `0.5` and a warning is recorded.

mod momentum;

use serde::Serialize;
use thiserror::Error;

use crate::par;

pub use momentum::{
    momentum_series, momentum_series_all, MomentumSeries, SeriesPoint, MOMENTUM_CRITERIA,
};

#[derive(Debug, Error, PartialEq)]
pub enum TopsisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid weights: {0}")]
    Weights(String),
    #[error("empty series: {0}")]
    EmptySeries(String),
}

/// Whether larger or smaller values of a criterion are preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Benefit,
    Cost,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, TopsisError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TopsisError::Dimension("rows differ in length".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Alternatives (rows) by criteria (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionMatrix {
    values: Matrix,
    names: Vec<String>,
    directions: Vec<Direction>,
}

impl DecisionMatrix {
    /// All-benefit matrix with criteria named `A1..Am`.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, TopsisError> {
        let values = Matrix::from_rows(rows)?;
        let m = values.cols();
        Self::with_criteria(
            values,
            (1..=m).map(|j| format!("A{j}")).collect(),
            vec![Direction::Benefit; m],
        )
    }

    pub fn with_criteria(
        values: Matrix,
        names: Vec<String>,
        directions: Vec<Direction>,
    ) -> Result<Self, TopsisError> {
        if values.rows() == 0 || values.cols() == 0 {
            return Err(TopsisError::Dimension(format!(
                "need at least one alternative and one criterion, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if names.len() != values.cols() || directions.len() != values.cols() {
            return Err(TopsisError::Dimension(format!(
                "{} criteria but {} names and {} directions",
                values.cols(),
                names.len(),
                directions.len()
            )));
        }
        check_finite(&values)?;
        Ok(DecisionMatrix {
            values,
            names,
            directions,
        })
    }

    pub fn with_directions(mut self, directions: Vec<Direction>) -> Result<Self, TopsisError> {
        if directions.len() != self.values.cols() {
            return Err(TopsisError::Dimension("one direction per criterion".into()));
        }
        self.directions = directions;
        Ok(self)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn n_alternatives(&self) -> usize {
        self.values.rows()
    }

    pub fn n_criteria(&self) -> usize {
        self.values.cols()
    }
}

fn check_finite(m: &Matrix) -> Result<(), TopsisError> {
    match m.as_slice().iter().position(|v| !v.is_finite()) {
        Some(k) => Err(TopsisError::Domain(format!(
            "non-finite value at row {}, column {}",
            k / m.cols(),
            k % m.cols()
        ))),
        None => Ok(()),
    }
}

/// Criterion weights: nonnegative, summing to 1 within `1e-9`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(weights: Vec<f64>) -> Result<Self, TopsisError> {
        if weights.is_empty() {
            return Err(TopsisError::Weights("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(TopsisError::Weights(format!(
                "weight {w} is negative or non-finite"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(TopsisError::Weights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform(m: usize) -> Self {
        WeightVector(vec![1.0 / m as f64; m])
    }

    /// Sets, games, points, serve: 0.4, 0.25, 0.2, 0.15.
    pub fn momentum_default() -> Self {
        WeightVector(vec![0.4, 0.25, 0.2, 0.15])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::str::FromStr for WeightVector {
    type Err = TopsisError;

    /// Comma-separated weights, e.g. `0.4,0.25,0.2,0.15`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let w = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| TopsisError::Weights(format!("not a number: {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        WeightVector::new(w)
    }
}

/// Apply weights before distances (standard) or use the normalized matrix
/// directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Weighting {
    #[default]
    Weighted,
    Unweighted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopsisResult {
    pub normalized: Matrix,
    pub weighted: Matrix,
    pub ideal: Vec<f64>,
    pub negative_ideal: Vec<f64>,
    pub d_plus: Vec<f64>,
    pub d_minus: Vec<f64>,
    pub closeness: Vec<f64>,
    /// Row indices sorted by closeness, best first; ties keep row order.
    pub order: Vec<usize>,
    /// 1-based rank of each row.
    pub ranks: Vec<usize>,
    /// Rows whose closeness fell back to 0.5.
    pub degenerate_rows: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Divide each column by its Euclidean norm. Zero columns stay zero.
pub fn normalize(x: &Matrix) -> Result<Matrix, TopsisError> {
    check_finite(x)?;
    let mut out = x.clone();
    for j in 0..x.cols() {
        let norm = (0..x.rows())
            .map(|i| x.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            for i in 0..x.rows() {
                out.set(i, j, x.get(i, j) / norm);
            }
        }
    }
    Ok(out)
}

/// Ideal and negative-ideal points of a (weighted) normalized matrix.
pub fn ideal_vectors(v: &Matrix, directions: &[Direction]) -> (Vec<f64>, Vec<f64>) {
    let mut ideal = Vec::with_capacity(v.cols());
    let mut anti = Vec::with_capacity(v.cols());
    for (j, dir) in directions.iter().enumerate().take(v.cols()) {
        let col = v.column(j);
        let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = col.iter().copied().fold(f64::INFINITY, f64::min);
        match dir {
            Direction::Benefit => {
                ideal.push(max);
                anti.push(min);
            }
            Direction::Cost => {
                ideal.push(min);
                anti.push(max);
            }
        }
    }
    (ideal, anti)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distance of every row to the ideal and negative-ideal points.
pub fn distances(
    v: &Matrix,
    ideal: &[f64],
    anti: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), TopsisError> {
    if ideal.len() != v.cols() || anti.len() != v.cols() {
        return Err(TopsisError::Dimension(format!(
            "matrix has {} columns, ideal points have {} and {}",
            v.cols(),
            ideal.len(),
            anti.len()
        )));
    }
    let pairs = par::map_range(v.rows(), |i| {
        let row = v.row(i);
        (euclid(row, ideal), euclid(row, anti))
    });
    Ok(pairs.into_iter().unzip())
}

/// `C = D− / (D+ + D−)`; rows with both distances zero get 0.5 and are
/// returned in the second vector.
pub fn closeness(d_plus: &[f64], d_minus: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut degenerate = Vec::new();
    let c = d_plus
        .iter()
        .zip(d_minus)
        .enumerate()
        .map(|(i, (&p, &m))| {
            let total = p + m;
            if total > 0.0 {
                m / total
            } else {
                degenerate.push(i);
                0.5
            }
        })
        .collect();
    (c, degenerate)
}

fn rank_order(c: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].total_cmp(&c[a]));
    let mut ranks = vec![0; c.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    (order, ranks)
}

pub fn evaluate(x: &DecisionMatrix, w: &WeightVector) -> Result<TopsisResult, TopsisError> {
    evaluate_with(x, w, Weighting::Weighted)
}

pub fn evaluate_with(
    x: &DecisionMatrix,
    w: &WeightVector,
    weighting: Weighting,
) -> Result<TopsisResult, TopsisError> {
    if w.len() != x.n_criteria() {
        return Err(TopsisError::Dimension(format!(
            "{} weights for {} criteria",
            w.len(),
            x.n_criteria()
        )));
    }
    let normalized = normalize(x.values())?;
    let mut weighted = normalized.clone();
    if weighting == Weighting::Weighted {
        for i in 0..weighted.rows() {
            for (j, wj) in w.as_slice().iter().enumerate() {
                weighted.set(i, j, normalized.get(i, j) * wj);
            }
        }
    }
    let (ideal, negative_ideal) = ideal_vectors(&weighted, x.directions());
    let (d_plus, d_minus) = distances(&weighted, &ideal, &negative_ideal)?;
    let (closeness, degenerate_rows) = closeness(&d_plus, &d_minus);
    let (order, ranks) = rank_order(&closeness);
    let mut warnings = Vec::new();
    if !degenerate_rows.is_empty() {
        warnings.push(format!(
            "{} alternative(s) coincide with both ideal points; closeness set to 0.5",
            degenerate_rows.len()
        ));
    }
    Ok(TopsisResult {
        normalized,
        weighted,
        ideal,
        negative_ideal,
        d_plus,
        d_minus,
        closeness,
        order,
        ranks,
        degenerate_rows,
        warnings,
    })
}

/// Evaluate many independent matrices with shared weights.
pub fn evaluate_batch(
    matrices: &[DecisionMatrix],
    w: &WeightVector,
) -> Vec<Result<TopsisResult, TopsisError>> {
    par::map_slice(matrices, |x| evaluate(x, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&m(&[&[3.0], &[4.0]])).unwrap();
        assert_abs_diff_eq!(n.get(0, 0), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(n.get(1, 0), 0.8, epsilon = 1e-15);
        let z = normalize(&m(&[&[0.0], &[0.0]])).unwrap();
        assert_eq!(z.as_slice(), &[0.0, 0.0]);
        let one = normalize(&m(&[&[7.5]])).unwrap();
        assert_eq!(one.get(0, 0), 1.0);
        assert!(matches!(
            normalize(&m(&[&[f64::NAN]])),
            Err(TopsisError::Domain(_))
        ));
    }

    #[test]
    fn ideal_vector_examples() {
        let v = m(&[&[0.1], &[0.4]]);
        assert_eq!(
            ideal_vectors(&v, &[Direction::Benefit]),
            (vec![0.4], vec![0.1])
        );
        assert_eq!(
            ideal_vectors(&v, &[Direction::Cost]),
            (vec![0.1], vec![0.4])
        );
        let c = m(&[&[0.2], &[0.2]]);
        assert_eq!(
            ideal_vectors(&c, &[Direction::Benefit]),
            (vec![0.2], vec![0.2])
        );
    }

    #[test]
    fn distance_examples() {
        let v = m(&[&[0.2683, 0.3578]]);
        let (dp, _) = distances(&v, &[0.5367, 0.3578], &[0.2683, 0.1789]).unwrap();
        assert_abs_diff_eq!(dp[0], 0.2684, epsilon = 1e-4);
        let (dp, dm) = distances(&m(&[&[0.5, 0.5]]), &[0.5, 0.5], &[0.1, 0.1]).unwrap();
        assert_eq!(dp[0], 0.0);
        assert!(dm[0] > 0.0);
        let (_, dm) = distances(&m(&[&[0.1, 0.1]]), &[0.5, 0.5], &[0.1, 0.1]).unwrap();
        assert_eq!(dm[0], 0.0);
        assert!(distances(&m(&[&[0.1]]), &[0.5, 0.5], &[0.1]).is_err());
    }

    #[test]
    fn closeness_examples() {
        let (c, d) = closeness(&[0.0, 0.3, 0.0], &[0.3, 0.0, 0.0]);
        assert_eq!(c, vec![1.0, 0.0, 0.5]);
        assert_eq!(d, vec![2]);
    }

    #[test]
    fn two_by_two_worked_example() {
        let x = DecisionMatrix::new(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let w = WeightVector::new(vec![0.6, 0.4]).unwrap();
        let r = evaluate(&x, &w).unwrap();
        assert_abs_diff_eq!(r.closeness[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(r.closeness[1], 0.6, epsilon = 1e-12);
        assert_eq!(r.ranks, vec![2, 1]);
        assert_eq!(r.order, vec![1, 0]);
        assert_abs_diff_eq!(r.d_plus[0], 0.6 / 5f64.sqrt(), epsilon = 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn single_alternative_is_degenerate() {
        let x = DecisionMatrix::new(&[vec![3.0, 1.0]]).unwrap();
        let r = evaluate(&x, &WeightVector::uniform(2)).unwrap();
        assert_eq!(r.closeness, vec![0.5]);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn identical_rows_tie_in_row_order() {
        let x = DecisionMatrix::new(&[vec![1.0, 2.0], vec![3.0, 3.0], vec![1.0, 2.0]]).unwrap();
        let r = evaluate(&x, &WeightVector::uniform(2)).unwrap();
        assert_eq!(r.closeness[0], r.closeness[2]);
        assert_eq!(r.order, vec![1, 0, 2]);
    }

    #[test]
    fn unweighted_mode_ignores_weights() {
        let x = DecisionMatrix::new(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let a = evaluate_with(
            &x,
            &WeightVector::new(vec![0.9, 0.1]).unwrap(),
            Weighting::Unweighted,
        )
        .unwrap();
        let b = evaluate_with(
            &x,
            &WeightVector::new(vec![0.1, 0.9]).unwrap(),
            Weighting::Unweighted,
        )
        .unwrap();
        assert_eq!(a.closeness, b.closeness);
        assert_abs_diff_eq!(a.closeness[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cost_direction_flips_ranking() {
        let x = DecisionMatrix::new(&[vec![1.0], vec![2.0]])
            .unwrap()
            .with_directions(vec![Direction::Cost])
            .unwrap();
        let r = evaluate(&x, &WeightVector::uniform(1)).unwrap();
        assert_eq!(r.closeness, vec![1.0, 0.0]);
    }

    #[test]
    fn weight_validation() {
        assert!(WeightVector::new(vec![0.5, 0.4]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
        assert!(WeightVector::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        let d = WeightVector::momentum_default();
        assert_abs_diff_eq!(d.as_slice().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_eq!("0.4,0.25,0.2,0.15".parse::<WeightVector>().unwrap(), d);
        assert!("0.4,x".parse::<WeightVector>().is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(DecisionMatrix::new(&[]).is_err());
        assert!(DecisionMatrix::new(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(matches!(
            DecisionMatrix::new(&[vec![f64::INFINITY]]),
            Err(TopsisError::Domain(_))
        ));
        let x = DecisionMatrix::new(&[vec![1.0, 2.0]]).unwrap();
        assert!(evaluate(&x, &WeightVector::uniform(3)).is_err());
    }
}
