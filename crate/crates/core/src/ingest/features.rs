use std::collections::BTreeSet;

use serde::Serialize;

use super::{canonical_column, Diagnostic, IngestError, MatchDataset, PointRecord, Side};

/// How a categorical column becomes numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CategoricalEncoding {
    /// k observed levels give k−1 indicators; the lexicographically first
    /// observed level is the reference and gets no column.
    OneHot,
    /// Levels sorted lexicographically and numbered from 0.
    Ordinal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Provenance {
    Raw { source: String },
    Ordinal { source: String, levels: Vec<String> },
    OneHot { source: String, level: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Numeric,
    Categorical(CategoricalEncoding),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub source: String,
    pub name: String,
    kind: Kind,
}

/// Ordered list of columns to pull out of point records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSpec {
    columns: Vec<FeatureColumn>,
}

impl FeatureSpec {
    pub fn new() -> Self {
        FeatureSpec::default()
    }

    pub fn numeric(self, source: &str) -> Self {
        self.numeric_as(source, source)
    }

    /// Numeric column `source`, emitted under `name`.
    pub fn numeric_as(mut self, source: &str, name: &str) -> Self {
        self.columns.push(FeatureColumn {
            source: source.to_string(),
            name: name.to_string(),
            kind: Kind::Numeric,
        });
        self
    }

    pub fn categorical(mut self, source: &str, encoding: CategoricalEncoding) -> Self {
        self.columns.push(FeatureColumn {
            source: source.to_string(),
            name: source.to_string(),
            kind: Kind::Categorical(encoding),
        });
        self
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    fn validate(&self) -> Result<(), IngestError> {
        for c in &self.columns {
            let ok = match c.kind {
                Kind::Numeric => PointRecord::is_numeric(&c.source),
                Kind::Categorical(_) => PointRecord::is_categorical(&c.source),
            };
            if !ok {
                return Err(IngestError::UnknownColumn(c.source.clone()));
            }
        }
        Ok(())
    }

    /// Encode `rows`, each viewed from the given side.
    ///
    /// Rows missing any requested value are masked out and counted, never
    /// imputed. Categorical levels are those observed in retained rows.
    pub fn build<'a, I>(&self, rows: I) -> Result<FeatureTable, IngestError>
    where
        I: IntoIterator<Item = (&'a PointRecord, Side)>,
    {
        self.validate()?;

        enum Cell {
            Num(f64),
            Cat(&'static str),
        }

        let mut raw: Vec<Vec<Cell>> = Vec::new();
        let mut mask = Vec::new();
        let mut rows_in = 0;
        'rows: for (record, side) in rows {
            rows_in += 1;
            let mut cells = Vec::with_capacity(self.columns.len());
            for c in &self.columns {
                let cell = match c.kind {
                    Kind::Numeric => record.numeric(&c.source, side)?.map(Cell::Num),
                    Kind::Categorical(_) => record.categorical(&c.source)?.map(Cell::Cat),
                };
                match cell {
                    Some(Cell::Num(v)) if !v.is_finite() => {
                        mask.push(false);
                        continue 'rows;
                    }
                    Some(cell) => cells.push(cell),
                    None => {
                        mask.push(false);
                        continue 'rows;
                    }
                }
            }
            mask.push(true);
            raw.push(cells);
        }

        let mut warnings = Vec::new();
        let dropped = rows_in - raw.len();
        if dropped > 0 {
            warnings.push(Diagnostic::general(format!(
                "dropped {dropped} of {rows_in} rows with missing values"
            )));
        }

        // Output layout: one block of columns per spec column.
        let mut names = Vec::new();
        let mut provenance = Vec::new();
        let mut blocks: Vec<Vec<&'static str>> = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            match c.kind {
                Kind::Numeric => {
                    names.push(c.name.clone());
                    provenance.push(Provenance::Raw {
                        source: canonical_column(&c.source).to_string(),
                    });
                    blocks.push(Vec::new());
                }
                Kind::Categorical(enc) => {
                    let levels: Vec<&'static str> = raw
                        .iter()
                        .map(|cells| match cells[j] {
                            Cell::Cat(s) => s,
                            Cell::Num(_) => unreachable!(),
                        })
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    let source = canonical_column(&c.source).to_string();
                    match enc {
                        CategoricalEncoding::OneHot => {
                            if levels.len() < 2 {
                                warnings.push(Diagnostic::general(format!(
                                    "{source}: {} observed level(s), no indicator columns",
                                    levels.len()
                                )));
                            }
                            for level in levels.iter().skip(1) {
                                names.push(format!("{}={level}", c.name));
                                provenance.push(Provenance::OneHot {
                                    source: source.clone(),
                                    level: level.to_string(),
                                });
                            }
                        }
                        CategoricalEncoding::Ordinal => {
                            names.push(c.name.clone());
                            provenance.push(Provenance::Ordinal {
                                source,
                                levels: levels.iter().map(|s| s.to_string()).collect(),
                            });
                        }
                    }
                    blocks.push(levels);
                }
            }
        }

        let n_cols = names.len();
        let mut values = Vec::with_capacity(raw.len() * n_cols);
        for cells in &raw {
            for (j, c) in self.columns.iter().enumerate() {
                match (&c.kind, &cells[j]) {
                    (Kind::Numeric, Cell::Num(v)) => values.push(*v),
                    (Kind::Categorical(enc), Cell::Cat(s)) => {
                        let levels = &blocks[j];
                        let pos = levels.iter().position(|l| l == s).expect("observed level");
                        match enc {
                            CategoricalEncoding::OneHot => values
                                .extend((1..levels.len()).map(|k| f64::from(u8::from(k == pos)))),
                            CategoricalEncoding::Ordinal => values.push(pos as f64),
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }

        let source_rows = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &keep)| keep.then_some(i))
            .collect();
        Ok(FeatureTable {
            names,
            provenance,
            values,
            n_rows: raw.len(),
            mask,
            source_rows,
            warnings,
        })
    }
}

/// Row-aligned numeric matrix with column names and row provenance.
///
/// Retained rows never contain non-finite values. `mask[i]` tells whether
/// input row `i` was retained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureTable {
    names: Vec<String>,
    provenance: Vec<Provenance>,
    /// Row-major, `n_rows × names.len()`.
    values: Vec<f64>,
    n_rows: usize,
    mask: Vec<bool>,
    source_rows: Vec<usize>,
    pub warnings: Vec<Diagnostic>,
}

impl FeatureTable {
    /// Build a table directly from named columns. Every row is retained.
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self, IngestError> {
        if names.len() != columns.len() {
            return Err(IngestError::Schema(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(IngestError::Schema("columns differ in length".into()));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(IngestError::Schema(
                "non-finite value in feature column".into(),
            ));
        }
        let mut values = Vec::with_capacity(n_rows * names.len());
        for i in 0..n_rows {
            values.extend(columns.iter().map(|c| c[i]));
        }
        Ok(FeatureTable {
            provenance: names
                .iter()
                .map(|n| Provenance::Raw { source: n.clone() })
                .collect(),
            names,
            values,
            n_rows,
            mask: vec![true; n_rows],
            source_rows: (0..n_rows).collect(),
            warnings: Vec::new(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.n_cols();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        self.column_index(name).map(|j| self.column(j))
    }

    pub fn is_constant(&self, j: usize) -> bool {
        let first = if self.n_rows == 0 {
            0.0
        } else {
            self.get(0, j)
        };
        (0..self.n_rows).all(|i| self.get(i, j) == first)
    }

    /// Input-row mask: `true` for retained rows.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Input-row index of each retained row.
    pub fn source_rows(&self) -> &[usize] {
        &self.source_rows
    }

    pub fn rows_in(&self) -> usize {
        self.mask.len()
    }

    pub fn rows_dropped(&self) -> usize {
        self.rows_in() - self.n_rows
    }

    /// Keep the columns at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> FeatureTable {
        let mut values = Vec::with_capacity(self.n_rows * indices.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            values.extend(indices.iter().map(|&j| row[j]));
        }
        FeatureTable {
            names: indices.iter().map(|&j| self.names[j].clone()).collect(),
            provenance: indices
                .iter()
                .map(|&j| self.provenance[j].clone())
                .collect(),
            values,
            n_rows: self.n_rows,
            mask: self.mask.clone(),
            source_rows: self.source_rows.clone(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn select_names(&self, names: &[&str]) -> Result<FeatureTable, IngestError> {
        let idx = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| IngestError::UnknownColumn(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.select(&idx))
    }

    /// Remove column `name`, returning the remaining table and its values.
    pub fn take_column(&self, name: &str) -> Result<(FeatureTable, Vec<f64>), IngestError> {
        let j = self
            .column_index(name)
            .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))?;
        let rest: Vec<usize> = (0..self.n_cols()).filter(|&k| k != j).collect();
        Ok((self.select(&rest), self.column(j)))
    }

    /// Keep the rows at `rows` (indices into retained rows).
    pub fn subset_rows(&self, rows: &[usize]) -> FeatureTable {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols());
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        let keep: Vec<usize> = rows.iter().map(|&i| self.source_rows[i]).collect();
        let mut mask = vec![false; self.mask.len()];
        for &s in &keep {
            mask[s] = true;
        }
        FeatureTable {
            names: self.names.clone(),
            provenance: self.provenance.clone(),
            values,
            n_rows: rows.len(),
            mask,
            source_rows: keep,
            warnings: self.warnings.clone(),
        }
    }
}

/// One-hot encode `columns` of every record (player-1 view).
pub fn one_hot_encode(
    dataset: &MatchDataset,
    columns: &[&str],
) -> Result<FeatureTable, IngestError> {
    let spec = columns.iter().fold(FeatureSpec::new(), |s, c| {
        s.categorical(c, CategoricalEncoding::OneHot)
    });
    spec.build(dataset.records().iter().map(|r| (r, Side::One)))
}
