//! Tabular data container, CSV ingestion, transforms, and correlation
//! utilities used by every downstream module.
//!
//! The CSV dialect is deliberately narrow: comma-separated, UTF-8, '.'
//! decimal point, optional single header row, no quoting. Ingestion rejects
//! missing values, NaN, and infinities outright — downstream statistics
//! assume a complete numeric table.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A transform applied to a column, recorded in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// Natural logarithm.
    Logged,
    /// Centered to mean 0 and scaled to sample sd 1.
    Standardized,
}

/// Named numeric column matrix with per-column transform provenance.
///
/// Invariants: all columns share the same length `n ≥ 1`, names are unique
/// and non-empty, and no stored value is NaN or infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    transforms: Vec<Vec<Transform>>,
}

impl Dataset {
    /// Build a dataset from parallel name/column vectors.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(CoreError::Data(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if names.is_empty() {
            return Err(CoreError::Data("dataset must have at least one column".into()));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(CoreError::Data("empty column name".into()));
            }
            if !seen.insert(name.clone()) {
                return Err(CoreError::Data(format!("duplicate column name: {name}")));
            }
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(CoreError::Data("columns must have at least one row".into()));
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(CoreError::Data(format!(
                    "column {name} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(CoreError::Data(format!(
                    "non-finite value in column {name}, row {}",
                    row + 1
                )));
            }
        }
        let transforms = vec![Vec::new(); names.len()];
        Ok(Self { names, columns, transforms })
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    /// Number of columns.
    pub fn p(&self) -> usize {
        self.columns.len()
    }

    /// Column names in storage order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of a named column.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CoreError::UnknownName(name.into()))
    }

    /// Values of a named column.
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.columns[self.index_of(name)?])
    }

    /// Values of a column by index.
    pub fn column_at(&self, idx: usize) -> &[f64] {
        &self.columns[idx]
    }

    /// Transform history of a named column (empty = raw).
    pub fn transforms_of(&self, name: &str) -> Result<&[Transform]> {
        Ok(&self.transforms[self.index_of(name)?])
    }

    /// A new dataset containing only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Dataset> {
        let mut out_names = Vec::with_capacity(names.len());
        let mut out_cols = Vec::with_capacity(names.len());
        let mut out_tf = Vec::with_capacity(names.len());
        for name in names {
            let idx = self.index_of(name)?;
            out_names.push(self.names[idx].clone());
            out_cols.push(self.columns[idx].clone());
            out_tf.push(self.transforms[idx].clone());
        }
        let mut ds = Dataset::new(out_names, out_cols)?;
        ds.transforms = out_tf;
        Ok(ds)
    }

    /// Append a column (used by pipeline stages that derive variables).
    pub fn with_column(&self, name: &str, values: Vec<f64>) -> Result<Dataset> {
        let mut names = self.names.clone();
        names.push(name.to_string());
        let mut columns = self.columns.clone();
        columns.push(values);
        let mut ds = Dataset::new(names, columns)?;
        for (i, tf) in self.transforms.iter().enumerate() {
            ds.transforms[i] = tf.clone();
        }
        Ok(ds)
    }

    /// Serialize to CSV with a header row. Values print in shortest
    /// round-trip form, so decimals of ≤ 15 significant digits survive a
    /// write/read cycle bit-identically.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.names.join(","));
        out.push('\n');
        for row in 0..self.n() {
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", col[row]);
            }
            out.push('\n');
        }
        out
    }

    /// Write CSV to a file path.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| CoreError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Load a CSV file. With `header = true` the first row names the columns;
/// otherwise columns are named `c1..cp`.
pub fn load_csv(path: &Path, header: bool) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|source| CoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(&text, header)
}

/// Parse CSV text (same dialect as [`load_csv`]).
pub fn parse_csv(text: &str, header: bool) -> Result<Dataset> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (names, first_body): (Vec<String>, Option<(usize, &str)>) = if header {
        let (_, head) = lines
            .next()
            .ok_or_else(|| CoreError::Data("empty file".into()))?;
        (head.split(',').map(|s| s.trim().to_string()).collect(), None)
    } else {
        let first = lines
            .next()
            .ok_or_else(|| CoreError::Data("empty file".into()))?;
        let p = first.1.split(',').count();
        ((1..=p).map(|i| format!("c{i}")).collect(), Some(first))
    };
    let p = names.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); p];
    let mut parse_row = |line_no: usize, line: &str| -> Result<()> {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != p {
            return Err(CoreError::Data(format!(
                "row {} has {} cells, expected {p}",
                line_no + 1,
                cells.len()
            )));
        }
        for (j, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                CoreError::Data(format!(
                    "row {}, column {}: cannot parse {:?} as a number",
                    line_no + 1,
                    names[j],
                    cell.trim()
                ))
            })?;
            if !v.is_finite() {
                return Err(CoreError::Data(format!(
                    "row {}, column {}: non-finite value",
                    line_no + 1,
                    names[j]
                )));
            }
            columns[j].push(v);
        }
        Ok(())
    };
    if let Some((line_no, line)) = first_body {
        parse_row(line_no, line)?;
    }
    for (line_no, line) in lines {
        parse_row(line_no, line)?;
    }
    Dataset::new(names, columns)
}

/// Replace the named columns by their natural log. Errors on the first
/// non-positive value, naming its row.
pub fn log_transform(ds: &Dataset, cols: &[&str]) -> Result<Dataset> {
    let mut out = ds.clone();
    for name in cols {
        let idx = out.index_of(name)?;
        for (row, v) in out.columns[idx].iter().enumerate() {
            if *v <= 0.0 {
                return Err(CoreError::Invalid(format!(
                    "log transform of column {name}: non-positive value {v} at row {}",
                    row + 1
                )));
            }
        }
        for v in &mut out.columns[idx] {
            *v = v.ln();
        }
        out.transforms[idx].push(Transform::Logged);
    }
    Ok(out)
}

/// Standardize the named columns to mean 0 and sample sd 1 (n−1
/// denominator). Errors on constant columns.
pub fn standardize(ds: &Dataset, cols: &[&str]) -> Result<Dataset> {
    let mut out = ds.clone();
    for name in cols {
        let idx = out.index_of(name)?;
        let (m, s) = mean_sd(&out.columns[idx]);
        if s == 0.0 {
            return Err(CoreError::Invalid(format!("constant column: {name}")));
        }
        for v in &mut out.columns[idx] {
            *v = (*v - m) / s;
        }
        out.transforms[idx].push(Transform::Standardized);
    }
    Ok(out)
}

/// Mean and sample standard deviation (n−1 denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Sample skewness m₃ / m₂^{3/2} using central moments (biased moment
/// ratio).
pub fn skewness(values: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(CoreError::Invalid(format!(
            "skewness needs at least 3 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Err(CoreError::Invalid("skewness of a zero-variance vector".into()));
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    Ok(m3 / m2.powf(1.5))
}

/// Symmetric matrix of pairwise Pearson correlations with variable names.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationTable {
    /// Variable names, matching the matrix order.
    pub names: Vec<String>,
    /// Correlation matrix: unit diagonal, symmetric.
    pub matrix: DMatrix<f64>,
}

impl CorrelationTable {
    /// Correlation between two named variables.
    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        let i = self
            .names
            .iter()
            .position(|n| n == a)
            .ok_or_else(|| CoreError::UnknownName(a.into()))?;
        let j = self
            .names
            .iter()
            .position(|n| n == b)
            .ok_or_else(|| CoreError::UnknownName(b.into()))?;
        Ok(self.matrix[(i, j)])
    }

    /// Render as CSV with names in the first row and column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("name,");
        out.push_str(&self.names.join(","));
        out.push('\n');
        for (i, name) in self.names.iter().enumerate() {
            out.push_str(name);
            for j in 0..self.names.len() {
                let _ = write!(out, ",{}", self.matrix[(i, j)]);
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise Pearson correlation matrix of all dataset columns.
pub fn corr_matrix(ds: &Dataset) -> Result<CorrelationTable> {
    let p = ds.p();
    let mut stats = Vec::with_capacity(p);
    for (name, col) in ds.names().iter().zip(0..p) {
        let (m, s) = mean_sd(ds.column_at(col));
        if s == 0.0 {
            return Err(CoreError::Invalid(format!("constant column: {name}")));
        }
        stats.push((m, s));
    }
    let n = ds.n() as f64;
    let mut matrix = DMatrix::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let (mi, si) = stats[i];
            let (mj, sj) = stats[j];
            let cov = ds
                .column_at(i)
                .iter()
                .zip(ds.column_at(j))
                .map(|(a, b)| (a - mi) * (b - mj))
                .sum::<f64>()
                / (n - 1.0);
            let r = cov / (si * sj);
            matrix[(i, j)] = r;
            matrix[(j, i)] = r;
        }
    }
    Ok(CorrelationTable {
        names: ds.names().to_vec(),
        matrix,
    })
}

/// Partial correlation of variables `i` and `j` given the set `z`,
/// computed from a covariance (or correlation) matrix by inverting the
/// submatrix on `{i, j} ∪ z`.
pub fn partial_corr(cov: &DMatrix<f64>, i: usize, j: usize, z: &[usize]) -> Result<f64> {
    if i == j || z.contains(&i) || z.contains(&j) {
        return Err(CoreError::Invalid(format!(
            "partial_corr indices overlap: i={i}, j={j}, z={z:?}"
        )));
    }
    let mut idx = vec![i, j];
    idx.extend_from_slice(z);
    let k = idx.len();
    let mut sub = DMatrix::zeros(k, k);
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            sub[(a, b)] = cov[(ia, ib)];
        }
    }
    let omega = sub
        .try_inverse()
        .ok_or_else(|| CoreError::Numeric("singular submatrix in partial_corr".into()))?;
    Ok(-omega[(0, 1)] / (omega[(0, 0)] * omega[(1, 1)]).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 4.0, 6.0, 8.0]],
        )
        .unwrap()
    }

    #[test]
    fn csv_parse_errors_name_position() {
        let err = parse_csv("a,b\n1,2\n3,oops\n", true).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains('b'), "{msg}");

        let err = parse_csv("a,b\n1,2,3\n", true).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");

        let err = parse_csv("a,a\n1,2\n", true).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn log_rejects_non_positive_with_row() {
        let ds = Dataset::new(
            vec!["a".into()],
            vec![vec![1.0, -2.0, 3.0]],
        )
        .unwrap();
        let err = log_transform(&ds, &["a"]).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn standardize_hits_exact_moments() {
        let ds = standardize(&toy(), &["a", "b"]).unwrap();
        for name in ["a", "b"] {
            let (m, s) = mean_sd(ds.column(name).unwrap());
            assert!(m.abs() < 1e-12);
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            ds.transforms_of("a").unwrap(),
            &[Transform::Standardized]
        );
    }

    #[test]
    fn perfectly_correlated_columns() {
        let table = corr_matrix(&toy()).unwrap();
        assert!((table.get("a", "b").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(table.matrix[(0, 0)], 1.0);
    }

    #[test]
    fn partial_corr_rejects_overlap() {
        let cov = DMatrix::identity(3, 3);
        assert!(partial_corr(&cov, 0, 0, &[]).is_err());
        assert!(partial_corr(&cov, 0, 1, &[1]).is_err());
    }
}
