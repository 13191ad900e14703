use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::Hypergraph;
use crate::error::{Error, Result};

/// How a feature matrix has been transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    /// `log(1 + x)` followed by per-column min-max scaling into `[0, 1]`.
    Log1pMinMax,
    /// Per-column `(x - mean) / std`.
    ZScore,
}

/// Dense row-major `rows x cols` feature matrix, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    names: Vec<String>,
    normalization: Normalization,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        let names = (0..cols).map(|j| format!("f{}", j + 1)).collect();
        Self::with_names(rows, values, names)
    }

    pub fn with_names(rows: usize, values: Vec<f64>, names: Vec<String>) -> Result<Self> {
        let cols = names.len();
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} values do not fill a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite feature at row {}, column {}",
                bad / cols.max(1),
                bad % cols.max(1)
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            names,
            normalization: Normalization::Raw,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Index of a column by name.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Reads a `node,<f1>,...,<fd>` CSV and aligns its rows with the node labels
/// of `h`. Extra rows for unknown nodes are ignored.
pub fn read_feature_csv<R: Read>(reader: R, h: &Hypergraph) -> Result<FeatureMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::parse(1, "feature header needs a node column and at least one feature"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let cols = names.len();
    let mut by_label: HashMap<String, Vec<f64>> = HashMap::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        if record.len() != cols + 1 {
            return Err(Error::parse(line, format!("expected {} fields, found {}", cols + 1, record.len())));
        }
        let row = record
            .iter()
            .skip(1)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(line, format!("'{f}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        by_label.insert(record[0].to_owned(), row);
    }
    let mut values = Vec::with_capacity(h.n() * cols);
    for label in h.labels() {
        let row = by_label
            .get(label)
            .ok_or_else(|| Error::MissingFeatures(label.clone()))?;
        values.extend_from_slice(row);
    }
    FeatureMatrix::with_names(h.n(), values, names)
}

/// Column-wise normalization of a raw feature matrix.
///
/// `Log1pMinMax` requires nonnegative inputs and maps a constant column to
/// zeros; `ZScore` uses the population standard deviation and treats a
/// constant column as having unit spread.
pub fn normalize_features(x: &FeatureMatrix, mode: Normalization) -> Result<FeatureMatrix> {
    let (rows, cols) = (x.rows, x.cols);
    let mut values = x.values.clone();
    match mode {
        Normalization::Raw => {}
        Normalization::Log1pMinMax => {
            if let Some(pos) = values.iter().position(|&v| v < 0.0) {
                return Err(Error::invalid(format!(
                    "negative feature {} at row {}, column {}",
                    values[pos],
                    pos / cols,
                    pos % cols
                )));
            }
            for v in values.iter_mut() {
                *v = v.ln_1p();
            }
            for j in 0..cols {
                let col = (0..rows).map(|i| values[i * cols + j]);
                let lo = col.clone().fold(f64::INFINITY, f64::min);
                let hi = col.fold(f64::NEG_INFINITY, f64::max);
                let span = hi - lo;
                for i in 0..rows {
                    let v = &mut values[i * cols + j];
                    *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
                }
            }
        }
        Normalization::ZScore => {
            for j in 0..cols {
                let mean = (0..rows).map(|i| values[i * cols + j]).sum::<f64>() / rows as f64;
                let var = (0..rows)
                    .map(|i| (values[i * cols + j] - mean).powi(2))
                    .sum::<f64>()
                    / rows as f64;
                let std = if var > 0.0 { var.sqrt() } else { 1.0 };
                for i in 0..rows {
                    let v = &mut values[i * cols + j];
                    *v = (*v - mean) / std;
                }
            }
        }
    }
    let mut out = FeatureMatrix::with_names(rows, values, x.names.clone())?;
    out.normalization = mode;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(vals: &[f64]) -> FeatureMatrix {
        FeatureMatrix::new(vals.len(), 1, vals.to_vec()).unwrap()
    }

    #[test]
    fn log1p_minmax_endpoints() {
        let x = column(&[0.0, std::f64::consts::E - 1.0]);
        let y = normalize_features(&x, Normalization::Log1pMinMax).unwrap();
        assert_eq!(y.column(0), vec![0.0, 1.0]);
    }

    #[test]
    fn log1p_minmax_middle_value() {
        // (ln 11 - ln 2) / (ln 101 - ln 2)
        let x = column(&[1.0, 10.0, 100.0]);
        let y = normalize_features(&x, Normalization::Log1pMinMax).unwrap();
        let expected = (11f64.ln() - 2f64.ln()) / (101f64.ln() - 2f64.ln());
        assert!((y.get(1, 0) - expected).abs() < 1e-15);
        assert!((y.get(1, 0) - 0.434_665).abs() < 1e-6);
        assert_eq!((y.get(0, 0), y.get(2, 0)), (0.0, 1.0));
    }

    #[test]
    fn zscore_constant_column_is_zero() {
        let x = column(&[3.0, 3.0, 3.0]);
        let y = normalize_features(&x, Normalization::ZScore).unwrap();
        assert_eq!(y.column(0), vec![0.0; 3]);
        assert_eq!(y.normalization(), Normalization::ZScore);
    }

    #[test]
    fn zscore_standardizes() {
        let x = column(&[1.0, 2.0, 3.0, 4.0]);
        let y = normalize_features(&x, Normalization::ZScore).unwrap().column(0);
        let mean: f64 = y.iter().sum::<f64>() / 4.0;
        let var: f64 = y.iter().map(|v| v * v).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_input_rejected_for_log1p() {
        let x = column(&[1.0, -0.5]);
        assert!(normalize_features(&x, Normalization::Log1pMinMax).is_err());
    }

    #[test]
    fn csv_alignment_and_missing_node() {
        let h = Hypergraph::new(2, vec![vec![0, 1]], vec!["u".into(), "v".into()]).unwrap();
        let csv = "node,rep,votes\nv,2,3\nu,1,5\nw,9,9\n";
        let x = read_feature_csv(csv.as_bytes(), &h).unwrap();
        assert_eq!(x.row(0), &[1.0, 5.0]);
        assert_eq!(x.row(1), &[2.0, 3.0]);
        assert_eq!(x.column_index("votes"), Some(1));
        let missing = read_feature_csv("node,rep\nu,1\n".as_bytes(), &h);
        assert!(matches!(missing, Err(Error::MissingFeatures(l)) if l == "v"));
    }
}
