//! Numeric CSV tables with a header row, and their conversion to datasets.

use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a CSV with a header row; every cell must parse as a finite number.
pub fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if columns.is_empty() || columns.iter().all(String::is_empty) {
        return Err(ArtError::Data("missing header row".into()));
    }
    for (i, c) in columns.iter().enumerate() {
        if columns[..i].contains(c) {
            return Err(ArtError::Data(format!("duplicate column `{c}`")));
        }
    }
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .zip(&columns)
            .map(|(cell, col)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(ArtError::Data(format!(
                    "row {}, column `{col}`: `{cell}` is not a finite number",
                    line + 1
                ))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ArtError::Data("no data rows".into()));
    }
    Ok(Table { columns, rows })
}

pub fn read_table_path(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path)
        .map_err(|e| ArtError::Data(format!("cannot open {}: {e}", path.display())))?;
    read_table(file)
}

impl Table {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column names other than `response`, in file order.
    pub fn feature_names(&self, response: &str) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| *c != response)
            .cloned()
            .collect()
    }

    /// Feature matrix with columns taken by name in `order`.
    pub fn matrix(&self, order: &[String]) -> Result<DMatrix<f64>> {
        let idx: Vec<usize> = order
            .iter()
            .map(|name| {
                self.column_index(name)
                    .ok_or_else(|| ArtError::Data(format!("missing column `{name}`")))
            })
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(self.rows.len(), idx.len(), |i, j| {
            self.rows[i][idx[j]]
        }))
    }

    /// Dataset whose features are `order` (matched by name) and whose
    /// response is the `response` column.
    pub fn to_dataset(&self, response: &str, order: &[String], task: Task) -> Result<Dataset> {
        let r = self
            .column_index(response)
            .ok_or_else(|| ArtError::Data(format!("response column `{response}` not found")))?;
        let extra: Vec<&String> = self
            .columns
            .iter()
            .filter(|c| *c != response && !order.contains(c))
            .collect();
        if !extra.is_empty() {
            return Err(ArtError::Data(format!("unexpected columns {extra:?}")));
        }
        let y: Vec<f64> = self.rows.iter().map(|row| row[r]).collect();
        if task == Task::Classification {
            if let Some(bad) = y.iter().find(|v| **v != 0.0 && **v != 1.0) {
                return Err(ArtError::Data(format!(
                    "classification response must be 0 or 1, found {bad}"
                )));
            }
        }
        Dataset::new(self.matrix(order)?, DVector::from_vec(y), task)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_reorders_by_name() {
        let t = read_table("b,y,a\n1,10,2\n3,20,4\n".as_bytes()).unwrap();
        let order = vec!["a".to_string(), "b".to_string()];
        let d = t.to_dataset("y", &order, Task::Regression).unwrap();
        assert_eq!(d.row(0), vec![2.0, 1.0]);
        assert_eq!(d.response()[1], 20.0);
        assert_eq!(t.feature_names("y"), vec!["b", "a"]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_table("x,y\n1,abc\n".as_bytes())
            .unwrap_err()
            .to_string()
            .contains("column `y`"));
        assert!(read_table("x,y\n".as_bytes())
            .unwrap_err()
            .to_string()
            .contains("no data rows"));
        assert!(read_table("x,x\n1,2\n".as_bytes()).is_err());
        let t = read_table("x,y\n1,2\n".as_bytes()).unwrap();
        assert!(t.to_dataset("z", &["x".into()], Task::Regression).is_err());
        assert!(t
            .to_dataset("y", &["x".into()], Task::Classification)
            .is_err());
        assert!(t.to_dataset("y", &[], Task::Regression).is_err());
    }
}
