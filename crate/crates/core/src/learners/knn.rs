use serde::{Deserialize, Serialize};

use super::{FittedModel, Model};
use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};
use crate::loss::{clip_probability, DEFAULT_CLIP};

/// k-nearest-neighbour classifier; keeps its training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl KnnModel {
    /// Fraction of class-1 labels among the `k` nearest rows (Euclidean),
    /// ties in distance going to the lower row index.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let d2: f64 = r.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
                (d2, i)
            })
            .collect();
        let by_distance =
            |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_distance);
        }
        let ones: f64 = dist[..self.k].iter().map(|&(_, i)| self.labels[i]).sum();
        clip_probability(ones / self.k as f64, DEFAULT_CLIP)
    }
}

pub fn fit_knn(data: &Dataset, k: usize) -> Result<FittedModel> {
    if data.task() != Task::Classification {
        return Err(ArtError::invalid("k-NN needs classification data"));
    }
    if k == 0 || k > data.n_rows() {
        return Err(ArtError::config(format!(
            "k must lie in 1..={}, got {k}",
            data.n_rows()
        )));
    }
    let rows = (0..data.n_rows()).map(|i| data.row(i)).collect();
    let labels = data.response().iter().copied().collect();
    Ok(FittedModel::new(
        "knn",
        Model::Knn(KnnModel { k, rows, labels }),
    ))
}
