//! Datasets: synthetic generators, LIBSVM / CSV ingestion and standardization.

mod libsvm;
mod synth;
mod tabular;

pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm};
pub use synth::{gen_logistic, gen_quadratic};
pub use tabular::load_csv;

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::Matrix;

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Synthetic { seed: u64 },
    File { path: PathBuf },
}

/// Dense feature matrix (`N × p`) with integer class labels in `[0, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<usize>,
    pub name: String,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// `K = max label + 1`.
    pub fn n_classes(&self) -> usize {
        self.y.iter().max().map_or(0, |m| m + 1)
    }
}

/// Rescales every column to zero mean and unit population variance.
/// Columns with (numerically) zero variance become all zeros.
pub fn standardize(ds: &Dataset) -> Dataset {
    let n = ds.x.nrows();
    let mut x = ds.x.clone();
    if n == 0 {
        return ds.clone();
    }
    for mut col in x.column_iter_mut() {
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let scale = col.amax();
        if var.sqrt() <= 1e-12 * scale.max(f64::MIN_POSITIVE) || var == 0.0 {
            col.fill(0.0);
        } else {
            let sd = var.sqrt();
            col.apply(|v| *v = (*v - mean) / sd);
        }
    }
    Dataset {
        x,
        y: ds.y.clone(),
        name: ds.name.clone(),
        provenance: ds.provenance.clone(),
    }
}

/// Maps raw label strings to `0..K`: by ascending value when every label parses
/// as a number, otherwise in order of first appearance.
pub(crate) fn remap_labels(raw: &[String]) -> Vec<usize> {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.trim().parse::<f64>().ok()).collect();
    match numeric {
        Some(values) if values.iter().all(|v| v.is_finite()) => {
            let mut distinct = values.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            values
                .iter()
                .map(|v| distinct.partition_point(|d| d < v))
                .collect()
        }
        _ => {
            let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
            raw.iter()
                .map(|s| {
                    let next = seen.len();
                    *seen.entry(s.trim()).or_insert(next)
                })
                .collect()
        }
    }
}
