//! LIBSVM / SVMlight text format: `label idx:val idx:val ...`, 1-based indices,
//! omitted entries are zero.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{remap_labels, Dataset, Provenance};
use crate::{Error, Matrix, Result};

pub fn load_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ds = parse_libsvm(&text, path)?;
    ds.name = path.file_stem().map_or_else(
        || "libsvm".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    Ok(ds)
}

/// Parses LIBSVM text; `origin` is only used in error messages and provenance.
pub fn parse_libsvm(text: &str, origin: impl Into<PathBuf>) -> Result<Dataset> {
    let origin = origin.into();
    let err = |line: usize, message: String| Error::Parse {
        path: origin.clone(),
        line,
        message,
    };

    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut width = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        if !label.parse::<f64>().is_ok_and(f64::is_finite) {
            return Err(err(
                lineno,
                format!("label {label:?} is not a finite number"),
            ));
        }
        let mut seen = BTreeSet::new();
        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(lineno, format!("expected index:value, found {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(lineno, format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(err(lineno, "feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| err(lineno, format!("bad feature value {val:?}")))?;
            if !seen.insert(idx) {
                return Err(err(lineno, format!("duplicate feature index {idx}")));
            }
            width = width.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(label.to_string());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(0, "no samples".into()));
    }

    let mut x = Matrix::zeros(rows.len(), width);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            x[(i, j)] = v;
        }
    }
    Ok(Dataset {
        x,
        y: remap_labels(&labels),
        name: "libsvm".into(),
        provenance: Provenance::File { path: origin },
    })
}

/// Writes `ds` in LIBSVM format with its integer labels; zero entries are omitted.
/// Values use the shortest representation that parses back to the same `f64`.
pub fn write_libsvm(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, label) in ds.y.iter().enumerate() {
        write!(out, "{label}").unwrap();
        for j in 0..ds.x.ncols() {
            let v = ds.x[(i, j)];
            if v != 0.0 {
                write!(out, " {}:{v:?}", j + 1).unwrap();
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
