use std::path::Path;

use super::{remap_labels, Dataset, Provenance};
use crate::{Error, Matrix, Result};

/// Loads a numeric CSV with a header row. Column `label_column` (0-based) holds
/// the class labels; every other column is a feature.
pub fn load_csv(path: impl AsRef<Path>, label_column: usize) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let width = reader.headers()?.len();
    if label_column >= width {
        return Err(Error::invalid(format!(
            "label column {label_column} out of range for {width} columns in {}",
            path.display()
        )));
    }

    let mut labels = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(parse_err(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        for (col, cell) in record.iter().enumerate() {
            if col == label_column {
                labels.push(cell.to_string());
                continue;
            }
            let v = cell
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    parse_err(line, format!("column {col}: non-numeric value {cell:?}"))
                })?;
            values.push(v);
        }
    }
    if labels.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    let n = labels.len();
    let x = Matrix::from_row_slice(n, width - 1, &values);
    Ok(Dataset {
        x,
        y: remap_labels(&labels),
        name: path
            .file_stem()
            .map_or_else(|| "csv".to_string(), |s| s.to_string_lossy().into_owned()),
        provenance: Provenance::File {
            path: path.to_path_buf(),
        },
    })
}
