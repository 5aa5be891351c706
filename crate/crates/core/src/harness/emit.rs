use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::metrics::{
    records_to_csv, records_to_json, reports_to_json, ComparisonReport, RunRecord,
};
use crate::{Error, Result};

/// Plot-data file for one tracked trajectory: `plots/<method>_p<index>_s<seed>_<metric>.dat`,
/// `index` counting the method's grid points in record order.
pub fn plot_file_name(method: &str, point_index: usize, seed: u64, metric: &str) -> String {
    format!("{method}_p{point_index:03}_s{seed}_{metric}.dat")
}

fn write(path: PathBuf, contents: &str, manifest: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    manifest.push(path);
    Ok(())
}

/// Writes `records.csv`, `records.json`, `reports.json` and one two-column
/// `t value` file per tracked gap / variance trajectory. With no records only
/// `reports.json` is written. Returns the written paths in write order.
pub fn emit_results(
    records: &[RunRecord],
    reports: &[ComparisonReport],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let out = out_dir.as_ref();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut manifest = Vec::new();
    if !records.is_empty() {
        write(
            out.join("records.csv"),
            &records_to_csv(records)?,
            &mut manifest,
        )?;
        write(
            out.join("records.json"),
            &records_to_json(records)?,
            &mut manifest,
        )?;
    }
    write(
        out.join("reports.json"),
        &reports_to_json(reports)?,
        &mut manifest,
    )?;

    let plots = out.join("plots");
    let mut points: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let series = [
            ("gap", r.per_step_gap.as_ref()),
            ("variance", r.per_step_variance.as_ref()),
        ];
        if series.iter().all(|(_, s)| s.is_none()) {
            continue;
        }
        let index = match points
            .iter()
            .filter(|(m, _)| *m == r.method)
            .position(|(_, p)| *p == r.point)
        {
            Some(i) => i,
            None => {
                points.push((&r.method, &r.point));
                points.iter().filter(|(m, _)| *m == r.method).count() - 1
            }
        };
        fs::create_dir_all(&plots).map_err(|e| Error::io(&plots, e))?;
        for (metric, values) in series {
            let Some(values) = values else { continue };
            let mut text = format!("# {} [{}] seed {} {metric}\n", r.method, r.point, r.seed);
            for (i, v) in values.iter().enumerate() {
                writeln!(text, "{} {v:?}", i + 1).expect("write to string");
            }
            write(
                plots.join(plot_file_name(&r.method, index, r.seed, metric)),
                &text,
                &mut manifest,
            )?;
        }
    }
    Ok(manifest)
}
