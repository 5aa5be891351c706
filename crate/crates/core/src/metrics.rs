//! Run trajectories and the comparison statistics against an ADAM baseline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::problems::Problem;
use crate::{Error, Result, Vector};

/// Version tag written into every serialized record / report document.
pub const SCHEMA_VERSION: u32 = 1;

/// Which per-step observables to record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tracking {
    /// `‖w_t − w*‖²`, needs a known optimum.
    pub gap: bool,
    /// `‖Ĝ_t − ∇F(w_t)‖²`, costs a full-data gradient per step.
    pub variance: bool,
}

/// Trajectory of one (grid point, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    /// Label identifying the grid point within its method.
    pub point: String,
    pub seed: u64,
    pub hyperparameters: BTreeMap<String, f64>,
    pub schedule: String,
    /// Full training loss at the end of every epoch.
    pub per_epoch_full_loss: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_step_gap: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_step_variance: Option<Vec<f64>>,
    /// Set when the run produced non-finite values; the lists stop before that point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl RunRecord {
    pub fn new(
        method: impl Into<String>,
        point: impl Into<String>,
        seed: u64,
        tracking: Tracking,
    ) -> Self {
        RunRecord {
            method: method.into(),
            point: point.into(),
            seed,
            hyperparameters: BTreeMap::new(),
            schedule: String::new(),
            per_epoch_full_loss: Vec::new(),
            per_step_gap: tracking.gap.then(Vec::new),
            per_step_variance: tracking.variance.then(Vec::new),
            failure: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Appends gap / variance entries for the iterate `w` and its update
    /// direction `ghat`, for whichever observables this record tracks.
    pub fn record_step(&mut self, w: &Vector, ghat: &Vector, problem: &dyn Problem) {
        if let Some(gaps) = self.per_step_gap.as_mut() {
            if let Some(opt) = problem.optimum() {
                gaps.push((w - opt).norm_squared());
            }
        }
        if let Some(var) = self.per_step_variance.as_mut() {
            var.push((ghat - problem.full_grad(w)).norm_squared());
        }
    }

    pub fn min_loss(&self) -> Option<f64> {
        self.per_epoch_full_loss.iter().copied().reduce(f64::min)
    }
}

/// Per-pair relative differences `(min ADAM loss − min method loss) / min ADAM loss`.
/// Runs are paired by position after sorting each side by seed.
pub fn relative_differences(
    adam_runs: &[RunRecord],
    method_runs: &[RunRecord],
) -> Result<Vec<f64>> {
    if adam_runs.is_empty() || adam_runs.len() != method_runs.len() {
        return Err(Error::invalid(format!(
            "need equal, non-zero run counts (ADAM {}, method {})",
            adam_runs.len(),
            method_runs.len()
        )));
    }
    sorted(adam_runs)
        .into_iter()
        .zip(sorted(method_runs))
        .map(|(a, m)| {
            let base = a
                .min_loss()
                .ok_or_else(|| Error::invalid("ADAM run has no losses"))?;
            let other = m
                .min_loss()
                .ok_or_else(|| Error::invalid("method run has no losses"))?;
            if !(base > 0.0) {
                return Err(Error::invalid(format!(
                    "minimum ADAM loss {base} must be > 0"
                )));
            }
            Ok((base - other) / base)
        })
        .collect()
}

fn sorted(runs: &[RunRecord]) -> Vec<&RunRecord> {
    let mut v: Vec<&RunRecord> = runs.iter().collect();
    v.sort_by_key(|r| r.seed);
    v
}

/// Relative difference `ρ`: mean of [`relative_differences`]. Positive means the
/// method reached a lower loss than ADAM.
pub fn rho(adam_runs: &[RunRecord], method_runs: &[RunRecord]) -> Result<f64> {
    let diffs = relative_differences(adam_runs, method_runs)?;
    Ok(diffs.iter().sum::<f64>() / diffs.len() as f64)
}

/// Guard added to the standard error so zero-variance inputs stay defined.
pub const SE_EPSILON: f64 = 1e-12;

/// One-tailed Wald significance `s = Φ(−mean / se)`, `se` the sample standard
/// error plus [`SE_EPSILON`]. Small `s` means the differences are significantly
/// positive.
pub fn wald_significance(diffs: &[f64]) -> Result<f64> {
    let n = diffs.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "wald_significance needs at least 2 pairs, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let se = (var / nf).sqrt() + SE_EPSILON;
    let normal = Normal::standard();
    Ok(normal.cdf(-mean / se))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Better,
    Indistinguishable,
    Worse,
}

impl Verdict {
    pub fn from_significance(s: f64) -> Self {
        if s < 0.05 {
            Verdict::Better
        } else if s > 0.95 {
            Verdict::Worse
        } else {
            Verdict::Indistinguishable
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub method: String,
    pub point: String,
    pub baseline_point: String,
    pub rho: f64,
    /// `None` with a single seed, where no test is possible.
    pub s: Option<f64>,
    pub verdict: Option<Verdict>,
    pub n_runs: usize,
    /// Grid points of this method excluded because they diverged.
    pub failed_points: Vec<String>,
}

impl ComparisonReport {
    pub fn compare(adam_runs: &[RunRecord], method_runs: &[RunRecord]) -> Result<Self> {
        let diffs = relative_differences(adam_runs, method_runs)?;
        let rho = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let s = (diffs.len() >= 2)
            .then(|| wald_significance(&diffs))
            .transpose()?;
        Ok(ComparisonReport {
            method: method_runs[0].method.clone(),
            point: method_runs[0].point.clone(),
            baseline_point: adam_runs[0].point.clone(),
            rho,
            s,
            verdict: s.map(Verdict::from_significance),
            n_runs: diffs.len(),
            failed_points: Vec::new(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RecordsDoc {
    schema_version: u32,
    records: Vec<RunRecord>,
}

#[derive(Serialize, Deserialize)]
struct ReportsDoc {
    schema_version: u32,
    reports: Vec<ComparisonReport>,
}

pub fn records_to_json(records: &[RunRecord]) -> Result<String> {
    let doc = RecordsDoc {
        schema_version: SCHEMA_VERSION,
        records: records.to_vec(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn records_from_json(text: &str) -> Result<Vec<RunRecord>> {
    let doc: RecordsDoc = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported records schema_version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    Ok(doc.records)
}

pub fn reports_to_json(reports: &[ComparisonReport]) -> Result<String> {
    let doc = ReportsDoc {
        schema_version: SCHEMA_VERSION,
        reports: reports.to_vec(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn reports_from_json(text: &str) -> Result<Vec<ComparisonReport>> {
    let doc: ReportsDoc = serde_json::from_str(text)?;
    Ok(doc.reports)
}

/// Long-format CSV, one row per recorded metric entry:
/// `schema_version,method,point,seed,index_kind,index,metric,value`.
/// Epoch indices are 1-based, as are step indices.
pub fn records_to_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "schema_version",
        "method",
        "point",
        "seed",
        "index_kind",
        "index",
        "metric",
        "value",
    ])?;
    let version = SCHEMA_VERSION.to_string();
    for r in records {
        let seed = r.seed.to_string();
        let series: [(&str, &str, Option<&Vec<f64>>); 3] = [
            ("epoch", "full_loss", Some(&r.per_epoch_full_loss)),
            ("step", "gap", r.per_step_gap.as_ref()),
            ("step", "variance", r.per_step_variance.as_ref()),
        ];
        for (kind, metric, values) in series {
            for (i, v) in values.into_iter().flatten().enumerate() {
                w.write_record([
                    version.as_str(),
                    &r.method,
                    &r.point,
                    &seed,
                    kind,
                    &(i + 1).to_string(),
                    metric,
                    &format!("{v:?}"),
                ])?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
