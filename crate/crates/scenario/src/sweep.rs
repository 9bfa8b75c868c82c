//! One run per value of a numeric config field, aggregated into one table.

use std::path::Path;

use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::runner::{run_scenario, RunResult};
use crate::{Result, ScenarioError};

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    NormFailure,
    Error { code: i32, message: String },
}

impl RunStatus {
    pub fn as_str(&self) -> &str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::NormFailure => "norm-failure",
            RunStatus::Error { code: 1, .. } => "config-error",
            RunStatus::Error { .. } => "numerical-failure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub status: RunStatus,
    pub run: Option<RunResult>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub param: String,
    pub rows: Vec<SweepRow>,
}

/// Set a dotted path such as `dynamics.mass` or `observables.0.kind.order`.
pub fn set_path(root: &mut Value, path: &str, value: f64) -> Result<()> {
    let bad = |msg: String| ScenarioError::config("--param", msg);
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad(format!("malformed path {path:?}")));
    }
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    match map.get(*part) {
                        Some(Value::Number(_)) | None => {}
                        Some(other) => return Err(bad(format!("{path} holds {other}, not a number"))),
                    }
                    map.insert(part.to_string(), Value::from(value));
                    return Ok(());
                }
                map.get_mut(*part).ok_or_else(|| bad(format!("{path}: no field {part:?}")))?
            }
            Value::Array(items) => {
                let idx: usize = part.parse().map_err(|_| bad(format!("{path}: {part:?} is not an index")))?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| bad(format!("{path}: index {idx} out of {len}")))?;
                if last {
                    if !slot.is_number() {
                        return Err(bad(format!("{path} holds {slot}, not a number")));
                    }
                    *slot = Value::from(value);
                    return Ok(());
                }
                slot
            }
            other => return Err(bad(format!("{path}: cannot descend into {other}"))),
        };
    }
    unreachable!("loop returns on the last segment")
}

fn run_one(template: &Value, path: &str, value: f64) -> (RunStatus, Option<RunResult>) {
    let mut doc = template.clone();
    let outcome = set_path(&mut doc, path, value)
        .and_then(|_| {
            let cfg: ScenarioConfig =
                serde_json::from_value(doc).map_err(|e| ScenarioError::config("json", e.to_string()))?;
            run_scenario(&cfg)
        });
    match outcome {
        Ok(r) if r.passed => (RunStatus::Ok, Some(r)),
        Ok(r) => (RunStatus::NormFailure, Some(r)),
        Err(e) => (
            RunStatus::Error {
                code: e.exit_code(),
                message: e.to_string(),
            },
            None,
        ),
    }
}

/// Runs are independent; a failing value is recorded and the sweep continues.
pub fn run_sweep(template: &Value, path: &str, values: &[f64]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(ScenarioError::config("--values", "empty value list"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(ScenarioError::config("--values", format!("non-finite value {v}")));
    }
    // a path that does not resolve fails every run, so reject it up front
    set_path(&mut template.clone(), path, values[0])?;
    let rows = values
        .iter()
        .map(|&value| {
            let (status, run) = run_one(template, path, value);
            SweepRow { value, status, run }
        })
        .collect();
    Ok(SweepResult {
        param: path.to_string(),
        rows,
    })
}

/// Least-squares slope of `y` against `t`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let (mt, my) = points.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
    let (num, den) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt) * (t - mt)));
    num / den
}

impl SweepResult {
    /// Observable names of the first completed run.
    pub fn columns(&self) -> Vec<String> {
        self.rows
            .iter()
            .find_map(|r| r.run.as_ref())
            .map(|r| r.series.names.clone())
            .unwrap_or_default()
    }

    /// Final real part of a column for every completed run.
    pub fn final_column(&self, name: &str) -> Vec<(f64, Option<f64>)> {
        self.rows
            .iter()
            .map(|r| (r.value, r.run.as_ref().and_then(|run| run.final_value(name)).map(|z| z.re)))
            .collect()
    }

    pub fn slope_column(&self, name: &str) -> Vec<(f64, Option<f64>)> {
        self.rows
            .iter()
            .map(|r| {
                let s = r.run.as_ref().and_then(|run| run.series.column(name)).map(|c| {
                    let pts: Vec<(f64, f64)> = c.iter().map(|(t, z)| (*t, z.re)).collect();
                    slope(&pts)
                });
                (r.value, s)
            })
            .collect()
    }

    /// `value,status,norm_drift,<name>_final,<name>_slope,...,message`.
    pub fn to_csv(&self) -> Result<String> {
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.param.clone(), "status".into(), "norm_drift".into()];
        for c in &cols {
            header.push(format!("{c}_final"));
            header.push(format!("{c}_slope"));
        }
        header.push("message".into());
        let csv_err = |e: csv::Error| ScenarioError::Io(std::io::Error::other(e));
        w.write_record(&header).map_err(csv_err)?;
        let num = |v: Option<f64>| v.map(enlarge_core::io::fmt_f64).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![enlarge_core::io::fmt_f64(r.value), r.status.as_str().to_string()];
            rec.push(num(r.run.as_ref().map(|x| x.norm_drift)));
            for c in &cols {
                let run = r.run.as_ref();
                rec.push(num(run.and_then(|x| x.final_value(c)).map(|z| z.re)));
                rec.push(num(run.and_then(|x| x.series.column(c)).map(|col| {
                    slope(&col.iter().map(|(t, z)| (*t, z.re)).collect::<Vec<_>>())
                })));
            }
            rec.push(match &r.status {
                RunStatus::Error { message, .. } => message.clone(),
                _ => String::new(),
            });
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| ScenarioError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// `sweep.csv` plus one run directory per completed value.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.csv"), self.to_csv()?)?;
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(run) = &r.run {
                run.write_outputs(&dir.join(format!("run_{i:03}")))?;
            }
        }
        Ok(())
    }
}
