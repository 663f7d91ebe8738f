use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{run_pipeline, PipelineConfig, PipelineReport};
use crate::error::{Error, Result};

/// One grid dimension: a JSON pointer into the base config and its values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: PipelineConfig,
    #[serde(default)]
    pub grid: Vec<SweepAxis>,
    pub seeds: Vec<u64>,
}

/// One `(cell, seed)` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: usize,
    pub claw_free: Option<bool>,
    pub completeness: Option<bool>,
    pub degree_ok: Option<bool>,
    pub e1: Option<bool>,
    pub e2: Option<bool>,
    pub e3: Option<bool>,
    pub error: Option<String>,
    pub ok: bool,
    pub params: BTreeMap<String, Value>,
    pub ratio: Option<f64>,
    /// Seed handed to the pipeline: `(seed << 20) | cell`.
    pub run_seed: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub cell: usize,
    pub completeness_rate: Option<f64>,
    pub e1_rate: Option<f64>,
    pub e2_rate: Option<f64>,
    pub e3_rate: Option<f64>,
    pub failures: usize,
    pub params: BTreeMap<String, Value>,
    pub ratio_mean: Option<f64>,
    pub ratio_min: Option<f64>,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cells: Vec<SweepCell>,
    pub rows: Vec<SweepRow>,
}

const CELL_BITS: u32 = 20;

fn cells(grid: &[SweepAxis]) -> Vec<BTreeMap<String, Value>> {
    if grid.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BTreeMap::new()];
    for axis in grid {
        out = out
            .into_iter()
            .flat_map(|partial| {
                axis.values.iter().map(move |v| {
                    let mut next = partial.clone();
                    next.insert(axis.path.clone(), v.clone());
                    next
                })
            })
            .collect();
    }
    out
}

fn configure(base: &Value, params: &BTreeMap<String, Value>, run_seed: u64) -> Result<PipelineConfig> {
    let mut doc = base.clone();
    for (path, v) in params {
        let slot = doc
            .pointer_mut(path)
            .ok_or_else(|| Error::Parameter(format!("grid path {path} not found in base config")))?;
        *slot = v.clone();
    }
    for path in ["/seed", "/input/seed"] {
        if let Some(slot) = doc.pointer_mut(path) {
            *slot = Value::from(run_seed);
        }
    }
    Ok(serde_json::from_value(doc)?)
}

fn row_from(report: &PipelineReport, row: &mut SweepRow) {
    match report {
        PipelineReport::Ug2Csp(r) => {
            row.e1 = Some(r.reduction.event_e1);
            row.e2 = Some(r.reduction.event_e2);
            row.e3 = r.reduction.planted_event_e3;
            row.completeness = r.completeness.within_delta;
            row.degree_ok = Some(r.degree_ok);
        }
        PipelineReport::NpClawFree(r) => {
            row.e1 = Some(r.reduction.event_e1);
            row.e2 = Some(r.reduction.event_e2);
            row.e3 = r.reduction.planted_event_e3;
            row.completeness = r.completeness.within_delta;
            row.degree_ok = Some(r.degree_ok);
            row.claw_free = r.claw_at_k.as_ref().and_then(|c| c.claw_free);
        }
        PipelineReport::Approx(r) => {
            row.ratio = r.ratio;
            row.completeness = r.guarantee_holds;
        }
    }
}

fn rate(rows: &[&SweepRow], pick: impl Fn(&SweepRow) -> Option<bool>) -> Option<f64> {
    let seen: Vec<bool> = rows.iter().filter_map(|r| pick(r)).collect();
    (!seen.is_empty()).then(|| seen.iter().filter(|&&b| b).count() as f64 / seen.len() as f64)
}

/// Runs the base pipeline at every grid cell for every seed. Cells run in
/// parallel; failures are recorded per row and never stop the sweep.
pub fn experiment_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    let base = serde_json::to_value(&cfg.base)?;
    let grid = cells(&cfg.grid);
    if grid.len() as u64 >= 1 << CELL_BITS {
        return Err(Error::Parameter(format!("grid has {} cells, limit {}", grid.len(), 1u64 << CELL_BITS)));
    }
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|c| cfg.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(cell, seed)| {
            let run_seed = (seed << CELL_BITS) | cell as u64;
            let mut row = SweepRow {
                cell,
                claw_free: None,
                completeness: None,
                degree_ok: None,
                e1: None,
                e2: None,
                e3: None,
                error: None,
                ok: false,
                params: grid[cell].clone(),
                ratio: None,
                run_seed,
                seed,
            };
            match configure(&base, &grid[cell], run_seed).and_then(|c| run_pipeline(&c)) {
                Ok(report) => {
                    row.ok = true;
                    row_from(&report, &mut row);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    let cells = grid
        .iter()
        .enumerate()
        .map(|(cell, params)| {
            let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.cell == cell).collect();
            let ratios: Vec<f64> = mine.iter().filter_map(|r| r.ratio).collect();
            SweepCell {
                cell,
                completeness_rate: rate(&mine, |r| r.completeness),
                e1_rate: rate(&mine, |r| r.e1),
                e2_rate: rate(&mine, |r| r.e2),
                e3_rate: rate(&mine, |r| r.e3),
                failures: mine.iter().filter(|r| !r.ok).count(),
                params: params.clone(),
                ratio_mean: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                ratio_min: ratios.iter().copied().reduce(f64::min),
                runs: mine.len(),
            }
        })
        .collect();
    Ok(SweepSummary { cells, rows })
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

impl SweepSummary {
    /// Rows as CSV: `cell, seed, run_seed`, one column per grid path (sorted),
    /// then `ok, error, e1, e2, e3, completeness, degree_ok, claw_free, ratio`.
    pub fn to_csv(&self) -> Result<String> {
        let paths: Vec<String> = self.rows.first().map(|r| r.params.keys().cloned().collect()).unwrap_or_default();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = vec!["cell".into(), "seed".into(), "run_seed".into()];
        header.extend(paths.iter().cloned());
        header.extend(
            ["ok", "error", "e1", "e2", "e3", "completeness", "degree_ok", "claw_free", "ratio"].map(String::from),
        );
        let csv_err = |e: csv::Error| Error::Internal {
            message: e.to_string(),
            residual: vec![],
        };
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![r.cell.to_string(), r.seed.to_string(), r.run_seed.to_string()];
            rec.extend(paths.iter().map(|p| r.params[p].to_string()));
            rec.extend([
                r.ok.to_string(),
                opt(&r.error),
                opt(&r.e1),
                opt(&r.e2),
                opt(&r.e3),
                opt(&r.completeness),
                opt(&r.degree_ok),
                opt(&r.claw_free),
                opt(&r.ratio),
            ]);
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal {
            message: e.to_string(),
            residual: vec![],
        })?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}
