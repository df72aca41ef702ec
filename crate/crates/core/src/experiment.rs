//! Batch sweeps: random link failures and demand perturbation, each trial a
//! standalone solve, reported as plot-ready rows.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TeError};
use crate::problem::{resolve_form, solve, FormChoice, Instance};
use crate::seeds::{stream_rng, stream_seed, Stream};
use crate::ssdo::SolverConfig;
use crate::topology::{apply_failures, sample_failures, PathSet, Topology};
use crate::traffic::{perturb_series, DemandSeries};

/// Draws per trial before a disconnecting scenario is reported as skipped.
pub const FAILURE_RETRY_CAP: usize = 20;

#[derive(Debug, Clone)]
pub struct FailureSweep {
    pub counts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Candidate paths per pair when recomputing after failures.
    pub paths_per_pair: usize,
    pub form: FormChoice,
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRow {
    pub failures: usize,
    pub trial: usize,
    pub status: TrialStatus,
    pub attempts: usize,
    /// Removed edges as `src>dst` separated by `;`.
    pub removed_edges: String,
    pub mlu: Option<f64>,
    pub normalized_mlu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Skipped,
}

fn solve_cold(
    topology: &Topology,
    inst: &Instance,
    paths: PathSet,
    form: FormChoice,
    config: &SolverConfig,
) -> Result<f64> {
    let inst = Instance {
        topology: topology.clone(),
        paths,
        demands: inst.demands.clone(),
    };
    let form = resolve_form(form, &inst.paths)?;
    Ok(solve(&inst, form, config, None, false)?.report.final_mlu)
}

fn normalized(mlu: f64, baseline: f64, enabled: bool) -> Option<f64> {
    (enabled && baseline > 0.0).then(|| mlu / baseline)
}

/// For every failure count and trial, removes randomly drawn edges,
/// recomputes candidate paths on the damaged topology and solves from a
/// cold start. The baseline is the same pipeline without failures.
pub fn failure_sweep(base: &Instance, sweep: &FailureSweep, config: &SolverConfig) -> Result<Vec<FailureRow>> {
    let edge_count = base.topology.edge_count();
    if let Some(&c) = sweep.counts.iter().find(|&&c| c > edge_count) {
        return Err(TeError::InvalidConfig(format!("cannot fail {c} of {edge_count} edges")));
    }
    let k = sweep.paths_per_pair;
    let baseline = solve_cold(
        &base.topology,
        base,
        PathSet::k_shortest(&base.topology, k)?,
        sweep.form,
        config,
    )?;
    let jobs: Vec<(usize, usize)> = sweep
        .counts
        .iter()
        .flat_map(|&c| (0..sweep.trials).map(move |t| (c, t)))
        .collect();
    jobs.par_iter()
        .map(|&(count, trial)| {
            let mut rng = stream_rng(sweep.seed, Stream::Failures, ((count as u64) << 24) | trial as u64);
            for attempt in 1..=FAILURE_RETRY_CAP {
                let scenario = sample_failures(&base.topology, count, &mut rng)?;
                let damaged = match apply_failures(&base.topology, &scenario, &base.demands) {
                    Ok(t) => t,
                    Err(TeError::Disconnects { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let paths = PathSet::k_shortest(&damaged, k)?;
                let mlu = solve_cold(&damaged, base, paths, sweep.form, config)?;
                let removed = scenario
                    .removed_edges
                    .iter()
                    .map(|&(s, d)| format!("{}>{}", base.topology.name(s), base.topology.name(d)))
                    .collect::<Vec<_>>()
                    .join(";");
                return Ok(FailureRow {
                    failures: count,
                    trial,
                    status: TrialStatus::Ok,
                    attempts: attempt,
                    removed_edges: removed,
                    mlu: Some(mlu),
                    normalized_mlu: normalized(mlu, baseline, sweep.normalize),
                });
            }
            Ok(FailureRow {
                failures: count,
                trial,
                status: TrialStatus::Skipped,
                attempts: FAILURE_RETRY_CAP,
                removed_edges: String::new(),
                mlu: None,
                normalized_mlu: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PerturbSweep {
    pub scales: Vec<f64>,
    pub seed: u64,
    pub form: FormChoice,
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbRow {
    pub scale: f64,
    pub snapshot: usize,
    pub mlu: f64,
    pub baseline_mlu: f64,
    pub normalized_mlu: Option<f64>,
}

/// Perturbs the whole series once per scale and solves every perturbed
/// snapshot from a cold start; the baseline is the unperturbed snapshot.
pub fn perturb_sweep(
    topology: &Topology,
    paths: &PathSet,
    series: &DemandSeries,
    sweep: &PerturbSweep,
    config: &SolverConfig,
) -> Result<Vec<PerturbRow>> {
    let solve_snapshot = |demands: &crate::traffic::DemandMatrix| -> Result<f64> {
        let inst = Instance {
            topology: topology.clone(),
            paths: paths.clone(),
            demands: demands.clone(),
        };
        let form = resolve_form(sweep.form, paths)?;
        Ok(solve(&inst, form, config, None, false)?.report.final_mlu)
    };
    let baselines = series
        .snapshots
        .par_iter()
        .map(solve_snapshot)
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (si, &scale) in sweep.scales.iter().enumerate() {
        let perturbed = perturb_series(series, scale, stream_seed(sweep.seed, Stream::Perturb, si as u64))?;
        let mlus = perturbed
            .snapshots
            .par_iter()
            .map(solve_snapshot)
            .collect::<Result<Vec<_>>>()?;
        for (snapshot, (mlu, &baseline)) in mlus.into_iter().zip(&baselines).enumerate() {
            rows.push(PerturbRow {
                scale,
                snapshot,
                mlu,
                baseline_mlu: baseline,
                normalized_mlu: normalized(mlu, baseline, sweep.normalize),
            });
        }
    }
    Ok(rows)
}

/// Serializes rows as CSV with a header line.
pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| TeError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
