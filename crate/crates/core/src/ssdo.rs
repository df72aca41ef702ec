//! Sequential source-destination optimization. Each outer iteration collects
//! the pairs whose candidate paths cross a most-utilized edge and re-solves
//! them one at a time against live link loads, until an iteration no longer
//! lowers the maximum link utilization or the time budget runs out.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dense::{apply_sd_update, background_traffic, compute_utilization, SplitTensor, UtilizationState};
use crate::error::{Result, TeError};
use crate::loads::LinkLoads;
use crate::path::{apply_path_update, path_utilization, path_view, EdgeLoadState, PathSplit};
use crate::subproblem::{bbsm, greedy_vertex, SubproblemSolution, SubproblemView};
use crate::topology::{CandidateSet, PathSet, Sd, Topology};
use crate::traffic::DemandMatrix;

pub const REPORT_SCHEMA: &str = "ssdo-solve-report/1";

/// Edges within this distance of the MLU count as most utilized.
pub const EMAX_TOL: f64 = 1e-9;

/// How each pair's subproblem is answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubproblemMode {
    /// Balanced solution from the binary search.
    #[default]
    Balanced,
    /// Greedy vertex of the optimal face (ablation).
    GreedyVertex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Width at which the per-pair binary search stops.
    pub epsilon: f64,
    /// Stop once an outer iteration lowers the MLU by at most this much.
    pub epsilon0: f64,
    /// Wall-clock budget in seconds, checked between pair updates.
    pub time_budget: Option<f64>,
    /// Visit every demanded pair in index order each iteration (ablation).
    pub static_traversal: bool,
    pub subproblem: SubproblemMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-6,
            epsilon0: 1e-6,
            time_budget: None,
            static_traversal: false,
            subproblem: SubproblemMode::Balanced,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.epsilon) {
            return Err(TeError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !positive(self.epsilon0) {
            return Err(TeError::InvalidConfig(format!(
                "epsilon0 must be positive, got {}",
                self.epsilon0
            )));
        }
        if let Some(b) = self.time_budget {
            if b.is_nan() || b <= 0.0 {
                return Err(TeError::InvalidConfig(format!("time budget must be positive, got {b}")));
            }
        }
        Ok(())
    }

    fn deadline(&self, start: Instant) -> Option<Instant> {
        self.time_budget.map(|b| start + Duration::from_secs_f64(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Dense,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Cold,
    Hot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// Seconds since the solve started, millisecond resolution.
    pub elapsed_s: f64,
    pub mlu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: String,
    pub form: Form,
    pub start: StartKind,
    pub initial_mlu: f64,
    pub final_mlu: f64,
    /// Outer iterations started, including the last one that confirmed
    /// convergence.
    pub iterations: usize,
    /// Pair subproblems solved.
    pub sd_updates: usize,
    /// Solutions discarded because applying them would have raised the MLU.
    pub rejected_updates: usize,
    /// Subproblems found infeasible at their own upper bound.
    pub infeasible_subproblems: usize,
    pub termination: Termination,
    pub elapsed_s: f64,
    /// Initial MLU, then the MLU after each outer iteration.
    pub mlu_trajectory: Vec<TrajectoryPoint>,
}

fn millis(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e3).round() / 1e3
}

/// Reverse index from each edge to the demanded pairs whose candidate paths
/// cross it.
#[derive(Debug, Clone)]
pub struct Incidence {
    n: usize,
    pairs: Vec<Sd>,
    by_edge: Vec<Vec<u32>>,
}

impl Incidence {
    /// Index over the pairs with positive demand and at least one path.
    pub fn new(demands: &DemandMatrix, paths: &PathSet) -> Self {
        let n = paths.node_count();
        let mut pairs = Vec::new();
        let mut by_edge = vec![Vec::new(); n * n];
        for ((s, d), _) in demands.demanded() {
            let ps = paths.get(s, d);
            if ps.is_empty() {
                continue;
            }
            let id = pairs.len() as u32;
            pairs.push((s, d));
            for p in ps {
                for w in p.windows(2) {
                    let list = &mut by_edge[w[0] * n + w[1]];
                    // ids arrive in increasing order, so a repeat is always last
                    if list.last() != Some(&id) {
                        list.push(id);
                    }
                }
            }
        }
        Incidence { n, pairs, by_edge }
    }

    /// Indexed pairs in `(s, d)` order.
    pub fn pairs(&self) -> &[Sd] {
        &self.pairs
    }

    pub fn pairs_on(&self, s: usize, d: usize) -> impl Iterator<Item = Sd> + '_ {
        self.by_edge[s * self.n + d].iter().map(|&i| self.pairs[i as usize])
    }
}

/// Pairs to re-solve this iteration: those with a candidate path through an
/// edge whose utilization is within [`EMAX_TOL`] of the MLU, most such edges
/// first, ties by ascending `(s, d)`.
pub fn select_sds(loads: &LinkLoads, incidence: &Incidence) -> Vec<Sd> {
    let emax = loads.edges_at_least(loads.mlu() - EMAX_TOL);
    let mut counts = vec![0u32; incidence.pairs.len()];
    let mut touched = Vec::new();
    for (s, d) in emax {
        for &id in &incidence.by_edge[s * incidence.n + d] {
            if counts[id as usize] == 0 {
                touched.push(id);
            }
            counts[id as usize] += 1;
        }
    }
    touched.sort_unstable_by_key(|&id| (std::cmp::Reverse(counts[id as usize]), id));
    touched.into_iter().map(|id| incidence.pairs[id as usize]).collect()
}

/// Dense cold start: each pair entirely on its direct edge when that is a
/// candidate, otherwise on its first two-hop candidate.
pub fn cold_start(demands: &DemandMatrix, paths: &PathSet) -> Result<SplitTensor> {
    require_paths(demands, paths)?;
    let cs = paths.candidate_set()?;
    let mut t = SplitTensor::zeros(cs.node_count());
    for ((s, d), mids) in cs.pairs() {
        let k = if mids.contains(&d) { d } else { mids[0] };
        t.set(s, k, d, 1.0);
    }
    Ok(t)
}

/// Path-form cold start: each pair on its fewest-hop candidate.
pub fn cold_start_paths(demands: &DemandMatrix, paths: &PathSet) -> Result<PathSplit> {
    require_paths(demands, paths)?;
    Ok(PathSplit::shortest_path(paths))
}

fn require_paths(demands: &DemandMatrix, paths: &PathSet) -> Result<()> {
    match demands.demanded().find(|((s, d), _)| paths.get(*s, *d).is_empty()) {
        Some(((s, d), _)) => Err(TeError::NoPath { src: s, dst: d }),
        None => Ok(()),
    }
}

/// Mutable state the optimization loop drives.
pub trait Formulation {
    type Split;

    fn loads(&self) -> &LinkLoads;
    fn view(&mut self, sd: Sd) -> SubproblemView;
    fn apply(&mut self, sd: Sd, ratios: &[f64]) -> Result<()>;
    fn into_split(self) -> Self::Split;
}

pub struct DenseProblem<'a> {
    demands: &'a DemandMatrix,
    candidates: CandidateSet,
    split: SplitTensor,
    state: UtilizationState,
}

impl<'a> DenseProblem<'a> {
    pub fn new(topology: &Topology, demands: &'a DemandMatrix, paths: &PathSet, split: SplitTensor) -> Result<Self> {
        require_paths(demands, paths)?;
        let candidates = paths.candidate_set()?;
        split.validate(&candidates)?;
        let state = compute_utilization(topology, demands, &split)?;
        Ok(DenseProblem {
            demands,
            candidates,
            split,
            state,
        })
    }
}

impl Formulation for DenseProblem<'_> {
    type Split = SplitTensor;

    fn loads(&self) -> &LinkLoads {
        &self.state.loads
    }

    fn view(&mut self, sd: Sd) -> SubproblemView {
        background_traffic(&mut self.state, &self.split, self.demands, &self.candidates, sd)
    }

    fn apply(&mut self, sd: Sd, ratios: &[f64]) -> Result<()> {
        apply_sd_update(
            &mut self.state,
            &mut self.split,
            self.demands,
            &self.candidates,
            sd,
            ratios,
        )
    }

    fn into_split(self) -> SplitTensor {
        self.split
    }
}

pub struct PathProblem<'a> {
    demands: &'a DemandMatrix,
    paths: &'a PathSet,
    split: PathSplit,
    state: EdgeLoadState,
}

impl<'a> PathProblem<'a> {
    pub fn new(topology: &Topology, demands: &'a DemandMatrix, paths: &'a PathSet, split: PathSplit) -> Result<Self> {
        require_paths(demands, paths)?;
        split.validate(paths)?;
        let state = path_utilization(topology, demands, paths, &split)?;
        Ok(PathProblem {
            demands,
            paths,
            split,
            state,
        })
    }
}

impl Formulation for PathProblem<'_> {
    type Split = PathSplit;

    fn loads(&self) -> &LinkLoads {
        &self.state.loads
    }

    fn view(&mut self, sd: Sd) -> SubproblemView {
        path_view(&mut self.state, &self.split, self.demands, self.paths, sd)
    }

    fn apply(&mut self, sd: Sd, ratios: &[f64]) -> Result<()> {
        apply_path_update(&mut self.state, &mut self.split, self.demands, self.paths, sd, ratios)
    }

    fn into_split(self) -> PathSplit {
        self.split
    }
}

/// Runs the optimization loop on `problem` in place.
pub fn optimize<F: Formulation>(
    problem: &mut F,
    incidence: &Incidence,
    config: &SolverConfig,
    start: Instant,
    form: Form,
    start_kind: StartKind,
) -> Result<SolveReport> {
    config.validate()?;
    let deadline = config.deadline(start);
    let out_of_time = || deadline.is_some_and(|d| Instant::now() >= d);
    let initial = problem.loads().mlu();
    let mut report = SolveReport {
        schema: REPORT_SCHEMA.to_string(),
        form,
        start: start_kind,
        initial_mlu: initial,
        final_mlu: initial,
        iterations: 0,
        sd_updates: 0,
        rejected_updates: 0,
        infeasible_subproblems: 0,
        termination: Termination::Converged,
        elapsed_s: 0.0,
        mlu_trajectory: vec![TrajectoryPoint {
            elapsed_s: millis(start),
            mlu: initial,
        }],
    };
    let mut previous = initial;
    'outer: loop {
        if out_of_time() {
            report.termination = Termination::BudgetExhausted;
            break;
        }
        let queue = if config.static_traversal {
            incidence.pairs().to_vec()
        } else {
            select_sds(problem.loads(), incidence)
        };
        report.iterations += 1;
        for sd in queue {
            if out_of_time() {
                report.termination = Termination::BudgetExhausted;
                report.mlu_trajectory.push(TrajectoryPoint {
                    elapsed_s: millis(start),
                    mlu: problem.loads().mlu(),
                });
                break 'outer;
            }
            let view = problem.view(sd);
            let solution = match solve_subproblem(&view, config) {
                Ok(s) => s,
                Err(TeError::NeverFeasible { .. }) => {
                    report.infeasible_subproblems += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            report.sd_updates += 1;
            // paths of one pair may share edges, so the bounds alone do not
            // guarantee the update keeps the MLU in place
            if view.mlu_with(&solution.ratios) > view.u_ub + 1e-12 * view.u_ub.max(1.0) {
                report.rejected_updates += 1;
                continue;
            }
            problem.apply(sd, &solution.ratios)?;
        }
        let mlu = problem.loads().mlu();
        report.mlu_trajectory.push(TrajectoryPoint {
            elapsed_s: millis(start),
            mlu,
        });
        if previous - mlu <= config.epsilon0 {
            break;
        }
        previous = mlu;
    }
    report.final_mlu = problem.loads().mlu();
    report.elapsed_s = millis(start);
    Ok(report)
}

fn solve_subproblem(view: &SubproblemView, config: &SolverConfig) -> Result<SubproblemSolution> {
    match config.subproblem {
        SubproblemMode::Balanced => bbsm(view, config.epsilon),
        SubproblemMode::GreedyVertex => greedy_vertex(view, config.epsilon),
    }
}

/// Dense-form solve from `initial`, or from [`cold_start`] when `None`.
pub fn run(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    config: &SolverConfig,
    initial: Option<&SplitTensor>,
) -> Result<(SplitTensor, SolveReport)> {
    run_dense_from(topology, demands, paths, config, initial, Instant::now())
}

fn run_dense_from(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    config: &SolverConfig,
    initial: Option<&SplitTensor>,
    start: Instant,
) -> Result<(SplitTensor, SolveReport)> {
    config.validate()?;
    let (split, kind) = match initial {
        Some(t) => (t.clone(), StartKind::Hot),
        None => (cold_start(demands, paths)?, StartKind::Cold),
    };
    let mut problem = DenseProblem::new(topology, demands, paths, split)?;
    let incidence = Incidence::new(demands, paths);
    let report = optimize(&mut problem, &incidence, config, start, Form::Dense, kind)?;
    Ok((problem.into_split(), report))
}

/// Path-form solve from `initial`, or from [`cold_start_paths`] when `None`.
pub fn path_ssdo(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    config: &SolverConfig,
    initial: Option<&PathSplit>,
) -> Result<(PathSplit, SolveReport)> {
    run_path_from(topology, demands, paths, config, initial, Instant::now())
}

fn run_path_from(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    config: &SolverConfig,
    initial: Option<&PathSplit>,
    start: Instant,
) -> Result<(PathSplit, SolveReport)> {
    config.validate()?;
    let (split, kind) = match initial {
        Some(s) => (s.clone(), StartKind::Hot),
        None => (cold_start_paths(demands, paths)?, StartKind::Cold),
    };
    let mut problem = PathProblem::new(topology, demands, paths, split)?;
    let incidence = Incidence::new(demands, paths);
    let report = optimize(&mut problem, &incidence, config, start, Form::Path, kind)?;
    Ok((problem.into_split(), report))
}

/// Outcome of running cold and hot starts side by side.
#[derive(Debug, Clone)]
pub struct DualOutcome<S> {
    pub split: S,
    pub chosen: StartKind,
    pub cold: SolveReport,
    pub hot: SolveReport,
}

impl<S> DualOutcome<S> {
    pub fn report(&self) -> &SolveReport {
        match self.chosen {
            StartKind::Cold => &self.cold,
            StartKind::Hot => &self.hot,
        }
    }
}

fn pick<S>(cold: Result<(S, SolveReport)>, hot: Result<(S, SolveReport)>) -> Result<DualOutcome<S>> {
    let (cold_split, cold) = cold?;
    let (hot_split, hot) = hot?;
    Ok(if cold.final_mlu < hot.final_mlu {
        DualOutcome {
            split: cold_split,
            chosen: StartKind::Cold,
            cold,
            hot,
        }
    } else {
        DualOutcome {
            split: hot_split,
            chosen: StartKind::Hot,
            cold,
            hot,
        }
    })
}

/// Dense-form cold and hot starts in parallel under one shared budget; keeps
/// the lower final MLU, preferring the hot start on ties.
pub fn run_dual_start(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    config: &SolverConfig,
    hot: &SplitTensor,
) -> Result<DualOutcome<SplitTensor>> {
    let start = Instant::now();
    let (cold, hot) = rayon::join(
        || run_dense_from(topology, demands, paths, config, None, start),
        || run_dense_from(topology, demands, paths, config, Some(hot), start),
    );
    pick(cold, hot)
}

/// Path-form counterpart of [`run_dual_start`].
pub fn path_dual_start(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    config: &SolverConfig,
    hot: &PathSplit,
) -> Result<DualOutcome<PathSplit>> {
    let start = Instant::now();
    let (cold, hot) = rayon::join(
        || run_path_from(topology, demands, paths, config, None, start),
        || run_path_from(topology, demands, paths, config, Some(hot), start),
    );
    pick(cold, hot)
}
