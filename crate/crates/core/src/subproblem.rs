//! Single source-destination subproblem: with every other pair's split held
//! fixed, choose the ratios of one pair to minimize the maximum link
//! utilization.
//!
//! The subproblem is captured as a [`SubproblemView`]: the background load on
//! every edge the pair's candidate paths can touch, the utilization ceiling
//! contributed by all other edges, and the search bounds. Both the dense and
//! the path formulation build the same view, so the search below serves both.

use serde::Serialize;

use crate::error::{Result, TeError};
use crate::loads::LinkLoads;
use crate::topology::{NodeId, Path, Sd};

/// Slack on the `sum >= 1` feasibility predicate.
pub const PREDICATE_SLACK: f64 = 1e-12;

/// Ratios at or below this count as unused paths.
pub const ZERO_RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSlot {
    pub src: NodeId,
    pub dst: NodeId,
    /// Load on the edge excluding the pair under optimization.
    pub background: f64,
    /// Finite capacity, or `None` for an unbounded edge.
    pub capacity: Option<f64>,
}

impl EdgeSlot {
    /// Utilization with `extra` load of the pair added.
    #[inline]
    pub fn util_with(&self, extra: f64) -> f64 {
        match self.capacity {
            Some(c) => (self.background + extra) / c,
            None => 0.0,
        }
    }

    /// Room left for the pair at candidate MLU `u`; `+inf` when unbounded.
    #[inline]
    pub fn residual(&self, u: f64) -> f64 {
        match self.capacity {
            Some(c) => u * c - self.background,
            None => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemView {
    pub sd: Sd,
    pub demand: f64,
    /// Distinct edges on the pair's candidate paths.
    pub edges: Vec<EdgeSlot>,
    /// Each candidate path as indices into `edges`.
    pub paths: Vec<Vec<usize>>,
    /// Ratios before the update, aligned with `paths`.
    pub current: Vec<f64>,
    /// Highest utilization among edges the pair cannot touch.
    pub other_max: f64,
    /// Lowest MLU any split of this pair can reach: every edge at its
    /// background load.
    pub u_lb: f64,
    /// MLU of the configuration before the update.
    pub u_ub: f64,
}

impl SubproblemView {
    /// Assembles the view from live loads and the pair's current ratios.
    pub fn from_loads(loads: &mut LinkLoads, sd: Sd, demand: f64, paths: &[Path], current: &[f64]) -> Self {
        assert_eq!(paths.len(), current.len());
        let mut edges: Vec<EdgeSlot> = Vec::new();
        let mut contribution: Vec<f64> = Vec::new();
        let mut path_slots = Vec::with_capacity(paths.len());
        for (path, &ratio) in paths.iter().zip(current) {
            let mut slots = Vec::with_capacity(path.len() - 1);
            for w in path.windows(2) {
                let idx = match edges.iter().position(|e| e.src == w[0] && e.dst == w[1]) {
                    Some(idx) => idx,
                    None => {
                        let inv = loads.inv_capacity(w[0], w[1]);
                        edges.push(EdgeSlot {
                            src: w[0],
                            dst: w[1],
                            background: 0.0,
                            capacity: (inv > 0.0).then(|| 1.0 / inv),
                        });
                        contribution.push(0.0);
                        edges.len() - 1
                    }
                };
                contribution[idx] += demand * ratio;
                slots.push(idx);
            }
            path_slots.push(slots);
        }
        for (e, c) in edges.iter_mut().zip(&contribution) {
            e.background = loads.load(e.src, e.dst) - c;
        }
        let zeroed: Vec<_> = edges.iter().map(|e| (e.src, e.dst, 0.0)).collect();
        let other_max = loads.with_overrides(&zeroed, LinkLoads::mlu);
        let touched_lb = edges.iter().map(|e| e.util_with(0.0)).fold(0.0, f64::max);
        SubproblemView {
            sd,
            demand,
            edges,
            paths: path_slots,
            current: current.to_vec(),
            other_max,
            u_lb: other_max.max(touched_lb),
            u_ub: loads.mlu(),
        }
    }

    /// Per-edge load of the pair under `ratios`, aligned with `edges`.
    pub fn pair_loads(&self, ratios: &[f64]) -> Vec<f64> {
        let mut extra = vec![0.0; self.edges.len()];
        for (path, &r) in self.paths.iter().zip(ratios) {
            for &e in path {
                extra[e] += self.demand * r;
            }
        }
        extra
    }

    /// Global MLU if the pair used `ratios`.
    pub fn mlu_with(&self, ratios: &[f64]) -> f64 {
        let extra = self.pair_loads(ratios);
        self.edges
            .iter()
            .zip(&extra)
            .map(|(e, x)| e.util_with(*x))
            .fold(self.other_max, f64::max)
    }

    /// Highest edge utilization along each candidate path under `ratios`.
    pub fn path_max_utils(&self, ratios: &[f64]) -> Vec<f64> {
        let extra = self.pair_loads(ratios);
        self.paths
            .iter()
            .map(|p| p.iter().map(|&e| self.edges[e].util_with(extra[e])).fold(0.0, f64::max))
            .collect()
    }
}

/// Upper bound on each path's split ratio at candidate MLU `u`: the path's
/// tightest residual capacity divided by the pair's demand.
pub fn residual_ratios(view: &SubproblemView, u: f64) -> Result<Vec<f64>> {
    if view.demand <= 0.0 {
        return Err(TeError::ZeroDemand {
            src: view.sd.0,
            dst: view.sd.1,
        });
    }
    Ok(view
        .paths
        .iter()
        .map(|p| {
            p.iter()
                .map(|&e| view.edges[e].residual(u))
                .fold(f64::INFINITY, f64::min)
                / view.demand
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// The bounds normalized to sum to one.
    Feasible(Vec<f64>),
    Infeasible,
}

/// A candidate MLU is feasible iff the ratio bounds are all nonnegative and
/// sum to at least one.
pub fn feasibility_check(bounds: &[f64]) -> Feasibility {
    let min = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = bounds.iter().sum();
    if bounds.is_empty() || min < 0.0 || sum < 1.0 - PREDICATE_SLACK {
        Feasibility::Infeasible
    } else {
        Feasibility::Feasible(normalize(bounds))
    }
}

/// Bounds with negative entries clipped to zero.
pub fn balanced_ratios(bounds: &[f64]) -> Vec<f64> {
    bounds.iter().map(|&f| f.max(0.0)).collect()
}

/// `(u_lb, u_ub)`.
pub fn search_bounds(view: &SubproblemView) -> (f64, f64) {
    (view.u_lb, view.u_ub)
}

/// Scales nonnegative bounds to sum to one. Paths with unbounded room take
/// the whole demand, shared equally.
fn normalize(bounds: &[f64]) -> Vec<f64> {
    let infinite = bounds.iter().filter(|f| f.is_infinite()).count();
    if infinite > 0 {
        let share = 1.0 / infinite as f64;
        return bounds
            .iter()
            .map(|f| if f.is_infinite() { share } else { 0.0 })
            .collect();
    }
    let sum: f64 = bounds.iter().sum();
    bounds.iter().map(|f| f / sum).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubproblemSolution {
    pub ratios: Vec<f64>,
    /// Upper end of the final search bracket.
    pub mlu: f64,
    pub iterations: usize,
}

fn never_feasible(view: &SubproblemView) -> TeError {
    TeError::NeverFeasible {
        src: view.sd.0,
        dst: view.sd.1,
    }
}

/// Balanced binary search: bisect `[0, u_ub]` on the predicate
/// `sum(max(0, bound(u))) >= 1` until the bracket is narrower than
/// `epsilon`, then split in proportion to the clipped bounds at the upper end.
pub fn bbsm(view: &SubproblemView, epsilon: f64) -> Result<SubproblemSolution> {
    let feasible = |u: f64| -> Result<bool> {
        let b = balanced_ratios(&residual_ratios(view, u)?);
        Ok(b.iter().sum::<f64>() >= 1.0 - PREDICATE_SLACK)
    };
    let (_, ub) = search_bounds(view);
    if !feasible(ub)? {
        return Err(never_feasible(view));
    }
    let (mut lo, mut hi) = (0.0, ub);
    let mut iterations = 0;
    while hi - lo >= epsilon {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let ratios = normalize(&balanced_ratios(&residual_ratios(view, hi)?));
    Ok(SubproblemSolution {
        ratios,
        mlu: hi,
        iterations,
    })
}

/// Optimal subproblem MLU `u*`, bisected on the unclipped feasibility test
/// over `[u_lb, u_ub]`. Returns `u_lb` exactly when it is already feasible.
pub fn optimal_mlu(view: &SubproblemView, epsilon: f64) -> Result<f64> {
    let feasible = |u: f64| -> Result<bool> {
        Ok(matches!(
            feasibility_check(&residual_ratios(view, u)?),
            Feasibility::Feasible(_)
        ))
    };
    let (lb, ub) = search_bounds(view);
    if feasible(lb)? {
        return Ok(lb);
    }
    if !feasible(ub)? {
        return Err(never_feasible(view));
    }
    let (mut lo, mut hi) = (lb, ub);
    while hi - lo >= epsilon {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Non-balanced optimum: fill paths greedily in candidate order up to their
/// bounds at `u*`. Reaches the same subproblem MLU as [`bbsm`] but lands on
/// a vertex of the optimal face instead of its balanced point.
pub fn greedy_vertex(view: &SubproblemView, epsilon: f64) -> Result<SubproblemSolution> {
    let u = optimal_mlu(view, epsilon)?;
    let bounds = balanced_ratios(&residual_ratios(view, u)?);
    let mut remaining = 1.0;
    let mut last_used = None;
    let mut ratios: Vec<f64> = bounds
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let take = b.min(remaining);
            if take > 0.0 {
                last_used = Some(i);
            }
            remaining -= take;
            take
        })
        .collect();
    // rounding leftovers from the slack in the predicate
    if remaining > 0.0 {
        ratios[last_used.unwrap_or(0)] += remaining;
    }
    Ok(SubproblemSolution {
        ratios,
        mlu: u,
        iterations: 0,
    })
}
