//! Exhaustive grid-search reference solutions for tiny instances.
//!
//! Nothing here reuses the solver's load bookkeeping. Loads are recomputed
//! from scratch for every grid point, either with the literal per-edge sum
//! over relay nodes (one/two-hop candidates) or by walking every path.

use rayon::prelude::*;
use serde::Serialize;

use crate::dense::SplitTensor;
use crate::error::{Result, TeError};
use crate::path::PathSplit;
use crate::subproblem::SubproblemView;
use crate::topology::{Capacity, PathSet, Sd, Topology};
use crate::traffic::DemandMatrix;

/// Most candidate paths a single-pair search accepts.
pub const MAX_SUBPROBLEM_PATHS: usize = 4;
/// Most free ratio dimensions a whole-instance search accepts.
pub const MAX_FREE_DIMENSIONS: usize = 6;
/// Most grid points any search will enumerate.
pub const MAX_GRID_POINTS: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRatios {
    pub sd: Sd,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub optimal_mlu: f64,
    /// First minimizer in enumeration order.
    pub argmin: Vec<PairRatios>,
    pub grid_step: f64,
    pub points: usize,
}

/// Per-edge utilization of a split tensor, summed edge by edge: an edge
/// `i -> j` carries the first hop of every pair `(i, k)` relayed through `j`
/// (the direct route of `(i, j)` when `k == j`) and the second hop of every
/// pair `(k, j)` relayed through `i`. Returned row-major; unbounded and
/// absent edges report 0.
pub fn relay_sum_utilization(topology: &Topology, demands: &DemandMatrix, split: &SplitTensor) -> Vec<f64> {
    let n = topology.node_count();
    let mut util = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut load = 0.0;
            for k in 0..n {
                load += split.get(i, j, k) * demands.get(i, k);
                load += split.get(k, i, j) * demands.get(k, j);
            }
            util[i * n + j] = match topology.capacity(i, j) {
                Some(Capacity::Finite(c)) if c > 0.0 => load / c,
                _ => 0.0,
            };
        }
    }
    util
}

/// Per-edge utilization of a path split, walking every path of every pair.
pub fn path_walk_utilization(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    split: &PathSplit,
) -> Vec<f64> {
    let n = topology.node_count();
    let mut load = vec![0.0; n * n];
    for s in 0..n {
        for d in 0..n {
            for (p, r) in paths.get(s, d).iter().zip(split.get(s, d)) {
                for w in p.windows(2) {
                    load[w[0] * n + w[1]] += demands.get(s, d) * r;
                }
            }
        }
    }
    for (idx, l) in load.iter_mut().enumerate() {
        *l = match topology.capacity(idx / n, idx % n) {
            Some(Capacity::Finite(c)) if c > 0.0 => *l / c,
            _ => 0.0,
        };
    }
    load
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Integer compositions of `total` into `parts` nonnegative parts, in
/// lexicographic order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=total {
            prefix.push(x);
            rec(total - x, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn grid_divisions(step: f64) -> Result<u32> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(TeError::InvalidConfig(format!(
            "grid step must lie in (0, 1], got {step}"
        )));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(TeError::InvalidConfig(format!("grid step {step} does not divide 1")));
    }
    Ok(n as u32)
}

/// Count of points in the product grid, or `None` past the cap.
fn product_size(sizes: &[usize]) -> Option<usize> {
    sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s).filter(|&p| p <= MAX_GRID_POINTS))
}

/// Minimum of `eval` over the mixed-radix product of `grids`, first pair most
/// significant; ties go to the lowest index.
fn search<S, F>(grids: &[Vec<Vec<u32>>], init: impl Fn() -> S + Sync + Send, eval: F) -> Result<(f64, usize, usize)>
where
    F: Fn(&mut S, &[&[u32]]) -> f64 + Sync + Send,
{
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
    let total = product_size(&sizes).ok_or(TeError::TooLarge {
        what: "grid points",
        got: sizes.iter().fold(1usize, |a, &s| a.saturating_mul(s)),
        cap: MAX_GRID_POINTS,
    })?;
    let best = (0..total)
        .into_par_iter()
        .map_init(
            || (init(), Vec::with_capacity(grids.len())),
            |(scratch, point), idx| {
                point.clear();
                let mut rest = idx;
                let mut digits = vec![0usize; grids.len()];
                for (g, size) in sizes.iter().enumerate().rev() {
                    digits[g] = rest % size;
                    rest /= size;
                }
                point.extend(grids.iter().zip(&digits).map(|(grid, &d)| grid[d].as_slice()));
                (eval(scratch, point), idx)
            },
        )
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    Ok((best.0, best.1, total))
}

fn decode(grids: &[Vec<Vec<u32>>], mut idx: usize) -> Vec<&[u32]> {
    let mut out = vec![&[][..]; grids.len()];
    for (g, grid) in grids.iter().enumerate().rev() {
        out[g] = &grid[idx % grid.len()];
        idx /= grid.len();
    }
    out
}

fn to_ratios(point: &[u32], divisions: u32) -> Vec<f64> {
    point.iter().map(|&x| x as f64 / divisions as f64).collect()
}

/// Best ratios for one pair of `view` on the simplex grid. The MLU of each
/// point is recomputed from the view's background loads and capacities.
pub fn grid_subproblem_optimum(view: &SubproblemView, step: f64) -> Result<OracleResult> {
    let m = view.paths.len();
    if m > MAX_SUBPROBLEM_PATHS {
        return Err(TeError::TooLarge {
            what: "candidate paths",
            got: m,
            cap: MAX_SUBPROBLEM_PATHS,
        });
    }
    let divisions = grid_divisions(step)?;
    let grids = vec![compositions(divisions, m)];
    let eval = |_: &mut (), point: &[&[u32]]| {
        let ratios = to_ratios(point[0], divisions);
        let mut worst = view.other_max;
        for (e, edge) in view.edges.iter().enumerate() {
            if let Some(c) = edge.capacity {
                let mut load = edge.background;
                for (p, r) in view.paths.iter().zip(&ratios) {
                    if p.contains(&e) {
                        load += view.demand * r;
                    }
                }
                worst = worst.max(load / c);
            }
        }
        worst
    };
    let (best, idx, points) = search(&grids, || (), eval)?;
    Ok(OracleResult {
        optimal_mlu: best,
        argmin: vec![PairRatios {
            sd: view.sd,
            ratios: to_ratios(decode(&grids, idx)[0], divisions),
        }],
        grid_step: step,
        points,
    })
}

/// Single-pair grid search built straight from the instance: every other
/// pair keeps its ratios in `split`, and every grid point's loads are
/// recomputed over all edges.
pub fn grid_pair_optimum(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    split: &PathSplit,
    sd: Sd,
    step: f64,
) -> Result<OracleResult> {
    let m = paths.get(sd.0, sd.1).len();
    if m > MAX_SUBPROBLEM_PATHS {
        return Err(TeError::TooLarge {
            what: "candidate paths",
            got: m,
            cap: MAX_SUBPROBLEM_PATHS,
        });
    }
    let divisions = grid_divisions(step)?;
    let grids = vec![compositions(divisions, m)];
    let eval = |scratch: &mut PathSplit, point: &[&[u32]]| {
        scratch.set(sd.0, sd.1, to_ratios(point[0], divisions));
        max_of(&path_walk_utilization(topology, demands, paths, scratch))
    };
    let (best, idx, points) = search(&grids, || split.clone(), eval)?;
    Ok(OracleResult {
        optimal_mlu: best,
        argmin: vec![PairRatios {
            sd,
            ratios: to_ratios(decode(&grids, idx)[0], divisions),
        }],
        grid_step: step,
        points,
    })
}

/// Whole-instance grid search over every demanded pair with more than one
/// candidate path. One/two-hop path sets are evaluated with
/// [`relay_sum_utilization`], longer ones with [`path_walk_utilization`].
pub fn grid_global_optimum(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    step: f64,
) -> Result<OracleResult> {
    let divisions = grid_divisions(step)?;
    let free: Vec<(Sd, usize)> = demands
        .demanded()
        .map(|(sd, _)| (sd, paths.get(sd.0, sd.1).len()))
        .filter(|&(_, m)| m > 1)
        .collect();
    if let Some(((s, d), _)) = demands.demanded().find(|((s, d), _)| paths.get(*s, *d).is_empty()) {
        return Err(TeError::NoPath { src: s, dst: d });
    }
    let dims: usize = free.iter().map(|(_, m)| m - 1).sum();
    if dims > MAX_FREE_DIMENSIONS {
        return Err(TeError::TooLarge {
            what: "free ratio dimensions",
            got: dims,
            cap: MAX_FREE_DIMENSIONS,
        });
    }
    let grids: Vec<Vec<Vec<u32>>> = free.iter().map(|&(_, m)| compositions(divisions, m)).collect();
    let base = PathSplit::first_path(paths);
    let two_hop = paths.max_hops() <= 2;
    let candidates = if two_hop { Some(paths.candidate_set()?) } else { None };
    let eval = |scratch: &mut PathSplit, point: &[&[u32]]| {
        for (&((s, d), _), ratios) in free.iter().zip(point) {
            scratch.set(s, d, to_ratios(ratios, divisions));
        }
        match &candidates {
            Some(cs) => max_of(&relay_sum_utilization(topology, demands, &scratch.to_tensor(cs))),
            None => max_of(&path_walk_utilization(topology, demands, paths, scratch)),
        }
    };
    let (best, idx, points) = search(&grids, || base.clone(), eval)?;
    let argmin = free
        .iter()
        .zip(decode(&grids, idx))
        .map(|(&(sd, _), point)| PairRatios {
            sd,
            ratios: to_ratios(point, divisions),
        })
        .collect();
    Ok(OracleResult {
        optimal_mlu: best,
        argmin,
        grid_step: step,
        points,
    })
}

/// Applies an oracle argmin on top of `base`.
pub fn apply_argmin(base: &PathSplit, result: &OracleResult) -> PathSplit {
    let mut out = base.clone();
    for pr in &result.argmin {
        out.set(pr.sd.0, pr.sd.1, pr.ratios.clone());
    }
    out
}
