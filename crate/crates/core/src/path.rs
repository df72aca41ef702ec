//! Path formulation for topologies whose candidate paths may exceed two
//! hops: per-pair split vectors over explicit paths and their link loads.

use serde::{Deserialize, Serialize};

use crate::dense::{SplitTensor, NORMALIZATION_TOL};
use crate::error::{Result, TeError};
use crate::loads::LinkLoads;
use crate::subproblem::{bbsm, SubproblemSolution, SubproblemView, ZERO_RATIO_TOL};
use crate::topology::{CandidateSet, NodeId, Path, PathSet, Sd, Topology};
use crate::traffic::DemandMatrix;

/// Split ratios aligned with the paths of a [`PathSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct PathSplit {
    n: usize,
    ratios: Vec<Vec<f64>>,
}

impl PathSplit {
    /// Everything on the first listed path of each pair.
    pub fn first_path(paths: &PathSet) -> Self {
        let n = paths.node_count();
        let mut ratios = vec![Vec::new(); n * n];
        for ((s, d), ps) in paths.pairs() {
            let mut r = vec![0.0; ps.len()];
            r[0] = 1.0;
            ratios[s * n + d] = r;
        }
        PathSplit { n, ratios }
    }

    /// Everything on the fewest-hop path of each pair, earliest listed first.
    pub fn shortest_path(paths: &PathSet) -> Self {
        let mut out = Self::first_path(paths);
        for ((s, d), ps) in paths.pairs() {
            let best = (0..ps.len()).min_by_key(|&i| ps[i].len()).unwrap_or(0);
            let mut r = vec![0.0; ps.len()];
            r[best] = 1.0;
            out.set(s, d, r);
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: NodeId, d: NodeId) -> &[f64] {
        &self.ratios[s * self.n + d]
    }

    pub fn set(&mut self, s: NodeId, d: NodeId, ratios: Vec<f64>) {
        self.ratios[s * self.n + d] = ratios;
    }

    /// Checks alignment with `paths`, nonnegativity and normalization.
    pub fn validate(&self, paths: &PathSet) -> Result<()> {
        if paths.node_count() != self.n {
            return Err(TeError::InvalidSplit(format!(
                "split has {} nodes, path set has {}",
                self.n,
                paths.node_count()
            )));
        }
        for s in 0..self.n {
            for d in 0..self.n {
                let r = self.get(s, d);
                let p = paths.get(s, d);
                if r.len() != p.len() {
                    return Err(TeError::InvalidSplit(format!(
                        "pair ({s}, {d}) has {} ratios for {} paths",
                        r.len(),
                        p.len()
                    )));
                }
                if let Some(bad) = r.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                    return Err(TeError::InvalidSplit(format!("pair ({s}, {d}) has ratio {bad}")));
                }
                let sum: f64 = r.iter().sum();
                if !r.is_empty() && (sum - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(TeError::InvalidSplit(format!("ratios of ({s}, {d}) sum to {sum}")));
                }
            }
        }
        Ok(())
    }

    /// Path-form view of a tensor over the same one/two-hop candidates.
    pub fn from_tensor(tensor: &SplitTensor, candidates: &CandidateSet) -> Self {
        let n = candidates.node_count();
        let mut ratios = vec![Vec::new(); n * n];
        for ((s, d), mids) in candidates.pairs() {
            ratios[s * n + d] = tensor.ratios_for((s, d), mids);
        }
        PathSplit { n, ratios }
    }

    pub fn to_tensor(&self, candidates: &CandidateSet) -> SplitTensor {
        let mut t = SplitTensor::zeros(self.n);
        for ((s, d), mids) in candidates.pairs() {
            for (&k, &r) in mids.iter().zip(self.get(s, d)) {
                t.set(s, k, d, r);
            }
        }
        t
    }

    /// Sparse export: paths with ratio above the zero-ratio tolerance.
    pub fn to_records(&self, paths: &PathSet, topology: &Topology) -> Vec<PathSplitRecord> {
        paths
            .pairs()
            .map(|((s, d), ps)| PathSplitRecord {
                src: topology.name(s).to_string(),
                dst: topology.name(d).to_string(),
                paths: ps
                    .iter()
                    .zip(self.get(s, d))
                    .filter(|(_, r)| **r > ZERO_RATIO_TOL)
                    .map(|(p, &ratio)| PathRatio {
                        path: p.iter().map(|&v| topology.name(v).to_string()).collect(),
                        ratio,
                    })
                    .collect(),
            })
            .collect()
    }

    /// Rebuilds a split from records. Every listed path must belong to the
    /// pair's candidate set and every pair with candidates must be listed;
    /// ratios are renormalized after checking their sum within `1e-6`.
    pub fn from_records(records: &[PathSplitRecord], paths: &PathSet, topology: &Topology) -> Result<Self> {
        let resolve = |name: &str| {
            topology
                .node_index(name)
                .ok_or_else(|| TeError::InvalidSplit(format!("unknown node {name:?}")))
        };
        let n = topology.node_count();
        let mut ratios: Vec<Option<Vec<f64>>> = vec![None; n * n];
        for rec in records {
            let (s, d) = (resolve(&rec.src)?, resolve(&rec.dst)?);
            let candidates = paths.get(s, d);
            let slot = &mut ratios[s * n + d];
            if slot.is_some() {
                return Err(TeError::InvalidSplit(format!(
                    "pair ({}, {}) listed twice",
                    rec.src, rec.dst
                )));
            }
            let mut r = vec![0.0; candidates.len()];
            for pr in &rec.paths {
                let p = pr.path.iter().map(|v| resolve(v)).collect::<Result<Path>>()?;
                let idx = candidates.iter().position(|c| *c == p).ok_or_else(|| {
                    TeError::InvalidSplit(format!(
                        "path {:?} is not a candidate of ({}, {})",
                        pr.path, rec.src, rec.dst
                    ))
                })?;
                if !(pr.ratio >= 0.0 && pr.ratio.is_finite()) {
                    return Err(TeError::InvalidSplit(format!(
                        "ratio {} on path {:?}",
                        pr.ratio, pr.path
                    )));
                }
                r[idx] += pr.ratio;
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(TeError::InvalidSplit(format!(
                    "ratios of ({}, {}) sum to {sum}",
                    rec.src, rec.dst
                )));
            }
            r.iter_mut().for_each(|v| *v /= sum);
            *slot = Some(r);
        }
        let mut out = PathSplit {
            n,
            ratios: vec![Vec::new(); n * n],
        };
        for ((s, d), _) in paths.pairs() {
            let r = ratios[s * n + d].take().ok_or_else(|| {
                TeError::InvalidSplit(format!(
                    "no ratios for pair ({}, {})",
                    topology.name(s),
                    topology.name(d)
                ))
            })?;
            out.set(s, d, r);
        }
        if let Some(idx) = ratios.iter().position(Option::is_some) {
            return Err(TeError::InvalidSplit(format!(
                "pair ({}, {}) has no candidate paths",
                topology.name(idx / n),
                topology.name(idx % n)
            )));
        }
        out.validate(paths)?;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSplitRecord {
    pub src: String,
    pub dst: String,
    pub paths: Vec<PathRatio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRatio {
    pub path: Vec<String>,
    pub ratio: f64,
}

/// Per-edge loads and utilizations consistent with a path split.
#[derive(Debug, Clone)]
pub struct EdgeLoadState {
    pub loads: LinkLoads,
}

impl EdgeLoadState {
    pub fn mlu(&self) -> f64 {
        self.loads.mlu()
    }

    pub fn load(&self, s: NodeId, d: NodeId) -> f64 {
        self.loads.load(s, d)
    }

    pub fn util(&self, s: NodeId, d: NodeId) -> f64 {
        self.loads.util(s, d)
    }
}

/// From-scratch per-edge loads of a path split.
pub fn path_utilization(
    topology: &Topology,
    demands: &DemandMatrix,
    paths: &PathSet,
    split: &PathSplit,
) -> Result<EdgeLoadState> {
    let n = topology.node_count();
    let mut load = vec![0.0; n * n];
    for ((s, d), demand) in demands.demanded() {
        for (p, &r) in paths.get(s, d).iter().zip(split.get(s, d)) {
            if r > 0.0 {
                for w in p.windows(2) {
                    load[w[0] * n + w[1]] += r * demand;
                }
            }
        }
    }
    Ok(EdgeLoadState {
        loads: LinkLoads::from_matrix(topology, load)?,
    })
}

/// Subproblem view of `sd`. The residual baseline of an edge is its live
/// load minus everything `sd` currently puts on it, over all of its paths.
pub fn path_view(
    state: &mut EdgeLoadState,
    split: &PathSplit,
    demands: &DemandMatrix,
    paths: &PathSet,
    sd: Sd,
) -> SubproblemView {
    let (s, d) = sd;
    SubproblemView::from_loads(
        &mut state.loads,
        sd,
        demands.get(s, d),
        paths.get(s, d),
        split.get(s, d),
    )
}

/// Path-based balanced binary search for one pair: bisects the candidate
/// MLU over `[0, current MLU]` and splits in proportion to each path's
/// clipped residual ratio at the upper end.
pub fn pb_bbsm(
    state: &mut EdgeLoadState,
    split: &PathSplit,
    demands: &DemandMatrix,
    paths: &PathSet,
    sd: Sd,
    epsilon: f64,
) -> Result<SubproblemSolution> {
    if demands.get(sd.0, sd.1) <= 0.0 {
        return Err(TeError::ZeroDemand { src: sd.0, dst: sd.1 });
    }
    bbsm(&path_view(state, split, demands, paths, sd), epsilon)
}

/// Replaces the ratios of `sd` and patches the loads along its paths.
pub fn apply_path_update(
    state: &mut EdgeLoadState,
    split: &mut PathSplit,
    demands: &DemandMatrix,
    paths: &PathSet,
    sd: Sd,
    new_ratios: &[f64],
) -> Result<()> {
    let (s, d) = sd;
    let ps = paths.get(s, d);
    if new_ratios.len() != ps.len() {
        return Err(TeError::InvalidSplit(format!(
            "{} ratios for {} paths of ({s}, {d})",
            new_ratios.len(),
            ps.len()
        )));
    }
    let demand = demands.get(s, d);
    for ((p, &old), &new) in ps.iter().zip(split.get(s, d)).zip(new_ratios) {
        if old == new {
            continue;
        }
        let delta = (new - old) * demand;
        for w in p.windows(2) {
            state.loads.add(w[0], w[1], delta);
        }
    }
    split.set(s, d, new_ratios.to_vec());
    Ok(())
}
