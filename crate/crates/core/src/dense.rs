//! One/two-hop formulation: the split tensor `f[i][k][j]` (fraction of the
//! `(i, j)` demand relayed through `k`, with `k == j` meaning the direct
//! edge) and its incrementally maintained link loads.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TeError};
use crate::loads::LinkLoads;
use crate::subproblem::{SubproblemView, ZERO_RATIO_TOL};
use crate::topology::{CandidateSet, NodeId, Sd, Topology};
use crate::traffic::DemandMatrix;

/// Tolerance on `sum_k f[i][k][j] == 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Dense `|V|^3` split tensor. Ratios of one pair are stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTensor {
    n: usize,
    f: Vec<f64>,
}

impl SplitTensor {
    pub fn zeros(n: usize) -> Self {
        SplitTensor {
            n,
            f: vec![0.0; n * n * n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: NodeId, k: NodeId, j: NodeId) -> usize {
        (i * self.n + j) * self.n + k
    }

    /// `f[i][k][j]`.
    #[inline]
    pub fn get(&self, i: NodeId, k: NodeId, j: NodeId) -> f64 {
        self.f[self.idx(i, k, j)]
    }

    #[inline]
    pub fn set(&mut self, i: NodeId, k: NodeId, j: NodeId, value: f64) {
        let idx = self.idx(i, k, j);
        self.f[idx] = value;
    }

    /// Ratios of pair `(i, j)` indexed by intermediate node.
    pub fn pair(&self, i: NodeId, j: NodeId) -> &[f64] {
        let start = (i * self.n + j) * self.n;
        &self.f[start..start + self.n]
    }

    /// Ratios of `sd` gathered in candidate order.
    pub fn ratios_for(&self, sd: Sd, mids: &[NodeId]) -> Vec<f64> {
        let row = self.pair(sd.0, sd.1);
        mids.iter().map(|&k| row[k]).collect()
    }

    /// Checks nonnegativity, the structural zeros, support on the candidate
    /// set and per-pair normalization.
    pub fn validate(&self, candidates: &CandidateSet) -> Result<()> {
        let n = self.n;
        if candidates.node_count() != n {
            return Err(TeError::InvalidSplit(format!(
                "tensor has {n} nodes, candidate set has {}",
                candidates.node_count()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let row = self.pair(i, j);
                let mids = candidates.get(i, j);
                let mut sum = 0.0;
                for (k, &v) in row.iter().enumerate() {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(TeError::InvalidSplit(format!("f[{i}][{k}][{j}] = {v}")));
                    }
                    if v > 0.0 && (i == j || k == i || !mids.contains(&k)) {
                        return Err(TeError::InvalidSplit(format!(
                            "f[{i}][{k}][{j}] = {v} lies outside the candidate paths"
                        )));
                    }
                    sum += v;
                }
                if !mids.is_empty() && (sum - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(TeError::InvalidSplit(format!("ratios of ({i}, {j}) sum to {sum}")));
                }
            }
        }
        Ok(())
    }

    /// Sparse export: entries above the zero-ratio tolerance.
    pub fn to_entries(&self, topology: &Topology) -> Vec<TensorEntry> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, &v) in self.pair(i, j).iter().enumerate() {
                    if v > ZERO_RATIO_TOL {
                        out.push(TensorEntry {
                            src: topology.name(i).to_string(),
                            mid: topology.name(k).to_string(),
                            dst: topology.name(j).to_string(),
                            ratio: v,
                        });
                    }
                }
            }
        }
        out
    }

    /// Rebuilds a tensor from sparse entries. Each pair is renormalized after
    /// checking its sum is within `1e-6` of one (export drops tiny ratios).
    pub fn from_entries(entries: &[TensorEntry], topology: &Topology, candidates: &CandidateSet) -> Result<Self> {
        let n = topology.node_count();
        let lookup = |name: &str| {
            topology
                .node_index(name)
                .ok_or_else(|| TeError::InvalidSplit(format!("unknown node {name:?}")))
        };
        let mut t = SplitTensor::zeros(n);
        for e in entries {
            let (i, k, j) = (lookup(&e.src)?, lookup(&e.mid)?, lookup(&e.dst)?);
            if !(e.ratio >= 0.0 && e.ratio.is_finite()) {
                return Err(TeError::InvalidSplit(format!("ratio {} for ({i}, {k}, {j})", e.ratio)));
            }
            t.set(i, k, j, e.ratio);
        }
        for ((i, j), _) in candidates.pairs() {
            let sum: f64 = t.pair(i, j).iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(TeError::InvalidSplit(format!(
                    "ratios of ({}, {}) sum to {sum}",
                    topology.name(i),
                    topology.name(j)
                )));
            }
            let start = t.idx(i, 0, j);
            t.f[start..start + n].iter_mut().for_each(|v| *v /= sum);
        }
        t.validate(candidates)?;
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub src: String,
    pub mid: String,
    pub dst: String,
    pub ratio: f64,
}

/// Link loads and utilizations consistent with a split tensor.
#[derive(Debug, Clone)]
pub struct UtilizationState {
    pub loads: LinkLoads,
}

impl UtilizationState {
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

/// From-scratch link loads of a split tensor.
pub fn compute_utilization(
    topology: &Topology,
    demands: &DemandMatrix,
    split: &SplitTensor,
) -> Result<UtilizationState> {
    let n = topology.node_count();
    let mut load = vec![0.0; n * n];
    for ((i, j), demand) in demands.demanded() {
        for (k, &f) in split.pair(i, j).iter().enumerate() {
            if f > 0.0 {
                let flow = f * demand;
                if k == j {
                    load[i * n + j] += flow;
                } else {
                    load[i * n + k] += flow;
                    load[k * n + j] += flow;
                }
            }
        }
    }
    Ok(UtilizationState {
        loads: LinkLoads::from_matrix(topology, load)?,
    })
}

/// Subproblem view of `sd`: background traffic on the pair's candidate edges
/// is the live load minus the pair's own contribution.
pub fn background_traffic(
    state: &mut UtilizationState,
    split: &SplitTensor,
    demands: &DemandMatrix,
    candidates: &CandidateSet,
    sd: Sd,
) -> SubproblemView {
    let (s, d) = sd;
    let mids = candidates.get(s, d);
    let paths: Vec<_> = mids.iter().map(|&k| CandidateSet::path(s, k, d)).collect();
    let current = split.ratios_for(sd, mids);
    SubproblemView::from_loads(&mut state.loads, sd, demands.get(s, d), &paths, &current)
}

/// Replaces the ratios of `sd` (aligned with its candidate list) and patches
/// the loads of the edges on its candidate paths.
pub fn apply_sd_update(
    state: &mut UtilizationState,
    split: &mut SplitTensor,
    demands: &DemandMatrix,
    candidates: &CandidateSet,
    sd: Sd,
    new_ratios: &[f64],
) -> Result<()> {
    let (s, d) = sd;
    let mids = candidates.get(s, d);
    if new_ratios.len() != mids.len() {
        return Err(TeError::InvalidSplit(format!(
            "{} ratios for {} candidate paths of ({s}, {d})",
            new_ratios.len(),
            mids.len()
        )));
    }
    let demand = demands.get(s, d);
    for (&k, &new) in mids.iter().zip(new_ratios) {
        let old = split.get(s, k, d);
        if old == new {
            continue;
        }
        let delta = (new - old) * demand;
        if k == d {
            state.loads.add(s, d, delta);
        } else {
            state.loads.add(s, k, delta);
            state.loads.add(k, d, delta);
        }
        split.set(s, k, d, new);
    }
    Ok(())
}

/// All demand of every pair on its first candidate path.
pub fn first_candidate_split(candidates: &CandidateSet) -> SplitTensor {
    let mut t = SplitTensor::zeros(candidates.node_count());
    for ((s, d), mids) in candidates.pairs() {
        t.set(s, mids[0], d, 1.0);
    }
    t
}
