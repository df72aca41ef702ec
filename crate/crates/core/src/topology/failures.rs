use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{NodeId, Topology};
use crate::error::{Result, TeError};
use crate::traffic::DemandMatrix;

/// Set of directed edges taken down together.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureScenario {
    pub removed_edges: Vec<(NodeId, NodeId)>,
}

/// Removes the scenario's edges. Fails if any pair with positive demand is
/// left without a route; callers must recompute path sets afterwards.
pub fn apply_failures(topology: &Topology, scenario: &FailureScenario, demands: &DemandMatrix) -> Result<Topology> {
    let failed = topology.without_edges(&scenario.removed_edges)?;
    for ((s, d), _) in demands.demanded() {
        if !reachable(&failed, s, d) {
            return Err(TeError::Disconnects { src: s, dst: d });
        }
    }
    Ok(failed)
}

pub fn reachable(topology: &Topology, s: NodeId, d: NodeId) -> bool {
    let mut seen = vec![false; topology.node_count()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        if v == d {
            return true;
        }
        for &w in topology.out_neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// `count` distinct usable edges drawn uniformly, in row-major order.
pub fn sample_failures<R: Rng + ?Sized>(topology: &Topology, count: usize, rng: &mut R) -> Result<FailureScenario> {
    let edges: Vec<(NodeId, NodeId)> = topology.edges().map(|(s, d, _)| (s, d)).collect();
    if count > edges.len() {
        return Err(TeError::InvalidConfig(format!(
            "cannot fail {count} of {} edges",
            edges.len()
        )));
    }
    let mut picked: Vec<usize> = index::sample(rng, edges.len(), count).into_vec();
    picked.sort_unstable();
    Ok(FailureScenario {
        removed_edges: picked.into_iter().map(|i| edges[i]).collect(),
    })
}
