//! Small hand-built instances with known optima.

use super::{complete_dcn_topology, default_names, Capacity, PathSet, Topology};
use crate::error::{Result, TeError};
use crate::path::PathSplit;
use crate::problem::Instance;
use crate::traffic::DemandMatrix;

/// Triangle `A, B, C` with capacity 2 on every directed edge, demands
/// `A->B = 2`, `A->C = 1`, `B->C = 1`, and the two shortest paths per pair.
/// Shortest-path routing gives MLU 1; the optimum is 0.75.
pub fn three_node_example() -> Instance {
    let topology = complete_dcn_topology(3, 2.0).expect("valid triangle");
    let paths = PathSet::k_shortest(&topology, 2).expect("triangle is connected");
    Instance {
        topology,
        paths,
        demands: three_node_demands(),
    }
}

/// Demand matrix of [`three_node_example`].
pub fn three_node_demands() -> DemandMatrix {
    let mut d = DemandMatrix::zeros(3);
    d.set(0, 1, 2.0);
    d.set(0, 2, 1.0);
    d.set(1, 2, 1.0);
    d
}

/// Directed ring on which sequential single-pair updates can stall.
#[derive(Debug, Clone)]
pub struct RingFixture {
    pub instance: Instance,
    /// Every pair on its detour: each unit-capacity edge carries load 1.
    pub all_detour: PathSplit,
    /// Every pair on its direct edge: MLU `1 / (n - 3)`.
    pub all_direct: PathSplit,
}

/// Ring of `n >= 5` nodes. Clockwise edges `i -> i+1` have capacity 1 and
/// skip edges `i -> i+2` are unbounded. Each pair `(i, i+1)` carries
/// `1 / (n - 3)` and may use its direct edge or the detour
/// `i, i+2, i+3, ..., i-1, i+1`, which crosses `n - 3` unit edges.
pub fn ring_deadlock_fixture(n: usize) -> Result<RingFixture> {
    if n < 5 {
        return Err(TeError::InvalidTopology(format!("ring fixture needs n >= 5, got {n}")));
    }
    let edges = (0..n).flat_map(|i| {
        [
            (i, (i + 1) % n, Capacity::Finite(1.0)),
            (i, (i + 2) % n, Capacity::Unbounded),
        ]
    });
    let topology = Topology::new(default_names(n), edges)?;
    let demand = 1.0 / (n - 3) as f64;
    let mut demands = DemandMatrix::zeros(n);
    let mut paths = PathSet::empty(n);
    for i in 0..n {
        let next = (i + 1) % n;
        demands.set(i, next, demand);
        let detour: Vec<_> = (2..n).map(|step| (i + step) % n).chain([next]).collect();
        paths.set(i, next, vec![vec![i, next], [vec![i], detour].concat()]);
    }
    paths.validate(&topology)?;
    let mut all_detour = PathSplit::first_path(&paths);
    let all_direct = all_detour.clone();
    for i in 0..n {
        all_detour.set(i, (i + 1) % n, vec![0.0, 1.0]);
    }
    Ok(RingFixture {
        instance: Instance {
            topology,
            paths,
            demands,
        },
        all_detour,
        all_direct,
    })
}
