//! Random instance generators shared by the acceptance criteria.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssdo_te::path::PathSplit;
use ssdo_te::problem::Instance;
use ssdo_te::topology::{Capacity, PathSet, Topology};
use ssdo_te::traffic::DemandMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random one/two-hop instance.
pub struct TwoHopShape {
    pub nodes: std::ops::RangeInclusive<usize>,
    pub edge_prob: f64,
    pub max_paths: usize,
    pub pairs: std::ops::RangeInclusive<usize>,
    /// Cap on the sum over demanded pairs of (paths - 1).
    pub max_free_dims: usize,
}

/// Random directed graph with capacities in [1, 10] whose demanded pairs
/// use their direct edge (when present) and random two-hop relays.
/// Candidate paths of one pair never share an edge.
pub fn two_hop_instance(rng: &mut impl Rng, shape: &TwoHopShape) -> Instance {
    loop {
        let n = rng.random_range(shape.nodes.clone());
        let mut edges = Vec::new();
        for s in 0..n {
            for d in 0..n {
                if s != d && rng.random_bool(shape.edge_prob) {
                    edges.push((s, d, Capacity::Finite(rng.random_range(1.0..10.0))));
                }
            }
        }
        let Ok(topology) = Topology::with_numbered_nodes(n, edges) else {
            continue;
        };
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect();
        pairs.shuffle(rng);
        let want = rng.random_range(shape.pairs.clone());
        let mut paths = PathSet::empty(n);
        let mut demands = DemandMatrix::zeros(n);
        let mut dims = 0;
        let mut chosen = 0;
        for (s, d) in pairs {
            if chosen == want {
                break;
            }
            let mut cands: Vec<Vec<usize>> = Vec::new();
            if topology.has_edge(s, d) {
                cands.push(vec![s, d]);
            }
            let mut mids: Vec<usize> = (0..n)
                .filter(|&k| k != s && k != d && topology.has_edge(s, k) && topology.has_edge(k, d))
                .collect();
            mids.shuffle(rng);
            cands.extend(mids.into_iter().map(|k| vec![s, k, d]));
            let room = shape.max_free_dims - dims;
            cands.truncate(shape.max_paths.min(room.saturating_add(1)));
            if cands.is_empty() {
                continue;
            }
            cands.sort_by_key(|p| (p.len(), p.clone()));
            dims += cands.len() - 1;
            paths.set(s, d, cands);
            demands.set(s, d, rng.random_range(0.5..5.0));
            chosen += 1;
        }
        if chosen < 2 || dims == 0 {
            continue;
        }
        let inst = Instance {
            topology,
            paths,
            demands,
        };
        inst.validate().expect("generated instance is valid");
        return inst;
    }
}

/// Uniformly random ratios on every pair with paths.
pub fn random_split(paths: &PathSet, rng: &mut impl Rng) -> PathSplit {
    let mut split = PathSplit::first_path(paths);
    for ((s, d), ps) in paths.pairs() {
        let raw: Vec<f64> = (0..ps.len()).map(|_| rng.random::<f64>() + 1e-3).collect();
        let sum: f64 = raw.iter().sum();
        split.set(s, d, raw.iter().map(|r| r / sum).collect());
    }
    split
}
