use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{NodeId, Path, Topology};
use crate::error::{Result, TeError};

const UNREACHED: usize = usize::MAX;

/// Up to `k` loopless `s -> d` paths in nondecreasing hop count.
///
/// Paths of equal hop count are ordered lexicographically by their node
/// sequence, so the result is the first `k` loopless paths under the order
/// `(hops, nodes)`.
pub fn yen_k_shortest_paths(topology: &Topology, s: NodeId, d: NodeId, k: usize) -> Result<Vec<Path>> {
    let n = topology.node_count();
    if s >= n || d >= n {
        return Err(TeError::InvalidPathSet(format!("pair ({s}, {d}) outside 0..{n}")));
    }
    if s == d {
        return Err(TeError::InvalidPathSet(format!("source equals destination ({s})")));
    }
    if k == 0 {
        return Err(TeError::InvalidPathSet("k must be positive".into()));
    }

    // On dense fabrics the one- and two-hop paths usually cover k already;
    // those are exactly the head of the (hops, nodes) order.
    let short = short_paths(topology, s, d, k);
    if short.len() >= k {
        return Ok(short);
    }

    let mut banned_nodes = vec![false; n];
    let no_edges = HashSet::new();
    let first = lex_shortest(topology, s, d, &banned_nodes, &no_edges).ok_or(TeError::NoPath { src: s, dst: d })?;

    let mut accepted: Vec<Path> = vec![first];
    let mut candidates: BTreeSet<(usize, Path)> = BTreeSet::new();
    while accepted.len() < k {
        let prev = accepted.last().expect("at least one accepted path").clone();
        for spur_idx in 0..prev.len() - 1 {
            let spur = prev[spur_idx];
            let root = &prev[..=spur_idx];
            let banned_edges: HashSet<(NodeId, NodeId)> = accepted
                .iter()
                .filter(|p| p.len() > spur_idx + 1 && &p[..=spur_idx] == root)
                .map(|p| (p[spur_idx], p[spur_idx + 1]))
                .collect();
            banned_nodes.iter_mut().for_each(|b| *b = false);
            for &node in &root[..spur_idx] {
                banned_nodes[node] = true;
            }
            if let Some(tail) = lex_shortest(topology, spur, d, &banned_nodes, &banned_edges) {
                let mut path = root[..spur_idx].to_vec();
                path.extend(tail);
                candidates.insert((path.len(), path));
            }
        }
        loop {
            match candidates.pop_first() {
                Some((_, path)) if !accepted.contains(&path) => {
                    accepted.push(path);
                    break;
                }
                Some(_) => continue,
                None => return Ok(accepted),
            }
        }
    }
    Ok(accepted)
}

/// Direct edge followed by two-hop paths through ascending intermediates.
fn short_paths(topology: &Topology, s: NodeId, d: NodeId, k: usize) -> Vec<Path> {
    let mut out = Vec::new();
    if topology.has_edge(s, d) {
        out.push(vec![s, d]);
    }
    for &mid in topology.out_neighbors(s) {
        if out.len() >= k {
            break;
        }
        if mid != d && topology.has_edge(mid, d) {
            out.push(vec![s, mid, d]);
        }
    }
    out
}

/// Lexicographically smallest among the minimum-hop `src -> dst` paths that
/// avoid `banned_nodes` and `banned_edges`.
fn lex_shortest(
    topology: &Topology,
    src: NodeId,
    dst: NodeId,
    banned_nodes: &[bool],
    banned_edges: &HashSet<(NodeId, NodeId)>,
) -> Option<Path> {
    let n = topology.node_count();
    // hop distance to dst over the reversed graph
    let mut dist = vec![UNREACHED; n];
    dist[dst] = 0;
    let mut queue = VecDeque::from([dst]);
    while let Some(v) = queue.pop_front() {
        if v == src {
            break;
        }
        for &u in topology.in_neighbors(v) {
            if dist[u] == UNREACHED && !banned_nodes[u] && !banned_edges.contains(&(u, v)) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[src] == UNREACHED {
        return None;
    }
    let mut path = vec![src];
    let mut cur = src;
    while cur != dst {
        let next = topology.out_neighbors(cur).iter().copied().find(|&v| {
            dist[v] != UNREACHED && dist[v] + 1 == dist[cur] && !banned_nodes[v] && !banned_edges.contains(&(cur, v))
        })?;
        path.push(next);
        cur = next;
    }
    Some(path)
}

/// Every loopless `s -> d` path, sorted by `(hops, nodes)`. Exponential;
/// only meant for checking small graphs.
pub fn brute_force_paths(topology: &Topology, s: NodeId, d: NodeId) -> Vec<Path> {
    fn dfs(t: &Topology, d: NodeId, path: &mut Path, on_path: &mut [bool], out: &mut Vec<Path>) {
        let cur = *path.last().unwrap();
        if cur == d {
            out.push(path.clone());
            return;
        }
        for &next in t.out_neighbors(cur) {
            if !on_path[next] {
                on_path[next] = true;
                path.push(next);
                dfs(t, d, path, on_path, out);
                path.pop();
                on_path[next] = false;
            }
        }
    }
    let mut on_path = vec![false; topology.node_count()];
    on_path[s] = true;
    let mut out = Vec::new();
    dfs(topology, d, &mut vec![s], &mut on_path, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}
