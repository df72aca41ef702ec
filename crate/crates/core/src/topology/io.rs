//! JSON and GraphML ingestion of topologies and path sets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Capacity, NodeId, PathSet, Topology};
use crate::error::{Result, TeError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyFile {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: String,
    pub dst: String,
    pub capacity: Capacity,
}

fn index_of(names: &HashMap<&str, NodeId>, name: &str, what: &str) -> Result<NodeId> {
    names
        .get(name)
        .copied()
        .ok_or_else(|| TeError::InvalidTopology(format!("{what} references unknown node {name:?}")))
}

impl TopologyFile {
    pub fn from_topology(topology: &Topology) -> Self {
        TopologyFile {
            nodes: topology.names().to_vec(),
            edges: topology
                .raw_edges()
                .map(|(s, d, capacity)| EdgeRecord {
                    src: topology.name(s).to_string(),
                    dst: topology.name(d).to_string(),
                    capacity,
                })
                .collect(),
        }
    }

    pub fn into_topology(self) -> Result<Topology> {
        let index: HashMap<&str, NodeId> = self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let what = format!("edge {i}");
                Ok((
                    index_of(&index, &e.src, &what)?,
                    index_of(&index, &e.dst, &what)?,
                    e.capacity,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Topology::new(self.nodes, edges)
    }
}

pub fn topology_to_json(topology: &Topology) -> Result<String> {
    Ok(serde_json::to_string_pretty(&TopologyFile::from_topology(topology))?)
}

pub fn topology_from_json(text: &str) -> Result<Topology> {
    serde_json::from_str::<TopologyFile>(text)?.into_topology()
}

/// Reads a GraphML file in the Topology Zoo convention. Node ids become node
/// names. Undirected edges (the default) yield one directed edge per
/// direction. The edge attribute named `capacity_attr` supplies capacities;
/// edges without a positive numeric value get `default_capacity`. Self-loops
/// are dropped and parallel links are summed.
pub fn topology_from_graphml(text: &str, capacity_attr: &str, default_capacity: f64) -> Result<Topology> {
    let doc = roxmltree::Document::parse(text).map_err(|e| TeError::GraphMl(e.to_string()))?;
    let root = doc.root_element();
    let key_id = root
        .children()
        .filter(|n| n.has_tag_name("key"))
        .find(|k| {
            k.attribute("attr.name") == Some(capacity_attr)
                && k.attribute("for").is_none_or(|f| f == "edge" || f == "all")
        })
        .and_then(|k| k.attribute("id"));
    let graph = root
        .children()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| TeError::GraphMl("no <graph> element".into()))?;
    let directed = graph.attribute("edgedefault") == Some("directed");

    let mut names = Vec::new();
    let mut index = HashMap::new();
    for node in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| TeError::GraphMl("node without id".into()))?;
        if index.insert(id.to_string(), names.len()).is_some() {
            return Err(TeError::GraphMl(format!("duplicate node id {id:?}")));
        }
        names.push(id.to_string());
    }

    let mut edges = Vec::new();
    for edge in graph.children().filter(|n| n.has_tag_name("edge")) {
        let end = |attr: &str| -> Result<NodeId> {
            let id = edge
                .attribute(attr)
                .ok_or_else(|| TeError::GraphMl(format!("edge without {attr}")))?;
            index
                .get(id)
                .copied()
                .ok_or_else(|| TeError::GraphMl(format!("edge {attr} {id:?} is not a node")))
        };
        let (s, d) = (end("source")?, end("target")?);
        if s == d {
            continue;
        }
        let capacity = key_id
            .and_then(|key| {
                edge.children()
                    .find(|c| c.has_tag_name("data") && c.attribute("key") == Some(key))
            })
            .and_then(|data| data.text())
            .and_then(|t| t.trim().parse::<f64>().ok())
            .filter(|c| c.is_finite() && *c > 0.0)
            .unwrap_or(default_capacity);
        let directed_edge = edge.attribute("directed").map_or(directed, |v| v == "true");
        edges.push((s, d, Capacity::Finite(capacity)));
        if !directed_edge {
            edges.push((d, s, Capacity::Finite(capacity)));
        }
    }
    Topology::new(names, edges)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathRecord {
    pub src: String,
    pub dst: String,
    pub paths: Vec<Vec<String>>,
}

pub fn path_set_to_records(paths: &PathSet, topology: &Topology) -> Vec<PathRecord> {
    paths
        .pairs()
        .map(|((s, d), ps)| PathRecord {
            src: topology.name(s).to_string(),
            dst: topology.name(d).to_string(),
            paths: ps
                .iter()
                .map(|p| p.iter().map(|&v| topology.name(v).to_string()).collect())
                .collect(),
        })
        .collect()
}

/// Resolves names and validates every path against `topology`.
pub fn path_set_from_records(records: &[PathRecord], topology: &Topology) -> Result<PathSet> {
    let index: HashMap<&str, NodeId> = topology
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let resolve = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| TeError::InvalidPathSet(format!("unknown node {name:?}")))
    };
    let mut out = PathSet::empty(topology.node_count());
    for r in records {
        let (s, d) = (resolve(&r.src)?, resolve(&r.dst)?);
        if !out.get(s, d).is_empty() {
            return Err(TeError::InvalidPathSet(format!(
                "pair ({}, {}) listed twice",
                r.src, r.dst
            )));
        }
        let paths = r
            .paths
            .iter()
            .map(|p| p.iter().map(|v| resolve(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        out.set(s, d, paths);
    }
    out.validate(topology)?;
    Ok(out)
}

pub fn path_set_to_json(paths: &PathSet, topology: &Topology) -> Result<String> {
    Ok(serde_json::to_string_pretty(&path_set_to_records(paths, topology))?)
}

pub fn path_set_from_json(text: &str, topology: &Topology) -> Result<PathSet> {
    let records: Vec<PathRecord> = serde_json::from_str(text)?;
    path_set_from_records(&records, topology)
}
