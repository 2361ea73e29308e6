//! Directed graphs with dense node indices.
//!
//! Adjacency is stored twice in compressed sparse row form (successors and
//! predecessors), each list sorted by node index. Every out-arc also records
//! its position in the predecessor array so that per-arc data laid out by
//! entering arcs (Linear Threshold weights) can be reached from the source
//! side in O(1).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::error::Error;
use crate::io::{csv_field, split_csv_line};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: malformed edge `{content}` (expected `u v` or `u,v`)")]
    Malformed { line: usize, content: String },
    #[error("line {line}: self-loop on node `{label}` is not allowed")]
    SelfLoop { line: usize, label: String },
    #[error("arc {0} -> {0} is a self-loop")]
    SelfLoopArc(usize),
    #[error("node id {id} out of range for graph with {node_count} nodes")]
    InvalidNode { id: usize, node_count: usize },
    #[error("unknown node label `{0}`")]
    UnknownLabel(String),
    #[error("group file line {line}: {msg}")]
    Groups { line: usize, msg: String },
    #[error("operation requires an arc-symmetric graph")]
    NotSymmetric,
}

/// Dense 0-based node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Immutable simple digraph (no self-loops, no parallel arcs).
#[derive(Clone)]
pub struct Graph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    out_to_in: Vec<usize>,
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("nodes", &self.node_count())
            .field("arcs", &self.arc_count())
            .finish()
    }
}

impl Graph {
    /// Build from arcs. Duplicate arcs are merged; self-loops are rejected.
    /// Nodes without labels are named by their index.
    pub fn from_arcs(
        node_count: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        let mut pairs = Vec::new();
        for (u, v) in arcs {
            for id in [u, v] {
                if id >= node_count {
                    return Err(GraphError::InvalidNode { id, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoopArc(u));
            }
            pairs.push((u as u32, v as u32));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut out_offsets = vec![0usize; node_count + 1];
        let mut in_offsets = vec![0usize; node_count + 1];
        for &(u, v) in &pairs {
            out_offsets[u as usize + 1] += 1;
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets: Vec<NodeId> = pairs.iter().map(|&(_, v)| NodeId(v)).collect();

        // Pairs are sorted by source, so filling predecessor lists in this
        // order leaves each of them sorted too.
        let mut in_sources = vec![NodeId(0); pairs.len()];
        let mut out_to_in = vec![0usize; pairs.len()];
        let mut cursor = in_offsets.clone();
        for (arc, &(u, v)) in pairs.iter().enumerate() {
            let slot = cursor[v as usize];
            cursor[v as usize] += 1;
            in_sources[slot] = NodeId(u);
            out_to_in[arc] = slot;
        }

        let labels = match labels {
            Some(l) => {
                assert_eq!(l.len(), node_count, "label count must equal node count");
                l
            }
            None => (0..node_count).map(|i| i.to_string()).collect(),
        };
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), NodeId::from(i)))
            .collect();

        Ok(Graph {
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            out_to_in,
            labels,
            label_index,
        })
    }

    /// Build an arc-symmetric graph from undirected edges.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        let arcs: Vec<_> = edges
            .into_iter()
            .flat_map(|(u, v)| [(u, v), (v, u)])
            .collect();
        Self::from_arcs(node_count, arcs, labels)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    #[inline]
    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_offsets[v.index()]..self.out_offsets[v.index() + 1]]
    }

    #[inline]
    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[v.index()]..self.in_offsets[v.index() + 1]]
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_offsets[v.index() + 1] - self.out_offsets[v.index()]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v.index() + 1] - self.in_offsets[v.index()]
    }

    /// Range of out-arc positions owned by `v`.
    #[inline]
    pub fn out_arc_range(&self, v: NodeId) -> std::ops::Range<usize> {
        self.out_offsets[v.index()]..self.out_offsets[v.index() + 1]
    }

    /// Range of entering-arc positions owned by `v`.
    #[inline]
    pub fn in_arc_range(&self, v: NodeId) -> std::ops::Range<usize> {
        self.in_offsets[v.index()]..self.in_offsets[v.index() + 1]
    }

    /// Target of out-arc `arc`.
    #[inline]
    pub fn arc_target(&self, arc: usize) -> NodeId {
        self.out_targets[arc]
    }

    /// Entering-arc position of out-arc `arc`.
    #[inline]
    pub fn arc_in_slot(&self, arc: usize) -> usize {
        self.out_to_in[arc]
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.successors(u).binary_search(&v).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v)| self.has_arc(v, u))
    }

    pub fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v.index() < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode {
                id: v.index(),
                node_count: self.node_count(),
            })
        }
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    pub fn resolve(&self, label: &str) -> Result<NodeId, GraphError> {
        self.node_by_label(label)
            .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
    }

    /// Write as an edge list. With `undirected`, a symmetric pair is written
    /// once (lower index first).
    pub fn write_edge_list<W: Write>(&self, mut w: W, undirected: bool) -> std::io::Result<()> {
        for (u, v) in self.arcs() {
            if undirected && u > v && self.has_arc(v, u) {
                continue;
            }
            writeln!(w, "{} {}", self.label(u), self.label(v))?;
        }
        Ok(())
    }
}

/// Out-degree of `v`.
pub fn degree(g: &Graph, v: NodeId) -> Result<usize, GraphError> {
    g.check_node(v)?;
    Ok(g.out_degree(v))
}

/// Result of parsing an edge list.
#[derive(Debug)]
pub struct EdgeListLoad {
    pub graph: Graph,
    /// Input edges dropped because they repeated an earlier edge.
    pub duplicate_edges: usize,
}

/// Parse a text edge list. Labels receive indices in first-appearance order.
pub fn parse_edge_list<R: Read>(reader: R, undirected: bool) -> Result<EdgeListLoad, Error> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut arcs = Vec::new();
    let mut duplicate_edges = 0;

    let mut intern = |s: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(s) {
            return i;
        }
        labels.push(s.to_string());
        index.insert(s.to_string(), labels.len() - 1);
        labels.len() - 1
    };

    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<edge list>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let [a, b] = tokens[..] else {
            return Err(GraphError::Malformed {
                line: lineno + 1,
                content: trimmed.to_string(),
            }
            .into());
        };
        if a == b {
            return Err(GraphError::SelfLoop {
                line: lineno + 1,
                label: a.to_string(),
            }
            .into());
        }
        let u = intern(a, &mut labels);
        let v = intern(b, &mut labels);
        let key = if undirected {
            (u.min(v), u.max(v))
        } else {
            (u, v)
        };
        if !seen.insert(key) {
            duplicate_edges += 1;
            continue;
        }
        arcs.push((u, v));
        if undirected {
            arcs.push((v, u));
        }
    }

    let n = labels.len();
    let graph = Graph::from_arcs(n, arcs, Some(labels))?;
    Ok(EdgeListLoad {
        graph,
        duplicate_edges,
    })
}

pub fn load_edge_list(path: impl AsRef<Path>, undirected: bool) -> Result<EdgeListLoad, Error> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let load = parse_edge_list(file, undirected)?;
    if load.duplicate_edges > 0 {
        log::info!(
            "{}: {} duplicate edge(s) ignored",
            path.display(),
            load.duplicate_edges
        );
    }
    Ok(load)
}

/// A labeled subset of nodes, e.g. the inhabitants of one town.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub label: String,
    pub members: Vec<NodeId>,
}

/// A graph plus disjoint node groups. Groups need not cover every node.
#[derive(Debug, Clone)]
pub struct GroupedGraph {
    pub graph: Graph,
    pub groups: Vec<Group>,
}

impl GroupedGraph {
    pub fn group(&self, label: &str) -> Option<&Group> {
        self.groups.iter().find(|g| g.label == label)
    }

    /// Write the group assignment as `node_label,group_label` CSV.
    pub fn write_groups<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_label,group_label")?;
        for g in &self.groups {
            for &m in &g.members {
                writeln!(
                    w,
                    "{},{}",
                    csv_field(self.graph.label(m)),
                    csv_field(&g.label)
                )?;
            }
        }
        Ok(())
    }
}

/// Parse `node_label,group_label` rows. A header row is skipped if its
/// first field is `node_label`. Groups keep first-appearance order.
pub fn parse_groups<R: Read>(reader: R, graph: &Graph) -> Result<Vec<Group>, Error> {
    let mut groups: Vec<Group> = Vec::new();
    let mut owner: HashMap<NodeId, usize> = HashMap::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<groups>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_csv_line(trimmed);
        if fields.len() != 2 {
            return Err(GraphError::Groups {
                line: lineno + 1,
                msg: format!("expected 2 fields, found {}", fields.len()),
            }
            .into());
        }
        let (node, group) = (fields[0].trim(), fields[1].trim());
        if lineno == 0 && node == "node_label" {
            continue;
        }
        let v = graph.resolve(node)?;
        let gi = match groups.iter().position(|g| g.label == group) {
            Some(i) => i,
            None => {
                groups.push(Group {
                    label: group.to_string(),
                    members: Vec::new(),
                });
                groups.len() - 1
            }
        };
        if let Some(&prev) = owner.get(&v) {
            if prev != gi {
                return Err(GraphError::Groups {
                    line: lineno + 1,
                    msg: format!(
                        "node `{node}` already belongs to group `{}`",
                        groups[prev].label
                    ),
                }
                .into());
            }
            continue;
        }
        owner.insert(v, gi);
        groups[gi].members.push(v);
    }
    Ok(groups)
}

pub fn load_groups(path: impl AsRef<Path>, graph: &Graph) -> Result<Vec<Group>, Error> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_groups(file, graph)
}

/// Town names of the five-town fixture, in node order.
pub const TOY_TOWNS: [&str; 5] = ["red", "orange", "blue", "green", "pink"];

/// The five-town network: 15 agents, three per town, labeled `<town
/// initial>_<t|m|b>` (top, middle, bottom).
///
/// Reds are adjacent to every orange and blue agent. The top green is
/// adjacent to all oranges and to blue top/middle, the bottom green to all
/// blues and to orange middle/bottom, and the middle green to the three
/// pinks. There are no edges inside a town.
pub fn toy_network() -> GroupedGraph {
    let positions = ["t", "m", "b"];
    let labels: Vec<String> = TOY_TOWNS
        .iter()
        .flat_map(|town| {
            let initial = &town[..1];
            positions.iter().map(move |p| format!("{initial}_{p}"))
        })
        .collect();
    let id = |l: &str| labels.iter().position(|x| x == l).unwrap();

    let mut edges = Vec::new();
    for r in positions {
        for o in positions {
            edges.push((format!("r_{r}"), format!("o_{o}")));
        }
        for b in positions {
            edges.push((format!("r_{r}"), format!("b_{b}")));
        }
    }
    for x in ["o_t", "o_m", "o_b", "b_t", "b_m"] {
        edges.push(("g_t".into(), x.into()));
    }
    for x in ["b_t", "b_m", "b_b", "o_m", "o_b"] {
        edges.push(("g_b".into(), x.into()));
    }
    for x in ["p_t", "p_m", "p_b"] {
        edges.push(("g_m".into(), x.into()));
    }
    let edges: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (id(a), id(b))).collect();

    let graph = Graph::from_edges(labels.len(), edges, Some(labels)).expect("fixture is valid");
    let groups = TOY_TOWNS
        .iter()
        .enumerate()
        .map(|(t, town)| Group {
            label: town.to_string(),
            members: (3 * t..3 * t + 3).map(NodeId::from).collect(),
        })
        .collect();
    GroupedGraph { graph, groups }
}
