use rayon::prelude::*;

use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::{Graph, NodeId};

/// Linear Threshold Centrality.
///
/// For each node `v`, seeds `v` and its out-neighbors and runs a
/// deterministic threshold cascade with unit arc weights: a node fires once
/// its active in-neighbors number at least `factor * in_degree`. The score is
/// the fraction of nodes active at the fixpoint.
pub fn ltc(g: &Graph, factor: f64) -> Result<CentralityVector, CentralityError> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(CentralityError::InvalidParameter {
            name: "ltc_factor",
            value: factor.to_string(),
            reason: "threshold factor must lie in (0, 1]",
        });
    }
    let n = g.node_count();
    // integer requirement; the small slack absorbs products like 0.7 * 3
    let required: Vec<u32> = g
        .nodes()
        .map(|v| (factor * g.in_degree(v) as f64 - 1e-9).ceil().max(0.0) as u32)
        .collect();

    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, v| scratch.cascade(g, &required, NodeId::from(v)) as f64 / n as f64,
        )
        .collect();
    Ok(CentralityVector::new("ltc", scores).with_param("factor", factor))
}

struct Scratch {
    active: Vec<bool>,
    hits: Vec<u32>,
    touched: Vec<NodeId>,
    frontier: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            active: vec![false; n],
            hits: vec![0; n],
            touched: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn cascade(&mut self, g: &Graph, required: &[u32], v: NodeId) -> usize {
        self.frontier.clear();
        for s in std::iter::once(v).chain(g.successors(v).iter().copied()) {
            if !self.active[s.index()] {
                self.active[s.index()] = true;
                self.touched.push(s);
                self.frontier.push(s);
            }
        }
        let mut count = self.frontier.len();
        while !self.frontier.is_empty() {
            self.next.clear();
            for &u in &self.frontier {
                for &w in g.successors(u) {
                    let wi = w.index();
                    if self.active[wi] {
                        continue;
                    }
                    if self.hits[wi] == 0 {
                        self.touched.push(w);
                    }
                    self.hits[wi] += 1;
                    if self.hits[wi] >= required[wi] {
                        self.active[wi] = true;
                        self.next.push(w);
                        count += 1;
                    }
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        for &t in &self.touched {
            self.active[t.index()] = false;
            self.hits[t.index()] = 0;
        }
        self.touched.clear();
        count
    }
}

pub struct Ltc;

impl Measure for Ltc {
    fn name(&self) -> &'static str {
        "ltc"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["ltc07", "linear-threshold-centrality"]
    }

    fn compute(&self, g: &Graph, p: &MeasureParams) -> Result<CentralityVector, CentralityError> {
        ltc(g, p.ltc_factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::toy_network;

    #[test]
    fn complete_graph_reaches_everyone() {
        let edges = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j)));
        let g = Graph::from_edges(5, edges, None).unwrap();
        assert_eq!(ltc(&g, 0.7).unwrap().scores, [1.0; 5]);
    }

    #[test]
    fn isolated_node_scores_itself_only() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2)], None).unwrap();
        let s = ltc(&g, 0.7).unwrap().scores;
        assert_eq!(s[3], 0.25);
        // isolated nodes never fire from other cascades
        assert!(s[..3].iter().all(|&x| x <= 0.75));
    }

    #[test]
    fn toy_middle_green() {
        let toy = toy_network();
        let g = &toy.graph;
        let s = ltc(g, 0.7).unwrap().scores;
        assert!((s[g.resolve("g_m").unwrap().index()] - 4.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn factor_one_fires_when_all_neighbors_active() {
        // path 0-1-2: seeding 1 activates 0 and 2 directly
        let g = Graph::from_edges(3, [(0, 1), (1, 2)], None).unwrap();
        assert_eq!(ltc(&g, 1.0).unwrap().scores[1], 1.0);
        // seeding 0 activates 1; node 2 needs 1 of 1 -> fires
        assert_eq!(ltc(&g, 1.0).unwrap().scores[0], 1.0);
    }

    #[test]
    fn threshold_blocks_spread() {
        // 0 -> 1 -> 2 <- 3: seeds {0, 1}; node 2 needs 2 hits, gets 1
        let g = Graph::from_arcs(4, [(0, 1), (1, 2), (3, 2)], None).unwrap();
        let s = ltc(&g, 0.7).unwrap().scores;
        assert_eq!(s[0], 0.5);
        // seeds {1, 2}: nothing downstream
        assert_eq!(s[1], 0.5);
        // seeds {3, 2}
        assert_eq!(s[3], 0.5);
        assert_eq!(s[2], 0.25);
    }

    #[test]
    fn rejects_bad_factor() {
        let g = Graph::from_arcs(1, [], None).unwrap();
        assert!(ltc(&g, 0.0).is_err());
        assert!(ltc(&g, 1.5).is_err());
    }
}
