//! Generalized Degree Discount.
//!
//! Greedy selection where each unselected node `v` carries the discounted
//! score
//!
//! ```text
//! gdd(v) = d(v) - 2 t(v) - (d(v) - t(v)) t(v) p + t(v) (t(v) - 1) p / 2
//!          - p * sum_{u in N(v), u unselected} t(u)
//! ```
//!
//! with `d(v)` the degree, `N(v)` the out-neighbors and `t(v)` the number of
//! already selected out-neighbors (Wang et al., 2016). The maximum is taken
//! at each step, ties going to the lowest index. A selection changes `t` of
//! the selected node's predecessors, which in turn changes the neighbor sum of
//! their predecessors, so only nodes within two hops are rescored.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::{Graph, NodeId};

/// Greedy GDD outcome.
#[derive(Debug, Clone)]
pub struct GddSelection {
    /// Nodes in the order they were picked.
    pub order: Vec<NodeId>,
    /// Score of each node: frozen at its selection step, or its current
    /// discounted score if the budget ran out first.
    pub scores: Vec<f64>,
}

#[derive(PartialEq)]
struct Entry {
    score: f64,
    node: u32,
    version: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct State<'a> {
    g: &'a Graph,
    p: f64,
    selected: Vec<bool>,
    t: Vec<u32>,
}

impl State<'_> {
    fn score(&self, v: NodeId) -> f64 {
        let d = self.g.out_degree(v) as f64;
        let t = self.t[v.index()] as f64;
        let neighbor_t: u64 = self
            .g
            .successors(v)
            .iter()
            .filter(|u| !self.selected[u.index()])
            .map(|u| self.t[u.index()] as u64)
            .sum();
        d - 2.0 * t - (d - t) * t * self.p + 0.5 * t * (t - 1.0) * self.p
            - self.p * neighbor_t as f64
    }
}

pub fn gdd_selection(
    g: &Graph,
    p: f64,
    budget: Option<usize>,
) -> Result<GddSelection, CentralityError> {
    if !(0.0..1.0).contains(&p) {
        return Err(CentralityError::InvalidParameter {
            name: "gdd_p",
            value: p.to_string(),
            reason: "spreading parameter must lie in [0, 1)",
        });
    }
    let n = g.node_count();
    let budget = budget.unwrap_or(n).min(n);
    let mut st = State {
        g,
        p,
        selected: vec![false; n],
        t: vec![0; n],
    };
    let mut scores: Vec<f64> = g.nodes().map(|v| g.out_degree(v) as f64).collect();
    let mut version = vec![0u32; n];
    let mut heap: BinaryHeap<Entry> = g
        .nodes()
        .map(|v| Entry {
            score: scores[v.index()],
            node: v.0,
            version: 0,
        })
        .collect();

    let mut order = Vec::with_capacity(budget);
    let mut touched = Vec::new();
    let mut mark = vec![false; n];
    while order.len() < budget {
        let Some(top) = heap.pop() else { break };
        let s = NodeId(top.node);
        if st.selected[s.index()] || top.version != version[s.index()] {
            continue;
        }
        st.selected[s.index()] = true;
        order.push(s);

        for &v in g.predecessors(s) {
            st.t[v.index()] += 1;
        }
        touched.clear();
        for &v in g.predecessors(s) {
            for w in std::iter::once(v).chain(g.predecessors(v).iter().copied()) {
                if !st.selected[w.index()] && !mark[w.index()] {
                    mark[w.index()] = true;
                    touched.push(w);
                }
            }
        }
        for &w in &touched {
            mark[w.index()] = false;
            let sc = st.score(w);
            scores[w.index()] = sc;
            version[w.index()] += 1;
            heap.push(Entry {
                score: sc,
                node: w.0,
                version: version[w.index()],
            });
        }
    }
    Ok(GddSelection { order, scores })
}

pub fn gdd(g: &Graph, p: f64, budget: Option<usize>) -> Result<CentralityVector, CentralityError> {
    let sel = gdd_selection(g, p, budget)?;
    Ok(CentralityVector::new("gdd", sel.scores).with_param("p", p))
}

pub struct Gdd;

impl Measure for Gdd {
    fn name(&self) -> &'static str {
        "gdd"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["gdd005", "generalized-degree-discount"]
    }

    fn compute(
        &self,
        g: &Graph,
        params: &MeasureParams,
    ) -> Result<CentralityVector, CentralityError> {
        gdd(g, params.gdd_p, params.gdd_budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_center_first() {
        let g = Graph::from_edges(5, (1..5).map(|i| (0, i)), None).unwrap();
        let sel = gdd_selection(&g, 0.05, None).unwrap();
        assert_eq!(sel.order[0], NodeId(0));
        assert_eq!(sel.scores[0], 4.0);
        // leaves: d=1, t=1 -> 1 - 2 - 0 + 0 - 0
        assert_eq!(
            &sel.order[1..],
            &[NodeId(1), NodeId(2), NodeId(3), NodeId(4)]
        );
        for i in 1..5 {
            assert!((sel.scores[i] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_limits_selection() {
        let g = Graph::from_edges(5, (1..5).map(|i| (0, i)), None).unwrap();
        let sel = gdd_selection(&g, 0.05, Some(1)).unwrap();
        assert_eq!(sel.order, [NodeId(0)]);
        assert_eq!(sel.scores[0], 4.0);
        // unselected leaves carry their current discounted score
        assert!((sel.scores[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_p() {
        let g = Graph::from_arcs(2, [(0, 1)], None).unwrap();
        assert!(gdd(&g, 1.0, None).is_err());
        assert!(gdd(&g, -0.1, None).is_err());
    }

    #[test]
    fn two_hop_term_is_applied() {
        // path 0-1-2-3-4; selecting 2 raises t(1), t(3) which discounts 0 and 4
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], None).unwrap();
        let p = 0.1;
        let sel = gdd_selection(&g, p, Some(1)).unwrap();
        // all interior nodes have degree 2, lowest index wins
        assert_eq!(sel.order, [NodeId(1)]);
        // node 3: d=2, t=0, neighbors 2 (t=1) and 4 (t=0)
        assert!((sel.scores[3] - (2.0 - p)).abs() < 1e-12);
        // node 2: d=2, t=1 -> 2 - 2 - 1*1*p + 0 - p*t(3)=0
        assert!((sel.scores[2] - (-p)).abs() < 1e-12);
        // node 0: d=1, t=1 -> 1 - 2 - 0 + 0 - 0
        assert!((sel.scores[0] + 1.0).abs() < 1e-12);
    }
}
