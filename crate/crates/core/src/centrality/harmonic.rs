use rayon::prelude::*;

use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::{Graph, NodeId};

/// Sum of reciprocal BFS distances from each node along out-arcs; unreachable
/// nodes contribute 0. With `normalized`, divided by `n - 1`.
pub fn harmonic(g: &Graph, normalized: bool) -> CentralityVector {
    let n = g.node_count();
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::with_capacity(n)),
            |(dist, queue), s| {
                let total = bfs_reciprocal_sum(g, NodeId::from(s), dist, queue);
                if normalized && n > 1 {
                    total / (n - 1) as f64
                } else {
                    total
                }
            },
        )
        .collect();
    let v = CentralityVector::new("harmonic", scores);
    v.with_param("normalized", if normalized { 1.0 } else { 0.0 })
}

fn bfs_reciprocal_sum(g: &Graph, s: NodeId, dist: &mut [u32], queue: &mut Vec<NodeId>) -> f64 {
    queue.clear();
    queue.push(s);
    dist[s.index()] = 0;
    let mut head = 0;
    // number of nodes found at each distance
    let mut per_level: Vec<u64> = Vec::new();
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = dist[u.index()];
        for &v in g.successors(u) {
            if dist[v.index()] == u32::MAX {
                let dv = du + 1;
                dist[v.index()] = dv;
                if per_level.len() < dv as usize {
                    per_level.push(0);
                }
                per_level[dv as usize - 1] += 1;
                queue.push(v);
            }
        }
    }
    for &v in queue.iter() {
        dist[v.index()] = u32::MAX;
    }
    per_level
        .iter()
        .enumerate()
        .map(|(d, &c)| c as f64 / (d + 1) as f64)
        .sum()
}

pub struct Harmonic;

impl Measure for Harmonic {
    fn name(&self) -> &'static str {
        "harmonic"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["harm"]
    }

    fn compute(&self, g: &Graph, p: &MeasureParams) -> Result<CentralityVector, CentralityError> {
        Ok(harmonic(g, p.harmonic_normalized))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_pair_scores_zero() {
        let g = Graph::from_arcs(2, [], None).unwrap();
        assert_eq!(harmonic(&g, true).scores, [0.0, 0.0]);
        assert_eq!(harmonic(&g, false).scores, [0.0, 0.0]);
    }

    #[test]
    fn path_raw_and_normalized() {
        // 0 - 1 - 2 - 3
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)], None).unwrap();
        let raw = harmonic(&g, false).scores;
        assert!((raw[0] - (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-15);
        assert!((raw[1] - 2.5).abs() < 1e-15);
        let norm = harmonic(&g, true).scores;
        assert!((norm[1] - 2.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn directed_follows_out_arcs() {
        let g = Graph::from_arcs(3, [(0, 1), (1, 2)], None).unwrap();
        let raw = harmonic(&g, false).scores;
        assert_eq!(raw, [1.5, 1.0, 0.0]);
    }
}
