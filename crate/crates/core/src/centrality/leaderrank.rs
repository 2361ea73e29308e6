use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::Graph;

/// LeaderRank.
///
/// A ground node is linked in both directions to every node and an undamped
/// random walk is run on the augmented graph. The ground node's stationary
/// mass is then shared equally among the real nodes, so the result sums to 1.
///
/// The walk is iterated in its lazy form `x <- (x + xP) / 2`, which has the
/// same stationary distribution and also converges when the augmented graph
/// is periodic (e.g. no arcs at all).
pub fn leaderrank(
    g: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityVector, CentralityError> {
    let n = g.node_count();
    if n == 0 {
        return Err(CentralityError::EmptyGraph("leaderrank"));
    }
    let nf = n as f64;
    // every real node gains one out-arc to the ground
    let inv_out: Vec<f64> = g
        .nodes()
        .map(|v| 1.0 / (g.out_degree(v) + 1) as f64)
        .collect();

    // ground is index n
    let mut x = vec![1.0 / nf; n + 1];
    x[n] = 0.0;
    let mut next = vec![0.0; n + 1];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let from_ground = x[n] / nf;
        let mut to_ground = 0.0;
        for v in g.nodes() {
            let i = v.index();
            let inflow: f64 = g
                .predecessors(v)
                .iter()
                .map(|u| x[u.index()] * inv_out[u.index()])
                .sum();
            next[i] = 0.5 * x[i] + 0.5 * (inflow + from_ground);
            to_ground += x[i] * inv_out[i];
        }
        next[n] = 0.5 * x[n] + 0.5 * to_ground;
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < tol {
            let share = x[n] / nf;
            let mut scores: Vec<f64> = x[..n].iter().map(|s| s + share).collect();
            let total: f64 = scores.iter().sum();
            scores.iter_mut().for_each(|s| *s /= total);
            return Ok(CentralityVector::new("leaderrank", scores).with_param("tol", tol));
        }
    }
    Err(CentralityError::NonConvergence {
        measure: "leaderrank",
        iterations: max_iter,
        residual,
    })
}

pub struct LeaderRank;

impl Measure for LeaderRank {
    fn name(&self) -> &'static str {
        "leaderrank"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["lr"]
    }

    fn compute(&self, g: &Graph, p: &MeasureParams) -> Result<CentralityVector, CentralityError> {
        leaderrank(g, p.tol, p.max_iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_scores_one() {
        let g = Graph::from_arcs(1, [], None).unwrap();
        let lr = leaderrank(&g, 1e-12, 10_000).unwrap();
        assert!((lr.scores[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_center_dominates() {
        let g = Graph::from_edges(5, (1..5).map(|i| (0, i)), None).unwrap();
        let s = leaderrank(&g, 1e-12, 10_000).unwrap().scores;
        for i in 1..5 {
            assert!(s[0] > s[i]);
            assert!((s[i] - s[1]).abs() < 1e-12);
        }
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_is_uniform() {
        let g = Graph::from_arcs(4, [], None).unwrap();
        let s = leaderrank(&g, 1e-12, 10_000).unwrap().scores;
        for v in s {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn undirected_closed_form() {
        // On a symmetric graph the augmented walk is reversible, so the
        // stationary mass of v is (d_v + 1) / (2m + 2n) and the ground holds
        // n / (2m + 2n).
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3)], None).unwrap();
        let s = leaderrank(&g, 1e-14, 100_000).unwrap().scores;
        let (n, m2) = (5.0, g.arc_count() as f64);
        let z = m2 + 2.0 * n;
        for v in g.nodes() {
            let expect = (g.out_degree(v) as f64 + 1.0) / z + (n / z) / n;
            assert!((s[v.index()] - expect).abs() < 1e-10);
        }
    }
}
