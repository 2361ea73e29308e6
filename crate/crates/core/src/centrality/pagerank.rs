use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::Graph;

/// PageRank by power iteration.
///
/// A walker follows a uniformly chosen out-arc with probability `alpha` and
/// teleports to a uniform node otherwise; sink nodes teleport with
/// probability one. Iterates until the L1 change drops below `tol`.
pub fn pagerank(
    g: &Graph,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityVector, CentralityError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CentralityError::InvalidParameter {
            name: "alpha",
            value: alpha.to_string(),
            reason: "damping must lie in (0, 1)",
        });
    }
    let n = g.node_count();
    if n == 0 {
        return Err(CentralityError::EmptyGraph("pagerank"));
    }
    let nf = n as f64;
    let inv_out: Vec<f64> = g
        .nodes()
        .map(|v| match g.out_degree(v) {
            0 => 0.0,
            d => 1.0 / d as f64,
        })
        .collect();

    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let dangling: f64 = g
            .nodes()
            .filter(|&v| g.out_degree(v) == 0)
            .map(|v| x[v.index()])
            .sum();
        let base = (1.0 - alpha) / nf + alpha * dangling / nf;
        for v in g.nodes() {
            let inflow: f64 = g
                .predecessors(v)
                .iter()
                .map(|u| x[u.index()] * inv_out[u.index()])
                .sum();
            next[v.index()] = base + alpha * inflow;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < tol {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|s| *s /= total);
            return Ok(CentralityVector::new("pagerank", x)
                .with_param("alpha", alpha)
                .with_param("tol", tol));
        }
    }
    Err(CentralityError::NonConvergence {
        measure: "pagerank",
        iterations: max_iter,
        residual,
    })
}

pub struct PageRank;

impl Measure for PageRank {
    fn name(&self) -> &'static str {
        "pagerank"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["pr"]
    }

    fn compute(&self, g: &Graph, p: &MeasureParams) -> Result<CentralityVector, CentralityError> {
        pagerank(g, p.alpha, p.tol, p.max_iter)
    }
}
