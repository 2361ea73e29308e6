use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::Graph;

/// Core number by bucket peeling (Batagelj–Zaversnik).
///
/// Equivalent to stripping nodes of degree <= k for k = 0, 1, 2, ... and
/// labelling each node with the k at which it falls off. Isolated nodes get
/// 0, paths and stars 1, cycles 2.
pub fn kcore(g: &Graph) -> Result<CentralityVector, CentralityError> {
    if !g.is_symmetric() {
        return Err(CentralityError::NotSymmetric("kcore"));
    }
    let n = g.node_count();
    let mut deg: Vec<usize> = g.nodes().map(|v| g.out_degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // nodes sorted by degree, with bucket start offsets
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d + 1] += 1;
    }
    for d in 0..=max_deg {
        bin[d + 1] += bin[d];
    }
    let mut start = bin.clone();
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        let d = deg[v];
        pos[v] = start[d];
        order[pos[v]] = v;
        start[d] += 1;
    }

    for i in 0..n {
        let v = order[i];
        for &u in g.successors(v.into()) {
            let u = u.index();
            if deg[u] > deg[v] {
                // move u to the front of its bucket, then shrink the bucket
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    Ok(CentralityVector::new(
        "kcore",
        deg.into_iter().map(|d| d as f64).collect(),
    ))
}

pub struct KCore;

impl Measure for KCore {
    fn name(&self) -> &'static str {
        "kcore"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["k-core", "kshell", "k-shell"]
    }

    fn compute(&self, g: &Graph, _: &MeasureParams) -> Result<CentralityVector, CentralityError> {
        kcore(g)
    }
}
