use super::{CentralityError, CentralityVector, Measure, MeasureParams};
use crate::graph::Graph;

pub fn degree_centrality(g: &Graph) -> CentralityVector {
    let scores = g.nodes().map(|v| g.out_degree(v) as f64).collect();
    CentralityVector::new("degree", scores)
}

pub struct Degree;

impl Measure for Degree {
    fn name(&self) -> &'static str {
        "degree"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["deg"]
    }

    fn compute(&self, g: &Graph, _: &MeasureParams) -> Result<CentralityVector, CentralityError> {
        Ok(degree_centrality(g))
    }
}
