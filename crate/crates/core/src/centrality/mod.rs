//! Node-level influence proxies.
//!
//! Each measure implements [`Measure`] and is looked up by name in a
//! [`MeasureRegistry`]. The standard registry holds, in this order:
//! `pagerank`, `kcore`, `leaderrank`, `harmonic`, `gdd`, `ltc`, `degree`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::io::{csv_field, sig6};

mod degree;
mod gdd;
mod harmonic;
mod kcore;
mod leaderrank;
mod ltc;
mod pagerank;

pub use degree::{degree_centrality, Degree};
pub use gdd::{gdd, gdd_selection, Gdd, GddSelection};
pub use harmonic::{harmonic, Harmonic};
pub use kcore::{kcore, KCore};
pub use leaderrank::{leaderrank, LeaderRank};
pub use ltc::{ltc, Ltc};
pub use pagerank::{pagerank, PageRank};

#[derive(Debug, Error)]
pub enum CentralityError {
    #[error("{measure} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        measure: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("{0} requires an arc-symmetric (undirected) graph")]
    NotSymmetric(&'static str),
    #[error("{0} requires at least one node")]
    EmptyGraph(&'static str),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
}

impl CentralityError {
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, CentralityError::NonConvergence { .. })
    }
}

/// Tunable parameters for all measures. Missing fields take the defaults
/// used in the study: PageRank damping 0.8, GDD spreading parameter 0.05,
/// LTC threshold factor 0.7, normalized harmonic centrality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureParams {
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub gdd_p: f64,
    /// Number of greedy GDD selections; `None` orders every node.
    pub gdd_budget: Option<usize>,
    pub ltc_factor: f64,
    pub harmonic_normalized: bool,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            alpha: 0.8,
            tol: 1e-10,
            max_iter: 10_000,
            gdd_p: 0.05,
            gdd_budget: None,
            ltc_factor: 0.7,
            harmonic_normalized: true,
        }
    }
}

impl MeasureParams {
    /// Apply a `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CentralityError> {
        fn num<T: std::str::FromStr>(name: &'static str, v: &str) -> Result<T, CentralityError> {
            v.trim()
                .parse()
                .map_err(|_| CentralityError::InvalidParameter {
                    name,
                    value: v.to_string(),
                    reason: "not a number",
                })
        }
        match key {
            "alpha" => self.alpha = num("alpha", value)?,
            "tol" => self.tol = num("tol", value)?,
            "max_iter" => self.max_iter = num("max_iter", value)?,
            "gdd_p" | "p" => self.gdd_p = num("gdd_p", value)?,
            "gdd_budget" | "k" => self.gdd_budget = Some(num("gdd_budget", value)?),
            "ltc_factor" | "factor" => self.ltc_factor = num("ltc_factor", value)?,
            "harmonic_normalized" | "normalized" => {
                self.harmonic_normalized = match value.trim() {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => {
                        return Err(CentralityError::InvalidParameter {
                            name: "harmonic_normalized",
                            value: value.to_string(),
                            reason: "expected true or false",
                        })
                    }
                }
            }
            other => return Err(CentralityError::UnknownParameter(other.to_string())),
        }
        Ok(())
    }

    /// Defaults overridden by every entry of `map`.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CentralityError> {
        let mut p = MeasureParams::default();
        for (k, v) in map {
            p.set(k, v)?;
        }
        Ok(p)
    }
}

/// Per-node scores of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector {
    pub measure: String,
    pub params: BTreeMap<String, f64>,
    pub scores: Vec<f64>,
}

impl CentralityVector {
    pub fn new(measure: &str, scores: Vec<f64>) -> Self {
        debug_assert!(scores.iter().all(|s| s.is_finite()));
        CentralityVector {
            measure: measure.to_string(),
            params: BTreeMap::new(),
            scores,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `node_label,score` CSV.
    pub fn write_csv<W: Write>(&self, g: &Graph, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_label,score")?;
        for v in g.nodes() {
            writeln!(
                w,
                "{},{}",
                csv_field(g.label(v)),
                sig6(self.scores[v.index()])
            )?;
        }
        Ok(())
    }
}

/// One column per measure, one row per node.
pub fn write_wide_csv<W: Write>(
    g: &Graph,
    vectors: &[CentralityVector],
    mut w: W,
) -> std::io::Result<()> {
    write!(w, "node_label")?;
    for v in vectors {
        write!(w, ",{}", csv_field(&v.measure))?;
    }
    writeln!(w)?;
    for node in g.nodes() {
        write!(w, "{}", csv_field(g.label(node)))?;
        for v in vectors {
            write!(w, ",{}", sig6(v.scores[node.index()]))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// A node-level influence measure.
pub trait Measure: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    /// Alternative spellings accepted by [`MeasureRegistry::get`].
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn compute(
        &self,
        g: &Graph,
        params: &MeasureParams,
    ) -> Result<CentralityVector, CentralityError>;
}

/// Name-keyed collection of measures. Iteration follows registration order.
pub struct MeasureRegistry {
    measures: Vec<Box<dyn Measure>>,
}

impl Default for MeasureRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl MeasureRegistry {
    pub fn empty() -> Self {
        MeasureRegistry {
            measures: Vec::new(),
        }
    }

    /// The seven built-in measures.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(PageRank));
        r.register(Box::new(KCore));
        r.register(Box::new(LeaderRank));
        r.register(Box::new(Harmonic));
        r.register(Box::new(Gdd));
        r.register(Box::new(Ltc));
        r.register(Box::new(Degree));
        r
    }

    /// Add a measure, replacing any existing one with the same name.
    pub fn register(&mut self, m: Box<dyn Measure>) {
        match self.measures.iter().position(|x| x.name() == m.name()) {
            Some(i) => self.measures[i] = m,
            None => self.measures.push(m),
        }
    }

    /// Case-insensitive lookup by name or alias.
    pub fn get(&self, name: &str) -> Option<&dyn Measure> {
        let key = name.trim().to_ascii_lowercase();
        self.measures
            .iter()
            .find(|m| m.name() == key || m.aliases().iter().any(|a| *a == key))
            .map(|m| m.as_ref())
    }

    pub fn resolve(&self, name: &str) -> Result<&dyn Measure, CentralityError> {
        self.get(name)
            .ok_or_else(|| CentralityError::UnknownMeasure(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.measures.iter().map(|m| m.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Measure> {
        self.measures.iter().map(|m| m.as_ref())
    }

    /// Compute the named measures in the given order.
    pub fn compute_many(
        &self,
        g: &Graph,
        names: &[String],
        params: &MeasureParams,
    ) -> Result<Vec<CentralityVector>, CentralityError> {
        names
            .iter()
            .map(|n| self.resolve(n)?.compute(g, params))
            .collect()
    }
}

/// Every standard measure with `params`, in registry order.
pub fn all_measures(
    g: &Graph,
    params: &MeasureParams,
) -> Result<Vec<CentralityVector>, CentralityError> {
    MeasureRegistry::standard()
        .iter()
        .map(|m| m.compute(g, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::toy_network;

    #[test]
    fn all_measures_on_toy() {
        let toy = toy_network();
        let vs = all_measures(&toy.graph, &MeasureParams::default()).unwrap();
        assert_eq!(vs.len(), 7);
        assert!(vs.iter().all(|v| v.len() == 15));
        let names: Vec<_> = vs.iter().map(|v| v.measure.as_str()).collect();
        assert_eq!(
            names,
            [
                "pagerank",
                "kcore",
                "leaderrank",
                "harmonic",
                "gdd",
                "ltc",
                "degree"
            ]
        );
        let deg = vs.iter().find(|v| v.measure == "degree").unwrap();
        for v in toy.graph.nodes() {
            assert_eq!(deg.scores[v.index()], toy.graph.out_degree(v) as f64);
        }
    }

    #[test]
    fn empty_map_gives_defaults() {
        let p = MeasureParams::from_map(&BTreeMap::new()).unwrap();
        assert_eq!(p, MeasureParams::default());
        assert_eq!(p.alpha, 0.8);
        assert_eq!(p.gdd_p, 0.05);
        assert_eq!(p.ltc_factor, 0.7);
        assert!(p.harmonic_normalized);
    }

    #[test]
    fn param_overrides() {
        let mut m = BTreeMap::new();
        m.insert("alpha".to_string(), "0.85".to_string());
        m.insert("normalized".to_string(), "false".to_string());
        let p = MeasureParams::from_map(&m).unwrap();
        assert_eq!(p.alpha, 0.85);
        assert!(!p.harmonic_normalized);
        let mut p = MeasureParams::default();
        assert!(matches!(
            p.set("beta", "1"),
            Err(CentralityError::UnknownParameter(_))
        ));
        assert!(p.set("alpha", "x").is_err());
    }

    #[test]
    fn registry_lookup() {
        let r = MeasureRegistry::standard();
        assert_eq!(r.get("PR").unwrap().name(), "pagerank");
        assert_eq!(r.get("k-core").unwrap().name(), "kcore");
        assert_eq!(r.get("LTC07").unwrap().name(), "ltc");
        assert!(r.get("hits").is_none());
        assert!(matches!(
            r.resolve("hits"),
            Err(CentralityError::UnknownMeasure(_))
        ));
    }

    struct Constant;
    impl Measure for Constant {
        fn name(&self) -> &'static str {
            "degree"
        }
        fn compute(
            &self,
            g: &Graph,
            _: &MeasureParams,
        ) -> Result<CentralityVector, CentralityError> {
            Ok(CentralityVector::new("degree", vec![1.0; g.node_count()]))
        }
    }

    #[test]
    fn register_replaces_same_name() {
        let mut r = MeasureRegistry::standard();
        r.register(Box::new(Constant));
        assert_eq!(r.names().len(), 7);
        let g = toy_network().graph;
        let v = r
            .resolve("degree")
            .unwrap()
            .compute(&g, &MeasureParams::default())
            .unwrap();
        assert!(v.scores.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn csv_output() {
        let toy = toy_network();
        let v = degree_centrality(&toy.graph);
        let mut buf = Vec::new();
        v.write_csv(&toy.graph, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("node_label,score"));
        assert_eq!(s.lines().nth(1), Some("r_t,6"));
        assert_eq!(s.lines().count(), 16);
    }
}
