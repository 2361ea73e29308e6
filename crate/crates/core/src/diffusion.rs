//! Monte Carlo Linear Threshold diffusion.
//!
//! One run: every node draws a threshold `t ~ U[0,1)` and one `U[0,1)` per
//! entering arc, normalized so a node's entering weights sum to 1. Seeds are
//! activated, and an inactive node activates once the summed weights of arcs
//! from active predecessors strictly exceed its threshold. The run reports the
//! percentage of active nodes at the fixpoint, seeds included.
//!
//! Randomness is counter-based: the draws of node `v` in a run come from a
//! ChaCha stream keyed by the run seed with stream number `v`. Only nodes that
//! receive influence are ever sampled, and the outcome does not depend on the
//! order in which the frontier is processed. Two seed sets simulated with the
//! same run seed see the same thresholds and weights (coupling).

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::graph::{Graph, NodeId};
use crate::io::{csv_field, sig6};
use crate::rng::{derive_seed, label_hash, mix64, stream_rng};

#[derive(Debug, Error)]
pub enum DiffusionError {
    #[error("seed set `{0}` is empty")]
    EmptySeedSet(String),
    #[error("seed set `{id}` lists node `{node}` more than once")]
    DuplicateMember { id: String, node: String },
    #[error("seed set `{id}`: node id {node} out of range")]
    InvalidMember { id: String, node: usize },
    #[error("seed set `{id}`: unknown node label `{label}`")]
    UnknownLabel { id: String, label: String },
    #[error("number of runs must be at least 1")]
    ZeroRuns,
    #[error("seed-set file: {0}")]
    SeedFile(String),
}

/// How per-run generator seeds are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunSeeding {
    /// `f(master_seed, set id, run index)`: sets are simulated independently.
    #[default]
    PerSet,
    /// `f(master_seed, run index)`: every set sees the same random world in
    /// run `i`.
    Coupled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    pub runs: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub seeding: RunSeeding,
}

impl DiffusionConfig {
    pub fn new(runs: usize, master_seed: u64) -> Self {
        DiffusionConfig {
            runs,
            master_seed,
            seeding: RunSeeding::PerSet,
        }
    }

    pub fn coupled(mut self) -> Self {
        self.seeding = RunSeeding::Coupled;
        self
    }

    /// Generator seed for run `run` of the set called `set_id`.
    pub fn run_seed(&self, set_id: &str, run: u64) -> u64 {
        let key = match self.seeding {
            RunSeeding::PerSet => derive_seed(self.master_seed, "lt") ^ mix64(label_hash(set_id)),
            RunSeeding::Coupled => derive_seed(self.master_seed, "lt"),
        };
        mix64(key.wrapping_add(mix64(run)))
    }
}

/// A labeled, non-empty set of distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    pub id: String,
    pub members: Vec<NodeId>,
}

impl SeedSet {
    pub fn new(
        id: impl Into<String>,
        members: Vec<NodeId>,
        g: &Graph,
    ) -> Result<Self, DiffusionError> {
        let id = id.into();
        if members.is_empty() {
            return Err(DiffusionError::EmptySeedSet(id));
        }
        let mut seen = vec![false; g.node_count()];
        for &m in &members {
            if m.index() >= g.node_count() {
                return Err(DiffusionError::InvalidMember {
                    id,
                    node: m.index(),
                });
            }
            if std::mem::replace(&mut seen[m.index()], true) {
                return Err(DiffusionError::DuplicateMember {
                    id,
                    node: g.label(m).to_string(),
                });
            }
        }
        Ok(SeedSet { id, members })
    }

    pub fn from_labels<S: AsRef<str>>(
        id: impl Into<String>,
        labels: &[S],
        g: &Graph,
    ) -> Result<Self, DiffusionError> {
        let id = id.into();
        let members = labels
            .iter()
            .map(|l| {
                g.node_by_label(l.as_ref())
                    .ok_or_else(|| DiffusionError::UnknownLabel {
                        id: id.clone(),
                        label: l.as_ref().to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(id, members, g)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Mean spread and its standard error, both in percent of all nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadStats {
    pub mean_spread: f64,
    pub std_error: f64,
    pub runs: usize,
}

impl SpreadStats {
    /// Sample mean and `sd / sqrt(k)` of `values`, summed in order.
    pub fn from_runs(values: &[f64]) -> Self {
        let k = values.len();
        let mean = values.iter().sum::<f64>() / k as f64;
        let std_error = if k > 1 {
            let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        SpreadStats {
            mean_spread: mean,
            std_error,
            runs: k,
        }
    }
}

/// Reusable buffers for single runs.
pub struct LtSimulator<'g> {
    g: &'g Graph,
    active: Vec<bool>,
    /// NaN until the node is first reached in the current run.
    threshold: Vec<f64>,
    weight: Vec<f64>,
    received: Vec<f64>,
    touched: Vec<NodeId>,
    frontier: Vec<NodeId>,
    next: Vec<NodeId>,
    activated: Vec<NodeId>,
}

impl<'g> LtSimulator<'g> {
    pub fn new(g: &'g Graph) -> Self {
        let n = g.node_count();
        LtSimulator {
            g,
            active: vec![false; n],
            threshold: vec![f64::NAN; n],
            weight: vec![0.0; g.arc_count()],
            received: vec![0.0; n],
            touched: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
            activated: Vec::new(),
        }
    }

    fn sample_node(&mut self, v: NodeId, run_seed: u64) {
        let mut rng = stream_rng(run_seed, v.index() as u64);
        self.threshold[v.index()] = rng.random::<f64>();
        let slots = self.g.in_arc_range(v);
        let k = slots.len();
        let mut total = 0.0;
        for s in slots.clone() {
            let w: f64 = rng.random();
            self.weight[s] = w;
            total += w;
        }
        for s in slots {
            self.weight[s] = if total > 0.0 {
                self.weight[s] / total
            } else {
                1.0 / k as f64
            };
        }
    }

    /// Number of active nodes at the fixpoint.
    pub fn run_count(&mut self, seeds: &[NodeId], run_seed: u64) -> usize {
        let g = self.g;
        self.frontier.clear();
        self.activated.clear();
        for &s in seeds {
            if !self.active[s.index()] {
                self.active[s.index()] = true;
                self.activated.push(s);
                self.frontier.push(s);
            }
        }
        while !self.frontier.is_empty() {
            self.next.clear();
            for i in 0..self.frontier.len() {
                let u = self.frontier[i];
                for arc in g.out_arc_range(u) {
                    let v = g.arc_target(arc);
                    let vi = v.index();
                    if self.active[vi] {
                        continue;
                    }
                    if self.threshold[vi].is_nan() {
                        self.sample_node(v, run_seed);
                        self.touched.push(v);
                    }
                    self.received[vi] += self.weight[g.arc_in_slot(arc)];
                    if self.received[vi] > self.threshold[vi] {
                        self.active[vi] = true;
                        self.activated.push(v);
                        self.next.push(v);
                    }
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        let count = self.activated.len();

        #[cfg(debug_assertions)]
        for &v in &self.touched {
            debug_assert!(
                self.active[v.index()] || self.received[v.index()] <= self.threshold[v.index()],
                "inactive node {v} exceeds its threshold at the fixpoint"
            );
        }

        for &v in &self.activated {
            self.active[v.index()] = false;
        }
        for &v in &self.touched {
            self.threshold[v.index()] = f64::NAN;
            self.received[v.index()] = 0.0;
        }
        self.touched.clear();
        count
    }

    /// Spread of one run in percent.
    pub fn run(&mut self, seeds: &[NodeId], run_seed: u64) -> f64 {
        100.0 * self.run_count(seeds, run_seed) as f64 / self.g.node_count() as f64
    }
}

/// Spread (percent of nodes) of a single Linear Threshold run.
pub fn lt_single_run(g: &Graph, seeds: &SeedSet, rng_seed: u64) -> f64 {
    LtSimulator::new(g).run(&seeds.members, rng_seed)
}

/// Per-run spreads in run order, computed in parallel.
pub fn lt_runs(
    g: &Graph,
    seeds: &SeedSet,
    cfg: &DiffusionConfig,
) -> Result<Vec<f64>, DiffusionError> {
    if cfg.runs == 0 {
        return Err(DiffusionError::ZeroRuns);
    }
    Ok((0..cfg.runs as u64)
        .into_par_iter()
        .map_init(
            || LtSimulator::new(g),
            |sim, i| sim.run(&seeds.members, cfg.run_seed(&seeds.id, i)),
        )
        .collect())
}

pub fn lt_monte_carlo(
    g: &Graph,
    seeds: &SeedSet,
    cfg: &DiffusionConfig,
) -> Result<SpreadStats, DiffusionError> {
    Ok(SpreadStats::from_runs(&lt_runs(g, seeds, cfg)?))
}

/// One [`SpreadStats`] per set, each identical to an individual
/// [`lt_monte_carlo`] call.
pub fn lt_monte_carlo_batch(
    g: &Graph,
    sets: &[SeedSet],
    cfg: &DiffusionConfig,
) -> Result<Vec<SpreadStats>, DiffusionError> {
    sets.iter().map(|s| lt_monte_carlo(g, s, cfg)).collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Int(i64),
}

#[derive(Deserialize)]
struct SeedSetRecord {
    id: String,
    members: Vec<Label>,
}

#[derive(Serialize)]
struct SeedSetOut<'a> {
    id: &'a str,
    members: Vec<&'a str>,
}

/// Parse a JSON array of `{"id": ..., "members": [labels]}`.
pub fn parse_seed_sets(json: &str, g: &Graph) -> Result<Vec<SeedSet>, DiffusionError> {
    let records: Vec<SeedSetRecord> =
        serde_json::from_str(json).map_err(|e| DiffusionError::SeedFile(e.to_string()))?;
    records
        .into_iter()
        .map(|r| {
            let labels: Vec<String> = r
                .members
                .into_iter()
                .map(|l| match l {
                    Label::Text(s) => s,
                    Label::Int(i) => i.to_string(),
                })
                .collect();
            SeedSet::from_labels(r.id, &labels, g)
        })
        .collect()
}

pub fn load_seed_sets(path: impl AsRef<Path>, g: &Graph) -> Result<Vec<SeedSet>, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_seed_sets(&text, g)?)
}

pub fn seed_sets_to_json(sets: &[SeedSet], g: &Graph) -> String {
    let out: Vec<SeedSetOut> = sets
        .iter()
        .map(|s| SeedSetOut {
            id: &s.id,
            members: s.members.iter().map(|&m| g.label(m)).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&out).expect("serializable")
}

/// `set_id,mean_spread_pct,std_error_pct,runs` CSV.
pub fn write_spread_csv<W: Write>(
    sets: &[SeedSet],
    stats: &[SpreadStats],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "set_id,mean_spread_pct,std_error_pct,runs")?;
    for (s, st) in sets.iter().zip(stats) {
        writeln!(
            w,
            "{},{},{},{}",
            csv_field(&s.id),
            sig6(st.mean_spread),
            sig6(st.std_error),
            st.runs
        )?;
    }
    Ok(())
}
