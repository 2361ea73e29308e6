//! The spreading-potential test: sample node sets, score them with every
//! measure, simulate their spread, and compare the two with SRD.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{CentralityError, CentralityVector, MeasureParams, MeasureRegistry};
use crate::diffusion::{
    lt_monte_carlo_batch, DiffusionConfig, DiffusionError, RunSeeding, SeedSet, SpreadStats,
};
use crate::error::Error;
use crate::graph::{Graph, GroupedGraph, NodeId};
use crate::io::{csv_field, sig6, write_atomic};
use crate::rng::{derive_seed, stream_rng};
use crate::srd::{
    cross_validate, crrn, fractional_ranks, srd, CvResult, ScoreMatrix, SrdError, SrdResult,
    DEFAULT_MC_SAMPLES,
};

/// Relative tolerance under which two scores count as tied in
/// [`top_k_selection`].
pub const TOPK_TIE_TOLERANCE: f64 = 1e-12;

/// Column id of the simulated spread in the score matrix.
pub const REFERENCE_COLUMN: &str = "spread";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sample size {q} exceeds the {nodes} nodes of the graph")]
    SampleTooLarge { q: usize, nodes: usize },
    #[error("sample size must be positive")]
    EmptySample,
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("k = {k} is outside 1..={nodes}")]
    BadK { k: usize, nodes: usize },
    #[error("set `{0}` is empty")]
    EmptySet(String),
    #[error("score vector `{measure}` has {found} entries, graph has {nodes} nodes")]
    VectorLength {
        measure: String,
        found: usize,
        nodes: usize,
    },
    #[error("no measures selected")]
    NoMeasures,
    #[error("no master seed in the configuration")]
    MissingSeed,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Srd(#[from] SrdError),
}

/// How the scores of a set's members are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Mean,
    Sum,
    Median,
}

impl Aggregator {
    pub fn apply(self, values: &mut [f64]) -> f64 {
        match self {
            Aggregator::Sum => values.iter().sum(),
            Aggregator::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregator::Median => {
                values.sort_by(f64::total_cmp);
                let m = values.len() / 2;
                if values.len() % 2 == 1 {
                    values[m]
                } else {
                    (values[m - 1] + values[m]) / 2.0
                }
            }
        }
    }
}

impl std::str::FromStr for Aggregator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregator::Mean),
            "sum" => Ok(Aggregator::Sum),
            "median" => Ok(Aggregator::Median),
            other => Err(format!("unknown aggregator `{other}` (mean, sum, median)")),
        }
    }
}

/// Where the compared node sets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetSource {
    /// `n_samples` uniform samples of `sample_size` nodes.
    #[default]
    Random,
    /// One set per group of the group file.
    Groups,
}

fn default_measures() -> Vec<String> {
    MeasureRegistry::standard()
        .names()
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Edge-list path; used by the command-line driver only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    pub undirected: bool,
    /// Group CSV for [`SetSource::Groups`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<PathBuf>,
    pub sets: SetSource,
    pub n_samples: usize,
    pub sample_size: usize,
    pub runs: usize,
    pub master_seed: Option<u64>,
    pub measures: Vec<String>,
    pub params: MeasureParams,
    pub aggregator: Aggregator,
    pub tie_epsilon_reference: f64,
    pub tie_epsilon_solutions: f64,
    pub seeding: RunSeeding,
    pub folds: usize,
    pub mc_samples: usize,
    /// Also run the top-k validation with this `k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: None,
            undirected: true,
            groups: None,
            sets: SetSource::Random,
            n_samples: 21,
            sample_size: 500,
            runs: 5000,
            master_seed: None,
            measures: default_measures(),
            params: MeasureParams::default(),
            aggregator: Aggregator::Mean,
            tie_epsilon_reference: 0.005,
            tie_epsilon_solutions: 0.0,
            seeding: RunSeeding::PerSet,
            folds: 8,
            mc_samples: DEFAULT_MC_SAMPLES,
            top_k: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_json(&text)?)
    }

    pub fn seed(&self) -> Result<u64, ExperimentError> {
        self.master_seed.ok_or(ExperimentError::MissingSeed)
    }

    /// Seeds handed to each stochastic stage.
    pub fn stage_seeds(&self) -> Result<StageSeeds, ExperimentError> {
        let m = self.seed()?;
        Ok(StageSeeds {
            sample: derive_seed(m, "sample"),
            diffusion: derive_seed(m, "diffusion"),
            crrn: derive_seed(m, "crrn"),
            cv: derive_seed(m, "cv"),
            topk: derive_seed(m, "topk"),
        })
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.measures.is_empty() {
            return Err(ExperimentError::NoMeasures);
        }
        if self.sets == SetSource::Random && self.n_samples < 2 {
            return Err(ExperimentError::TooFewSamples(self.n_samples));
        }
        if self.runs == 0 {
            return Err(DiffusionError::ZeroRuns.into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSeeds {
    pub sample: u64,
    pub diffusion: u64,
    pub crrn: u64,
    pub cv: u64,
    pub topk: u64,
}

/// `n` independent uniform samples of `q` distinct nodes, ids `S1..Sn`.
/// Different sets may overlap.
pub fn sample_node_sets(
    g: &Graph,
    n: usize,
    q: usize,
    seed: u64,
) -> Result<Vec<SeedSet>, ExperimentError> {
    let nodes = g.node_count();
    if q == 0 {
        return Err(ExperimentError::EmptySample);
    }
    if q > nodes {
        return Err(ExperimentError::SampleTooLarge { q, nodes });
    }
    let key = derive_seed(seed, "sample");
    Ok((0..n)
        .map(|i| {
            let mut rng = stream_rng(key, i as u64);
            let mut idx = sample(&mut rng, nodes, q).into_vec();
            idx.sort_unstable();
            SeedSet {
                id: format!("S{}", i + 1),
                members: idx.into_iter().map(NodeId::from).collect(),
            }
        })
        .collect())
}

/// One set per non-empty group, id = group label.
pub fn group_sets(gg: &GroupedGraph) -> Vec<SeedSet> {
    gg.groups
        .iter()
        .filter(|g| !g.members.is_empty())
        .map(|g| SeedSet {
            id: g.label.clone(),
            members: g.members.clone(),
        })
        .collect()
}

/// Set-level scores of every measure, before the reference column is added.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMatrix {
    pub row_ids: Vec<String>,
    pub column_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl AggregateMatrix {
    /// Append the reference column last.
    pub fn with_reference(self, id: &str, reference: &[f64]) -> Result<ScoreMatrix, SrdError> {
        if reference.len() != self.values.len() {
            return Err(SrdError::LengthMismatch(reference.len(), self.values.len()));
        }
        let mut column_ids = self.column_ids;
        column_ids.push(id.to_string());
        let reference_index = column_ids.len() - 1;
        let values = self
            .values
            .into_iter()
            .zip(reference)
            .map(|(mut row, &r)| {
                row.push(r);
                row
            })
            .collect();
        ScoreMatrix::new(self.row_ids, column_ids, values, reference_index)
    }
}

pub fn aggregate_scores(
    sets: &[SeedSet],
    vectors: &[CentralityVector],
    aggregator: Aggregator,
) -> Result<AggregateMatrix, ExperimentError> {
    let mut buf = Vec::new();
    let mut values = Vec::with_capacity(sets.len());
    for s in sets {
        if s.members.is_empty() {
            return Err(ExperimentError::EmptySet(s.id.clone()));
        }
        let mut row = Vec::with_capacity(vectors.len());
        for v in vectors {
            buf.clear();
            for &m in &s.members {
                let x = v
                    .scores
                    .get(m.index())
                    .ok_or_else(|| ExperimentError::VectorLength {
                        measure: v.measure.clone(),
                        found: v.scores.len(),
                        nodes: m.index() + 1,
                    })?;
                buf.push(*x);
            }
            row.push(aggregator.apply(&mut buf));
        }
        values.push(row);
    }
    Ok(AggregateMatrix {
        row_ids: sets.iter().map(|s| s.id.clone()).collect(),
        column_ids: vectors.iter().map(|v| v.measure.clone()).collect(),
        values,
    })
}

/// The `k` highest-scoring nodes. Nodes tied with the `k`-th score (within
/// a relative tolerance of [`TOPK_TIE_TOLERANCE`]) compete for the remaining
/// places, which are filled uniformly at random. No randomness is used when
/// the tie class fits entirely.
pub fn top_k_selection(
    vector: &CentralityVector,
    k: usize,
    seed: u64,
) -> Result<SeedSet, ExperimentError> {
    let n = vector.scores.len();
    if k == 0 || k > n {
        return Err(ExperimentError::BadK { k, nodes: n });
    }
    let s = &vector.scores;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let cut = s[order[k - 1]];
    let tied = |x: f64| (x - cut).abs() <= TOPK_TIE_TOLERANCE * x.abs().max(cut.abs());

    let mut members: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| s[i] > cut && !tied(s[i]))
        .collect();
    let class: Vec<usize> = order.iter().copied().filter(|&i| tied(s[i])).collect();
    let need = k - members.len();
    if need == class.len() {
        members.extend(class);
    } else {
        let mut rng = stream_rng(derive_seed(seed, "topk"), 0);
        let mut picked: Vec<usize> = sample(&mut rng, class.len(), need)
            .into_iter()
            .map(|j| class[j])
            .collect();
        picked.sort_by_key(|&i| order.iter().position(|&o| o == i));
        members.extend(picked);
    }
    Ok(SeedSet {
        id: vector.measure.clone(),
        members: members.into_iter().map(NodeId::from).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImRow {
    pub measure: String,
    pub members: Vec<String>,
    pub spread: SpreadStats,
    /// 1 = largest mean spread; ties share fractional ranks.
    pub im_rank: f64,
    /// Rank of the measure by SRD, when an SRD result was supplied.
    pub sp_rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImValidation {
    pub k: usize,
    pub runs: usize,
    pub rows: Vec<ImRow>,
}

impl ImValidation {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "measure,k,mean_spread_pct,std_error_pct,runs,im_rank,sp_rank,members"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                csv_field(&r.measure),
                self.k,
                sig6(r.spread.mean_spread),
                sig6(r.spread.std_error),
                r.spread.runs,
                sig6(r.im_rank),
                r.sp_rank.map(sig6).unwrap_or_default(),
                csv_field(&r.members.join(" "))
            )?;
        }
        Ok(())
    }
}

/// Simulate the top-`k` set of every measure and rank the measures by the
/// spread they achieve. All sets share one tie-breaking seed and the same
/// coupled diffusion runs, so identical vectors give identical rows.
pub fn im_external_validation(
    g: &Graph,
    vectors: &[CentralityVector],
    k: usize,
    runs: usize,
    seed: u64,
    srd_result: Option<&SrdResult>,
) -> Result<ImValidation, ExperimentError> {
    for v in vectors {
        if v.scores.len() != g.node_count() {
            return Err(ExperimentError::VectorLength {
                measure: v.measure.clone(),
                found: v.scores.len(),
                nodes: g.node_count(),
            });
        }
    }
    let sets = vectors
        .iter()
        .map(|v| top_k_selection(v, k, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = DiffusionConfig::new(runs, derive_seed(seed, "im")).coupled();
    let stats = lt_monte_carlo_batch(g, &sets, &cfg)?;
    let neg: Vec<f64> = stats.iter().map(|s| -s.mean_spread).collect();
    let im_ranks = fractional_ranks(&neg, 0.0);
    let sp_ranks: Option<BTreeMap<&str, f64>> = srd_result.map(|r| {
        r.columns
            .iter()
            .map(String::as_str)
            .zip(r.solution_ranks())
            .collect()
    });
    let rows = vectors
        .iter()
        .zip(sets)
        .zip(stats)
        .zip(im_ranks)
        .map(|(((v, set), spread), im_rank)| ImRow {
            measure: v.measure.clone(),
            members: set
                .members
                .iter()
                .map(|&m| g.label(m).to_string())
                .collect(),
            spread,
            im_rank,
            sp_rank: sp_ranks
                .as_ref()
                .and_then(|m| m.get(v.measure.as_str()).copied()),
        })
        .collect();
    Ok(ImValidation { k, runs, rows })
}

/// Reproducibility record written next to the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub seeds: StageSeeds,
    pub nodes: usize,
    pub arcs: usize,
    pub sets: Vec<SetRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRecord {
    pub id: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub score_matrix: ScoreMatrix,
    pub spread: Vec<SpreadStats>,
    pub srd_result: SrdResult,
    /// Absent with fewer than 4 sets.
    pub cv_result: Option<CvResult>,
    pub topk: Option<ImValidation>,
    pub provenance: Provenance,
    /// Wall-clock seconds per stage. Kept out of `provenance.json` so that
    /// replays are byte-identical.
    #[serde(skip)]
    pub timings: BTreeMap<String, f64>,
}

/// Run the full test with random samples or group sets.
pub fn run_sp_experiment(
    g: &Graph,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let seeds = cfg.stage_seeds()?;
    let sets = sample_node_sets(g, cfg.n_samples, cfg.sample_size, seeds.sample)?;
    run_with_sets(g, sets, cfg)
}

/// [`run_sp_experiment`] with the group sets of `gg` instead of samples.
pub fn run_group_experiment(
    gg: &GroupedGraph,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let sets = group_sets(gg);
    if sets.len() < 2 {
        return Err(ExperimentError::TooFewSamples(sets.len()));
    }
    run_with_sets(&gg.graph, sets, cfg)
}

/// The pipeline on caller-supplied sets with the standard measures.
pub fn run_with_sets(
    g: &Graph,
    sets: Vec<SeedSet>,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    run_with_registry(g, sets, cfg, &MeasureRegistry::standard())
}

/// The pipeline with measures looked up in `registry`.
pub fn run_with_registry(
    g: &Graph,
    sets: Vec<SeedSet>,
    cfg: &ExperimentConfig,
    registry: &MeasureRegistry,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let seeds = cfg.stage_seeds()?;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    let vectors = registry.compute_many(g, &cfg.measures, &cfg.params)?;
    lap("centrality", &mut timings);
    info!("computed {} measures", vectors.len());

    let aggregate = aggregate_scores(&sets, &vectors, cfg.aggregator)?;
    let dcfg = DiffusionConfig {
        runs: cfg.runs,
        master_seed: seeds.diffusion,
        seeding: cfg.seeding,
    };
    let spread = lt_monte_carlo_batch(g, &sets, &dcfg)?;
    lap("diffusion", &mut timings);
    info!("simulated {} sets x {} runs", sets.len(), cfg.runs);

    let reference: Vec<f64> = spread.iter().map(|s| s.mean_spread).collect();
    let matrix = aggregate.with_reference(REFERENCE_COLUMN, &reference)?;
    let result = srd(
        &matrix,
        cfg.tie_epsilon_reference,
        cfg.tie_epsilon_solutions,
    );
    let result = crrn(result, cfg.mc_samples, seeds.crrn)?;
    lap("srd", &mut timings);

    let cv_result = if matrix.rows() >= 4 {
        Some(cross_validate(
            &matrix,
            cfg.folds,
            seeds.cv,
            cfg.tie_epsilon_reference,
            cfg.tie_epsilon_solutions,
        )?)
    } else {
        log::warn!("cross-validation skipped: {} sets", matrix.rows());
        None
    };
    lap("cv", &mut timings);

    let topk = match cfg.top_k {
        Some(k) => Some(im_external_validation(
            g,
            &vectors,
            k,
            cfg.runs,
            seeds.topk,
            Some(&result),
        )?),
        None => None,
    };
    lap("topk", &mut timings);

    let provenance = Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        seeds,
        nodes: g.node_count(),
        arcs: g.arc_count(),
        sets: sets
            .iter()
            .map(|s| SetRecord {
                id: s.id.clone(),
                members: s.members.iter().map(|&m| g.label(m).to_string()).collect(),
            })
            .collect(),
    };
    Ok(ExperimentReport {
        score_matrix: matrix,
        spread,
        srd_result: result,
        cv_result,
        topk,
        provenance,
        timings,
    })
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

impl ExperimentReport {
    /// The deterministic report files, name and contents.
    pub fn files(&self) -> Vec<(&'static str, Vec<u8>)> {
        let mut out = vec![
            ("matrix.csv", to_bytes(|w| self.score_matrix.write_csv(w))),
            (
                "ranking.csv",
                to_bytes(|w| self.srd_result.ranking.write_csv(w)),
            ),
            ("srd.json", json_bytes(&self.srd_result)),
            ("cv.json", json_bytes(&self.cv_result)),
        ];
        if let Some(c) = &self.srd_result.crrn {
            out.push(("crrn_cdf.csv", to_bytes(|w| c.write_cdf_csv(w))));
        }
        if let Some(t) = &self.topk {
            out.push(("topk.csv", to_bytes(|w| t.write_csv(w))));
        }
        out.push(("provenance.json", json_bytes(&self.provenance)));
        out
    }

    /// Write every report file plus `timings.json` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), Error> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, bytes) in self.files() {
            write_atomic(&dir.join(name), &bytes)?;
        }
        write_atomic(&dir.join("timings.json"), &json_bytes(&self.timings))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::toy_network;

    fn labels(g: &Graph, s: &SeedSet) -> Vec<String> {
        s.members.iter().map(|&m| g.label(m).to_string()).collect()
    }

    #[test]
    fn aggregators() {
        assert_eq!(Aggregator::Mean.apply(&mut [1.0, 2.0, 6.0]), 3.0);
        assert_eq!(Aggregator::Sum.apply(&mut [1.0, 2.0, 6.0]), 9.0);
        assert_eq!(Aggregator::Median.apply(&mut [6.0, 1.0, 2.0]), 2.0);
        assert_eq!(Aggregator::Median.apply(&mut [6.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!("SUM".parse::<Aggregator>().unwrap(), Aggregator::Sum);
        assert!("max".parse::<Aggregator>().is_err());
    }

    #[test]
    fn sampling() {
        let toy = toy_network();
        let g = &toy.graph;
        let a = sample_node_sets(g, 4, 6, 11).unwrap();
        assert_eq!(a, sample_node_sets(g, 4, 6, 11).unwrap());
        assert_eq!(a.len(), 4);
        for s in &a {
            assert_eq!(s.members.len(), 6);
            assert!(s.members.windows(2).all(|w| w[0] < w[1]));
        }
        let all = sample_node_sets(g, 2, 15, 3).unwrap();
        assert!(all.iter().all(|s| s.members.len() == 15));
        assert!(matches!(
            sample_node_sets(g, 2, 16, 3),
            Err(ExperimentError::SampleTooLarge { q: 16, nodes: 15 })
        ));
    }

    #[test]
    fn singleton_rows_equal_scores() {
        let toy = toy_network();
        let g = &toy.graph;
        let v = crate::centrality::degree_centrality(g);
        let sets: Vec<SeedSet> = g
            .nodes()
            .map(|n| SeedSet {
                id: g.label(n).into(),
                members: vec![n],
            })
            .collect();
        let m = aggregate_scores(&sets, std::slice::from_ref(&v), Aggregator::Mean).unwrap();
        for (row, s) in m.values.iter().zip(&v.scores) {
            assert_eq!(row[0], *s);
        }
    }

    #[test]
    fn topk_distinct_scores_use_no_randomness() {
        let v = CentralityVector::new("x", vec![0.1, 0.5, 0.3, 0.9, 0.2]);
        for seed in 0..5 {
            let s = top_k_selection(&v, 2, seed).unwrap();
            assert_eq!(s.members, [NodeId(3), NodeId(1)]);
        }
        assert!(top_k_selection(&v, 0, 0).is_err());
        assert!(top_k_selection(&v, 6, 0).is_err());
    }

    #[test]
    fn topk_tie_class_at_cut() {
        let v = CentralityVector::new("x", vec![5.0, 3.0, 3.0, 3.0, 1.0]);
        let s = top_k_selection(&v, 2, 9).unwrap();
        assert_eq!(s.members[0], NodeId(0));
        assert!([1, 2, 3].contains(&s.members[1].index()));
        // the whole class fits
        let s = top_k_selection(&v, 4, 9).unwrap();
        assert_eq!(s.members, [NodeId(0), NodeId(1), NodeId(2), NodeId(3)]);
    }

    #[test]
    fn toy_degree_top3_is_red() {
        let toy = toy_network();
        let v = crate::centrality::degree_centrality(&toy.graph);
        let s = top_k_selection(&v, 3, 1).unwrap();
        let mut l = labels(&toy.graph, &s);
        l.sort();
        assert_eq!(l, ["r_b", "r_m", "r_t"]);
    }

    #[test]
    fn config_json_defaults_and_unknown_fields() {
        let c = ExperimentConfig::from_json(r#"{"master_seed": 4, "runs": 10}"#).unwrap();
        assert_eq!(c.n_samples, 21);
        assert_eq!(c.sample_size, 500);
        assert_eq!(c.runs, 10);
        assert_eq!(c.tie_epsilon_reference, 0.005);
        assert_eq!(c.measures.len(), 7);
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    fn toy_config() -> ExperimentConfig {
        ExperimentConfig {
            sets: SetSource::Groups,
            runs: 400,
            master_seed: Some(7),
            measures: vec!["pagerank".into(), "harmonic".into()],
            mc_samples: 10_000,
            ..Default::default()
        }
    }

    #[test]
    fn toy_towns_pagerank_beats_harmonic() {
        let toy = toy_network();
        let r = run_group_experiment(&toy, &toy_config()).unwrap();
        assert_eq!(r.score_matrix.rows(), 5);
        assert_eq!(r.score_matrix.columns(), 3);
        let pr = r.srd_result.srd_of("pagerank").unwrap();
        let harm = r.srd_result.srd_of("harmonic").unwrap();
        assert!(pr < harm, "pagerank {pr} harmonic {harm}");
        assert!(r.cv_result.is_some());
    }

    #[test]
    fn two_samples_give_srd_zero_or_two() {
        let toy = toy_network();
        let cfg = ExperimentConfig {
            n_samples: 2,
            sample_size: 3,
            runs: 50,
            master_seed: Some(1),
            mc_samples: 10_000,
            ..Default::default()
        };
        let r = run_sp_experiment(&toy.graph, &cfg).unwrap();
        for s in &r.srd_result.srd {
            assert!([0.0, 1.0, 2.0].contains(s), "{s}");
        }
        assert!(r.cv_result.is_none());
    }

    #[test]
    fn replay_is_identical() {
        let toy = toy_network();
        let mut cfg = toy_config();
        cfg.top_k = Some(3);
        let a = run_group_experiment(&toy, &cfg).unwrap();
        let b = run_group_experiment(&toy, &cfg).unwrap();
        assert_eq!(a.files(), b.files());
        let names: Vec<_> = a.files().iter().map(|f| f.0).collect();
        assert_eq!(
            names,
            [
                "matrix.csv",
                "ranking.csv",
                "srd.json",
                "cv.json",
                "crrn_cdf.csv",
                "topk.csv",
                "provenance.json"
            ]
        );
    }

    #[test]
    fn missing_seed_is_an_error() {
        let toy = toy_network();
        let cfg = ExperimentConfig {
            master_seed: None,
            ..toy_config()
        };
        assert!(matches!(
            run_group_experiment(&toy, &cfg),
            Err(ExperimentError::MissingSeed)
        ));
    }
}
