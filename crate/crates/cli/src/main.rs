use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde_json::{json, Value};

use spreadpot::centrality::{
    write_wide_csv, CentralityError, CentralityVector, MeasureParams, MeasureRegistry,
};
use spreadpot::diffusion::{
    load_seed_sets, lt_monte_carlo_batch, seed_sets_to_json, write_spread_csv, DiffusionConfig,
    SeedSet,
};
use spreadpot::experiment::{
    im_external_validation, run_group_experiment, run_sp_experiment, sample_node_sets,
    top_k_selection, ExperimentConfig, ExperimentError, SetSource,
};
use spreadpot::graph::{load_edge_list, load_groups, toy_network, Graph, GroupedGraph};
use spreadpot::io::write_atomic;
use spreadpot::srd::{cross_validate, crrn, srd, ReferenceColumn, ScoreMatrix, DEFAULT_MC_SAMPLES};

mod toy;

/// Spreading-potential toolkit: centralities, Linear Threshold simulation
/// and Sum of Ranking Differences.
///
/// Spread is always reported in percent of all nodes.
#[derive(Parser, Debug)]
#[command(name = "spreadpot", version)]
struct Cli {
    /// Worker threads for simulation and permutation work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute node centralities.
    Centrality(CentralityArgs),
    /// Linear Threshold Monte Carlo spread (percent) of seed sets.
    Simulate(SimulateArgs),
    /// Draw uniform node samples.
    Sample(SampleArgs),
    /// Sum of Ranking Differences of a score matrix.
    Srd(SrdArgs),
    /// SRD plus the random-ranking permutation test.
    Crrn(CrrnArgs),
    /// Cross-validated SRD with pairwise Wilcoxon tests.
    Cv(CvArgs),
    /// Full experiment from a JSON configuration.
    Pipeline(PipelineArgs),
    /// Top-k nodes of a measure, optionally simulated.
    Topk(TopkArgs),
    /// Write the five-town example network.
    Toy(ToyArgs),
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Edge list, one `u v` or `u,v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Read each line as a single arc `u -> v`.
    #[arg(long)]
    directed: bool,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// Measure name or alias, `all`, or a comma-separated list.
    #[arg(long, default_value = "all")]
    measure: String,
    /// Parameter override `key=value` (alpha, tol, max_iter, gdd_p, gdd_budget,
    /// ltc_factor, harmonic_normalized).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Args, Debug)]
struct CentralityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Output directory; JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// JSON array of `{"id": ..., "members": [labels]}`.
    #[arg(long)]
    sets: PathBuf,
    #[arg(long, default_value_t = 5000)]
    runs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Run `i` of every set uses the same random thresholds and weights.
    #[arg(long)]
    coupled: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Number of sets.
    #[arg(long, default_value_t = 21)]
    n: usize,
    /// Nodes per set.
    #[arg(long, default_value_t = 500)]
    q: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// CSV with a header row; first column holds the row ids. `%` suffixes
    /// are ignored.
    #[arg(long)]
    matrix: PathBuf,
    /// Reference column: `last`, `first`, a header name or a 0-based index.
    #[arg(long, default_value = "last")]
    reference: String,
    /// Reference values closer than this are ranked as ties.
    #[arg(long, default_value_t = 0.005)]
    eps_ref: f64,
    /// Tie tolerance for solution columns.
    #[arg(long, default_value_t = 0.0)]
    eps_sol: f64,
}

#[derive(Args, Debug)]
struct SrdArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CrrnArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Monte Carlo permutations when no exact or normal null applies.
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    mc: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CvArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Ignored for 7 rows or fewer (leave-one-out).
    #[arg(long, default_value_t = 8)]
    folds: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed` of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TopkArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long)]
    k: usize,
    /// Simulate each top-k set and rank the measures by spread.
    #[arg(long)]
    simulate: bool,
    #[arg(long, default_value_t = 5000)]
    runs: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ToyArgs {
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(spreadpot::Error),
}

impl From<spreadpot::Error> for Failure {
    fn from(e: spreadpot::Error) -> Self {
        match e {
            spreadpot::Error::Centrality(
                e @ (CentralityError::UnknownMeasure(_)
                | CentralityError::UnknownParameter(_)
                | CentralityError::InvalidParameter { .. }),
            ) => Failure::Usage(e.to_string()),
            other => Failure::Core(other),
        }
    }
}

macro_rules! core_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::from(spreadpot::Error::from(e))
            }
        }
    )*};
}
core_from!(
    CentralityError,
    ExperimentError,
    spreadpot::srd::SrdError,
    spreadpot::diffusion::DiffusionError,
    spreadpot::graph::GraphError
);

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            warn!("could not size the thread pool: {e}");
        }
    }

    let result = match cli.command {
        Command::Centrality(a) => centrality(a),
        Command::Simulate(a) => simulate(a),
        Command::Sample(a) => sample(a),
        Command::Srd(a) => srd_cmd(a),
        Command::Crrn(a) => crrn_cmd(a),
        Command::Cv(a) => cv_cmd(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Topk(a) => topk(a),
        Command::Toy(a) => toy_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_non_convergence() { 3 } else { 2 })
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        info!("no --seed given, using {s}");
        s
    })
}

fn load_graph(a: &GraphArgs) -> Result<Graph, Failure> {
    let load = load_edge_list(&a.graph, !a.directed)?;
    if load.duplicate_edges > 0 {
        warn!(
            "{}: {} duplicate edges ignored",
            a.graph.display(),
            load.duplicate_edges
        );
    }
    info!(
        "loaded {} nodes, {} arcs from {}",
        load.graph.node_count(),
        load.graph.arc_count(),
        a.graph.display()
    );
    Ok(load.graph)
}

fn measure_params(a: &MeasureArgs) -> Result<MeasureParams, Failure> {
    let mut p = MeasureParams::default();
    for kv in &a.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--param expects KEY=VALUE, got `{kv}`")))?;
        p.set(k.trim(), v)?;
    }
    Ok(p)
}

fn measure_names(a: &MeasureArgs, reg: &MeasureRegistry) -> Result<Vec<String>, Failure> {
    if a.measure.eq_ignore_ascii_case("all") {
        return Ok(reg.names().iter().map(|s| s.to_string()).collect());
    }
    a.measure
        .split(',')
        .map(|m| Ok(reg.resolve(m)?.name().to_string()))
        .collect()
}

fn json_bytes(v: &impl serde::Serialize) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("serializable");
    b.push(b'\n');
    b
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut b = Vec::new();
    f(&mut b).expect("in-memory write");
    b
}

/// Record of how a command was invoked.
fn provenance(command: &str, seed: Option<u64>) -> Value {
    json!({
        "command": command,
        "argv": std::env::args().collect::<Vec<_>>(),
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

/// Write every file into `dir` (all contents are computed before the first
/// write), or print `doc` to stdout.
fn emit(out: Option<&Path>, files: Vec<(String, Vec<u8>)>, doc: Value) -> CmdResult {
    match out {
        Some(dir) => {
            for (name, bytes) in files {
                write_atomic(&dir.join(name), &bytes)?;
            }
            info!("wrote {}", dir.display());
        }
        None => print_json(&doc),
    }
    Ok(())
}

/// One JSON document on stdout. A closed pipe is not an error.
fn print_json(v: &impl serde::Serialize) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if serde_json::to_writer_pretty(&mut out, v).is_ok() {
        let _ = writeln!(out);
    }
}

fn centrality(a: CentralityArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let reg = MeasureRegistry::standard();
    let names = measure_names(&a.measure, &reg)?;
    let params = measure_params(&a.measure)?;
    let vectors = reg.compute_many(&g, &names, &params)?;
    let mut files: Vec<(String, Vec<u8>)> = vectors
        .iter()
        .map(|v| {
            (
                format!("{}.csv", v.measure),
                csv_bytes(|w| v.write_csv(&g, w)),
            )
        })
        .collect();
    files.push((
        "centrality.csv".into(),
        csv_bytes(|w| write_wide_csv(&g, &vectors, w)),
    ));
    files.push((
        "provenance.json".into(),
        json_bytes(&provenance("centrality", None)),
    ));
    let doc = json!({ "labels": g.labels(), "measures": vectors });
    emit(a.out.as_deref(), files, doc)
}

fn spread_json(sets: &[SeedSet], stats: &[spreadpot::diffusion::SpreadStats]) -> Value {
    sets.iter()
        .zip(stats)
        .map(|(s, st)| {
            json!({
                "set_id": s.id,
                "mean_spread_pct": st.mean_spread,
                "std_error_pct": st.std_error,
                "runs": st.runs,
            })
        })
        .collect()
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let sets = load_seed_sets(&a.sets, &g)?;
    let seed = resolve_seed(a.seed);
    let mut cfg = DiffusionConfig::new(a.runs, seed);
    if a.coupled {
        cfg = cfg.coupled();
    }
    let stats = lt_monte_carlo_batch(&g, &sets, &cfg)?;
    let prov = provenance("simulate", Some(seed));
    let files = vec![
        (
            "spread.csv".into(),
            csv_bytes(|w| write_spread_csv(&sets, &stats, w)),
        ),
        ("provenance.json".into(), json_bytes(&prov)),
    ];
    let doc = json!({ "seed": seed, "config": cfg, "spread": spread_json(&sets, &stats) });
    emit(a.out.as_deref(), files, doc)
}

fn sample(a: SampleArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let seed = resolve_seed(a.seed);
    let sets = sample_node_sets(&g, a.n, a.q, seed)?;
    let text = seed_sets_to_json(&sets, &g);
    let files = vec![
        ("sets.json".into(), format!("{text}\n").into_bytes()),
        (
            "provenance.json".into(),
            json_bytes(&provenance("sample", Some(seed))),
        ),
    ];
    let sets_value: Value = serde_json::from_str(&text).expect("valid json");
    emit(
        a.out.as_deref(),
        files,
        json!({ "seed": seed, "sets": sets_value }),
    )
}

fn load_matrix(a: &MatrixArgs) -> Result<ScoreMatrix, Failure> {
    let reference: ReferenceColumn = a.reference.parse().expect("infallible");
    let m = ScoreMatrix::load_csv(&a.matrix, &reference)?;
    info!(
        "matrix {} x {}, reference `{}`",
        m.rows(),
        m.columns(),
        m.column_ids[m.reference]
    );
    Ok(m)
}

fn srd_cmd(a: SrdArgs) -> CmdResult {
    let m = load_matrix(&a.matrix)?;
    let r = srd(&m, a.matrix.eps_ref, a.matrix.eps_sol);
    let files = vec![
        ("srd.json".into(), json_bytes(&r)),
        ("ranking.csv".into(), csv_bytes(|w| r.ranking.write_csv(w))),
        (
            "provenance.json".into(),
            json_bytes(&provenance("srd", None)),
        ),
    ];
    emit(
        a.out.as_deref(),
        files,
        serde_json::to_value(&r).expect("serializable"),
    )
}

fn crrn_cmd(a: CrrnArgs) -> CmdResult {
    let m = load_matrix(&a.matrix)?;
    let seed = resolve_seed(a.seed);
    let r = crrn(srd(&m, a.matrix.eps_ref, a.matrix.eps_sol), a.mc, seed)?;
    let c = r.crrn.as_ref().expect("attached");
    let files = vec![
        ("crrn.json".into(), json_bytes(&r)),
        ("crrn_cdf.csv".into(), csv_bytes(|w| c.write_cdf_csv(w))),
        (
            "provenance.json".into(),
            json_bytes(&provenance("crrn", Some(seed))),
        ),
    ];
    let mut doc = serde_json::to_value(&r).expect("serializable");
    doc["seed"] = json!(seed);
    emit(a.out.as_deref(), files, doc)
}

fn cv_cmd(a: CvArgs) -> CmdResult {
    let m = load_matrix(&a.matrix)?;
    let seed = resolve_seed(a.seed);
    let r = cross_validate(&m, a.folds, seed, a.matrix.eps_ref, a.matrix.eps_sol)?;
    let files = vec![
        ("cv.json".into(), json_bytes(&r)),
        (
            "provenance.json".into(),
            json_bytes(&provenance("cv", Some(seed))),
        ),
    ];
    let mut doc = serde_json::to_value(&r).expect("serializable");
    doc["seed"] = json!(seed);
    emit(a.out.as_deref(), files, doc)
}

fn pipeline(a: PipelineArgs) -> CmdResult {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if a.seed.is_some() || cfg.master_seed.is_none() {
        cfg.master_seed = Some(resolve_seed(a.seed));
    }
    // relative paths in the config are relative to the config file
    let base = a.config.parent().unwrap_or(Path::new("."));
    let graph_path = match &cfg.graph {
        Some(p) => base.join(p),
        None => return Err(ExperimentError::Config("`graph` is required".into()).into()),
    };
    let g = load_graph(&GraphArgs {
        graph: graph_path,
        directed: !cfg.undirected,
    })?;
    let report = match cfg.sets {
        SetSource::Random => run_sp_experiment(&g, &cfg)?,
        SetSource::Groups => {
            let path = match &cfg.groups {
                Some(p) => base.join(p),
                None => {
                    return Err(ExperimentError::Config(
                        "`groups` is required for group sets".into(),
                    )
                    .into())
                }
            };
            let groups = load_groups(&path, &g)?;
            run_group_experiment(&GroupedGraph { graph: g, groups }, &cfg)?
        }
    };
    match a.out {
        Some(dir) => {
            report.write_dir(&dir)?;
            info!("wrote {}", dir.display());
        }
        None => print_json(&report),
    }
    Ok(())
}

fn topk(a: TopkArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let reg = MeasureRegistry::standard();
    let names = measure_names(&a.measure, &reg)?;
    let params = measure_params(&a.measure)?;
    let vectors: Vec<CentralityVector> = reg.compute_many(&g, &names, &params)?;
    let seed = resolve_seed(a.seed);
    let prov = provenance("topk", Some(seed));
    if a.simulate {
        let v = im_external_validation(&g, &vectors, a.k, a.runs, seed, None)?;
        let files = vec![
            ("topk.csv".into(), csv_bytes(|w| v.write_csv(w))),
            ("topk.json".into(), json_bytes(&v)),
            ("provenance.json".into(), json_bytes(&prov)),
        ];
        let mut doc = serde_json::to_value(&v).expect("serializable");
        doc["seed"] = json!(seed);
        emit(a.out.as_deref(), files, doc)
    } else {
        let sets = vectors
            .iter()
            .map(|v| top_k_selection(v, a.k, seed))
            .collect::<Result<Vec<_>, _>>()?;
        let text = seed_sets_to_json(&sets, &g);
        let files = vec![
            ("sets.json".into(), format!("{text}\n").into_bytes()),
            ("provenance.json".into(), json_bytes(&prov)),
        ];
        let sets_value: Value = serde_json::from_str(&text).expect("valid json");
        emit(
            a.out.as_deref(),
            files,
            json!({ "seed": seed, "k": a.k, "sets": sets_value }),
        )
    }
}

fn toy_cmd(a: ToyArgs) -> CmdResult {
    let toy = toy_network();
    let files = vec![
        (
            "toy_edges.txt".to_string(),
            csv_bytes(|w| toy.graph.write_edge_list(w, true)),
        ),
        (
            "toy_groups.csv".to_string(),
            csv_bytes(|w| toy.write_groups(w)),
        ),
        (
            "toy_expected.csv".to_string(),
            toy::expected_csv().into_bytes(),
        ),
        (
            "toy_towns.json".to_string(),
            toy::town_sets_json(&toy).into_bytes(),
        ),
        (
            "toy_pipeline.json".to_string(),
            toy::pipeline_config().into_bytes(),
        ),
    ];
    emit(Some(&a.out), files, Value::Null)
}
