use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use mcrt::experiments::{
    degree_tail_experiment, energy_comparison_experiment, green_growth_experiment, holder_exponent_experiment,
    max_edge_scaling_experiment, mesh_refinement_study, DegreeTailParams, EnergyParams, ExperimentReport,
    GreenGrowthParams, HolderParams, MaxEdgeParams, MeshRefinementParams, TestFunction,
};
use mcrt::io::{
    embedding_svg, graph_summary, loglog_svg, read_edge_list, read_path_binary, read_path_csv, write_atomic,
    write_edge_list, write_embedding_csv, write_harmonic_csv, write_path_binary, write_path_csv, write_trial_log,
    PATH_MAGIC,
};
use mcrt::laplace::{effective_resistance, green_diag, harmonic_extend, tutte_embed_window, Embedding};
use mcrt::map::{build_graph, cell_minima, MatedCrtGraph};
use mcrt::path::{sample_brownian_pair, sample_lattice_walk, PathKind, PathPair};
use mcrt::planar::planar_structure;
use mcrt::solver::{SolverOptions, DEFAULT_TOLERANCE};
use mcrt::walk::{
    exit_time_mc, expected_exit_times, hitting_trials, return_probability, summarize, Estimate, ReturnMethod, Role,
    DEFAULT_MAX_STEPS, EXACT_RETURN_MAX_VERTICES,
};
use mcrt::window::central_vertex;
use mcrt::McrtError;
use serde::Serialize;

use crate::args::{
    BuildArgs, EmbedArgs, ExperimentArgs, GraphArgs, PathArgs, SampleArgs, SolveArgs, WalkArgs,
};
use crate::config::Config;
use crate::error::{usage, CliError};

pub const DEFAULT_GAMMA: f64 = std::f64::consts::SQRT_2;
pub const DEFAULT_EPSILON: f64 = 1.0 / 64.0;
pub const DEFAULT_HORIZON: f64 = 1.0;
/// Steps of a lattice walk when no horizon is given.
pub const DEFAULT_LATTICE_STEPS: f64 = 1024.0;
pub const MESH_PER_EPSILON: f64 = 64.0;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_RETURN_STEPS: usize = 100;

type CliResult<T> = Result<T, CliError>;

fn domain(msg: impl Into<String>) -> CliError {
    CliError::Core(McrtError::Domain(msg.into()))
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(domain(format!("{name} must be positive and finite, got {x}")))
    }
}

fn parse_kind(s: &str) -> CliResult<PathKind> {
    match s {
        "brownian" => Ok(PathKind::Brownian),
        "lattice" => Ok(PathKind::Lattice),
        other => Err(usage(format!("kind must be brownian or lattice, got {other:?}"))),
    }
}

/// Writes `bytes` to `dest` atomically, or to stdout when there is no destination.
fn emit(dest: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match dest {
        Some(p) => write_atomic(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy)]
struct PathOpts {
    gamma: f64,
    horizon: f64,
    mesh: Option<f64>,
    seed: u64,
    kind: PathKind,
}

fn path_opts(a: &PathArgs, cfg: &Config) -> CliResult<PathOpts> {
    let kind = match cfg.string(a.kind.clone(), "kind")? {
        Some(k) => parse_kind(&k)?,
        None => PathKind::Brownian,
    };
    let gamma = cfg.f64(a.gamma, "gamma")?.unwrap_or(DEFAULT_GAMMA);
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(domain(format!("gamma must lie in (0, 2), got {gamma}")));
    }
    let default_horizon = match kind {
        PathKind::Brownian => DEFAULT_HORIZON,
        PathKind::Lattice => DEFAULT_LATTICE_STEPS,
    };
    let horizon = positive("horizon", cfg.f64(a.horizon, "horizon")?.unwrap_or(default_horizon))?;
    let mesh = cfg.f64(a.mesh, "mesh")?.map(|m| positive("mesh", m)).transpose()?;
    let seed = cfg.u64(a.seed, "seed")?.unwrap_or(0);
    Ok(PathOpts {
        gamma,
        horizon,
        mesh,
        seed,
        kind,
    })
}

fn default_epsilon(kind: PathKind) -> f64 {
    match kind {
        PathKind::Brownian => DEFAULT_EPSILON,
        PathKind::Lattice => 1.0,
    }
}

fn sample_path(po: &PathOpts, epsilon: f64) -> CliResult<PathPair> {
    match po.kind {
        PathKind::Brownian => {
            let mesh = po.mesh.unwrap_or(epsilon / MESH_PER_EPSILON);
            Ok(sample_brownian_pair(po.gamma, po.horizon, mesh, po.seed)?)
        }
        PathKind::Lattice => {
            if po.mesh.is_some_and(|m| m != 1.0) {
                return Err(domain("lattice walks have mesh 1"));
            }
            let steps = po.horizon.round();
            if (steps - po.horizon).abs() > 1e-9 || steps < 1.0 {
                return Err(domain(format!("lattice horizon must be a whole number of steps, got {}", po.horizon)));
            }
            Ok(sample_lattice_walk(steps as usize, po.seed)?)
        }
    }
}

fn read_path_file(p: &Path) -> CliResult<PathPair> {
    let mut bytes = Vec::new();
    File::open(p)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(PATH_MAGIC) {
        Ok(read_path_binary(bytes.as_slice())?)
    } else {
        Ok(read_path_csv(BufReader::new(bytes.as_slice()))?)
    }
}

/// A map together with the parameters it was generated from.
struct LoadedGraph {
    graph: MatedCrtGraph,
    gamma: f64,
    epsilon: f64,
    seed: u64,
}

fn load_graph(a: &GraphArgs, cfg: &Config) -> CliResult<LoadedGraph> {
    let po = path_opts(&a.sample, cfg)?;
    let epsilon = cfg.f64(a.epsilon, "epsilon")?;
    if let Some(e) = epsilon {
        positive("epsilon", e)?;
    }
    let graph_file = cfg.path(a.graph.clone(), "graph")?;
    let path_file = if graph_file.is_none() { cfg.path(a.path.clone(), "path")? } else { None };
    if let Some(g) = graph_file {
        let graph = read_edge_list(BufReader::new(File::open(&g)?))?;
        return Ok(LoadedGraph {
            graph,
            gamma: po.gamma,
            epsilon: epsilon.unwrap_or(default_epsilon(po.kind)),
            seed: po.seed,
        });
    }
    let (pair, epsilon) = match path_file {
        Some(p) => {
            let pair = read_path_file(&p)?;
            let e = epsilon.unwrap_or(default_epsilon(pair.kind));
            (pair, e)
        }
        None => {
            let e = epsilon.unwrap_or(default_epsilon(po.kind));
            (sample_path(&po, e)?, e)
        }
    };
    let graph = build_graph(&cell_minima(&pair, epsilon)?)?;
    Ok(LoadedGraph {
        graph,
        gamma: pair.gamma,
        epsilon,
        seed: pair.seed,
    })
}

/// Converts a 1-based vertex id, or picks the central interior vertex.
fn vertex_or_center(v: Option<usize>, graph: &MatedCrtGraph) -> CliResult<usize> {
    match v {
        None => Ok(central_vertex(graph)?),
        Some(v) if v >= 1 && v <= graph.count() => Ok(v - 1),
        Some(v) => Err(domain(format!("vertex {v} is not in 1..={}", graph.count()))),
    }
}

fn solver_options(tolerance: Option<f64>) -> CliResult<SolverOptions> {
    let t = positive("tolerance", tolerance.unwrap_or(DEFAULT_TOLERANCE))?;
    Ok(SolverOptions::with_tolerance(t))
}

pub fn sample(a: SampleArgs, cfg: &Config) -> CliResult<()> {
    let po = path_opts(&a.sample, cfg)?;
    let out = cfg.path(a.out, "out")?;
    let pair = sample_path(&po, DEFAULT_EPSILON)?;
    let mut buf = Vec::new();
    let binary = out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "bin"));
    if binary {
        write_path_binary(&pair, &mut buf)?;
    } else {
        write_path_csv(&pair, &mut buf)?;
    }
    emit(out.as_deref(), &buf)
}

pub fn build(a: BuildArgs, cfg: &Config) -> CliResult<()> {
    let out = cfg.path(a.out, "out")?;
    let summary_path = cfg.path(a.summary, "summary")?;
    let g = load_graph(&a.graph, cfg)?;
    let mut csv = Vec::new();
    write_edge_list(&g.graph, &mut csv)?;
    let summary = json(&graph_summary(&g.graph, g.seed, g.gamma, g.epsilon))?;
    match &out {
        Some(p) => {
            write_atomic(p, &csv)?;
            emit(summary_path.as_deref(), &summary)
        }
        None => {
            emit(None, &csv)?;
            if let Some(p) = &summary_path {
                write_atomic(p, &summary)?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ScalarResult {
    task: &'static str,
    /// 1-based.
    source: usize,
    sink_size: usize,
    value: f64,
    tolerance: f64,
}

fn read_boundary_values(p: &Path, n: usize) -> CliResult<BTreeMap<usize, f64>> {
    #[derive(serde::Deserialize)]
    struct Row {
        vertex: usize,
        value: f64,
    }
    let mut out = BTreeMap::new();
    let mut rdr = csv::Reader::from_reader(File::open(p)?);
    for row in rdr.deserialize() {
        let row: Row = row.map_err(|e| CliError::Core(McrtError::Parse(e.to_string())))?;
        if row.vertex == 0 || row.vertex > n {
            return Err(domain(format!("boundary vertex {} is not in 1..={n}", row.vertex)));
        }
        if out.insert(row.vertex - 1, row.value).is_some() {
            return Err(CliError::Core(McrtError::Parse(format!("vertex {} listed twice", row.vertex))));
        }
    }
    Ok(out)
}

fn embed_graph(graph: &MatedCrtGraph, opts: &SolverOptions) -> CliResult<Embedding> {
    let planar = planar_structure(graph)?;
    Ok(tutte_embed_window(graph, &planar, opts)?)
}

pub fn solve(a: SolveArgs, cfg: &Config) -> CliResult<()> {
    let task = cfg.string(a.task, "task")?.unwrap_or_else(|| "resistance".into());
    if !["resistance", "green", "harmonic"].contains(&task.as_str()) {
        return Err(usage(format!("task must be resistance, green or harmonic, got {task:?}")));
    }
    let opts = solver_options(cfg.f64(a.tolerance, "tolerance")?)?;
    let out = cfg.path(a.out, "out")?;
    let boundary_file = cfg.path(a.boundary_values, "boundary_values")?;
    let function = match cfg.string(a.function, "function")? {
        Some(f) => f.parse::<TestFunction>()?,
        None => TestFunction::ReZ,
    };
    let source = cfg.usize(a.source, "source")?;
    let g = load_graph(&a.graph, cfg)?;
    let graph = &g.graph;
    let net = graph.network();
    if task == "harmonic" {
        let (data, embedding) = match boundary_file {
            Some(p) => (read_boundary_values(&p, graph.count())?, None),
            None => {
                let emb = embed_graph(graph, &opts)?;
                let data = emb.pinned.iter().map(|&v| (v, function.eval(emb.coords[v]))).collect();
                (data, Some(emb))
            }
        };
        let h = harmonic_extend(net, &data, &opts)?;
        let mut buf = Vec::new();
        write_harmonic_csv(&h.values, embedding.as_ref(), &mut buf)?;
        return emit(out.as_deref(), &buf);
    }
    let v = vertex_or_center(source, graph)?;
    let sink: Vec<usize> = graph.boundary_vertices().into_iter().filter(|&b| b != v).collect();
    let value = if task == "resistance" {
        effective_resistance(net, v, &sink, &opts)?
    } else {
        green_diag(net, v, &sink, &opts)?
    };
    let result = ScalarResult {
        task: if task == "resistance" { "resistance" } else { "green" },
        source: v + 1,
        sink_size: sink.len(),
        value,
        tolerance: opts.tolerance,
    };
    emit(out.as_deref(), &json(&result)?)
}

#[derive(Serialize)]
struct EmbedSummary {
    #[serde(rename = "N")]
    n: usize,
    pinned: usize,
    residual: f64,
    crossings: usize,
    boundary_diameter: f64,
}

pub fn embed(a: EmbedArgs, cfg: &Config) -> CliResult<()> {
    let opts = solver_options(cfg.f64(a.tolerance, "tolerance")?)?;
    let out = cfg.path(a.out, "out")?;
    let svg = cfg.path(a.svg, "svg")?;
    let summary_path = cfg.path(a.summary, "summary")?;
    let g = load_graph(&a.graph, cfg)?;
    let emb = embed_graph(&g.graph, &opts)?;
    let mut csv = Vec::new();
    write_embedding_csv(&emb, &mut csv)?;
    if let Some(p) = &svg {
        write_atomic(p, embedding_svg(&g.graph, &emb).as_bytes())?;
    }
    let summary = json(&EmbedSummary {
        n: g.graph.count(),
        pinned: emb.pinned.len(),
        residual: emb.residual,
        crossings: emb.crossing_count(g.graph.network()),
        boundary_diameter: emb.boundary_diameter(),
    })?;
    match &out {
        Some(p) => {
            write_atomic(p, &csv)?;
            emit(summary_path.as_deref(), &summary)
        }
        None => {
            emit(None, &csv)?;
            if let Some(p) = &summary_path {
                write_atomic(p, &summary)?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct HittingRecord {
    mode: &'static str,
    start: usize,
    targets: Vec<usize>,
    estimate: Estimate,
}

#[derive(Serialize)]
struct ExitRecord {
    mode: &'static str,
    start: usize,
    mean: f64,
    std_err: f64,
    trials: usize,
    seed: u64,
    exact: f64,
}

#[derive(Serialize)]
struct ReturnRecord {
    mode: &'static str,
    start: usize,
    steps: usize,
    method: &'static str,
    probability: f64,
    std_err: f64,
    trials: usize,
}

pub fn walk(a: WalkArgs, cfg: &Config) -> CliResult<()> {
    let mode = cfg.string(a.mode, "mode")?.unwrap_or_else(|| "exit".into());
    let trials = cfg.usize(a.trials, "trials")?.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    let max_steps = cfg.usize(a.max_steps, "max_steps")?.unwrap_or(DEFAULT_MAX_STEPS);
    let steps = cfg.usize(a.steps, "steps")?.unwrap_or(DEFAULT_RETURN_STEPS);
    let method = cfg.string(a.method, "method")?.unwrap_or_else(|| "exact".into());
    let targets = cfg.usize_list(a.target, "target")?;
    let start = cfg.usize(a.start, "start")?;
    let out = cfg.path(a.out, "out")?;
    let log = cfg.path(a.log, "log")?;
    let walk_seed = cfg.u64(a.walk_seed, "walk_seed")?;
    if !["hitting", "exit", "return"].contains(&mode.as_str()) {
        return Err(usage(format!("mode must be hitting, exit or return, got {mode:?}")));
    }
    if !["exact", "monte-carlo"].contains(&method.as_str()) {
        return Err(usage(format!("method must be exact or monte-carlo, got {method:?}")));
    }
    if mode == "hitting" && targets.as_ref().is_none_or(Vec::is_empty) {
        return Err(usage("hitting mode needs --target"));
    }
    let g = load_graph(&a.graph, cfg)?;
    let graph = &g.graph;
    let net = graph.network();
    let seed = walk_seed.unwrap_or(g.seed);
    let v = vertex_or_center(start, graph)?;
    let record = match mode.as_str() {
        "hitting" => {
            let mut roles: Vec<Role> =
                (0..graph.count()).map(|u| if graph.is_boundary(u) { Role::Exit } else { Role::Free }).collect();
            let targets = targets.unwrap_or_default();
            for &t in &targets {
                roles[vertex_or_center(Some(t), graph)?] = Role::Target;
            }
            let outcomes = hitting_trials(net, v, &roles, trials, seed, max_steps)?;
            if let Some(p) = &log {
                let mut buf = Vec::new();
                write_trial_log(&outcomes, &mut buf)?;
                write_atomic(p, &buf)?;
            }
            json(&HittingRecord {
                mode: "hitting",
                start: v + 1,
                targets,
                estimate: summarize(&outcomes, seed),
            })?
        }
        "exit" => {
            let region: Vec<bool> = (0..graph.count()).map(|u| !graph.is_boundary(u)).collect();
            let mc = exit_time_mc(net, v, &region, trials, seed)?;
            let exact = expected_exit_times(net, &region, &SolverOptions::default())?[v];
            json(&ExitRecord {
                mode: "exit",
                start: v + 1,
                mean: mc.mean,
                std_err: mc.std_err,
                trials,
                seed,
                exact,
            })?
        }
        _ => {
            let (m, name) = if method == "exact" {
                (ReturnMethod::Exact { max_vertices: EXACT_RETURN_MAX_VERTICES }, "exact")
            } else {
                (ReturnMethod::MonteCarlo { trials, seed }, "monte-carlo")
            };
            let s = return_probability(net, v, steps, m)?;
            json(&ReturnRecord {
                mode: "return",
                start: v + 1,
                steps,
                method: name,
                probability: s.mean,
                std_err: s.std_err,
                trials: s.n,
            })?
        }
    };
    emit(out.as_deref(), &record)
}

/// Command-line flags that apply to each experiment.
fn allowed_flags(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "degree-tail" => &["samples", "window", "gamma", "seed"],
        "green-growth" => &["sizes", "trials", "gamma", "seed"],
        "max-edge" => &["epsilons", "trials", "gamma", "horizon", "seed"],
        "energy" => &["function", "epsilons", "trials", "gamma", "horizon", "seed"],
        "holder" => &["chi", "epsilons", "trials", "pairs", "gamma", "horizon", "seed"],
        "mesh-refinement" => &["epsilon", "horizon", "mesh_factors", "trials", "gamma", "kind", "seed"],
        _ => return None,
    })
}

fn given_flags(a: &ExperimentArgs) -> Vec<&'static str> {
    [
        ("samples", a.samples.is_some()),
        ("window", a.window.is_some()),
        ("sizes", a.sizes.is_some()),
        ("epsilons", a.epsilons.is_some()),
        ("epsilon", a.epsilon.is_some()),
        ("mesh_factors", a.mesh_factors.is_some()),
        ("trials", a.trials.is_some()),
        ("pairs", a.pairs.is_some()),
        ("chi", a.chi.is_some()),
        ("function", a.function.is_some()),
        ("gamma", a.gamma.is_some()),
        ("horizon", a.horizon.is_some()),
        ("kind", a.kind.is_some()),
        ("seed", a.seed.is_some()),
    ]
    .into_iter()
    .filter_map(|(k, set)| set.then_some(k))
    .collect()
}

fn run_experiment(a: &ExperimentArgs, cfg: &Config) -> CliResult<ExperimentReport> {
    let allowed = allowed_flags(&a.name).ok_or_else(|| {
        usage(format!(
            "unknown experiment {:?}; expected degree-tail, green-growth, max-edge, energy, holder or mesh-refinement",
            a.name
        ))
    })?;
    if let Some(bad) = given_flags(a).into_iter().find(|f| !allowed.contains(f)) {
        return Err(usage(format!("--{} does not apply to {}", bad.replace('_', "-"), a.name)));
    }
    let pick = |key: &str| allowed.contains(&key);
    let gamma = if pick("gamma") { cfg.f64(a.gamma, "gamma")? } else { None };
    let seed = if pick("seed") { cfg.u64(a.seed, "seed")? } else { None };
    let trials = if pick("trials") { cfg.usize(a.trials, "trials")? } else { None };
    let horizon = if pick("horizon") { cfg.f64(a.horizon, "horizon")? } else { None };
    let epsilons = if pick("epsilons") { cfg.real_list(a.epsilons.clone(), "epsilons")? } else { None };
    if let Some(g) = gamma {
        if !(g > 0.0 && g < 2.0) {
            return Err(domain(format!("gamma must lie in (0, 2), got {g}")));
        }
    }
    if let Some(h) = horizon {
        positive("horizon", h)?;
    }
    Ok(match a.name.as_str() {
        "degree-tail" => {
            let d = DegreeTailParams::default();
            degree_tail_experiment(&DegreeTailParams {
                samples: cfg.usize(a.samples, "samples")?.unwrap_or(d.samples),
                window: cfg.usize(a.window, "window")?.unwrap_or(d.window),
                gamma: gamma.unwrap_or(d.gamma),
                seed: seed.unwrap_or(d.seed),
            })?
        }
        "green-growth" => {
            let d = GreenGrowthParams::default();
            green_growth_experiment(&GreenGrowthParams {
                sizes: cfg.usize_list(a.sizes.clone(), "sizes")?.unwrap_or(d.sizes),
                trials: trials.unwrap_or(d.trials),
                gamma: gamma.unwrap_or(d.gamma),
                seed: seed.unwrap_or(d.seed),
            })?
        }
        "max-edge" => {
            let d = MaxEdgeParams::default();
            max_edge_scaling_experiment(&MaxEdgeParams {
                epsilons: epsilons.unwrap_or(d.epsilons),
                trials: trials.unwrap_or(d.trials),
                gamma: gamma.unwrap_or(d.gamma),
                horizon: horizon.unwrap_or(d.horizon),
                seed: seed.unwrap_or(d.seed),
            })?
        }
        "energy" => {
            let d = EnergyParams::default();
            let function = match cfg.string(a.function.clone(), "function")? {
                Some(f) => f.parse()?,
                None => d.function,
            };
            energy_comparison_experiment(&EnergyParams {
                function,
                epsilons: epsilons.unwrap_or(d.epsilons),
                trials: trials.unwrap_or(d.trials),
                gamma: gamma.unwrap_or(d.gamma),
                horizon: horizon.unwrap_or(d.horizon),
                seed: seed.unwrap_or(d.seed),
            })?
        }
        "holder" => {
            let d = HolderParams::default();
            holder_exponent_experiment(&HolderParams {
                chi: cfg.f64(a.chi, "chi")?.unwrap_or(d.chi),
                epsilons: epsilons.unwrap_or(d.epsilons),
                trials: trials.unwrap_or(d.trials),
                pairs: cfg.usize(a.pairs, "pairs")?.unwrap_or(d.pairs),
                gamma: gamma.unwrap_or(d.gamma),
                horizon: horizon.unwrap_or(d.horizon),
                seed: seed.unwrap_or(d.seed),
            })?
        }
        _ => {
            let d = MeshRefinementParams::default();
            let kind = match cfg.string(a.kind.clone(), "kind")? {
                Some(k) => parse_kind(&k)?,
                None => d.kind,
            };
            mesh_refinement_study(&MeshRefinementParams {
                epsilon: cfg.f64(a.epsilon, "epsilon")?.unwrap_or(d.epsilon),
                horizon: horizon.unwrap_or(d.horizon),
                mesh_factors: cfg.usize_list(a.mesh_factors.clone(), "mesh_factors")?.unwrap_or(d.mesh_factors),
                trials: trials.unwrap_or(d.trials),
                gamma: gamma.unwrap_or(d.gamma),
                kind,
                seed: seed.unwrap_or(d.seed),
            })?
        }
    })
}

fn report_table(report: &ExperimentReport) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "x", "stat", "mean", "std_err", "n"])
        .map_err(|e| CliError::Core(e.into()))?;
    for row in &report.rows {
        for (name, s) in &row.stats {
            w.write_record([
                row.label.clone(),
                row.x.to_string(),
                name.clone(),
                s.mean.to_string(),
                s.std_err.to_string(),
                s.n.to_string(),
            ])
            .map_err(|e| CliError::Core(e.into()))?;
        }
    }
    w.into_inner().map_err(|e| CliError::Core(McrtError::Io(e.into_error())))
}

pub fn experiment(a: ExperimentArgs, cfg: &Config) -> CliResult<()> {
    let out: Option<PathBuf> = cfg.path(a.out.clone(), "out")?;
    let csv_path = cfg.path(a.csv.clone(), "csv")?;
    let svg_path = cfg.path(a.svg.clone(), "svg")?;
    let report = run_experiment(&a, cfg)?;
    eprintln!("{}: passed={} runtime={:.2}s", report.name, report.passed, report.runtime.as_secs_f64());
    if let Some(p) = &csv_path {
        write_atomic(p, &report_table(&report)?)?;
    }
    if let (Some(p), Some(plot)) = (&svg_path, &report.plot) {
        let svg = loglog_svg(&plot.x, &plot.y, report.fit.as_ref(), &plot.x_label, &plot.y_label);
        write_atomic(p, svg.as_bytes())?;
    }
    emit(out.as_deref(), &json(&report)?)
}
