//! `linlayout` command line.
//!
//! Exit codes: 0 sat or valid, 1 unsat or invalid, 2 unknown, 3 usage or
//! other error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use linlayout::experiments::{
    append_reports, run_step1, run_step2, run_step3_batch, ExperimentError, ExperimentReport, STEP1_DEFAULT_N,
    STEP2_DEFAULT_K, STEP3_DEFAULT_N,
};
use linlayout::{
    compute_layout, read_graphml, render_arc_diagram, verify, write_graphml_document, Backend, Constraint,
    GeneratorSpec, Graph, GraphmlError, JobError, JobRequest, LayoutSpec, LinearLayout, Page, PageRestriction,
    PageType, PipelineError, SolveStatus, SolverConfig, SvgOptions,
};
use linlayout_service::{Service, ServiceConfig, ServiceError};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Graphml { path: PathBuf, source: GraphmlError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Job(#[from] JobError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Service(#[from] ServiceError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Parser, Debug)]
#[command(name = "linlayout", version, about = "Stack, queue and mixed linear layouts via SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph from one of the generator families.
    Generate(GenerateArgs),
    /// Compute a layout for a GraphML file or job JSON.
    Solve(SolveArgs),
    /// Check a layout file against a graph and page configuration.
    Verify(VerifyArgs),
    /// Skeleton with odd path vertices between A and B.
    Step1(Step1Args),
    /// Stellated pairs with forbidden four-vertex orders.
    Step2(Step2Args),
    /// Random framed triangulations tested for the interval property.
    Step3(Step3Args),
    /// Run the HTTP job service.
    Serve(ServeArgs),
}

#[derive(Args, Debug, Default)]
struct PageArgs {
    /// Comma-separated page types, e.g. stack,stack,queue.
    #[arg(long, value_delimiter = ',')]
    pages: Vec<PageType>,
    /// Page restriction as <page>:<matching|forest>; repeatable.
    #[arg(long = "restriction", value_name = "PAGE:KIND", value_parser = parse_restriction)]
    restrictions: Vec<(usize, PageRestriction)>,
    /// JSON file with extra constraints (an array, or {"constraints": [...]}).
    #[arg(long)]
    constraints: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// External solver command with an optional {input} placeholder, or
    /// `auto` to pick one from the environment. Default: builtin solver.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Solver time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Family {
    #[value(name = "skeleton")]
    Skeleton,
    #[value(name = "stellated_skeleton")]
    StellatedSkeleton,
    #[value(name = "step2_gadget")]
    Step2Gadget,
    #[value(name = "goldner_harary")]
    GoldnerHarary,
    #[value(name = "random_triangulated_quad")]
    RandomTriangulatedQuad,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Graphml,
    Json,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    family: Family,
    /// Size parameter: path length for skeletons, k for the step-2 gadget,
    /// interior points for the quad.
    #[arg(long, short)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Graphml)]
    format: Format,
    #[command(flatten)]
    pages: PageArgs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// GraphML file or job JSON.
    #[arg(long, short)]
    input: PathBuf,
    /// Layout JSON destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write an arc diagram.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Side of the spine per page, e.g. above,above,below.
    #[arg(long)]
    sides: Option<String>,
    #[command(flatten)]
    pages: PageArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// GraphML file or job JSON describing the graph and spec.
    #[arg(long, short)]
    input: PathBuf,
    /// Layout JSON to check.
    #[arg(long)]
    layout: PathBuf,
    #[command(flatten)]
    pages: PageArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Directory for job, layout, SVG and report files.
    #[arg(long, short, default_value = "results")]
    output: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct Step1Args {
    #[arg(long, short, default_value_t = STEP1_DEFAULT_N)]
    n: usize,
    #[command(flatten)]
    common: ExperimentArgs,
}

#[derive(Args, Debug)]
struct Step2Args {
    #[arg(long, short, default_value_t = STEP2_DEFAULT_K)]
    k: usize,
    #[command(flatten)]
    common: ExperimentArgs,
}

#[derive(Args, Debug)]
struct Step3Args {
    #[arg(long, short, default_value_t = STEP3_DEFAULT_N)]
    n: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds to try.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    common: ExperimentArgs,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, env = "LINLAYOUT_BIND", default_value = "127.0.0.1:8080")]
    bind: String,
    #[arg(long, env = "LINLAYOUT_STORE", default_value = "linlayout-jobs.sqlite")]
    store: PathBuf,
    /// Solver threads; defaults to the CPU count.
    #[arg(long, env = "LINLAYOUT_WORKERS")]
    workers: Option<usize>,
    #[arg(long, env = "LINLAYOUT_SERVICE_SOLVER")]
    solver_cmd: Option<String>,
    /// Cap (and default) for per-job solver time, in seconds.
    #[arg(long, env = "LINLAYOUT_TIMEOUT_CAP", default_value_t = 300.0)]
    timeout: f64,
    /// Delete finished jobs after this many seconds.
    #[arg(long)]
    ttl: Option<f64>,
    /// Re-check stored layouts whenever they are fetched.
    #[arg(long)]
    verify_on_read: bool,
    #[arg(long, default_value_t = 8 << 20)]
    max_body_bytes: usize,
}

fn parse_restriction(s: &str) -> Result<(usize, PageRestriction), String> {
    let (page, kind) = s.split_once(':').ok_or("expected <page>:<matching|forest>")?;
    let page = page.trim().parse().map_err(|_| format!("bad page index `{page}`"))?;
    let kind = match kind.trim() {
        "matching" => PageRestriction::Matching,
        "forest" | "tree" => PageRestriction::Forest,
        "none" => PageRestriction::None,
        other => return Err(format!("unknown restriction `{other}`")),
    };
    Ok((page, kind))
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Step1(a) => {
            warn_large("n", a.n, STEP1_DEFAULT_N);
            let cfg = solver_config(&a.common.solver, None)?;
            let dir = out_dir(&a.common.output)?;
            let run = run_step1(a.n, &cfg, &dir)?;
            finish_experiment(&dir, vec![run.report])
        }
        Command::Step2(a) => {
            warn_large("k", a.k, STEP2_DEFAULT_K);
            let cfg = solver_config(&a.common.solver, None)?;
            let dir = out_dir(&a.common.output)?;
            let run = run_step2(a.k, &cfg, &dir)?;
            finish_experiment(&dir, vec![run.report])
        }
        Command::Step3(a) => {
            warn_large("n", a.n, STEP3_DEFAULT_N);
            let cfg = solver_config(&a.common.solver, None)?;
            let dir = out_dir(&a.common.output)?;
            let seeds: Vec<u64> = (a.seed..a.seed.saturating_add(a.seeds)).collect();
            let reports = run_step3_batch(a.n, &seeds, &cfg, a.workers, &dir)?;
            finish_experiment(&dir, reports)
        }
        Command::Serve(a) => serve(a),
    }
}

fn warn_large(name: &str, value: usize, default: usize) {
    if value > default {
        eprintln!("warning: {name}={value} is above the usual {default}; solver time grows quickly");
    }
}

fn out_dir(dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    Ok(dir.to_path_buf())
}

fn status_code(s: SolveStatus) -> i32 {
    match s {
        SolveStatus::Sat => EXIT_OK,
        SolveStatus::Unsat => EXIT_NEGATIVE,
        SolveStatus::Unknown => EXIT_UNKNOWN,
    }
}

/// Batch exit code: unknown beats unsat beats sat.
fn finish_experiment(dir: &Path, reports: Vec<ExperimentReport>) -> Result<i32, CliError> {
    let path = dir.join("reports.jsonl");
    append_reports(&path, &reports).map_err(io_err(&path))?;
    let mut code = EXIT_OK;
    for r in &reports {
        let notes = if r.notes.is_empty() { String::new() } else { format!(" {}", serde_json::Value::Object(r.notes.clone())) };
        println!("{} {} {} ms{notes}", r.id, status_name(r.status), r.wall_ms);
        code = code.max(status_code(r.status));
    }
    Ok(code)
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Sat => "sat",
        SolveStatus::Unsat => "unsat",
        SolveStatus::Unknown => "unknown",
    }
}

fn solver_config(a: &SolverArgs, job_timeout: Option<Duration>) -> Result<SolverConfig, CliError> {
    let mut cfg = match a.solver_cmd.as_deref() {
        None | Some("builtin") => SolverConfig::builtin(),
        Some("auto") => SolverConfig {
            backend: Backend::discover_external()
                .ok_or_else(|| CliError::Usage("no external SAT solver found for --solver-cmd auto".into()))?,
            ..SolverConfig::default()
        },
        Some(cmd) => SolverConfig::external(cmd),
    };
    match a.timeout {
        Some(t) if t.is_finite() && t > 0.0 => cfg.time_limit = Duration::from_secs_f64(t),
        Some(t) => return Err(CliError::Usage(format!("--timeout must be positive, got {t}"))),
        None => {
            if let Some(t) = job_timeout {
                cfg.time_limit = t;
            }
        }
    }
    Ok(cfg)
}

/// What an input file provides.
struct Input {
    graph: Graph,
    pages: Option<Vec<Page>>,
    constraints: Vec<Constraint>,
    timeout: Option<Duration>,
}

fn read_input(path: &Path) -> Result<Input, CliError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace()).copied();
    if first == Some(b'{') {
        let job: JobRequest =
            serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: path.into(), source })?;
        let timeout = job.timeout()?;
        let (graph, spec) = job.resolve()?;
        Ok(Input { graph, pages: Some(spec.pages), constraints: spec.constraints, timeout })
    } else {
        let doc = read_graphml(&bytes).map_err(|source| CliError::Graphml { path: path.into(), source })?;
        Ok(Input { graph: doc.graph, pages: doc.pages, constraints: doc.constraints, timeout: None })
    }
}

fn read_constraints(path: &Path) -> Result<Vec<Constraint>, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum File {
        List(Vec<Constraint>),
        Wrapped { constraints: Vec<Constraint> },
    }
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let file: File = serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: path.into(), source })?;
    Ok(match file {
        File::List(c) | File::Wrapped { constraints: c } => c,
    })
}

/// Flags override the file's pages; flag constraints are appended.
fn build_spec(a: &PageArgs, file_pages: Option<Vec<Page>>, mut constraints: Vec<Constraint>) -> Result<LayoutSpec, CliError> {
    let mut pages = if a.pages.is_empty() {
        file_pages.ok_or_else(|| CliError::Usage("no page configuration: pass --pages".into()))?
    } else {
        a.pages.iter().map(|&kind| Page { kind, restriction: PageRestriction::None }).collect()
    };
    for &(p, r) in &a.restrictions {
        let count = pages.len();
        let page = pages
            .get_mut(p)
            .ok_or_else(|| CliError::Usage(format!("--restriction names page {p} but there are {count} pages")))?;
        page.restriction = r;
    }
    if let Some(path) = &a.constraints {
        constraints.extend(read_constraints(path)?);
    }
    Ok(LayoutSpec::new(pages).with_constraints(constraints))
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(io_err(p)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.write_all(b"\n"))
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn generate(a: GenerateArgs) -> Result<i32, CliError> {
    let size = |default: u64| a.n.unwrap_or(default);
    let gen = match a.family {
        Family::Skeleton => GeneratorSpec::new("skeleton").param("n", size(10)),
        Family::StellatedSkeleton => GeneratorSpec::new("stellated_skeleton").param("n", size(10)),
        Family::Step2Gadget => GeneratorSpec::new("step2_gadget").param("k", size(5)),
        Family::GoldnerHarary => GeneratorSpec::new("goldner_harary"),
        Family::RandomTriangulatedQuad => {
            GeneratorSpec::new("random_triangulated_quad").param("n", size(10)).param("seed", a.seed)
        }
    };
    let graph = gen.build()?;
    let pages = (!a.pages.pages.is_empty()).then(|| build_spec(&a.pages, None, vec![])).transpose()?;
    let bytes = match a.format {
        Format::Graphml => {
            let (pages, cs) = match &pages {
                Some(s) => (Some(s.pages.as_slice()), s.constraints.as_slice()),
                None => (None, &[][..]),
            };
            write_graphml_document(&graph, cs, pages).map_err(|source| CliError::Graphml { path: "<output>".into(), source })?
        }
        Format::Json => {
            let spec = pages.unwrap_or_else(|| LayoutSpec::stacks(3));
            serde_json::to_vec_pretty(&JobRequest::new(graph.clone(), spec)).expect("job serializes")
        }
    };
    write_out(a.output.as_deref(), &bytes)?;
    eprintln!("{} vertices, {} edges", graph.vertex_count(), graph.edge_count());
    Ok(EXIT_OK)
}

fn solve(a: SolveArgs) -> Result<i32, CliError> {
    let input = read_input(&a.input)?;
    let spec = build_spec(&a.pages, input.pages, input.constraints)?;
    spec.validate(&input.graph).map_err(JobError::from)?;
    let sides = a.sides.as_deref().map(SvgOptions::parse_sides).transpose().map_err(CliError::Usage)?;
    let cfg = solver_config(&a.solver, input.timeout)?;
    let out = compute_layout(&input.graph, &spec, &cfg)?;
    eprintln!(
        "{} in {} ms ({} round{})",
        status_name(out.status),
        out.stats.wall_ms,
        out.stats.rounds,
        if out.stats.rounds == 1 { "" } else { "s" }
    );
    if let Some(layout) = &out.layout {
        write_out(a.output.as_deref(), &serde_json::to_vec_pretty(layout).expect("layout serializes"))?;
        if let Some(path) = &a.svg {
            let svg = render_arc_diagram(&input.graph, layout, &sides.unwrap_or_default());
            std::fs::write(path, svg).map_err(io_err(path))?;
        }
    }
    Ok(status_code(out.status))
}

fn verify_cmd(a: VerifyArgs) -> Result<i32, CliError> {
    let input = read_input(&a.input)?;
    let spec = build_spec(&a.pages, input.pages, input.constraints)?;
    let bytes = std::fs::read(&a.layout).map_err(io_err(&a.layout))?;
    let layout: LinearLayout =
        serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: a.layout.clone(), source })?;
    match verify(&input.graph, &spec, &layout) {
        Ok(v) if v.is_empty() => {
            println!("valid");
            Ok(EXIT_OK)
        }
        Ok(v) => {
            for violation in &v {
                println!("{violation}");
            }
            println!("{} violation(s)", v.len());
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => {
            println!("invalid layout: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn serve(a: ServeArgs) -> Result<i32, CliError> {
    if !(a.timeout.is_finite() && a.timeout > 0.0) {
        return Err(CliError::Usage("--timeout must be positive".into()));
    }
    let mut cfg = ServiceConfig::new(&a.store);
    if let Some(w) = a.workers {
        cfg.workers = w.max(1);
    }
    cfg.solver = solver_config(&SolverArgs { solver_cmd: a.solver_cmd.clone(), timeout: None }, None)?.backend;
    cfg.timeout_cap = Duration::from_secs_f64(a.timeout);
    cfg.ttl = a.ttl.map(Duration::from_secs_f64);
    cfg.verify_on_read = a.verify_on_read;
    cfg.max_body_bytes = a.max_body_bytes;

    let rt = tokio::runtime::Runtime::new().map_err(io_err(Path::new("<runtime>")))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&a.bind).await.map_err(io_err(Path::new(&a.bind)))?;
        let addr = listener.local_addr().map_err(io_err(Path::new(&a.bind)))?;
        let service = Service::start(cfg)?;
        println!("listening on http://{addr}");
        let _ = std::io::stdout().flush();
        service
            .serve(listener, async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok::<_, CliError>(EXIT_OK)
    })
}
