//! Command-line front end: `eval`, `compare`, `plan`, `simulate` and `render`.
//!
//! Every input document is read and parsed before any computation starts, so a failing run
//! never leaves a partial report behind.

mod render;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::compose::{
    additive_path_cost, evaluate_risk_matrix_anchored, monte_carlo_risk, path_risk, ComposeError, EvalError,
    MatrixDocError, PathRiskReport, RiskMatrix,
};
use crate::elements::{load_elements, ConfigError, ElementSet, RiskCategory};
use crate::planner::{plan_additive_baseline, plan_min_risk, shortest_states, PlanError, SearchConfig, SearchMode};
use crate::tether::tether_for_prefix_anchored;
use crate::world::{load_map, Path, State, Workspace, DEFAULT_R_C};

pub use render::{render_svg, risk_color, COLOR_SCALE_MAX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_INFEASIBLE: i32 = 5;

/// Extra states the planner may use beyond the shortest path when `--max-states` is absent.
pub const DEFAULT_EXTRA_STATES: usize = 4;

#[derive(Parser, Debug)]
#[command(
    name = "motion-risk",
    version,
    about = "Probabilistic risk of robot motion on occupancy grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-state, per-element risk table and path summary.
    Eval(EvalArgs),
    /// Rank several paths under path risk and under the additive baseline.
    Compare(CompareArgs),
    /// Search for a path minimizing risk or additive cost.
    Plan(PlanArgs),
    /// Monte Carlo estimate of path risk.
    Simulate(SimulateArgs),
    /// SVG figure of a path colored by state risk.
    Render(RenderArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// ASCII map: '.' viable, '#' blocked.
    #[arg(long)]
    map: PathBuf,
    /// Element configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Tether anchor as `row,col`; defaults to the first state.
    #[arg(long, value_parser = parse_state)]
    anchor: Option<State>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Path document (JSON).
    #[arg(long)]
    path: PathBuf,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Path documents; give at least two.
    #[arg(long = "path", required = true)]
    paths: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PlannerKind {
    Risk,
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeKind {
    Exhaustive,
    Beam,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    common: Common,
    /// First state as `row,col`.
    #[arg(long, value_parser = parse_state)]
    start: State,
    /// Last state as `row,col`.
    #[arg(long, value_parser = parse_state)]
    goal: State,
    #[arg(long, value_enum, default_value = "risk")]
    planner: PlannerKind,
    /// Longest single move, in cells.
    #[arg(long = "r-c", default_value_t = DEFAULT_R_C)]
    r_c: f64,
    /// Longest admissible path in states; defaults to the shortest path plus four.
    #[arg(long)]
    max_states: Option<usize>,
    /// Exact branch and bound, or bounded best-first search for larger maps.
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeKind,
    /// Labels kept per cell in beam mode.
    #[arg(long, default_value_t = 32)]
    beam_width: usize,
    /// Also write the planned path document here.
    #[arg(long)]
    path_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// ASCII map: '.' viable, '#' blocked.
    #[arg(long, required_unless_present = "matrix", requires_all = ["config", "path"])]
    map: Option<PathBuf>,
    /// Element configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Path document (JSON).
    #[arg(long)]
    path: Option<PathBuf>,
    /// Precomputed risk matrix document instead of map, path and config.
    #[arg(long, conflicts_with_all = ["map", "config", "path"])]
    matrix: Option<PathBuf>,
    /// Tether anchor as `row,col`; defaults to the first state.
    #[arg(long, value_parser = parse_state)]
    anchor: Option<State>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    /// Seed of the random stream; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// ASCII map: '.' viable, '#' blocked.
    #[arg(long)]
    map: PathBuf,
    /// Element configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Path document (JSON).
    #[arg(long)]
    path: PathBuf,
    /// Tether anchor as `row,col`; defaults to the first state.
    #[arg(long, value_parser = parse_state)]
    anchor: Option<State>,
    /// Output file; standard output when absent.
    #[arg(long)]
    svg_out: Option<PathBuf>,
    /// Overlay the taut tether and its contact points.
    #[arg(long)]
    tether: bool,
}

fn parse_state(text: &str) -> Result<State, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [r, c] => match (r.parse(), c.parse()) {
            (Ok(r), Ok(c)) => Ok(State::new(r, c)),
            _ => Err(format!("expected integers, got {text:?}")),
        },
        _ => Err(format!("expected row,col, got {text:?}")),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

/// Runs one invocation; `args` includes the program name. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let sink: &mut dyn Write = if informational { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Render(a) => cmd_render(a),
    };
    match result.and_then(|text| {
        out.write_all(text.as_bytes())
            .map_err(|e| CliError::Parse(format!("cannot write output: {e}")))
    }) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &FsPath, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))
}

fn load_workspace(path: &FsPath) -> Result<Workspace, CliError> {
    let map = load_map(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(Workspace::new(map))
}

fn load_config(path: &FsPath) -> Result<ElementSet, CliError> {
    load_elements(&read(path)?).map_err(|e| {
        let msg = format!("{}: {e}", path.display());
        match e {
            ConfigError::Syntax(_) => CliError::Parse(msg),
            _ => CliError::Validation(msg),
        }
    })
}

fn load_path(path: &FsPath) -> Result<Path, CliError> {
    Path::from_json(&read(path)?).map_err(|e| CliError::Parse(format!("{}: path document: {e}", path.display())))
}

fn eval_error(path: &FsPath, e: EvalError) -> CliError {
    CliError::Validation(format!("{}: {e}", path.display()))
}

/// Additive baseline cost over the locale columns of `matrix`, with the configured weights.
pub fn locale_additive_cost(matrix: &RiskMatrix, elements: &ElementSet) -> Result<f64, ComposeError> {
    let keep: Vec<usize> = (0..matrix.columns.len())
        .filter(|&k| matrix.columns[k].category == RiskCategory::Locale)
        .collect();
    let sub = RiskMatrix::new(
        matrix.states.clone(),
        keep.iter().map(|&k| matrix.columns[k].clone()).collect(),
        matrix
            .rows
            .iter()
            .map(|row| keep.iter().map(|&k| row[k]).collect())
            .collect(),
    )?;
    let weights: Vec<f64> = sub.columns.iter().map(|c| elements.baseline.weight(&c.name)).collect();
    additive_path_cost(&sub, &weights, elements.baseline.normalization)
}

struct Evaluated {
    name: String,
    path: Path,
    matrix: RiskMatrix,
    report: PathRiskReport,
    additive: f64,
}

fn evaluate(
    ws: &Workspace,
    elements: &ElementSet,
    file: &FsPath,
    path: Path,
    anchor: Option<State>,
) -> Result<Evaluated, CliError> {
    let matrix =
        evaluate_risk_matrix_anchored(ws, &path, &elements.as_refs(), anchor).map_err(|e| eval_error(file, e))?;
    let report = path_risk(&matrix).map_err(|e| CliError::Validation(e.to_string()))?;
    let additive = locale_additive_cost(&matrix, elements).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(Evaluated {
        name: file.display().to_string(),
        path,
        matrix,
        report,
        additive,
    })
}

fn cmd_eval(a: EvalArgs) -> Result<String, CliError> {
    let ws = load_workspace(&a.common.map)?;
    let elements = load_config(&a.common.config)?;
    let path = load_path(&a.path)?;
    let e = evaluate(&ws, &elements, &a.path, path, a.common.anchor)?;
    Ok(report::eval(&e.name, &e.matrix, &e.report, e.additive, a.common.format))
}

fn cmd_compare(a: CompareArgs) -> Result<String, CliError> {
    if a.paths.len() < 2 {
        return Err(CliError::Usage("compare needs at least two --path documents".into()));
    }
    let ws = load_workspace(&a.common.map)?;
    let elements = load_config(&a.common.config)?;
    let paths = a.paths.iter().map(|p| load_path(p)).collect::<Result<Vec<_>, _>>()?;
    let evaluated = a
        .paths
        .iter()
        .zip(paths)
        .map(|(file, path)| evaluate(&ws, &elements, file, path, a.common.anchor))
        .collect::<Result<Vec<_>, _>>()?;
    let entries: Vec<report::Ranked> = evaluated
        .iter()
        .map(|e| report::Ranked {
            name: e.name.clone(),
            states: e.path.len(),
            risk: e.report.path_risk,
            additive: e.additive,
        })
        .collect();
    Ok(report::compare(&entries, a.common.format))
}

fn cmd_plan(a: PlanArgs) -> Result<String, CliError> {
    let ws = load_workspace(&a.common.map)?;
    let elements = load_config(&a.common.config)?;
    let plan_error = |e: PlanError| match e {
        PlanError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
        PlanError::Radius(_) | PlanError::BeamWidth => CliError::Usage(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    };
    let max_states = match a.max_states {
        Some(n) => n,
        None => shortest_states(ws.map(), a.r_c, a.start, a.goal)
            .map_err(plan_error)?
            .map_or(1, |n| n + DEFAULT_EXTRA_STATES),
    };
    let mode = match a.mode {
        ModeKind::Exhaustive => SearchMode::Exhaustive,
        ModeKind::Beam => SearchMode::Beam(a.beam_width),
    };
    let mut cfg = SearchConfig::new(a.start, a.goal, a.r_c, max_states).with_mode(mode);
    cfg.anchor = a.common.anchor;
    let path = match a.planner {
        PlannerKind::Risk => plan_min_risk(&ws, &elements.as_refs(), &cfg).map_err(plan_error)?.path,
        PlannerKind::Additive => {
            let (locale, weights) = elements.locale();
            plan_additive_baseline(&ws, &locale, &weights, elements.baseline.normalization, &cfg)
                .map_err(plan_error)?
                .path
        }
    };
    let file = FsPath::new("<planned>");
    let e = evaluate(&ws, &elements, file, path, a.common.anchor)?;
    let document = e.path.to_json();
    if let Some(out) = &a.path_out {
        write_file(out, &format!("{document}\n"))?;
    }
    let planner = match a.planner {
        PlannerKind::Risk => "risk",
        PlannerKind::Additive => "additive",
    };
    Ok(report::plan(
        planner,
        &e.path,
        &e.matrix,
        &e.report,
        e.additive,
        a.common.format,
    ))
}

fn cmd_simulate(a: SimulateArgs) -> Result<String, CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let matrix = match (&a.matrix, &a.map, &a.config, &a.path) {
        (Some(m), ..) => RiskMatrix::from_json(&read(m)?).map_err(|e| {
            let msg = format!("{}: {e}", m.display());
            match e {
                MatrixDocError::Syntax(_) => CliError::Parse(msg),
                MatrixDocError::Invalid(_) => CliError::Validation(msg),
            }
        })?,
        (None, Some(map), Some(config), Some(path)) => {
            let ws = load_workspace(map)?;
            let elements = load_config(config)?;
            let doc = load_path(path)?;
            evaluate(&ws, &elements, path, doc, a.anchor)?.matrix
        }
        _ => {
            return Err(CliError::Usage(
                "simulate needs --matrix, or --map, --config and --path".into(),
            ))
        }
    };
    let closed = path_risk(&matrix)
        .map_err(|e| CliError::Validation(e.to_string()))?
        .path_risk;
    let estimate = monte_carlo_risk(&matrix, a.trials, a.seed);
    Ok(report::simulate(&estimate, a.seed, closed, a.format))
}

fn cmd_render(a: RenderArgs) -> Result<String, CliError> {
    let ws = load_workspace(&a.map)?;
    let elements = load_config(&a.config)?;
    let path = load_path(&a.path)?;
    let e = evaluate(&ws, &elements, &a.path, path, a.anchor)?;
    let tether = if a.tether {
        let anchor = a.anchor.unwrap_or(e.path.states[0]);
        Some(
            tether_for_prefix_anchored(ws.map(), anchor, &e.path.states)
                .map_err(|err| eval_error(&a.path, err.into()))?,
        )
    } else {
        None
    };
    let svg = render_svg(ws.map(), &e.report, tether.as_ref());
    match &a.svg_out {
        Some(file) => {
            write_file(file, &svg)?;
            Ok(String::new())
        }
        None => Ok(svg),
    }
}
