//! Batch front end: `qrr compute --config FILE` and `qrr verify --suite NAME`.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 invalid config or
//! arguments, 3 a mathematical error inside a task.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::gw::{j_reduced, qde_verify, s_matrix};
use crate::mirror::{birkhoff, extract_instantons, small_mirror, MirrorResult};
use crate::rational::format_rational;
use crate::ring::{BundleSpec, RingDescriptor};
use crate::series::ZSeries;
use crate::twist::{i_function, serre_dual_i};
use crate::verify::{run_verify, Suite, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Equivariant,
    Nonequivariant,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    IFunction,
    Mirror,
    Instantons,
    SerreCheck,
    QdeCheck,
    SMatrix,
}

impl Task {
    fn key(&self) -> &'static str {
        match self {
            Task::IFunction => "i_function",
            Task::Mirror => "mirror",
            Task::Instantons => "instantons",
            Task::SerreCheck => "serre_check",
            Task::QdeCheck => "qde_check",
            Task::SMatrix => "s_matrix",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputationConfig {
    pub ambient_dim: usize,
    pub degrees: Vec<u32>,
    pub max_degree: usize,
    #[serde(default)]
    pub lambda_floor: i64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub tasks: Vec<Task>,
}

fn default_mode() -> Mode {
    Mode::Nonequivariant
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("task {task} failed: {message}")]
    Math { task: &'static str, message: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Math { .. } => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Validation(m) => json!({ "error": "validation", "message": m }),
            CliError::Math { task, message } => json!({ "error": "math", "task": task, "message": message }),
            CliError::Io(m) => json!({ "error": "io", "message": m }),
        }
    }
}

impl ComputationConfig {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.ambient_dim < 2 {
            return bad(format!("ambient_dim must be at least 2, got {}", self.ambient_dim));
        }
        if self.degrees.iter().any(|&l| l == 0) {
            return bad("bundle degrees must be positive".into());
        }
        if self.lambda_floor < 0 {
            return bad(format!("lambda_floor must be non-negative, got {}", self.lambda_floor));
        }
        if self.tasks.is_empty() {
            return bad("no tasks requested".into());
        }
        if self.tasks.contains(&Task::Instantons) {
            if self.ambient_dim != 5 || self.degrees != [5] {
                return bad("instantons need ambient_dim = 5 and degrees = [5]".into());
            }
            if self.max_degree == 0 {
                return bad("instantons need max_degree >= 1".into());
            }
        }
        Ok(())
    }

    fn modes(&self) -> Vec<Mode> {
        match self.mode {
            Mode::Both => vec![Mode::Equivariant, Mode::Nonequivariant],
            m => vec![m],
        }
    }

    fn tasks_sorted(&self) -> Vec<Task> {
        let mut t = self.tasks.clone();
        t.sort();
        t.dedup();
        t
    }
}

fn mode_key(mode: Mode) -> &'static str {
    match mode {
        Mode::Equivariant => "equivariant",
        Mode::Nonequivariant => "nonequivariant",
        Mode::Both => "both",
    }
}

struct Context {
    ring: RingDescriptor,
    bundle: BundleSpec,
    j: ZSeries,
}

impl Context {
    fn new(cfg: &ComputationConfig, mode: Mode) -> Result<Self, CliError> {
        let equivariant = mode == Mode::Equivariant;
        let floor = if equivariant { cfg.lambda_floor } else { 0 };
        let ring = RingDescriptor::new(cfg.ambient_dim, floor).map_err(|e| CliError::Validation(e.to_string()))?;
        let bundle = if cfg.degrees.is_empty() {
            BundleSpec::zero(equivariant)
        } else {
            BundleSpec::new(cfg.degrees.clone(), equivariant).map_err(|e| CliError::Validation(e.to_string()))?
        };
        Ok(Self { ring, bundle, j: j_reduced(ring, cfg.max_degree) })
    }

    fn i_function(&self, task: Task) -> Result<ZSeries, CliError> {
        i_function(&self.j, &self.bundle).map_err(math(task))
    }
}

fn math<E: std::fmt::Display>(task: Task) -> impl Fn(E) -> CliError {
    move |e| CliError::Math { task: task.key(), message: e.to_string() }
}

fn series_block(s: &ZSeries) -> Value {
    json!({ "series": s.to_json(), "truncated": s.is_truncated() })
}

fn run_task(ctx: &Context, task: Task) -> Result<Value, CliError> {
    match task {
        Task::IFunction => Ok(series_block(&ctx.i_function(task)?)),
        Task::QdeCheck => {
            let report = qde_verify(&ctx.j, ctx.ring.n()).map_err(math(task))?;
            Ok(json!({
                "passed": report.passed(),
                "first_failure": report.first_failure,
                "residual": report.residual.to_json(),
            }))
        }
        Task::SMatrix => {
            let (s, report) = s_matrix(&ctx.j, ctx.ring.n(), ctx.j.max_degree()).map_err(math(task))?;
            let residual: Vec<Vec<Value>> =
                report.residual.iter().map(|row| row.iter().map(ZSeries::to_json).collect()).collect();
            Ok(json!({
                "matrix": s.to_json(),
                "unitarity": { "passed": report.passed(), "first_failure": report.first_failure, "residual": residual },
            }))
        }
        Task::SerreCheck => {
            let (dual, report) = serre_dual_i(&ctx.j, &ctx.bundle).map_err(math(task))?;
            let residuals: Vec<Value> = report
                .residuals
                .iter()
                .map(|(i, d, r)| json!({ "summand": i, "degree": d, "residual_is_zero": r.is_zero() }))
                .collect();
            Ok(json!({
                "passed": report.passed(),
                "first_failure": report.first_failure,
                "residuals": residuals,
                "dual_i_function": series_block(&dual),
            }))
        }
        Task::Mirror => {
            let i = ctx.i_function(task)?;
            let b = birkhoff(&i).map_err(math(task))?;
            let mut out = json!({ "birkhoff": b.to_json(), "small_mirror": Value::Null, "agreement": Value::Null });
            if !ctx.bundle.is_equivariant() && i.slices().iter().all(|s| s.max_z().map_or(true, |e| e <= 0)) {
                let m = small_mirror(&i).map_err(math(task))?;
                let agree = m.normalized == b.normalized && m.f == b.f && m.j_out == b.j_out;
                if !agree {
                    return Err(math(task)("birkhoff and small_mirror disagree"));
                }
                out["small_mirror"] = m.to_json();
                out["agreement"] = Value::Bool(true);
            }
            Ok(out)
        }
        Task::Instantons => {
            let i = ctx.i_function(task)?;
            let result = if ctx.bundle.is_equivariant() {
                let eq = birkhoff(&i).map_err(math(task))?;
                let plain = RingDescriptor::new(ctx.ring.n(), 0).map_err(math(task))?;
                let j_out = eq.j_out.as_ref().map(|y| y.lambda_limit().with_ring(plain));
                MirrorResult { j_out, ..eq }
            } else {
                small_mirror(&i).map_err(math(task))?
            };
            let report = extract_instantons(&result, ctx.j.max_degree()).map_err(math(task))?;
            Ok(json!({
                "numbers": report.numbers.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                "p3_residuals": report.p3_residuals.iter().map(format_rational).collect::<Vec<_>>(),
                "consistent": report.consistent(),
            }))
        }
    }
}

/// Runs every task in every requested mode; the output depends only on `cfg`.
pub fn run_compute(cfg: &ComputationConfig) -> Result<Value, CliError> {
    cfg.validate()?;
    let mut results = Map::new();
    for mode in cfg.modes() {
        let ctx = Context::new(cfg, mode)?;
        let mut block = Map::new();
        for task in cfg.tasks_sorted() {
            block.insert(task.key().to_string(), run_task(&ctx, task)?);
        }
        results.insert(mode_key(mode).to_string(), Value::Object(block));
    }
    Ok(json!({
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "results": results,
    }))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Parser, Debug)]
#[command(name = "qrr", version, about = "Exact genus-0 twisted Gromov-Witten computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the tasks of a JSON config.
    Compute {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides `max_degree`.
        #[arg(long)]
        degree: Option<usize>,
        /// Overrides `lambda_floor`.
        #[arg(long = "lambda-floor")]
        lambda_floor: Option<i64>,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn compute(config: &PathBuf, output: Option<&PathBuf>, degree: Option<usize>, floor: Option<i64>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config).map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
    let mut cfg: ComputationConfig = serde_json::from_str(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(d) = degree {
        cfg.max_degree = d;
    }
    if let Some(l) = floor {
        cfg.lambda_floor = l;
    }
    let result = run_compute(&cfg)?;
    emit(output, &render(&result))
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Compute { config, output, degree, lambda_floor } => {
            compute(config, output.as_ref(), *degree, *lambda_floor).map(|_| 0)
        }
        Command::Verify { suite, seed, output } => {
            let report = run_verify(*suite, *seed);
            emit(output.as_ref(), &render(&report.to_json())).map(|_| if report.passed() { 0 } else { 1 })
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", render(&e.to_json()));
            e.exit_code()
        }
    }
}
