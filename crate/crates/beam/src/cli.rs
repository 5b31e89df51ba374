//! Command-line front end: scenario configs, the built-in catalog,
//! `run` / `sweep` / `convergence` / `report` subcommands, CSV emission,
//! and reproducible run records.
//!
//! # Config file grammar
//!
//! A scenario config is a TOML file:
//!
//! ```toml
//! name = "pointmass"
//! description = "optional free text"
//!
//! [coefficients]
//! c = [ { kind = "constant", value = 1.0 },
//!       { kind = "dirac", x0 = 0.5, weight = 1.0 } ]
//! b = [ { kind = "constant", value = 1.0 } ]
//! g_space = [ { kind = "constant", value = 1.0 } ]
//! g_time  = [ { kind = "dirac", x0 = 0.2, weight = 1.0 } ]
//! f1 = []            # empty list = zero
//! f2 = []
//! c0 = 1.0           # optional explicit stiffness floor
//!
//! [discretization]
//! n = 256            # spatial elements
//! m = 128            # time steps
//! t_final = 1.0      # optional, default 1
//! reparam = "identity"   # identity | log | loglog
//! log_order = 1      # order N for reparam = "log"
//!
//! [sweep]
//! eps = [0.2, 0.1, 0.05, 0.01]
//!
//! [output]
//! dir = "runs"       # optional, overridden by --out
//! ```
//!
//! Term records (one TOML inline table per term):
//!
//! | `kind`      | parameters         | meaning                      |
//! |-------------|--------------------|------------------------------|
//! | `constant`  | `value`            | the constant                 |
//! | `smooth`    | `label`            | named function (see below)   |
//! | `dirac`     | `x0`, `weight`     | weight·δ(x − x0)             |
//! | `heaviside` | `x0`, `jump`       | jump·H(x − x0)               |
//! | `neglog`    | `x0`               | −log|x − x0|                 |
//!
//! Smooth terms refer to the registry of named functions: `sin_t`, `cos_t`,
//! `forcing_poly` (the manufactured-benchmark forcing polynomial), and
//! `quartic_bubble` (x²(x−1)²).
//!
//! The separable forcing g(x,t) needs `g_space` and `g_time` together;
//! leaving both out (or empty) gives zero forcing.
//!
//! # Outputs
//!
//! Each run writes, atomically, into the output directory:
//! `<name>_eps<ε>_surface.csv` (header `x,t,u`, row-major in t),
//! `<name>_eps<ε>_xsection.csv` (header `t,u`, the midspan x = 0.5 series),
//! and `<name>_eps<ε>_record.toml` (a [`RunRecord`]: full config snapshot,
//! effective scale, timings, file manifest, and the norm/energy report).
//! Sweeps additionally write `<name>_sweep.csv` (`eps,w_norm,e_l2,margin`;
//! the `e_l2` cell is empty when the scenario has no reference solution or
//! constant-coefficient companion). The pipeline is deterministic: the same
//! config produces byte-identical CSVs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.
//! `BEAMCLI_WORKERS` caps the worker-pool size for sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::distmodel::{Axis, DistTerm, DistributionalExpr, Forcing, TermKind};
use crate::femcore::eval_solution;
use crate::march::cross_section;
use crate::mollify::Reparam;
use crate::scenario::{
    catalog, convergence_study, fitted_rate, named_smooth, run_scenario, sweep, BeamScenario,
    Integrator, PipelineError, ScenarioRun, SweepOutcome, SWEEP_EPS,
};

/// Schema tag stamped into every run record.
const RUN_SCHEMA: &str = "beamcli/run/v1";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// CLI failure, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: config file, flags, unknown scenario. Exit code 2.
    Config(String),
    /// The pipeline or the filesystem failed mid-run. Exit code 3.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

// ---------------------------------------------------------------------------
// Config file model
// ---------------------------------------------------------------------------

/// One term of a distributional expression, as written in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump: Option<f64>,
}

impl TermRecord {
    fn to_term(&self, field: &str, index: usize) -> Result<DistTerm, CliError> {
        let need = |opt: Option<f64>, name: &str| {
            opt.ok_or_else(|| {
                CliError::Config(format!(
                    "{field}[{index}]: kind \"{}\" needs the field \"{name}\"",
                    self.kind
                ))
            })
        };
        match self.kind.as_str() {
            "constant" => Ok(DistTerm::constant(need(self.value, "value")?)),
            "smooth" => {
                let label = self.label.as_deref().ok_or_else(|| {
                    CliError::Config(format!(
                        "{field}[{index}]: kind \"smooth\" needs the field \"label\""
                    ))
                })?;
                let f = named_smooth(label).ok_or_else(|| {
                    CliError::Config(format!(
                        "{field}[{index}]: unknown smooth function \"{label}\" \
                         (available: sin_t, cos_t, forcing_poly, quartic_bubble)"
                    ))
                })?;
                Ok(DistTerm::smooth(f))
            }
            "dirac" => Ok(DistTerm::dirac(
                need(self.x0, "x0")?,
                need(self.weight, "weight")?,
            )),
            "heaviside" => Ok(DistTerm::heaviside(
                need(self.x0, "x0")?,
                need(self.jump, "jump")?,
            )),
            "neglog" => Ok(DistTerm::neglog(need(self.x0, "x0")?)),
            other => Err(CliError::Config(format!(
                "{field}[{index}]: unknown term kind \"{other}\" \
                 (expected constant | smooth | dirac | heaviside | neglog)"
            ))),
        }
    }

    fn from_kind(kind: &TermKind) -> TermRecord {
        let mut rec = TermRecord {
            kind: String::new(),
            value: None,
            label: None,
            x0: None,
            weight: None,
            jump: None,
        };
        match kind {
            TermKind::Constant { value } => {
                rec.kind = "constant".into();
                rec.value = Some(*value);
            }
            TermKind::Smooth(f) => {
                rec.kind = "smooth".into();
                rec.label = Some(f.label.clone());
            }
            TermKind::Dirac { x0, weight } => {
                rec.kind = "dirac".into();
                rec.x0 = Some(*x0);
                rec.weight = Some(*weight);
            }
            TermKind::Heaviside { x0, jump } => {
                rec.kind = "heaviside".into();
                rec.x0 = Some(*x0);
                rec.jump = Some(*jump);
            }
            TermKind::NegLog { x0 } => {
                rec.kind = "neglog".into();
                rec.x0 = Some(*x0);
            }
        }
        rec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientsConfig {
    pub c: Vec<TermRecord>,
    pub b: Vec<TermRecord>,
    #[serde(default)]
    pub g_space: Vec<TermRecord>,
    #[serde(default)]
    pub g_time: Vec<TermRecord>,
    #[serde(default)]
    pub f1: Vec<TermRecord>,
    #[serde(default)]
    pub f2: Vec<TermRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
}

fn default_t_final() -> f64 {
    1.0
}

fn default_reparam() -> String {
    "identity".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationConfig {
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_reparam")]
    pub reparam: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_order: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: String,
}

/// A complete scenario configuration — the on-disk form of a
/// [`BeamScenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub coefficients: CoefficientsConfig,
    pub discretization: DiscretizationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn terms_to_expr(
    records: &[TermRecord],
    axis: Axis,
    field: &str,
) -> Result<DistributionalExpr, CliError> {
    let mut terms = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        terms.push(r.to_term(field, i)?);
    }
    if terms.is_empty() {
        Ok(DistributionalExpr::zero(axis))
    } else {
        Ok(DistributionalExpr::new(axis, terms))
    }
}

fn records_from_expr(expr: &DistributionalExpr) -> Vec<TermRecord> {
    expr.terms
        .iter()
        .map(|t| TermRecord::from_kind(&t.kind))
        .collect()
}

fn parse_reparam(name: &str, log_order: Option<u32>) -> Result<Reparam, CliError> {
    match name {
        "identity" => Ok(Reparam::Identity),
        "log" => Ok(Reparam::LogType {
            n: log_order.unwrap_or(1),
        }),
        "loglog" => Ok(Reparam::LogLog),
        other => Err(CliError::Config(format!(
            "discretization.reparam: unknown scheme \"{other}\" \
             (expected identity | log | loglog)"
        ))),
    }
}

fn reparam_name(r: Reparam) -> (String, Option<u32>) {
    match r {
        Reparam::Identity => ("identity".to_string(), None),
        Reparam::LogType { n } => ("log".to_string(), Some(n)),
        Reparam::LogLog => ("loglog".to_string(), None),
    }
}

/// Builds a runnable scenario from a parsed config. When the config matches
/// a catalog entry (same name, coefficients, and discretization), the
/// catalog's closed-form reference solution is attached, so configs written
/// from the catalog keep their error reporting.
pub fn config_to_scenario(cfg: &ScenarioConfig) -> Result<BeamScenario, CliError> {
    let co = &cfg.coefficients;
    let c = terms_to_expr(&co.c, Axis::Space, "coefficients.c")?;
    let b = terms_to_expr(&co.b, Axis::Space, "coefficients.b")?;
    let g = match (co.g_space.is_empty(), co.g_time.is_empty()) {
        (true, true) => Forcing::new(
            DistributionalExpr::zero(Axis::Space),
            DistributionalExpr::constant(Axis::Time, 1.0),
        ),
        (false, false) => Forcing::new(
            terms_to_expr(&co.g_space, Axis::Space, "coefficients.g_space")?,
            terms_to_expr(&co.g_time, Axis::Time, "coefficients.g_time")?,
        ),
        _ => {
            return Err(CliError::Config(
                "coefficients: the separable forcing needs g_space and g_time \
                 together (leave both out for zero forcing)"
                    .to_string(),
            ))
        }
    };
    let f1 = terms_to_expr(&co.f1, Axis::Space, "coefficients.f1")?;
    let f2 = terms_to_expr(&co.f2, Axis::Space, "coefficients.f2")?;
    let d = &cfg.discretization;
    if d.n < 2 {
        return Err(CliError::Config(format!(
            "discretization.n: need at least 2 elements, got {}",
            d.n
        )));
    }
    if d.m < 1 {
        return Err(CliError::Config(
            "discretization.m: need at least 1 time step".to_string(),
        ));
    }
    if !(d.t_final > 0.0) {
        return Err(CliError::Config(format!(
            "discretization.t_final: horizon must be positive, got {}",
            d.t_final
        )));
    }
    let reparam = parse_reparam(&d.reparam, d.log_order)?;
    let eps_list = cfg
        .sweep
        .as_ref()
        .map(|s| s.eps.clone())
        .filter(|e| !e.is_empty())
        .unwrap_or_else(|| SWEEP_EPS.to_vec());
    let mut sc = BeamScenario {
        name: cfg.name.clone(),
        description: cfg.description.clone().unwrap_or_default(),
        c,
        b,
        g,
        f1,
        f2,
        t_final: d.t_final,
        n: d.n,
        m: d.m,
        eps_list,
        reparam,
        c0_override: co.c0,
        integrator: Integrator::Replica,
        exact: None,
    };
    if let Some(builtin) = BeamScenario::by_name(&cfg.name) {
        // The closed-form reference depends only on the equation data, not
        // on the discretization, so overrides of n/m/ε keep it.
        let mine = scenario_to_config(&sc);
        let theirs = scenario_to_config(&builtin);
        if mine.coefficients == theirs.coefficients && sc.t_final == builtin.t_final {
            sc.exact = builtin.exact;
        }
    }
    Ok(sc)
}

/// The on-disk form of a scenario — the inverse of [`config_to_scenario`],
/// used for run-record snapshots and the catalog golden files.
pub fn scenario_to_config(sc: &BeamScenario) -> ScenarioConfig {
    let (reparam, log_order) = reparam_name(sc.reparam);
    ScenarioConfig {
        name: sc.name.clone(),
        description: if sc.description.is_empty() {
            None
        } else {
            Some(sc.description.clone())
        },
        coefficients: CoefficientsConfig {
            c: records_from_expr(&sc.c),
            b: records_from_expr(&sc.b),
            g_space: records_from_expr(&sc.g.space),
            g_time: records_from_expr(&sc.g.time),
            f1: records_from_expr(&sc.f1),
            f2: records_from_expr(&sc.f2),
            c0: sc.c0_override,
        },
        discretization: DiscretizationConfig {
            n: sc.n,
            m: sc.m,
            t_final: sc.t_final,
            reparam,
            log_order,
        },
        sweep: Some(SweepConfig {
            eps: sc.eps_list.clone(),
        }),
        output: None,
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        // toml errors carry line/column context in their Display form.
        CliError::Config(format!("config {}: {e}", path.display()))
    })
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    /// Mollify + assemble + march + diagnostics, in milliseconds.
    pub pipeline_ms: u64,
    /// CSV and record serialization, in milliseconds.
    pub output_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileManifest {
    pub surface: String,
    pub cross_section: String,
}

/// Norm and energy summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub w_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_l2: Option<f64>,
    pub margin: f64,
    pub energy_rhs: f64,
    pub c0: f64,
    pub c_sup: f64,
    pub b_sup: f64,
    pub c_half: f64,
    pub c_min_grid: f64,
    pub g_dual_sq: f64,
    pub f1_h2_sq: f64,
    pub f2_l2_sq: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Everything needed to audit or reproduce one pipeline run. The snapshot
/// is a complete [`ScenarioConfig`] pinned to the single ε of this run;
/// re-running it reproduces the CSV outputs byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub scenario: String,
    pub epsilon: f64,
    pub eps_eff: f64,
    pub snapshot: ScenarioConfig,
    pub timing: TimingRecord,
    pub files: FileManifest,
    pub reports: ReportRecord,
}

fn report_from_run(run: &ScenarioRun) -> ReportRecord {
    let d = &run.diagnostics;
    ReportRecord {
        w_norm: d.w_norm,
        e_l2: d.e_l2,
        margin: d.margin,
        energy_rhs: d.energy_rhs,
        c0: d.constants.c0,
        c_sup: d.constants.c_sup,
        b_sup: d.constants.b_sup,
        c_half: d.constants.c_half,
        c_min_grid: d.c_min_grid,
        g_dual_sq: d.g_dual_sq,
        f1_h2_sq: d.f1_h2_sq,
        f2_l2_sq: d.f2_l2_sq,
        warnings: d.warnings.clone(),
    }
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn surface_csv(run: &ScenarioRun) -> String {
    let mesh = run.system.mesh;
    let n = mesh.elements();
    let mut out = String::with_capacity((run.trajectory.u.len() * (n + 1)) * 24);
    out.push_str("x,t,u\n");
    for (t, coeffs) in run.trajectory.times.iter().zip(&run.trajectory.u) {
        for j in 0..=n {
            let x = j as f64 * mesh.h();
            let u = eval_solution(coeffs, mesh, x, 0);
            let _ = writeln!(out, "{x:e},{t:e},{u:e}");
        }
    }
    out
}

fn cross_section_csv(run: &ScenarioRun, x: f64) -> String {
    let mut out = String::from("t,u\n");
    for (t, u) in cross_section(&run.trajectory, run.system.mesh, x) {
        let _ = writeln!(out, "{t:e},{u:e}");
    }
    out
}

fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut out = String::from("eps,w_norm,e_l2,margin\n");
    for d in &outcome.report.diagnostics {
        let e_cell = d.e_l2.map(|e| format!("{e:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:e},{:e},{},{:e}",
            d.epsilon, d.w_norm, e_cell, d.margin
        );
    }
    out
}

/// File-name-safe rendering of an ε value (shortest round-trip decimal).
fn eps_tag(eps: f64) -> String {
    format!("{eps}")
}

/// Writes one run's surface CSV, cross-section CSV, and run record. Returns
/// the record for reporting.
fn emit_run(
    run: &ScenarioRun,
    snapshot_base: &ScenarioConfig,
    out_dir: &Path,
    pipeline_ms: u64,
) -> Result<RunRecord, CliError> {
    fs::create_dir_all(out_dir)?;
    let t0 = Instant::now();
    let d = &run.diagnostics;
    let stem = format!("{}_eps{}", d.scenario, eps_tag(d.epsilon));
    let surface_name = format!("{stem}_surface.csv");
    let xsection_name = format!("{stem}_xsection.csv");
    write_atomic(&out_dir.join(&surface_name), &surface_csv(run))?;
    write_atomic(&out_dir.join(&xsection_name), &cross_section_csv(run, 0.5))?;

    let mut snapshot = snapshot_base.clone();
    snapshot.discretization.n = d.n;
    snapshot.discretization.m = d.m;
    snapshot.sweep = Some(SweepConfig {
        eps: vec![d.epsilon],
    });
    let mut record = RunRecord {
        schema: RUN_SCHEMA.to_string(),
        scenario: d.scenario.clone(),
        epsilon: d.epsilon,
        eps_eff: d.eps_eff,
        snapshot,
        timing: TimingRecord {
            pipeline_ms,
            output_ms: 0,
        },
        files: FileManifest {
            surface: surface_name,
            cross_section: xsection_name,
        },
        reports: report_from_run(run),
    };
    record.timing.output_ms = t0.elapsed().as_millis() as u64;
    let text = toml::to_string_pretty(&record)
        .map_err(|e| CliError::Runtime(format!("cannot serialize run record: {e}")))?;
    write_atomic(&out_dir.join(format!("{stem}_record.toml")), &text)?;
    Ok(record)
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "beamcli",
    version,
    about = "Clamped-beam solver for distributional coefficients: \
             mollify, assemble, march, and classify ε-sweeps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run one scenario at one mollification parameter.
    Run(RunArgs),
    /// Run a scenario across an ε sweep and classify the solution net.
    Sweep(SweepArgs),
    /// Mesh-refinement study on the manufactured benchmark.
    Convergence(ConvergenceArgs),
    /// Aggregate run records from a directory into one table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReparamArg {
    Identity,
    Log,
    Loglog,
}

#[derive(Debug, Args)]
struct ScenarioSource {
    /// Built-in scenario name (regular, logC, deltaC, deltaB, deltaTG).
    name: Option<String>,
    /// Built-in scenario name (alternative to the positional form).
    #[arg(long, conflicts_with = "name")]
    scenario: Option<String>,
    /// Path to a scenario config file.
    #[arg(long, conflicts_with_all = ["name", "scenario"])]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CommonOverrides {
    /// Override the number of spatial elements.
    #[arg(long)]
    n: Option<usize>,
    /// Override the number of time steps.
    #[arg(long)]
    m: Option<usize>,
    /// Override the ε-scale reparametrization.
    #[arg(long, value_enum)]
    reparam: Option<ReparamArg>,
    /// Output directory (default: config [output].dir, else the current
    /// directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Mollification parameter (default: the first swept value).
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    overrides: CommonOverrides,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Comma-separated ε values (default: the scenario's sweep).
    #[arg(long = "eps-list", value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    #[command(flatten)]
    overrides: CommonOverrides,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    /// Comma-separated element counts; each runs with m = n.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
    sizes: Vec<usize>,
    /// Output directory for the study CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory holding run records (default: current directory).
    dir: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

fn resolve_scenario(
    source: &ScenarioSource,
    overrides: &CommonOverrides,
) -> Result<(BeamScenario, ScenarioConfig, PathBuf), CliError> {
    let mut cfg = match (&source.name, &source.scenario, &source.config) {
        (_, _, Some(path)) => load_config(path)?,
        (Some(name), None, None) | (None, Some(name), None) => {
            let sc = BeamScenario::by_name(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown scenario \"{name}\" (built-ins: {})",
                    catalog()
                        .iter()
                        .map(|s| s.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })?;
            scenario_to_config(&sc)
        }
        (None, None, None) => {
            return Err(CliError::Config(
                "no scenario given: pass a built-in name or --config <file>".to_string(),
            ))
        }
        _ => unreachable!("clap conflicts prevent combined sources"),
    };

    if let Some(n) = overrides.n {
        cfg.discretization.n = n;
    }
    if let Some(m) = overrides.m {
        cfg.discretization.m = m;
    }
    if let Some(r) = overrides.reparam {
        cfg.discretization.reparam = match r {
            ReparamArg::Identity => "identity",
            ReparamArg::Log => "log",
            ReparamArg::Loglog => "loglog",
        }
        .to_string();
    }
    let out_dir = overrides
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| PathBuf::from(&o.dir)))
        .unwrap_or_else(|| PathBuf::from("."));
    let scenario = config_to_scenario(&cfg)?;
    Ok((scenario, cfg, out_dir))
}

fn print_run_summary(record: &RunRecord) {
    let r = &record.reports;
    println!(
        "{} at eps = {} (effective {})",
        record.scenario, record.epsilon, record.eps_eff
    );
    println!(
        "  n = {}, m = {}",
        record.snapshot.discretization.n, record.snapshot.discretization.m
    );
    println!("  w_norm      = {:e}", r.w_norm);
    if let Some(e) = r.e_l2 {
        println!("  e_l2        = {e:e}");
    }
    println!("  margin      = {:e}", r.margin);
    println!("  energy_rhs  = {:e}", r.energy_rhs);
    println!("  c0 = {:e}  (grid min of c_eps: {:e})", r.c0, r.c_min_grid);
    println!(
        "  c_sup = {:e}  b_sup = {:e}  c_half = {:e}",
        r.c_sup, r.b_sup, r.c_half
    );
    println!(
        "  wrote {} / {} / record ({} ms pipeline)",
        record.files.surface, record.files.cross_section, record.timing.pipeline_ms
    );
    for w in &r.warnings {
        eprintln!("  warning: {w}");
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let (sc, cfg, out_dir) = resolve_scenario(&args.source, &args.overrides)?;
    let eps = args
        .eps
        .or_else(|| sc.eps_list.first().copied())
        .ok_or_else(|| CliError::Config("no ε given and the sweep list is empty".to_string()))?;
    let t0 = Instant::now();
    let run = run_scenario(&sc, eps)?;
    let pipeline_ms = t0.elapsed().as_millis() as u64;
    let record = emit_run(&run, &cfg, &out_dir, pipeline_ms)?;
    print_run_summary(&record);
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let (sc, cfg, out_dir) = resolve_scenario(&args.source, &args.overrides)?;
    let eps_list = args
        .eps_list
        .clone()
        .filter(|l| !l.is_empty())
        .unwrap_or_else(|| sc.eps_list.clone());
    let t0 = Instant::now();
    let outcome = sweep(&sc, &eps_list)?;
    let pipeline_ms = t0.elapsed().as_millis() as u64;
    let per_run_ms = pipeline_ms / eps_list.len().max(1) as u64;
    for run in &outcome.runs {
        emit_run(run, &cfg, &out_dir, per_run_ms)?;
    }
    fs::create_dir_all(&out_dir)?;
    write_atomic(
        &out_dir.join(format!("{}_sweep.csv", sc.name)),
        &sweep_csv(&outcome),
    )?;

    println!("{} sweep over {} ε value(s)", sc.name, eps_list.len());
    println!(
        "{:<10} {:<14} {:<14} {:<14}",
        "eps", "w_norm", "e_l2", "margin"
    );
    for d in &outcome.report.diagnostics {
        let e_cell = d
            .e_l2
            .map(|e| format!("{e:.6e}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "{:<10} {:<14.6e} {:<14} {:<14.6e}",
            d.epsilon, d.w_norm, e_cell, d.margin
        );
        for w in &d.warnings {
            eprintln!("  warning (eps {}): {w}", d.epsilon);
        }
    }
    if let Some(fits) = &outcome.report.fits {
        println!(
            "fits: power C·eps^-N with N = {:.4} (R² = {:.4}); \
             log C·log(1/eps) with C = {:.4} (R² = {:.4})",
            fits.power_n, fits.power_r2, fits.log_c, fits.log_r2
        );
    }
    println!("verdict: {}", outcome.report.verdict);
    println!("wrote {}_sweep.csv ({} ms total)", sc.name, pipeline_ms);
    Ok(())
}

fn cmd_convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    if args.sizes.len() < 2 {
        return Err(CliError::Config(
            "need at least two sizes to fit a convergence rate".to_string(),
        ));
    }
    let sizes: Vec<(usize, usize)> = args.sizes.iter().map(|&n| (n, n)).collect();
    let points = convergence_study(&sizes)?;
    let rate = fitted_rate(&points);
    println!("{:<8} {:<8} {:<14}", "n", "m", "e_l2");
    let mut csv = String::from("n,m,e_l2\n");
    for p in &points {
        println!("{:<8} {:<8} {:<14.6e}", p.n, p.m, p.e_l2);
        let _ = writeln!(csv, "{},{},{:e}", p.n, p.m, p.e_l2);
    }
    if args.sizes.len() < 3 {
        println!("fitted rate: {rate:.4} (low-confidence: two-point fit)");
    } else {
        println!("fitted rate: {rate:.4}");
    }
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
        write_atomic(&out.join("convergence.csv"), &csv)?;
        println!("wrote convergence.csv");
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let dir = args.dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut groups: BTreeMap<String, Vec<RunRecord>> = BTreeMap::new();
    let mut skipped: Vec<(String, String)> = Vec::new();
    let entries = fs::read_dir(&dir)
        .map_err(|e| CliError::Config(format!("cannot read directory {}: {e}", dir.display())))?;
    for entry in entries {
        let entry = entry?;
        let path = entry.path();
        if path.extension().map(|e| e != "toml").unwrap_or(true) {
            continue;
        }
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                skipped.push((name, e.to_string()));
                continue;
            }
        };
        match toml::from_str::<RunRecord>(&text) {
            Ok(rec) if rec.schema == RUN_SCHEMA => {
                groups.entry(rec.scenario.clone()).or_default().push(rec);
            }
            Ok(rec) => {
                skipped.push((name, format!("unknown schema \"{}\"", rec.schema)));
            }
            Err(e) => {
                // Keep only the first line of toml's multi-line diagnostics.
                let first = e
                    .to_string()
                    .lines()
                    .next()
                    .unwrap_or("parse error")
                    .to_string();
                skipped.push((name, first));
            }
        }
    }

    println!(
        "{:<12} {:<10} {:<6} {:<6} {:<14} {:<14} {:<14}",
        "scenario", "eps", "n", "m", "w_norm", "e_l2", "margin"
    );
    for (name, records) in &mut groups {
        records.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
        for r in records.iter() {
            let e_cell = r
                .reports
                .e_l2
                .map(|e| format!("{e:.6e}"))
                .unwrap_or_else(|| "-".to_string());
            println!(
                "{:<12} {:<10} {:<6} {:<6} {:<14.6e} {:<14} {:<14.6e}",
                name,
                r.epsilon,
                r.snapshot.discretization.n,
                r.snapshot.discretization.m,
                r.reports.w_norm,
                e_cell,
                r.reports.margin
            );
        }
    }
    for (name, why) in &skipped {
        eprintln!("skipped {name}: {why}");
    }
    Ok(())
}

/// Parses the command line and runs the requested subcommand; returns the
/// process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Convergence(args) => cmd_convergence(args),
        Cmd::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("beamcli: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_configs_round_trip() {
        for sc in catalog() {
            let cfg = scenario_to_config(&sc);
            let text = toml::to_string_pretty(&cfg).unwrap();
            let parsed: ScenarioConfig = toml::from_str(&text).unwrap();
            assert_eq!(parsed, cfg, "{} config must round-trip", sc.name);
            let rebuilt = config_to_scenario(&parsed).unwrap();
            assert_eq!(rebuilt.name, sc.name);
            assert_eq!(rebuilt.n, sc.n);
            assert_eq!(rebuilt.m, sc.m);
            assert_eq!(rebuilt.eps_list, sc.eps_list);
            assert_eq!(rebuilt.c.terms.len(), sc.c.terms.len());
            assert_eq!(rebuilt.exact.is_some(), sc.exact.is_some());
        }
    }

    #[test]
    fn term_records_report_field_and_index() {
        let bad = TermRecord {
            kind: "dirac".to_string(),
            value: None,
            label: None,
            x0: Some(0.5),
            weight: None,
            jump: None,
        };
        let err = bad.to_term("coefficients.c", 1).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.message().contains("coefficients.c[1]"));
        assert!(err.message().contains("weight"));

        let unknown = TermRecord {
            kind: "delta".to_string(),
            value: None,
            label: None,
            x0: None,
            weight: None,
            jump: None,
        };
        let err = unknown.to_term("coefficients.b", 0).unwrap_err();
        assert!(err.message().contains("unknown term kind"));
    }

    #[test]
    fn forcing_needs_both_factors_or_neither() {
        let mut cfg = scenario_to_config(&BeamScenario::by_name("deltaC").unwrap());
        cfg.coefficients.g_time.clear();
        let err = config_to_scenario(&cfg).unwrap_err();
        assert!(err.message().contains("g_space and g_time"));
        cfg.coefficients.g_space.clear();
        let sc = config_to_scenario(&cfg).unwrap();
        assert!(sc.g.space.terms.is_empty());
    }

    #[test]
    fn reparam_names_parse_and_unknown_is_config_error() {
        assert_eq!(parse_reparam("identity", None).unwrap(), Reparam::Identity);
        assert_eq!(
            parse_reparam("log", Some(2)).unwrap(),
            Reparam::LogType { n: 2 }
        );
        assert_eq!(parse_reparam("loglog", None).unwrap(), Reparam::LogLog);
        assert!(parse_reparam("exp", None).is_err());
    }

    #[test]
    fn catalog_config_recovers_exact_solution_iff_data_match() {
        let cfg = scenario_to_config(&BeamScenario::by_name("regular").unwrap());
        let sc = config_to_scenario(&cfg).unwrap();
        assert!(
            sc.exact.is_some(),
            "catalog-equal config keeps the reference"
        );
        // A coarser mesh solves the same equation: the reference stays.
        let mut coarse = cfg.clone();
        coarse.discretization.n = 64;
        assert!(config_to_scenario(&coarse).unwrap().exact.is_some());
        // Different equation data: the reference no longer applies.
        let mut other = cfg.clone();
        other
            .coefficients
            .b
            .push(TermRecord::from_kind(&TermKind::Dirac {
                x0: 0.5,
                weight: 1.0,
            }));
        assert!(config_to_scenario(&other).unwrap().exact.is_none());
    }

    #[test]
    fn sweep_csv_leaves_e_l2_cell_empty_when_unknown() {
        let sc = BeamScenario::by_name("deltaTG").unwrap();
        let outcome = sweep(&sc, &[0.2, 0.1]).unwrap();
        let csv = sweep_csv(&outcome);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "eps,w_norm,e_l2,margin");
        assert_eq!(lines.len(), 3);
        for line in &lines[1..] {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 4);
            assert!(cells[2].is_empty(), "no reference for deltaTG: {line}");
        }
    }
}
