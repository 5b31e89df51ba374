//! Built-in experiment catalog and the end-to-end solver pipeline.
//!
//! A [`BeamScenario`] bundles everything one clamped-beam experiment needs:
//! distributional coefficients c and b, a separable forcing g, initial data,
//! the time horizon, and the discretization sizes. [`run_scenario`] takes a
//! scenario through the whole chain —
//!
//! > certify positivity → mollify at scale ε → assemble → march → diagnose
//!
//! — and returns the trajectory together with norm and energy diagnostics.
//! [`sweep`] fans a scenario out over a list of ε values in parallel and
//! classifies the resulting net of solution norms. The perturbation and
//! consistency probes re-run scenarios against deliberately modified twins
//! to measure how strongly the computed family depends on the chosen
//! regularization.

use std::env;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::asympt::{
    classify_net, dual_h2_norm, ehrling_constant, net_fits, trajectory_distance_l2,
    trajectory_distance_w, w_norm_squared, EnergyConstants, NetFits, Verdict,
};
use crate::distmodel::{
    decompose_positive, Axis, DistError, DistTerm, DistributionalExpr, Forcing, SmoothFn, TermKind,
};
use crate::femcore::{
    assemble, build_space, l2_error, project_initial, FemError, HermiteSystem, InitialData,
    QuadratureSpec,
};
use crate::march::{
    cross_section, newmark_march, replica_march, Load, MarchError, TimeGrid, Trajectory,
};
use crate::mollify::{
    exact_field, mollify_expr, mollify_positive, separable_mollify_2d, MollifierNet, MollifyError,
    RegularizedField, Reparam,
};
use crate::quad;

/// The standard mollification sweep, largest scale first.
pub const SWEEP_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.01];

/// Grid intervals used for sup/min estimates of regularized coefficients.
const COEFF_GRID: usize = 10_000;

/// Safety slack subtracted from a grid-certified stiffness floor.
const FLOOR_SLACK: f64 = 1e-3;

/// Convergence tolerance for the temporal L² quadrature of the forcing.
const TIME_QUAD_TOL: f64 = 1e-11;

/// Time-marching scheme run by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// First-order dissipative scheme (M + h²K)u^{k+1} = h²ℓ + M(2uᵏ − uᵏ⁻¹)
    /// with a smoothed start; the pipeline default.
    Replica,
    /// Average-acceleration Newmark (β = ¼, γ = ½), energy-conserving.
    Newmark,
}

/// A closed-form reference solution u(x, t).
#[derive(Clone)]
pub struct ExactSolution(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl ExactSolution {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ExactSolution(Arc::new(f))
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.0)(x, t)
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactSolution(..)")
    }
}

/// One complete experiment definition.
#[derive(Debug, Clone)]
pub struct BeamScenario {
    /// Catalog key (also the CLI name).
    pub name: String,
    /// One-line human description.
    pub description: String,
    /// Bending stiffness (spatial axis). Must be certifiably positive.
    pub c: DistributionalExpr,
    /// Axial coefficient (spatial axis).
    pub b: DistributionalExpr,
    /// Separable transversal forcing g(x, t) = g_space(x) · g_time(t).
    pub g: Forcing,
    /// Initial displacement.
    pub f1: DistributionalExpr,
    /// Initial velocity.
    pub f2: DistributionalExpr,
    /// Time horizon T.
    pub t_final: f64,
    /// Number of spatial elements.
    pub n: usize,
    /// Number of time steps.
    pub m: usize,
    /// Default mollification sweep.
    pub eps_list: Vec<f64>,
    /// Scale reparametrization applied to every ε.
    pub reparam: Reparam,
    /// Explicit stiffness floor; when absent the floor is certified
    /// automatically (see [`BeamScenario::certified_c0`]).
    pub c0_override: Option<f64>,
    /// Time integrator.
    pub integrator: Integrator,
    /// Closed-form solution when one is known.
    pub exact: Option<ExactSolution>,
}

impl BeamScenario {
    /// The certified lower bound c₀ for the bending stiffness.
    ///
    /// Policy: an explicit override wins. Otherwise, when the locally
    /// integrable part of c is exactly a constant (impulsive terms are
    /// nonnegative bumps and only help), that constant is the floor. For a
    /// genuinely varying integrable part the floor is its minimum on a
    /// 10⁴-point grid over the mollification-extended window, minus a 1e−3
    /// slack for grid resolution. The window extension is the largest
    /// effective scale of the scenario's own sweep, so one certificate
    /// covers every run of the sweep.
    pub fn certified_c0(&self) -> Result<f64, PipelineError> {
        if let Some(c0) = self.c0_override {
            if !(c0 > 0.0) {
                return Err(PipelineError::Model(DistError::NotProvablyPositive {
                    reason: format!("stiffness floor override {c0} is not positive"),
                }));
            }
            return Ok(c0);
        }
        let integrable_is_constant = self.c.terms.iter().all(|t| {
            matches!(
                t.kind,
                TermKind::Constant { .. } | TermKind::Dirac { .. } | TermKind::Heaviside { .. }
            )
        });
        if integrable_is_constant {
            let c0 = self.c.constant_part();
            if !(c0 > 0.0) {
                return Err(PipelineError::Model(DistError::NotProvablyPositive {
                    reason: format!("constant part {c0} of the stiffness is not positive"),
                }));
            }
            return Ok(c0);
        }
        // Grid-certify the integrable part over [−ext, 1+ext].
        let mut ext = 0.0f64;
        for &e in &self.eps_list {
            ext = ext.max(crate::mollify::effective_epsilon(e, self.reparam)?);
        }
        let (lo, hi) = (-ext, 1.0 + ext);
        let mut min = f64::INFINITY;
        'grid: for k in 0..=COEFF_GRID {
            let x = lo + (hi - lo) * k as f64 / COEFF_GRID as f64;
            let mut v = 0.0;
            for term in &self.c.terms {
                match &term.kind {
                    TermKind::Constant { value } => v += value,
                    TermKind::Smooth(f) => v += f.eval(x),
                    TermKind::NegLog { x0 } => {
                        if (x - x0).abs() < 1e-12 {
                            continue 'grid; // singular point: +∞, never the minimum
                        }
                        v += -(x - x0).abs().ln();
                    }
                    TermKind::Dirac { .. } | TermKind::Heaviside { .. } => {}
                }
            }
            min = min.min(v);
        }
        let c0 = min - FLOOR_SLACK;
        if !(c0 > 0.0) {
            return Err(PipelineError::Model(DistError::NotProvablyPositive {
                reason: format!(
                    "grid floor {min:.6} over [{lo:.3}, {hi:.3}] leaves no positive margin"
                ),
            }));
        }
        Ok(c0)
    }

    /// The constant-coefficient companion used for irregularity-error
    /// trends: the same scenario with c and b replaced by their constant
    /// parts. Defined when at least one of c, b carries non-constant terms
    /// and the resulting stiffness is still positive.
    pub fn baseline_variant(&self) -> Option<BeamScenario> {
        let c_irregular = !self.c.is_constant();
        let b_irregular = !self.b.is_constant();
        if !c_irregular && !b_irregular {
            return None;
        }
        let c_const = self.c.constant_part();
        if c_const <= 0.0 {
            return None;
        }
        let mut base = self.clone();
        base.name = format!("{}-baseline", self.name);
        base.description = format!("constant-coefficient companion of {}", self.name);
        base.c = DistributionalExpr::constant(Axis::Space, c_const);
        base.b = DistributionalExpr::constant(Axis::Space, self.b.constant_part());
        base.c0_override = Some(c_const);
        base.exact = None;
        Some(base)
    }

    /// Looks a scenario up in the built-in catalog.
    pub fn by_name(name: &str) -> Option<BeamScenario> {
        catalog().into_iter().find(|s| s.name == name)
    }
}

/// Named smooth functions available to scenario definitions and config
/// files (term records of kind `smooth` refer to these by label).
pub fn named_smooth(label: &str) -> Option<SmoothFn> {
    match label {
        "sin_t" => Some(SmoothFn::with_derivative("sin_t", f64::sin, f64::cos)),
        "cos_t" => Some(SmoothFn::with_derivative("cos_t", f64::cos, |t| -t.sin())),
        // 24 + (12x² − 12x + 2) − x²(x−1)²: paired with the sin_t factor this
        // forces the manufactured displacement sin(t)·x²(x−1)².
        "forcing_poly" => Some(SmoothFn::with_derivative(
            "forcing_poly",
            |x| 24.0 + (12.0 * x * x - 12.0 * x + 2.0) - x * x * (x - 1.0) * (x - 1.0),
            |x| 24.0 * x - 12.0 - 2.0 * x * (x - 1.0) * (2.0 * x - 1.0),
        )),
        // x²(x−1)², the clamped bubble of the manufactured solution.
        "quartic_bubble" => Some(SmoothFn::with_derivative(
            "quartic_bubble",
            |x| x * x * (x - 1.0) * (x - 1.0),
            |x| 2.0 * x * (x - 1.0) * (2.0 * x - 1.0),
        )),
        _ => None,
    }
}

/// The five built-in experiments.
pub fn catalog() -> Vec<BeamScenario> {
    let one_space = DistributionalExpr::constant(Axis::Space, 1.0);
    let one_time = DistributionalExpr::constant(Axis::Time, 1.0);
    let zero_space = DistributionalExpr::zero(Axis::Space);
    let quartic = |x: f64| x * x * (x - 1.0) * (x - 1.0);

    vec![
        BeamScenario {
            name: "regular".to_string(),
            description: "smooth manufactured benchmark with known solution sin(t)x^2(x-1)^2"
                .to_string(),
            c: one_space.clone(),
            b: one_space.clone(),
            g: Forcing::new(
                DistributionalExpr::new(
                    Axis::Space,
                    vec![DistTerm::smooth(named_smooth("forcing_poly").unwrap())],
                ),
                DistributionalExpr::new(
                    Axis::Time,
                    vec![DistTerm::smooth(named_smooth("sin_t").unwrap())],
                ),
            ),
            f1: zero_space.clone(),
            f2: zero_space.clone(),
            t_final: 1.0,
            n: 256,
            m: 256,
            eps_list: SWEEP_EPS.to_vec(),
            reparam: Reparam::Identity,
            c0_override: None,
            integrator: Integrator::Replica,
            exact: Some(ExactSolution::new(move |x, t| t.sin() * quartic(x))),
        },
        BeamScenario {
            name: "logC".to_string(),
            description: "log-singular bending stiffness -log|x-1/2|".to_string(),
            c: DistributionalExpr::new(Axis::Space, vec![DistTerm::neglog(0.5)]),
            b: one_space.clone(),
            g: Forcing::new(one_space.clone(), one_time.clone()),
            f1: zero_space.clone(),
            f2: zero_space.clone(),
            t_final: 1.0,
            n: 256,
            m: 128,
            eps_list: SWEEP_EPS.to_vec(),
            reparam: Reparam::Identity,
            c0_override: None,
            integrator: Integrator::Replica,
            exact: None,
        },
        BeamScenario {
            name: "deltaC".to_string(),
            description: "point irregularity in the bending stiffness: c = 1 + delta(x-1/2)"
                .to_string(),
            c: DistributionalExpr::new(
                Axis::Space,
                vec![DistTerm::constant(1.0), DistTerm::dirac(0.5, 1.0)],
            ),
            b: one_space.clone(),
            g: Forcing::new(one_space.clone(), one_time.clone()),
            f1: zero_space.clone(),
            f2: zero_space.clone(),
            t_final: 1.0,
            n: 256,
            m: 128,
            eps_list: SWEEP_EPS.to_vec(),
            reparam: Reparam::Identity,
            c0_override: None,
            integrator: Integrator::Replica,
            exact: None,
        },
        BeamScenario {
            name: "deltaB".to_string(),
            description: "point axial load: b = delta(x-1/2)".to_string(),
            c: one_space.clone(),
            b: DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]),
            g: Forcing::new(one_space.clone(), one_time.clone()),
            f1: zero_space.clone(),
            f2: zero_space.clone(),
            t_final: 1.0,
            n: 256,
            m: 128,
            eps_list: SWEEP_EPS.to_vec(),
            reparam: Reparam::Identity,
            c0_override: None,
            integrator: Integrator::Replica,
            exact: None,
        },
        BeamScenario {
            name: "deltaTG".to_string(),
            description: "transversal force impulse in time: g = delta(t-0.2)".to_string(),
            c: one_space.clone(),
            b: one_space,
            g: Forcing::new(
                one_time_to_space(&one_time),
                DistributionalExpr::new(Axis::Time, vec![DistTerm::dirac(0.2, 1.0)]),
            ),
            f1: zero_space.clone(),
            f2: zero_space,
            t_final: 1.0,
            n: 128,
            m: 256,
            eps_list: SWEEP_EPS.to_vec(),
            reparam: Reparam::Identity,
            c0_override: None,
            integrator: Integrator::Replica,
            exact: None,
        },
    ]
}

/// Rebuilds a constant expression on the spatial axis (helper so the
/// catalog can reuse the unit constant for both axes).
fn one_time_to_space(one_time: &DistributionalExpr) -> DistributionalExpr {
    DistributionalExpr::constant(Axis::Space, one_time.constant_part())
}

/// Anything the pipeline can fail with.
#[derive(Debug)]
pub enum PipelineError {
    /// The model structure is invalid (e.g. positivity cannot be certified).
    Model(DistError),
    /// Regularization failed (bad ε, window violation, …).
    Mollify(MollifyError),
    /// Spatial discretization failed.
    Fem(FemError),
    /// Time marching failed.
    March(MarchError),
    /// The requested operation does not apply to this scenario.
    Unsupported(String),
    /// A sweep member failed; carries the ε it failed at.
    AtEpsilon {
        epsilon: f64,
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    fn at(self, epsilon: f64) -> PipelineError {
        PipelineError::AtEpsilon {
            epsilon,
            source: Box::new(self),
        }
    }

    /// True when the error reflects bad input (configuration) rather than a
    /// numerical failure mid-computation.
    pub fn is_config_error(&self) -> bool {
        match self {
            PipelineError::Model(_) | PipelineError::Mollify(_) | PipelineError::Unsupported(_) => {
                true
            }
            PipelineError::Fem(_) | PipelineError::March(_) => false,
            PipelineError::AtEpsilon { source, .. } => source.is_config_error(),
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Model(e) => write!(f, "model error: {e}"),
            PipelineError::Mollify(e) => write!(f, "regularization error: {e}"),
            PipelineError::Fem(e) => write!(f, "discretization error: {e}"),
            PipelineError::March(e) => write!(f, "time-marching error: {e}"),
            PipelineError::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            PipelineError::AtEpsilon { epsilon, source } => {
                write!(f, "eps={epsilon}: {source}")
            }
        }
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            PipelineError::Model(e) => Some(e),
            PipelineError::Mollify(e) => Some(e),
            PipelineError::Fem(e) => Some(e),
            PipelineError::March(e) => Some(e),
            PipelineError::Unsupported(_) => None,
            PipelineError::AtEpsilon { source, .. } => Some(source.as_ref()),
        }
    }
}

impl From<DistError> for PipelineError {
    fn from(e: DistError) -> Self {
        PipelineError::Model(e)
    }
}
impl From<MollifyError> for PipelineError {
    fn from(e: MollifyError) -> Self {
        PipelineError::Mollify(e)
    }
}
impl From<FemError> for PipelineError {
    fn from(e: FemError) -> Self {
        PipelineError::Fem(e)
    }
}
impl From<MarchError> for PipelineError {
    fn from(e: MarchError) -> Self {
        PipelineError::March(e)
    }
}

/// Scalar diagnostics of one pipeline run.
#[derive(Debug, Clone)]
pub struct RunDiagnostics {
    /// Scenario name.
    pub scenario: String,
    /// Spatial elements and time steps of this run.
    pub n: usize,
    pub m: usize,
    /// Nominal mollification parameter.
    pub epsilon: f64,
    /// Effective scale after reparametrization.
    pub eps_eff: f64,
    /// Solution-space norm ‖(u, u̇)‖_W of the trajectory.
    pub w_norm: f64,
    /// Max-over-time spatial L² error against the scenario's closed-form
    /// solution (populated when one is known; sweeps may overwrite it with a
    /// baseline-comparison error instead).
    pub e_l2: Option<f64>,
    /// Energy-bound margin rhs / ‖u‖²_W (+∞ for zero data).
    pub margin: f64,
    /// Right-hand side of the a-priori energy bound.
    pub energy_rhs: f64,
    /// Constants entering the bound.
    pub constants: EnergyConstants,
    /// Discrete dual norm of the assembled spatial forcing.
    pub g_space_dual: f64,
    /// ∫₀ᵀ τ_ε(t)² dt of the temporal forcing factor.
    pub time_l2_sq: f64,
    /// Full forcing contribution ‖g_ε‖²: (spatial dual)² · temporal L².
    pub g_dual_sq: f64,
    /// Discrete H² norm² of the initial displacement.
    pub f1_h2_sq: f64,
    /// Discrete L² norm² of the initial velocity.
    pub f2_l2_sq: f64,
    /// Grid minimum of the regularized stiffness on [0, 1].
    pub c_min_grid: f64,
    /// Resolution and sampling warnings from assembly and marching.
    pub warnings: Vec<String>,
}

/// A completed pipeline run: diagnostics plus the full trajectory and the
/// assembled system it was computed on.
#[derive(Debug)]
pub struct ScenarioRun {
    pub diagnostics: RunDiagnostics,
    pub trajectory: Trajectory,
    pub system: HermiteSystem,
    pub grid: TimeGrid,
}

/// Net-level summary of a sweep: samples of a scalar metric over ε, both
/// growth-law fits, and the classification verdict.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub scenario: String,
    /// What the samples measure ("w_norm" for solution sweeps, "w_distance"
    /// for perturbation/consistency probes).
    pub metric: String,
    /// (ε, metric) pairs in sweep order.
    pub samples: Vec<(f64, f64)>,
    /// Growth-law fits; absent when the metric is not fit-able (e.g. an
    /// exactly zero distance net).
    pub fits: Option<NetFits>,
    pub verdict: Verdict,
    /// Per-run scalar diagnostics (empty for probe reports).
    pub diagnostics: Vec<RunDiagnostics>,
}

/// A sweep's full output: the report plus every run (trajectories included).
#[derive(Debug)]
pub struct SweepOutcome {
    pub report: SweepReport,
    pub runs: Vec<ScenarioRun>,
}

/// How the pipeline realizes coefficient fields.
enum FieldMode {
    /// Mollify at the run's scale; optionally shift the stiffness by a
    /// constant (perturbation probes).
    Mollified { c_shift: f64 },
    /// Evaluate smooth expressions exactly (the ε → 0 reference of the
    /// consistency probe). Quadrature still resolves the run's scale so a
    /// constant-coefficient comparison is bit-identical.
    Exact,
}

/// Runs the full pipeline once at the given ε.
pub fn run_scenario(sc: &BeamScenario, epsilon: f64) -> Result<ScenarioRun, PipelineError> {
    pipeline(sc, epsilon, FieldMode::Mollified { c_shift: 0.0 })
}

fn pipeline(
    sc: &BeamScenario,
    epsilon: f64,
    mode: FieldMode,
) -> Result<ScenarioRun, PipelineError> {
    let net = MollifierNet::new(epsilon, sc.reparam)?;
    let eps_eff = net.effective();
    let mesh = build_space(sc.n);
    let window_x = (0.0, 1.0);
    let window_t = (0.0, sc.t_final);

    // Coefficient fields.
    let c0 = sc.certified_c0()?;
    let (c_field, b_field, gs_field, gt_field, f1_field, f2_field) = match &mode {
        FieldMode::Mollified { c_shift } => {
            let cert_window = (-eps_eff, 1.0 + eps_eff);
            let decomp = decompose_positive(&sc.c, c0, cert_window)?;
            let mut c_field = mollify_positive(&decomp, &net, window_x)?;
            if *c_shift != 0.0 {
                c_field = c_field.shifted(*c_shift);
            }
            let b_field = mollify_expr(&sc.b, &net, window_x)?;
            let g2d = separable_mollify_2d(&sc.g, &net, window_x, window_t)?;
            let f1_field = mollify_expr(&sc.f1, &net, window_x)?;
            let f2_field = mollify_expr(&sc.f2, &net, window_x)?;
            (c_field, b_field, g2d.space, g2d.time, f1_field, f2_field)
        }
        FieldMode::Exact => (
            exact_field(&sc.c)?,
            exact_field(&sc.b)?,
            exact_field(&sc.g.space)?,
            exact_field(&sc.g.time)?,
            exact_field(&sc.f1)?,
            exact_field(&sc.f2)?,
        ),
    };

    // Spatial system, resolved to the run's scale.
    let quad_spec = QuadratureSpec::resolving(&mesh, eps_eff);
    let sys = assemble(&c_field, &b_field, &gs_field, mesh, quad_spec);

    // Initial data.
    let u0 = project_initial(InitialData::Field(&f1_field), mesh, quad_spec)?;
    let v0 = project_initial(InitialData::Field(&f2_field), mesh, quad_spec)?;

    // March.
    let grid = TimeGrid::new(sc.t_final, sc.m);
    let time_for_load = gt_field.clone();
    let mut load = Load::separable(sys.load_space.clone(), move |t| time_for_load.eval(t));
    let time_has_atoms =
        sc.g.time
            .terms
            .iter()
            .any(|t| matches!(t.kind, TermKind::Dirac { .. } | TermKind::Heaviside { .. }));
    if time_has_atoms && matches!(mode, FieldMode::Mollified { .. }) {
        load = load.with_time_scale(eps_eff);
    }
    let k = sys.stiffness(1.0);
    let traj = match sc.integrator {
        Integrator::Replica => replica_march(&sys.m, &k, &load, grid, &u0, &v0)?,
        Integrator::Newmark => newmark_march(&sys.m, &k, &load, grid, &u0, &v0)?,
    };

    // Diagnostics.
    let w2 = w_norm_squared(&traj, &sys.g2, &sys.g0);
    let c_sup = c_field.sup_abs_on((0.0, 1.0), COEFF_GRID);
    let b_sup = b_field.sup_abs_on((0.0, 1.0), COEFF_GRID);
    let c_min_grid = c_field.min_on((0.0, 1.0), COEFF_GRID);
    let ehrling = ehrling_constant(&sys.g0, &sys.g1, &sys.g2);
    let constants = EnergyConstants {
        c0,
        c_sup,
        b_sup,
        c_half: ehrling.constant,
        t_final: sc.t_final,
    };
    let g_space_dual = dual_h2_norm(&sys.load_space, &sys.g2);
    let gt = gt_field.clone();
    let time_l2_sq = quad::adaptive(
        move |t| {
            let v = gt.eval(t);
            v * v
        },
        0.0,
        sc.t_final,
        TIME_QUAD_TOL,
    );
    let g_dual_sq = g_space_dual * g_space_dual * time_l2_sq;
    let f1_h2_sq = sys.g2.quadratic_form(&u0);
    let f2_l2_sq = sys.g0.quadratic_form(&v0);
    let energy_rhs = constants.energy_rhs(f1_h2_sq, f2_l2_sq, g_dual_sq);
    let margin = if w2 > 0.0 {
        energy_rhs / w2
    } else {
        f64::INFINITY
    };
    let e_l2 = sc.exact.as_ref().map(|ex| {
        traj.u
            .iter()
            .zip(&traj.times)
            .map(|(u, &t)| l2_error(u, mesh, |x| ex.eval(x, t)))
            .fold(0.0, f64::max)
    });
    let mut warnings = sys.warnings.clone();
    warnings.extend(traj.warnings.iter().cloned());

    Ok(ScenarioRun {
        diagnostics: RunDiagnostics {
            scenario: sc.name.clone(),
            n: sc.n,
            m: sc.m,
            epsilon,
            eps_eff,
            w_norm: w2.sqrt(),
            e_l2,
            margin,
            energy_rhs,
            constants,
            g_space_dual,
            time_l2_sq,
            g_dual_sq,
            f1_h2_sq,
            f2_l2_sq,
            c_min_grid,
            warnings,
        },
        trajectory: traj,
        system: sys,
        grid,
    })
}

/// Runs `f` inside a worker pool sized by the `BEAMCLI_WORKERS` environment
/// variable, or on the default global pool when the variable is unset or
/// unusable.
pub fn with_worker_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let requested = env::var("BEAMCLI_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1);
    match requested {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Sweeps a scenario over a list of mollification parameters (in parallel),
/// classifies the solution-norm net, and — when the scenario has a
/// constant-coefficient companion — fills each run's `e_l2` with the
/// max-over-time L² distance to that companion's solution.
pub fn sweep(sc: &BeamScenario, eps_list: &[f64]) -> Result<SweepOutcome, PipelineError> {
    let results: Vec<Result<ScenarioRun, PipelineError>> = with_worker_pool(|| {
        eps_list
            .par_iter()
            .map(|&e| run_scenario(sc, e).map_err(|err| err.at(e)))
            .collect()
    });
    let mut runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    if let Some(base_sc) = sc.baseline_variant() {
        let base = run_scenario(&base_sc, eps_list.first().copied().unwrap_or(0.1))?;
        for run in &mut runs {
            run.diagnostics.e_l2 = Some(trajectory_distance_l2(
                &run.trajectory,
                &base.trajectory,
                &run.system.g0,
            ));
        }
    }

    let report = report_from(
        &sc.name,
        "w_norm",
        runs.iter()
            .map(|r| (r.diagnostics.epsilon, r.diagnostics.w_norm)),
        runs.iter().map(|r| r.diagnostics.clone()).collect(),
    );
    Ok(SweepOutcome { report, runs })
}

fn report_from(
    scenario: &str,
    metric: &str,
    samples: impl Iterator<Item = (f64, f64)>,
    diagnostics: Vec<RunDiagnostics>,
) -> SweepReport {
    let samples: Vec<(f64, f64)> = samples.collect();
    let eps: Vec<f64> = samples.iter().map(|&(e, _)| e).collect();
    let vals: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let fits = net_fits(&eps, &vals).ok();
    let verdict = classify_net(&eps, &vals).unwrap_or(Verdict::Inconclusive);
    SweepReport {
        scenario: scenario.to_string(),
        metric: metric.to_string(),
        samples,
        fits,
        verdict,
        diagnostics,
    }
}

/// Perturbation probe: reruns the scenario at each ε with the regularized
/// stiffness shifted by ε_eff^k and reports the W-norm distance net between
/// the original and shifted solutions. A perturbation that vanishes at a
/// positive power must produce distances that vanish likewise; the verdict
/// records the observed law.
pub fn uniqueness_probe(
    sc: &BeamScenario,
    k: u32,
    eps_list: &[f64],
) -> Result<SweepReport, PipelineError> {
    assert!(k >= 1, "perturbation order must be at least 1");
    let distances: Vec<Result<(f64, f64), PipelineError>> = with_worker_pool(|| {
        eps_list
            .par_iter()
            .map(|&e| {
                let shift = {
                    let net = MollifierNet::new(e, sc.reparam).map_err(PipelineError::from)?;
                    net.effective().powi(k as i32)
                };
                let plain = pipeline(sc, e, FieldMode::Mollified { c_shift: 0.0 })
                    .map_err(|err| err.at(e))?;
                let moved = pipeline(sc, e, FieldMode::Mollified { c_shift: shift })
                    .map_err(|err| err.at(e))?;
                let d = trajectory_distance_w(
                    &plain.trajectory,
                    &moved.trajectory,
                    &plain.system.g2,
                    &plain.system.g0,
                );
                Ok((e, d))
            })
            .collect()
    });
    let samples = distances.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(report_from(
        &sc.name,
        "w_distance",
        samples.into_iter(),
        Vec::new(),
    ))
}

/// Consistency probe: compares each mollified run against the exact-data
/// run on the same mesh (same quadrature resolution, same integrator) and
/// reports the W-norm distance net. Requires a scenario whose data are
/// smooth enough to evaluate exactly; for constant coefficients the two
/// runs coincide bit for bit and every distance is exactly zero.
pub fn consistency_probe(
    sc: &BeamScenario,
    eps_list: &[f64],
) -> Result<SweepReport, PipelineError> {
    let distances: Vec<Result<(f64, f64), PipelineError>> = with_worker_pool(|| {
        eps_list
            .par_iter()
            .map(|&e| {
                let mollified = pipeline(sc, e, FieldMode::Mollified { c_shift: 0.0 })
                    .map_err(|err| err.at(e))?;
                let reference = pipeline(sc, e, FieldMode::Exact).map_err(|err| err.at(e))?;
                let d = trajectory_distance_w(
                    &mollified.trajectory,
                    &reference.trajectory,
                    &mollified.system.g2,
                    &mollified.system.g0,
                );
                Ok((e, d))
            })
            .collect()
    });
    let samples = distances.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(report_from(
        &sc.name,
        "w_distance",
        samples.into_iter(),
        Vec::new(),
    ))
}

/// One row of the mesh-refinement study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergencePoint {
    pub n: usize,
    pub m: usize,
    pub e_l2: f64,
}

/// Mesh-refinement study on the manufactured benchmark: for each (n, m) the
/// smooth problem is solved with exact (unregularized) data and compared
/// against the closed-form solution; the error is the max-over-time spatial
/// L² distance.
///
/// The manufactured displacement sin(t)·x²(x−1)² starts from rest in
/// displacement but not in velocity, so the study supplies the matching
/// initial velocity (the nodal interpolant of x²(x−1)²); without it the
/// error stalls at the level of the missing initial data instead of
/// converging.
pub fn convergence_study(sizes: &[(usize, usize)]) -> Result<Vec<ConvergencePoint>, PipelineError> {
    let poly = named_smooth("forcing_poly").expect("registry entry");
    let quartic = named_smooth("quartic_bubble").expect("registry entry");
    let results: Vec<Result<ConvergencePoint, PipelineError>> = with_worker_pool(|| {
        sizes
            .par_iter()
            .map(|&(n, m)| {
                let mesh = build_space(n);
                let spec = QuadratureSpec::plain();
                let one = RegularizedField::constant(1.0);
                let p = poly.clone();
                let gs = RegularizedField::from_function(move |x| p.eval(x), {
                    let p = poly.clone();
                    move |x| p.derivative(x).unwrap_or(0.0)
                });
                let sys = assemble(&one, &one, &gs, mesh, spec);
                let u0 = vec![0.0; sys.free_dofs()];
                let v0_expr =
                    DistributionalExpr::new(Axis::Space, vec![DistTerm::smooth(quartic.clone())]);
                let v0 = project_initial(InitialData::Expr(&v0_expr), mesh, spec)?;
                let load = Load::separable(sys.load_space.clone(), f64::sin);
                let grid = TimeGrid::new(1.0, m);
                let k = sys.stiffness(1.0);
                let traj = replica_march(&sys.m, &k, &load, grid, &u0, &v0)?;
                let q = quartic.clone();
                let e_l2 = traj
                    .u
                    .iter()
                    .zip(&traj.times)
                    .map(|(u, &t)| l2_error(u, mesh, |x| t.sin() * q.eval(x)))
                    .fold(0.0, f64::max);
                Ok(ConvergencePoint { n, m, e_l2 })
            })
            .collect()
    });
    results.into_iter().collect()
}

/// Least-squares convergence rate of a refinement study: the slope of
/// −log E against log n.
pub fn fitted_rate(points: &[ConvergencePoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.e_l2.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    -(sxy / sxx)
}

/// Onset and sharpness of an impulse response read off one cross-section.
#[derive(Debug, Clone, Copy)]
pub struct ImpulseProfile {
    /// Time of the largest |second difference| of the series.
    pub onset_time: f64,
    /// That second difference scaled by h_t⁻²: a discrete curvature.
    pub peak_curvature: f64,
}

/// Locates the response onset in the cross-section u(x, ·): the interior
/// time level with the largest |second difference|, which for an impulsive
/// forcing marks where the solution bends away from rest.
pub fn impulse_profile(run: &ScenarioRun, x: f64) -> ImpulseProfile {
    let cs = cross_section(&run.trajectory, run.system.mesh, x);
    assert!(cs.len() >= 3, "need at least three time levels");
    let ht = cs[1].0 - cs[0].0;
    let mut best_k = 1;
    let mut best = -1.0f64;
    for k in 1..cs.len() - 1 {
        let d2 = (cs[k + 1].1 - 2.0 * cs[k].1 + cs[k - 1].1).abs();
        if d2 > best {
            best = d2;
            best_k = k;
        }
    }
    ImpulseProfile {
        onset_time: cs[best_k].0,
        peak_curvature: best / (ht * ht),
    }
}
