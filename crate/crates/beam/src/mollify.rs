//! Friedrichs-mollifier engine.
//!
//! Distributional coefficients enter the solver only through their smooth
//! regularizations `c_ε = c ∗ φ_ε`, built here. The module owns
//!
//! * the mollifier `φ(x) = A·exp(−1/(1−x²))` with its normalizer `A`,
//! * scale nets `ε ↦ φ_ε` with optional reparametrized effective scales
//!   (`λ_ε = (log 1/ε)^{−1/N}` and `μ_ε = 1/log log(1/ε)`),
//! * term-wise convolution of a [`DistributionalExpr`] into a smooth,
//!   pointwise-evaluable [`RegularizedField`] (with analytic shortcuts for
//!   Dirac and Heaviside atoms),
//! * positivity-preserving regularization of certified stiffness
//!   decompositions, and separable space–time regularization of forcings.
//!
//! Every quadrature scheme in this module is fixed-design and was sized so
//! that its measured worst-case error sits near 1e−10 — three orders below
//! the tightest tolerance any consumer asserts.

use crate::distmodel::{Axis, DistributionalExpr, Forcing, PositivityDecomposition, TermKind};
use crate::quad;
use std::fmt;
use std::sync::{Arc, LazyLock};

/// Largest admissible mollification scale ε₀.
pub const EPSILON_MAX: f64 = 0.5;

/// ∫₋₁¹ exp(−1/(1−x²)) dx, the unnormalized mollifier mass.
///
/// Pinned by two independent high-precision quadratures (direct and via the
/// substitution x = tanh u) agreeing to 30 digits.
pub const PHI_RAW_MASS: f64 = 0.443993816168079437823048921171;

/// Normalizer A = 1/[`PHI_RAW_MASS`], making ∫φ = 1.
pub const NORMALIZER: f64 = 2.252283621043581010499781255565;

/// φ(0) = A·e⁻¹, the mollifier's peak value.
pub const PHI_AT_ZERO: f64 = 0.828568839869105151664159062986;

/// ∫₋₁¹ φ(x)² dx, used by energy estimates for impulsive loads
/// (‖φ_ε‖²_{L²} = this value divided by ε).
pub const PHI_SQUARED_MASS: f64 = 0.675116813009697528987433210244;

/// ∫₋₁¹ (−log|x|)·φ(x) dx; the mollified −log|·−x₀| at x₀ equals
/// log(1/ε) + this constant.
pub const PHI_NEGLOG_MOMENT: f64 = 1.442465954326211434789208608931;

/// The mollifier φ(y) = A·exp(−1/(1−y²)) for |y| < 1, zero otherwise.
pub fn phi(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        NORMALIZER * (-1.0 / (1.0 - y * y)).exp()
    }
}

/// φ′(y) = φ(y)·(−2y/(1−y²)²), zero outside the support.
pub fn phi_deriv(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - y * y;
        NORMALIZER * (-1.0 / d).exp() * (-2.0 * y / (d * d))
    }
}

/// φ_ε(x) = ε⁻¹ φ(x/ε); unit mass, supported on [−ε, ε].
pub fn phi_eps(x: f64, eps: f64) -> f64 {
    phi(x / eps) / eps
}

/// d/dx φ_ε(x) = ε⁻² φ′(x/ε).
pub fn phi_eps_deriv(x: f64, eps: f64) -> f64 {
    phi_deriv(x / eps) / (eps * eps)
}

/// Recomputes the normalizer from scratch by adaptive quadrature of
/// exp(−1/(1−x²)); the library constant [`NORMALIZER`] is this value
/// hardcoded (and independently cross-checked at higher precision).
pub fn compute_normalizer() -> f64 {
    let raw = quad::adaptive(|x| (-1.0 / (1.0 - x * x)).exp(), -1.0, 1.0, 1e-13);
    1.0 / raw
}

/// Scale reparametrization attached to a mollifier net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reparam {
    /// Effective scale ε itself.
    Identity,
    /// λ_ε = (log(1/ε))^{−1/N}: tuned to a known moderateness order N.
    LogType { n: u32 },
    /// μ_ε = 1/log log(1/ε): the order-free fallback.
    LogLog,
}

/// Errors raised while building or applying mollifier nets.
#[derive(Debug, Clone, PartialEq)]
pub enum MollifyError {
    /// ε outside (0, ε₀].
    InvalidEpsilon { epsilon: f64 },
    /// LogType with N = 0.
    InvalidOrder,
    /// loglog reparametrization undefined: log log(1/ε) ≤ 0.
    ScaleUndefined { epsilon: f64 },
    /// The reparametrized scale left (0, ε₀].
    ScaleOutOfRange { scale: f64 },
    /// A term is not evaluable on the mollification-extended window.
    WindowViolation { detail: String },
    /// The expression does not have the required separable structure.
    NotSeparable { detail: String },
    /// A certified-positive field fell below its bound on the check grid
    /// (indicates a positivity-certification bug upstream).
    PositivityGrid { x: f64, value: f64, bound: f64 },
}

impl fmt::Display for MollifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MollifyError::InvalidEpsilon { epsilon } => {
                write!(f, "epsilon {epsilon} outside (0, {EPSILON_MAX}]")
            }
            MollifyError::InvalidOrder => write!(f, "log-type reparametrization needs N >= 1"),
            MollifyError::ScaleUndefined { epsilon } => write!(
                f,
                "log log(1/{epsilon}) <= 0: loglog scale undefined; use a smaller epsilon"
            ),
            MollifyError::ScaleOutOfRange { scale } => {
                write!(f, "reparametrized scale {scale} outside (0, {EPSILON_MAX}]")
            }
            MollifyError::WindowViolation { detail } => write!(f, "window violation: {detail}"),
            MollifyError::NotSeparable { detail } => write!(f, "not separable: {detail}"),
            MollifyError::PositivityGrid { x, value, bound } => write!(
                f,
                "regularized field dropped to {value} < certified bound {bound} at x = {x}"
            ),
        }
    }
}

impl std::error::Error for MollifyError {}

/// Computes the effective mollification scale for (ε, reparametrization):
/// ε itself, λ_ε = (log(1/ε))^{−1/N}, or μ_ε = 1/log log(1/ε).
///
/// The result must land back in (0, ε₀]; scales that leave the admissible
/// range (for example λ_ε with ε too close to ε₀) are reported as errors.
pub fn effective_epsilon(epsilon: f64, reparam: Reparam) -> Result<f64, MollifyError> {
    if !(epsilon > 0.0 && epsilon <= EPSILON_MAX) {
        return Err(MollifyError::InvalidEpsilon { epsilon });
    }
    let scale = match reparam {
        Reparam::Identity => epsilon,
        Reparam::LogType { n } => {
            if n == 0 {
                return Err(MollifyError::InvalidOrder);
            }
            (1.0 / epsilon).ln().powf(-1.0 / n as f64)
        }
        Reparam::LogLog => {
            let ll = (1.0 / epsilon).ln().ln();
            if ll <= 0.0 {
                return Err(MollifyError::ScaleUndefined { epsilon });
            }
            1.0 / ll
        }
    };
    if !(scale > 0.0 && scale <= EPSILON_MAX) {
        return Err(MollifyError::ScaleOutOfRange { scale });
    }
    Ok(scale)
}

/// A mollifier at scale ε with an optional reparametrized effective scale.
///
/// Construction validates the scale once; afterwards [`MollifierNet::effective`]
/// is infallible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierNet {
    pub epsilon: f64,
    pub reparam: Reparam,
    effective: f64,
}

impl MollifierNet {
    pub fn new(epsilon: f64, reparam: Reparam) -> Result<Self, MollifyError> {
        let effective = effective_epsilon(epsilon, reparam)?;
        Ok(MollifierNet {
            epsilon,
            reparam,
            effective,
        })
    }

    /// Net with the identity reparametrization.
    pub fn identity(epsilon: f64) -> Result<Self, MollifyError> {
        Self::new(epsilon, Reparam::Identity)
    }

    /// The validated effective scale.
    pub fn effective(&self) -> f64 {
        self.effective
    }
}

/// Uniform tiles for the smooth-convolution composite rule; 32 tiles put
/// the unit-mass quadrature defect at 1.1e−11 (16 tiles leave 1.6e−9).
const SMOOTH_TILES: usize = 32;

/// Cells in the precomputed mollifier CDF table.
const CDF_CELLS: usize = 2048;

/// Φ values at the table nodes y_k = −1 + 2k/2048, accumulated cell by
/// cell with an 8-point Gauss rule.
static PHI_CDF: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let h = 2.0 / CDF_CELLS as f64;
    let mut cdf = vec![0.0; CDF_CELLS + 1];
    for k in 0..CDF_CELLS {
        let a = -1.0 + k as f64 * h;
        cdf[k + 1] = cdf[k] + quad::gl8(phi, a, a + h);
    }
    cdf
});

/// The mollifier CDF Φ(y) = ∫_{−∞}^y φ, evaluated by cubic Hermite
/// interpolation on the precomputed table with the exact slope φ at the
/// nodes (measured accuracy ~9e−13).
pub fn phi_cdf(y: f64) -> f64 {
    if y <= -1.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let cdf = &*PHI_CDF;
    let h = 2.0 / CDF_CELLS as f64;
    let t = (y + 1.0) / h;
    let k = (t as usize).min(CDF_CELLS - 1);
    let s = t - k as f64;
    let ya = -1.0 + k as f64 * h;
    let (p0, p1) = (cdf[k], cdf[k + 1]);
    let (m0, m1) = (phi(ya) * h, phi(ya + h) * h);
    let s2 = s * s;
    let omt = 1.0 - s;
    (1.0 + 2.0 * s) * omt * omt * p0
        + s * omt * omt * m0
        + s2 * (3.0 - 2.0 * s) * p1
        + s2 * (s - 1.0) * m1
}

/// Value of one mollified term at x, at effective scale `e`.
fn term_value(kind: &TermKind, e: f64, x: f64) -> f64 {
    match kind {
        TermKind::Constant { value } => *value,
        TermKind::Smooth(f) => {
            quad::gl8_composite(|y| f.eval(x - e * y) * phi(y), -1.0, 1.0, SMOOTH_TILES)
        }
        TermKind::Heaviside { x0, jump } => jump * phi_cdf((x - x0) / e),
        TermKind::Dirac { x0, weight } => weight * phi_eps(x - x0, e),
        TermKind::NegLog { x0 } => {
            let x0 = *x0;
            quad::singular_tiled(
                |y| {
                    if y == x0 {
                        0.0
                    } else {
                        -(y - x0).abs().ln() * phi_eps(x - y, e)
                    }
                },
                x - e,
                x + e,
                x0,
            )
        }
    }
}

/// x-derivative of one mollified term (the derivative falls on the
/// mollifier: d/dx (f ∗ φ_ε) = f ∗ φ′_ε).
fn term_deriv(kind: &TermKind, e: f64, x: f64) -> f64 {
    match kind {
        TermKind::Constant { .. } => 0.0,
        TermKind::Smooth(f) => {
            if f.has_derivative() {
                quad::gl8_composite(
                    |y| f.derivative(x - e * y).unwrap() * phi(y),
                    -1.0,
                    1.0,
                    SMOOTH_TILES,
                )
            } else {
                quad::gl8_composite(
                    |y| f.eval(x - e * y) * phi_deriv(y) / e,
                    -1.0,
                    1.0,
                    SMOOTH_TILES,
                )
            }
        }
        TermKind::Heaviside { x0, jump } => jump * phi_eps(x - x0, e),
        TermKind::Dirac { x0, weight } => weight * phi_eps_deriv(x - x0, e),
        TermKind::NegLog { x0 } => {
            let x0 = *x0;
            quad::singular_tiled(
                |y| {
                    if y == x0 {
                        0.0
                    } else {
                        -(y - x0).abs().ln() * phi_eps_deriv(x - y, e)
                    }
                },
                x - e,
                x + e,
                x0,
            )
        }
    }
}

/// A smooth regularization of a distributional expression: pointwise
/// evaluable, differentiable, pure, and safe to evaluate concurrently.
#[derive(Clone)]
pub struct RegularizedField {
    value_fn: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    deriv_fn: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Effective scale the field was built at.
    pub epsilon_used: f64,
    /// The expression this field regularizes.
    pub source: DistributionalExpr,
    /// Certified pointwise lower bound on [0, 1], when one exists.
    pub lower_bound: Option<f64>,
}

impl fmt::Debug for RegularizedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegularizedField")
            .field("epsilon_used", &self.epsilon_used)
            .field("source", &self.source)
            .field("lower_bound", &self.lower_bound)
            .finish()
    }
}

impl RegularizedField {
    /// Field value at x.
    pub fn eval(&self, x: f64) -> f64 {
        (self.value_fn)(x)
    }

    /// Field derivative at x.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        (self.deriv_fn)(x)
    }

    /// The exact constant field (no mollification error).
    pub fn constant(value: f64) -> Self {
        RegularizedField {
            value_fn: Arc::new(move |_| value),
            deriv_fn: Arc::new(|_| 0.0),
            epsilon_used: 0.0,
            source: DistributionalExpr::constant(Axis::Space, value),
            lower_bound: if value > 0.0 { Some(value) } else { None },
        }
    }

    /// A field wrapping an arbitrary smooth function (plumbing for exact
    /// reference solutions and tests; carries no distributional source).
    pub fn from_function(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RegularizedField {
            value_fn: Arc::new(f),
            deriv_fn: Arc::new(df),
            epsilon_used: 0.0,
            source: DistributionalExpr::zero(Axis::Space),
            lower_bound: None,
        }
    }

    /// The same field shifted by a constant offset (used by perturbation
    /// probes that compare a run against a deliberately displaced twin).
    pub fn shifted(&self, offset: f64) -> Self {
        let inner = Arc::clone(&self.value_fn);
        RegularizedField {
            value_fn: Arc::new(move |x| inner(x) + offset),
            deriv_fn: Arc::clone(&self.deriv_fn),
            epsilon_used: self.epsilon_used,
            source: self
                .source
                .plus(&DistributionalExpr::constant(self.source.axis, offset)),
            lower_bound: self.lower_bound.map(|lb| lb + offset),
        }
    }

    /// Grid supremum of |field| over `window` (inclusive endpoints).
    pub fn sup_abs_on(&self, window: (f64, f64), points: usize) -> f64 {
        let (lo, hi) = window;
        let mut sup = 0.0f64;
        for k in 0..=points {
            let x = lo + (hi - lo) * k as f64 / points as f64;
            sup = sup.max(self.eval(x).abs());
        }
        sup
    }

    /// Grid minimum of the field over `window` (inclusive endpoints).
    pub fn min_on(&self, window: (f64, f64), points: usize) -> f64 {
        let (lo, hi) = window;
        let mut min = f64::INFINITY;
        for k in 0..=points {
            let x = lo + (hi - lo) * k as f64 / points as f64;
            min = min.min(self.eval(x));
        }
        min
    }
}

/// Checks each term is evaluable on `window` extended by the mollification
/// reach `e`; only −log|x−x₀| has a validity range (|x−x₀| ≤ 1).
fn validate_window(
    expr: &DistributionalExpr,
    e: f64,
    window: (f64, f64),
) -> Result<(), MollifyError> {
    for term in &expr.terms {
        if let TermKind::NegLog { x0 } = term.kind {
            let reach = (window.0 - e - x0).abs().max((window.1 + e - x0).abs());
            if reach > 1.0 {
                return Err(MollifyError::WindowViolation {
                    detail: format!(
                        "-log|x - {x0}| evaluated |x - x0| = {reach} > 1 away from its \
                         singular point on window [{}, {}] extended by {e}",
                        window.0, window.1
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Term-wise convolution of `expr` with φ at the net's effective scale.
///
/// Constants pass through exactly; Dirac and Heaviside atoms use the
/// analytic images w·φ_ε(x−x₀) and j·Φ((x−x₀)/ε); smooth terms use a
/// 32-tile composite Gauss rule in convolution coordinates; −log|x−x₀|
/// uses the singularity-graded rule.
pub fn mollify_expr(
    expr: &DistributionalExpr,
    net: &MollifierNet,
    window: (f64, f64),
) -> Result<RegularizedField, MollifyError> {
    let e = net.effective();
    validate_window(expr, e, window)?;
    let kinds: Arc<Vec<TermKind>> = Arc::new(expr.terms.iter().map(|t| t.kind.clone()).collect());
    let kv = Arc::clone(&kinds);
    let kd = Arc::clone(&kinds);
    Ok(RegularizedField {
        value_fn: Arc::new(move |x| kv.iter().map(|k| term_value(k, e, x)).sum()),
        deriv_fn: Arc::new(move |x| kd.iter().map(|k| term_deriv(k, e, x)).sum()),
        epsilon_used: e,
        source: expr.clone(),
        lower_bound: None,
    })
}

/// Wraps a purely smooth expression (constants and smooth terms only) as a
/// field evaluated without any regularization — the ε → 0 reference used by
/// consistency probes. Impulsive or singular terms have no pointwise values
/// and are rejected. A smooth term without a stored derivative falls back to
/// a central difference at step 1e−6.
pub fn exact_field(expr: &DistributionalExpr) -> Result<RegularizedField, MollifyError> {
    for term in &expr.terms {
        match &term.kind {
            TermKind::Constant { .. } | TermKind::Smooth(_) => {}
            other => {
                return Err(MollifyError::NotSeparable {
                    detail: format!(
                        "cannot evaluate {other:?} pointwise; only smooth expressions \
                         have an exact (unregularized) field"
                    ),
                })
            }
        }
    }
    let kinds: Arc<Vec<TermKind>> = Arc::new(expr.terms.iter().map(|t| t.kind.clone()).collect());
    let kv = Arc::clone(&kinds);
    let kd = Arc::clone(&kinds);
    let value = move |x: f64| -> f64 {
        kv.iter()
            .map(|k| match k {
                TermKind::Constant { value } => *value,
                TermKind::Smooth(f) => f.eval(x),
                _ => unreachable!("validated above"),
            })
            .sum()
    };
    let deriv = move |x: f64| -> f64 {
        kd.iter()
            .map(|k| match k {
                TermKind::Constant { .. } => 0.0,
                TermKind::Smooth(f) => f.derivative(x).unwrap_or_else(|| {
                    let h = 1e-6;
                    (f.eval(x + h) - f.eval(x - h)) / (2.0 * h)
                }),
                _ => unreachable!("validated above"),
            })
            .sum()
    };
    Ok(RegularizedField {
        value_fn: Arc::new(value),
        deriv_fn: Arc::new(deriv),
        epsilon_used: 0.0,
        source: expr.clone(),
        lower_bound: None,
    })
}

/// Grid resolution of the a-posteriori positivity check.
const POSITIVITY_CHECK_GRID: usize = 10_000;

/// Regularizes a certified decomposition c = c₀ + μ so that the result
/// provably keeps c_ε ≥ c₀: the constant mollifies to itself and μ ∗ φ_ε ≥ 0.
/// The bound is re-verified on a 10⁴-point grid over [0, 1]; a violation is
/// an internal-error report, not a recoverable condition.
pub fn mollify_positive(
    decomp: &PositivityDecomposition,
    net: &MollifierNet,
    window: (f64, f64),
) -> Result<RegularizedField, MollifyError> {
    let expr = decomp.reassemble();
    let mut field = mollify_expr(&expr, net, window)?;
    field.lower_bound = Some(decomp.c0);
    for k in 0..=POSITIVITY_CHECK_GRID {
        let x = k as f64 / POSITIVITY_CHECK_GRID as f64;
        let v = field.eval(x);
        if v < decomp.c0 - 1e-12 {
            return Err(MollifyError::PositivityGrid {
                x,
                value: v,
                bound: decomp.c0,
            });
        }
    }
    Ok(field)
}

/// A separable regularized field g_ε(x, t) = σ_ε(x)·τ_ε(t).
#[derive(Debug, Clone)]
pub struct RegularizedField2d {
    pub space: RegularizedField,
    pub time: RegularizedField,
}

impl RegularizedField2d {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.space.eval(x) * self.time.eval(t)
    }
}

/// Mollifies a separable space–time forcing factor by factor with the same
/// net (the separable mollifier φ_ε(x)·φ_ε(t)). For g = δ(t−t₀) this gives
/// g_ε(x, t) = φ_ε(t−t₀) uniformly in x.
pub fn separable_mollify_2d(
    forcing: &Forcing,
    net: &MollifierNet,
    window_x: (f64, f64),
    window_t: (f64, f64),
) -> Result<RegularizedField2d, MollifyError> {
    if forcing.space.axis != Axis::Space {
        return Err(MollifyError::NotSeparable {
            detail: "spatial factor is not on the space axis".to_string(),
        });
    }
    if forcing.time.axis != Axis::Time {
        return Err(MollifyError::NotSeparable {
            detail: "temporal factor is not on the time axis".to_string(),
        });
    }
    Ok(RegularizedField2d {
        space: mollify_expr(&forcing.space, net, window_x)?,
        time: mollify_expr(&forcing.time, net, window_t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::{decompose_positive, pair_with_test, DistTerm, SmoothFn};

    const SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.01];

    #[test]
    fn normalizer_matches_quadrature() {
        let a = compute_normalizer();
        assert!(
            (a - NORMALIZER).abs() <= 1e-10 * NORMALIZER,
            "computed {a}, constant {NORMALIZER}"
        );
        // Unit mass with the hardcoded constant, by an independent rule.
        let mass = quad::gl8_composite(phi, -1.0, 1.0, 64);
        assert!((mass - 1.0).abs() <= 1e-10, "mass {mass}");
    }

    #[test]
    fn phi_peak_value() {
        let expect = NORMALIZER * (-1.0f64).exp();
        assert!((phi(0.0) - expect).abs() < 1e-15);
        assert!((phi(0.0) - PHI_AT_ZERO).abs() < 1e-15);
    }

    #[test]
    fn phi_is_symmetric_nonnegative_and_compactly_supported() {
        for k in 0..200 {
            let y = -1.2 + 2.4 * k as f64 / 199.0;
            assert!(phi(y) >= 0.0);
            assert!((phi(y) - phi(-y)).abs() < 1e-16);
        }
        assert_eq!(phi(1.0), 0.0);
        assert_eq!(phi(-1.0), 0.0);
        assert_eq!(phi(1.0000001), 0.0);
    }

    #[test]
    fn scaled_mollifier_keeps_unit_mass_across_sweep() {
        for &eps in &SWEEP {
            let mass = quad::gl8_composite(|x| phi_eps(x, eps), -eps, eps, SMOOTH_TILES);
            assert!((mass - 1.0).abs() <= 1e-9, "eps {eps}: mass {mass}");
            assert_eq!(phi_eps(eps, eps), 0.0);
            assert_eq!(phi_eps(-eps, eps), 0.0);
            assert_eq!(phi_eps(1.0000001 * eps, eps), 0.0);
        }
    }

    #[test]
    fn effective_epsilon_schemes() {
        assert_eq!(effective_epsilon(0.05, Reparam::Identity).unwrap(), 0.05);
        let lam = effective_epsilon((-4.0f64).exp(), Reparam::LogType { n: 1 }).unwrap();
        assert!((lam - 0.25).abs() < 1e-15, "lambda {lam}");
        let mu =
            effective_epsilon((-(std::f64::consts::E.powi(2))).exp(), Reparam::LogLog).unwrap();
        assert!((mu - 0.5).abs() < 1e-15, "mu {mu}");
    }

    #[test]
    fn effective_epsilon_rejects_out_of_range_scales() {
        assert!(matches!(
            effective_epsilon(0.0, Reparam::Identity),
            Err(MollifyError::InvalidEpsilon { .. })
        ));
        assert!(matches!(
            effective_epsilon(0.6, Reparam::Identity),
            Err(MollifyError::InvalidEpsilon { .. })
        ));
        // log log(1/0.4) < 0: undefined.
        assert!(matches!(
            effective_epsilon(0.4, Reparam::LogLog),
            Err(MollifyError::ScaleUndefined { .. })
        ));
        // lambda = 1/log(5) ≈ 0.62 > epsilon_max.
        assert!(matches!(
            effective_epsilon(0.2, Reparam::LogType { n: 1 }),
            Err(MollifyError::ScaleOutOfRange { .. })
        ));
        assert!(matches!(
            effective_epsilon(0.1, Reparam::LogType { n: 0 }),
            Err(MollifyError::InvalidOrder)
        ));
    }

    #[test]
    fn mollified_dirac_is_the_scaled_mollifier() {
        let net = MollifierNet::identity(0.1).unwrap();
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]);
        let field = mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
        let peak = field.eval(0.5);
        assert!(
            (peak - PHI_AT_ZERO / 0.1).abs() < 1e-12,
            "peak {peak} vs {}",
            PHI_AT_ZERO / 0.1
        );
        // Exact analytic image everywhere, including outside the bump.
        for k in 0..=40 {
            let x = k as f64 / 40.0;
            assert!((field.eval(x) - phi_eps(x - 0.5, 0.1)).abs() < 1e-15);
        }
    }

    #[test]
    fn mollified_heaviside_is_half_at_the_jump() {
        for &eps in &SWEEP {
            let net = MollifierNet::identity(eps).unwrap();
            let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::heaviside(0.5, 1.0)]);
            let field = mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
            let v = field.eval(0.5);
            assert!((v - 0.5).abs() < 1e-9, "eps {eps}: value {v}");
            // Far left/right of the jump the field is exactly 0/1.
            assert_eq!(field.eval(0.5 - 1.5 * eps), 0.0);
            assert_eq!(field.eval(0.5 + 1.5 * eps), 1.0);
        }
    }

    #[test]
    fn mollified_neglog_center_value_regression() {
        // (−log|·−0.5| ∗ φ_ε)(0.5) = log(1/ε) + ∫(−log|y|)φ(y)dy.
        let net = MollifierNet::identity(0.05).unwrap();
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::neglog(0.5)]);
        let field = mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
        let v = field.eval(0.5);
        let reference = 4.438198227880202428; // 30-digit quadrature oracle
        assert!((v - reference).abs() < 1e-9, "value {v}");
        let identity = (1.0f64 / 0.05).ln() + PHI_NEGLOG_MOMENT;
        assert!(
            (v - identity).abs() < 1e-9,
            "value {v} vs identity {identity}"
        );
    }

    #[test]
    fn smooth_terms_mollify_with_spectral_accuracy() {
        // (sin ∗ φ_ε)(x) = κ(ε)·sin(x) with κ = ∫cos(εy)φ(y)dy < 1.
        let net = MollifierNet::identity(0.2).unwrap();
        let e = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::smooth(SmoothFn::with_derivative(
                "sin",
                f64::sin,
                f64::cos,
            ))],
        );
        let field = mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
        let kappa = quad::gl8_composite(|y| (0.2 * y).cos() * phi(y), -1.0, 1.0, SMOOTH_TILES);
        for &x in &[0.1, 0.5, 0.9] {
            assert!((field.eval(x) - kappa * x.sin()).abs() < 1e-11);
            assert!((field.eval_deriv(x) - kappa * x.cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn derivative_of_mollified_dirac_matches_finite_differences() {
        let net = MollifierNet::identity(0.1).unwrap();
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 2.0)]);
        let field = mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
        let h = 1e-6;
        for &x in &[0.45, 0.48, 0.52, 0.55] {
            let fd = (field.eval(x + h) - field.eval(x - h)) / (2.0 * h);
            let an = field.eval_deriv(x);
            assert!(
                (fd - an).abs() < 1e-3 * (1.0 + an.abs()),
                "x={x}: {fd} vs {an}"
            );
        }
    }

    #[test]
    fn positive_decomposition_mollifies_above_floor() {
        // c = 1 + δ(x−0.5): minimum over [0,1] is exactly the floor 1,
        // attained away from the bump; the sup grows like φ(0)/ε.
        let c = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::constant(1.0), DistTerm::dirac(0.5, 1.0)],
        );
        let d = decompose_positive(&c, 1.0, (-0.2, 1.2)).unwrap();
        for &eps in &SWEEP {
            let net = MollifierNet::identity(eps).unwrap();
            let field = mollify_positive(&d, &net, (-0.2, 1.2)).unwrap();
            assert_eq!(field.lower_bound, Some(1.0));
            let min = field.min_on((0.0, 1.0), 2000);
            assert!((min - 1.0).abs() < 1e-12, "eps {eps}: min {min}");
            let sup = field.sup_abs_on((0.0, 1.0), 2000);
            let expect = 1.0 + PHI_AT_ZERO / eps;
            assert!(
                (sup - expect).abs() < 1e-9 * expect,
                "eps {eps}: sup {sup} vs {expect}"
            );
        }
    }

    #[test]
    fn constant_stiffness_is_fixed_by_mollification() {
        let c = DistributionalExpr::constant(Axis::Space, 1.0);
        let d = decompose_positive(&c, 1.0, (-0.2, 1.2)).unwrap();
        let net = MollifierNet::identity(0.05).unwrap();
        let field = mollify_positive(&d, &net, (-0.2, 1.2)).unwrap();
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            assert_eq!(field.eval(x), 1.0);
        }
        assert_eq!(field.lower_bound, Some(1.0));
    }

    #[test]
    fn dirac_sup_grows_at_order_one() {
        // log–log slope of sup‖c_ε‖ across the sweep ≈ 1 (moderate, N = 1).
        let c = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::constant(1.0), DistTerm::dirac(0.5, 1.0)],
        );
        let sups: Vec<f64> = SWEEP
            .iter()
            .map(|&eps| {
                let net = MollifierNet::identity(eps).unwrap();
                let f = mollify_expr(&c, &net, (0.0, 1.0)).unwrap();
                f.sup_abs_on((0.0, 1.0), 2000)
            })
            .collect();
        // Least-squares slope of log sup against log(1/ε); the additive
        // floor 1 keeps the finite-sweep slope a little under the exact
        // order, so the recovery tolerance is the usual ±0.1.
        let xs: Vec<f64> = SWEEP.iter().map(|&e| (1.0 / e).ln()).collect();
        let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
        let xm = xs.iter().sum::<f64>() / 4.0;
        let ym = ys.iter().sum::<f64>() / 4.0;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let var: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        let slope = cov / var;
        assert!((slope - 1.0).abs() <= 0.1, "slope {slope}, sups {sups:?}");
    }

    #[test]
    fn log_reparametrized_dirac_is_log_bounded() {
        // Under λ_ε = 1/log(1/ε), sup(1+δ)∗φ_λ = 1 + φ(0)·log(1/ε), which
        // stays below C·log(1/ε) with the frozen C = 1.5 on the sweep.
        for &eps in &[0.1, 0.05, 0.01] {
            let net = MollifierNet::new(eps, Reparam::LogType { n: 1 }).unwrap();
            let c = DistributionalExpr::new(
                Axis::Space,
                vec![DistTerm::constant(1.0), DistTerm::dirac(0.5, 1.0)],
            );
            let field = mollify_expr(&c, &net, (0.0, 1.0)).unwrap();
            let sup = field.sup_abs_on((0.0, 1.0), 2000);
            let bound = 1.5 * (1.0 / eps).ln();
            assert!(sup <= bound, "eps {eps}: sup {sup} > bound {bound}");
        }
    }

    #[test]
    fn weak_convergence_toward_the_distributional_pairing() {
        // For each term kind, ⟨term ∗ φ_ε, ψ⟩ approaches ⟨term, ψ⟩ as ε
        // shrinks; the ε = 0.01 gap must be the smallest of the sweep.
        let psi = |x: f64| {
            let z = x - 0.45;
            (-20.0 * z * z).exp() * (3.0 * x).sin() + 1.0
        };
        let cases = vec![
            DistributionalExpr::new(Axis::Space, vec![DistTerm::constant(2.0)]),
            DistributionalExpr::new(
                Axis::Space,
                vec![DistTerm::smooth(SmoothFn::new("quartic", |x| {
                    x * x * (x - 1.0) * (x - 1.0)
                }))],
            ),
            DistributionalExpr::new(Axis::Space, vec![DistTerm::heaviside(0.5, 1.0)]),
            DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]),
            DistributionalExpr::new(Axis::Space, vec![DistTerm::neglog(0.5)]),
        ];
        for expr in cases {
            let exact = pair_with_test(&expr, psi, (0.0, 1.0)).unwrap();
            let gaps: Vec<f64> = SWEEP
                .iter()
                .map(|&eps| {
                    let net = MollifierNet::identity(eps).unwrap();
                    let field = mollify_expr(&expr, &net, (0.0, 1.0)).unwrap();
                    let paired = quad::adaptive(|x| field.eval(x) * psi(x), 0.0, 1.0, 1e-10);
                    (paired - exact).abs()
                })
                .collect();
            let last = gaps[3];
            assert!(
                gaps[..3].iter().all(|&g| last <= g),
                "{:?}: gaps {gaps:?} not smallest at eps=0.01",
                expr.terms[0].kind
            );
        }
    }

    #[test]
    fn separable_forcing_mollifies_factorwise() {
        let net = MollifierNet::identity(0.1).unwrap();
        // Impulse in time, uniform in space.
        let g = Forcing::new(
            DistributionalExpr::constant(Axis::Space, 1.0),
            DistributionalExpr::new(Axis::Time, vec![DistTerm::dirac(0.2, 1.0)]),
        );
        let f2 = separable_mollify_2d(&g, &net, (0.0, 1.0), (0.0, 1.0)).unwrap();
        for &(x, t) in &[(0.1, 0.2), (0.9, 0.2), (0.5, 0.25), (0.5, 0.5)] {
            assert!((f2.eval(x, t) - phi_eps(t - 0.2, 0.1)).abs() < 1e-15);
        }
        // Constant forcing passes through untouched.
        let one = Forcing::new(
            DistributionalExpr::constant(Axis::Space, 1.0),
            DistributionalExpr::constant(Axis::Time, 1.0),
        );
        let f1 = separable_mollify_2d(&one, &net, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert_eq!(f1.eval(0.3, 0.7), 1.0);
        // Impulse in space as an axial force: time-independent profile.
        let b = Forcing::new(
            DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]),
            DistributionalExpr::constant(Axis::Time, 1.0),
        );
        let fb = separable_mollify_2d(&b, &net, (0.0, 1.0), (0.0, 1.0)).unwrap();
        for &t in &[0.0, 0.4, 1.0] {
            assert!((fb.eval(0.55, t) - phi_eps(0.55 - 0.5, 0.1)).abs() < 1e-15);
        }
    }

    #[test]
    fn separable_rejects_swapped_axes() {
        let net = MollifierNet::identity(0.1).unwrap();
        let bad = Forcing {
            space: DistributionalExpr::constant(Axis::Time, 1.0),
            time: DistributionalExpr::constant(Axis::Time, 1.0),
        };
        assert!(matches!(
            separable_mollify_2d(&bad, &net, (0.0, 1.0), (0.0, 1.0)),
            Err(MollifyError::NotSeparable { .. })
        ));
    }

    #[test]
    fn window_violation_for_far_neglog() {
        // −log|x−0| evaluated out to 1.2 + ε leaves its validity range.
        let net = MollifierNet::identity(0.1).unwrap();
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::neglog(0.0)]);
        assert!(matches!(
            mollify_expr(&e, &net, (-0.2, 1.2)),
            Err(MollifyError::WindowViolation { .. })
        ));
        // Centered singularity on the same window is fine.
        let ok = DistributionalExpr::new(Axis::Space, vec![DistTerm::neglog(0.5)]);
        assert!(mollify_expr(&ok, &net, (-0.2, 1.2)).is_ok());
    }

    #[test]
    fn cdf_table_matches_direct_quadrature() {
        for &y in &[-0.95, -0.5, -0.1, 0.0, 0.3, 0.77, 0.999] {
            let direct = quad::adaptive(phi, -1.0, y, 1e-12);
            let table = phi_cdf(y);
            assert!(
                (direct - table).abs() < 1e-11,
                "y={y}: table {table} vs direct {direct}"
            );
        }
        assert_eq!(phi_cdf(-1.0), 0.0);
        assert_eq!(phi_cdf(1.0), 1.0);
    }
}
