//! Symbolic model of distributional coefficients and data.
//!
//! The beam problem takes its bending stiffness `c`, axial force `b`,
//! transversal force `g`, and initial data as *distributions*, not
//! functions. This module gives them a small closed term algebra — constants,
//! named smooth functions, Heaviside jumps, Dirac impulses, and the
//! integrable singularity −log|x−x₀| — together with the operations the
//! rest of the pipeline needs:
//!
//! * exact duality pairings against smooth test functions (validation),
//! * positivity certificates for stiffness expressions (the hypothesis
//!   c ≥ c₀ > 0 that regularization theory requires),
//! * reduction of the physical parameters (rigidity, axial load, density,
//!   forcing) to the normalized coefficient triple (c, b, g).
//!
//! The algebra is deliberately closed: five term kinds are exactly what the
//! experiments need, and a closed algebra keeps positivity certification
//! decidable.

use crate::quad;
use std::fmt;
use std::sync::Arc;

/// Axis on which a one-variable expression lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Spatial expressions f(x) on the beam interval [0, 1].
    Space,
    /// Temporal expressions f(t) on [0, T].
    Time,
}

/// A named smooth scalar function, optionally with its derivative.
///
/// The label identifies the function in reports, configs, and structural
/// comparisons; the derivative (when present) lets initial data be
/// interpolated with exact nodal slopes.
#[derive(Clone)]
pub struct SmoothFn {
    pub label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl SmoothFn {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn {
            label: label.into(),
            f: Arc::new(f),
            df: None,
        }
    }

    pub fn with_derivative(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SmoothFn {
            label: label.into(),
            f: Arc::new(f),
            df: Some(Arc::new(df)),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.df.as_ref().map(|d| d(x))
    }

    pub fn has_derivative(&self) -> bool {
        self.df.is_some()
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFn({})", self.label)
    }
}

impl PartialEq for SmoothFn {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

/// One term of a distributional expression.
#[derive(Debug, Clone, PartialEq)]
pub enum TermKind {
    /// The constant function.
    Constant { value: f64 },
    /// A named smooth function.
    Smooth(SmoothFn),
    /// `jump · H(x − x0)` with the Heaviside step H.
    Heaviside { x0: f64, jump: f64 },
    /// `weight · δ(x − x0)`.
    Dirac { x0: f64, weight: f64 },
    /// `−log|x − x0|`, integrable with a logarithmic singularity at x0.
    ///
    /// Only valid where |x − x0| ≤ 1 over the evaluation window, so that
    /// its values stay nonnegative there.
    NegLog { x0: f64 },
}

/// A term together with nothing else; expressions carry the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DistTerm {
    pub kind: TermKind,
}

impl DistTerm {
    pub fn constant(value: f64) -> Self {
        DistTerm {
            kind: TermKind::Constant { value },
        }
    }
    pub fn smooth(f: SmoothFn) -> Self {
        DistTerm {
            kind: TermKind::Smooth(f),
        }
    }
    pub fn heaviside(x0: f64, jump: f64) -> Self {
        DistTerm {
            kind: TermKind::Heaviside { x0, jump },
        }
    }
    pub fn dirac(x0: f64, weight: f64) -> Self {
        DistTerm {
            kind: TermKind::Dirac { x0, weight },
        }
    }
    pub fn neglog(x0: f64) -> Self {
        DistTerm {
            kind: TermKind::NegLog { x0 },
        }
    }
}

/// A finite sum of [`DistTerm`]s on a single axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionalExpr {
    pub terms: Vec<DistTerm>,
    pub axis: Axis,
}

impl DistributionalExpr {
    pub fn new(axis: Axis, terms: Vec<DistTerm>) -> Self {
        DistributionalExpr { terms, axis }
    }

    /// The constant expression.
    pub fn constant(axis: Axis, value: f64) -> Self {
        Self::new(axis, vec![DistTerm::constant(value)])
    }

    /// The zero expression (empty term list).
    pub fn zero(axis: Axis) -> Self {
        Self::new(axis, vec![])
    }

    /// Sum of the constant parts of all `Constant` terms.
    pub fn constant_part(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| match t.kind {
                TermKind::Constant { value } => value,
                _ => 0.0,
            })
            .sum()
    }

    /// True when every term is a constant (mollification is then exact).
    pub fn is_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| matches!(t.kind, TermKind::Constant { .. }))
    }

    /// Scales every term by `a` (Diracs and jumps scale linearly).
    pub fn scaled(&self, a: f64) -> DistributionalExpr {
        let terms = self
            .terms
            .iter()
            .map(|t| DistTerm {
                kind: match &t.kind {
                    TermKind::Constant { value } => TermKind::Constant { value: a * value },
                    TermKind::Smooth(f) => {
                        let g = f.clone();
                        let dg = f.clone();
                        let has_df = f.has_derivative();
                        let label = format!("{}*{}", a, f.label);
                        if has_df {
                            TermKind::Smooth(SmoothFn::with_derivative(
                                label,
                                move |x| a * g.eval(x),
                                move |x| a * dg.derivative(x).unwrap(),
                            ))
                        } else {
                            TermKind::Smooth(SmoothFn::new(label, move |x| a * g.eval(x)))
                        }
                    }
                    TermKind::Heaviside { x0, jump } => TermKind::Heaviside {
                        x0: *x0,
                        jump: a * jump,
                    },
                    TermKind::Dirac { x0, weight } => TermKind::Dirac {
                        x0: *x0,
                        weight: a * weight,
                    },
                    TermKind::NegLog { .. } => {
                        // −log|x−x0| has no scale slot; scaling it leaves the
                        // closed algebra. The experiments never need it.
                        panic!("scaling a NegLog term is not supported by the closed term algebra")
                    }
                },
            })
            .collect();
        DistributionalExpr {
            terms,
            axis: self.axis,
        }
    }

    /// Concatenates two expressions on the same axis.
    pub fn plus(&self, other: &DistributionalExpr) -> DistributionalExpr {
        assert_eq!(self.axis, other.axis, "cannot add expressions across axes");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        DistributionalExpr {
            terms,
            axis: self.axis,
        }
    }
}

/// A separable space–time forcing g(x, t) = σ(x) · τ(t).
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    pub space: DistributionalExpr,
    pub time: DistributionalExpr,
}

impl Forcing {
    pub fn new(space: DistributionalExpr, time: DistributionalExpr) -> Self {
        debug_assert_eq!(space.axis, Axis::Space);
        debug_assert_eq!(time.axis, Axis::Time);
        Forcing { space, time }
    }

    pub fn zero() -> Self {
        Forcing {
            space: DistributionalExpr::zero(Axis::Space),
            time: DistributionalExpr::zero(Axis::Time),
        }
    }
}

/// Errors raised by the model algebra.
#[derive(Debug, Clone)]
pub enum DistError {
    /// The term structure does not certify positivity.
    NotProvablyPositive { reason: String },
    /// Adaptive quadrature stalled; carries the achieved residual.
    QuadratureResidual { achieved: f64, tolerance: f64 },
    /// A density region is nonpositive.
    InvalidDensity { region: usize, value: f64 },
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::NotProvablyPositive { reason } => {
                write!(f, "positivity not certifiable: {reason}")
            }
            DistError::QuadratureResidual {
                achieved,
                tolerance,
            } => write!(
                f,
                "pairing quadrature stalled at residual {achieved:e} (tolerance {tolerance:e})"
            ),
            DistError::InvalidDensity { region, value } => {
                write!(f, "density must be positive; region {region} has {value}")
            }
        }
    }
}

impl std::error::Error for DistError {}

/// Absolute tolerance used by pairing quadrature.
const PAIR_TOL: f64 = 1e-11;

/// Exact duality pairing ⟨expr, φ⟩ for a smooth test function φ compactly
/// supported in `support`.
///
/// Dirac terms use the sifting property; everything else is integrated by
/// adaptive quadrature (graded toward the singular point for `NegLog`).
pub fn pair_with_test<F: Fn(f64) -> f64>(
    expr: &DistributionalExpr,
    phi: F,
    support: (f64, f64),
) -> Result<f64, DistError> {
    let (lo, hi) = support;
    let mut acc = 0.0;
    for term in &expr.terms {
        acc += match &term.kind {
            TermKind::Constant { value } => {
                let v = *value;
                checked(|| quad::adaptive_checked(|x| v * phi(x), lo, hi, PAIR_TOL))?
            }
            TermKind::Smooth(f) => {
                checked(|| quad::adaptive_checked(|x| f.eval(x) * phi(x), lo, hi, PAIR_TOL))?
            }
            TermKind::Heaviside { x0, jump } => {
                let a = x0.max(lo);
                if a >= hi {
                    0.0
                } else {
                    let j = *jump;
                    checked(|| quad::adaptive_checked(|x| j * phi(x), a, hi, PAIR_TOL))?
                }
            }
            TermKind::Dirac { x0, weight } => weight * phi(*x0),
            TermKind::NegLog { x0 } => {
                let x0 = *x0;
                checked(|| {
                    quad::singular_adaptive_checked(
                        |x| -(x - x0).abs().ln() * phi(x),
                        lo,
                        hi,
                        x0,
                        PAIR_TOL,
                    )
                })?
            }
        };
    }
    Ok(acc)
}

fn checked(run: impl Fn() -> Result<f64, f64>) -> Result<f64, DistError> {
    run().map_err(|achieved| DistError::QuadratureResidual {
        achieved,
        tolerance: PAIR_TOL,
    })
}

/// A certified splitting c = c₀ + μ with μ ≥ 0 on the evaluation window.
///
/// The certificate has two parts: impulsive atoms (`Dirac`, `Heaviside`)
/// must carry nonnegative weights/jumps, and the locally integrable floor
/// (`Constant` + `Smooth` + `NegLog`) must stay ≥ c₀ on a 10⁴-point grid
/// over the window. Since mollification preserves pointwise lower bounds of
/// the floor and maps nonnegative atoms to nonnegative bumps, the mollified
/// stiffness then satisfies c_ε ≥ c₀ on the physical interval.
#[derive(Debug, Clone)]
pub struct PositivityDecomposition {
    pub c0: f64,
    pub mu: DistributionalExpr,
    /// Window over which the floor was certified.
    pub window: (f64, f64),
    /// Grid minimum of the locally integrable floor of the original
    /// expression (before subtracting c₀).
    pub floor_grid_min: f64,
}

impl PositivityDecomposition {
    /// Reassembles c₀ + μ; exact-zero constants are dropped so that the
    /// round trip reproduces the original term list.
    pub fn reassemble(&self) -> DistributionalExpr {
        let mut terms = vec![DistTerm::constant(self.c0)];
        terms.extend(self.mu.terms.iter().cloned());
        // Merge leading constants and drop exact zeros.
        let mut const_sum = 0.0;
        let mut rest = Vec::new();
        for t in terms {
            match t.kind {
                TermKind::Constant { value } => const_sum += value,
                _ => rest.push(t),
            }
        }
        let mut out = Vec::new();
        if const_sum != 0.0 {
            out.push(DistTerm::constant(const_sum));
        }
        out.extend(rest);
        DistributionalExpr::new(self.mu.axis, out)
    }
}

/// Number of grid points used to certify the integrable floor.
const POSITIVITY_GRID: usize = 10_000;

/// Certifies that a spatial stiffness expression dominates the constant
/// `c0 > 0` over `window`, returning the decomposition c = c₀ + μ.
///
/// The window must cover the mollification extension range (the stiffness
/// is evaluated on [−ε, 1+ε] when mollifying at scale ε).
pub fn decompose_positive(
    expr: &DistributionalExpr,
    c0: f64,
    window: (f64, f64),
) -> Result<PositivityDecomposition, DistError> {
    if !(c0 > 0.0) {
        return Err(DistError::NotProvablyPositive {
            reason: format!("c0 must be positive, got {c0}"),
        });
    }
    // Atoms must be nonnegative on their own.
    for term in &expr.terms {
        match term.kind {
            TermKind::Dirac { x0, weight } => {
                if weight < 0.0 {
                    return Err(DistError::NotProvablyPositive {
                        reason: format!("Dirac at {x0} has negative weight {weight}"),
                    });
                }
            }
            TermKind::Heaviside { x0, jump } => {
                if jump < 0.0 {
                    return Err(DistError::NotProvablyPositive {
                        reason: format!("Heaviside at {x0} has negative jump {jump}"),
                    });
                }
            }
            TermKind::NegLog { x0 } => {
                // Validity of the term itself: |x − x0| ≤ 1 over the window
                // keeps −log|x−x0| ≥ 0.
                let reach = (window.0 - x0).abs().max((window.1 - x0).abs());
                if reach > 1.0 {
                    return Err(DistError::NotProvablyPositive {
                        reason: format!(
                            "NegLog at {x0} leaves its validity range on the window \
                             [{}, {}] (|x−x0| reaches {reach} > 1)",
                            window.0, window.1
                        ),
                    });
                }
            }
            _ => {}
        }
    }
    // The locally integrable floor must dominate c0 on the grid.
    let floor = |x: f64| -> f64 {
        expr.terms
            .iter()
            .map(|t| match &t.kind {
                TermKind::Constant { value } => *value,
                TermKind::Smooth(f) => f.eval(x),
                TermKind::NegLog { x0 } => {
                    let d = (x - x0).abs();
                    // The grid never lands exactly on x0 in certified use,
                    // but guard the evaluation anyway: the floor only drops
                    // away from the singularity, where the value is +∞.
                    if d == 0.0 {
                        f64::INFINITY
                    } else {
                        -d.ln()
                    }
                }
                TermKind::Heaviside { .. } | TermKind::Dirac { .. } => 0.0,
            })
            .sum()
    };
    let (lo, hi) = window;
    let mut grid_min = f64::INFINITY;
    for k in 0..=POSITIVITY_GRID {
        let x = lo + (hi - lo) * (k as f64) / (POSITIVITY_GRID as f64);
        let v = floor(x);
        if v < grid_min {
            grid_min = v;
        }
    }
    if grid_min < c0 {
        return Err(DistError::NotProvablyPositive {
            reason: format!(
                "integrable floor reaches {grid_min:.6} < c0 = {c0} on window [{lo}, {hi}]"
            ),
        });
    }
    // μ = expr − c0, carried term-by-term with the constant reduced.
    let mut mu_terms = Vec::new();
    let mut c_remaining = -c0;
    for t in &expr.terms {
        match t.kind {
            TermKind::Constant { value } => c_remaining += value,
            _ => mu_terms.push(t.clone()),
        }
    }
    let mut terms = Vec::new();
    if c_remaining != 0.0 {
        terms.push(DistTerm::constant(c_remaining));
    }
    terms.extend(mu_terms);
    Ok(PositivityDecomposition {
        c0,
        mu: DistributionalExpr::new(expr.axis, terms),
        window,
        floor_grid_min: grid_min,
    })
}

/// A strictly positive piecewise-constant function on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    /// Interior breakpoints, strictly increasing, inside (0, 1).
    pub breakpoints: Vec<f64>,
    /// Region values; `values.len() == breakpoints.len() + 1`.
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn constant(v: f64) -> Self {
        PiecewiseConstant {
            breakpoints: vec![],
            values: vec![v],
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let mut k = 0;
        while k < self.breakpoints.len() && x >= self.breakpoints[k] {
            k += 1;
        }
        self.values[k]
    }
}

/// A time expression attached to each constant-density region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTimeExpr {
    /// `(x_lo, x_hi, expr)` with regions tiling [0, 1].
    pub regions: Vec<(f64, f64, DistributionalExpr)>,
}

impl RegionTimeExpr {
    /// If the expression is the same single region over all of [0, 1],
    /// returns it.
    pub fn as_uniform(&self) -> Option<&DistributionalExpr> {
        match self.regions.as_slice() {
            [(lo, hi, e)] if *lo == 0.0 && *hi == 1.0 => Some(e),
            _ => None,
        }
    }
}

/// Normalized coefficients produced by [`reduce_physical_model`].
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub c: DistributionalExpr,
    pub b: RegionTimeExpr,
    pub g: Vec<(f64, f64, Forcing)>,
}

/// Reduces the physical parameters — flexural rigidity `a`, axial load
/// `p(t)`, linear density `r` (piecewise constant, positive), transversal
/// load `g1` — to the normalized triple (c, b, g) by the change of time
/// variable t ↦ √r·t performed region by region:
///
/// * c = a,
/// * b(x, t) = p(√r(x) · t),
/// * g(x, t) = g1(x, √r(x) · t),
///
/// with Dirac impulses in time rescaled exactly:
/// δ(√r·t − t₁) = δ(t − t₁/√r) / √r.
pub fn reduce_physical_model(
    a: &DistributionalExpr,
    p: &DistributionalExpr,
    r: &PiecewiseConstant,
    g1: &Forcing,
) -> Result<ReducedModel, DistError> {
    for (k, v) in r.values.iter().enumerate() {
        if !(*v > 0.0) {
            return Err(DistError::InvalidDensity {
                region: k,
                value: *v,
            });
        }
    }
    let mut edges = vec![0.0];
    edges.extend(r.breakpoints.iter().copied());
    edges.push(1.0);
    let mut b_regions = Vec::new();
    let mut g_regions = Vec::new();
    for (k, w) in edges.windows(2).enumerate() {
        let (x_lo, x_hi) = (w[0], w[1]);
        let root_r = r.values[k].sqrt();
        b_regions.push((x_lo, x_hi, rescale_time_expr(p, root_r)));
        g_regions.push((
            x_lo,
            x_hi,
            Forcing {
                space: g1.space.clone(),
                time: rescale_time_expr(&g1.time, root_r),
            },
        ));
    }
    Ok(ReducedModel {
        c: a.clone(),
        b: RegionTimeExpr { regions: b_regions },
        g: g_regions,
    })
}

/// Applies t ↦ s·t to a time expression term by term (exactly).
fn rescale_time_expr(expr: &DistributionalExpr, s: f64) -> DistributionalExpr {
    debug_assert_eq!(expr.axis, Axis::Time);
    let terms = expr
        .terms
        .iter()
        .map(|t| DistTerm {
            kind: match &t.kind {
                TermKind::Constant { value } => TermKind::Constant { value: *value },
                TermKind::Smooth(f) => {
                    let g = f.clone();
                    let label = format!("{}(t*{s})", f.label);
                    if f.has_derivative() {
                        let dg = f.clone();
                        TermKind::Smooth(SmoothFn::with_derivative(
                            label,
                            move |t| g.eval(s * t),
                            move |t| s * dg.derivative(s * t).unwrap(),
                        ))
                    } else {
                        TermKind::Smooth(SmoothFn::new(label, move |t| g.eval(s * t)))
                    }
                }
                TermKind::Heaviside { x0, jump } => TermKind::Heaviside {
                    x0: x0 / s,
                    jump: *jump,
                },
                // δ(s·t − x0) = δ(t − x0/s)/s.
                TermKind::Dirac { x0, weight } => TermKind::Dirac {
                    x0: x0 / s,
                    weight: weight / s,
                },
                // −log|s·t − x0| = −log|t − x0/s| − log s.
                TermKind::NegLog { .. } => {
                    panic!("NegLog in time is not used by any scenario; rescaling unsupported")
                }
            },
        })
        .collect();
    DistributionalExpr {
        terms,
        axis: Axis::Time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify;

    #[test]
    fn dirac_pairing_sifts() {
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]);
        let v = pair_with_test(&e, |x| (x * 10.0).sin() + 2.0, (0.0, 1.0)).unwrap();
        let expect = (5.0f64).sin() + 2.0;
        assert!((v - expect).abs() < 1e-14);
    }

    #[test]
    fn constant_pairing_integrates_test_function() {
        let e = DistributionalExpr::constant(Axis::Space, 1.0);
        // φ = mollifier bump at 0.5, scale 0.1: unit integral.
        let v = pair_with_test(&e, |x| mollify::phi_eps(x - 0.5, 0.1), (0.4, 0.6)).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn heaviside_pairing_with_symmetric_bump_is_half() {
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::heaviside(0.5, 1.0)]);
        let v = pair_with_test(&e, |x| mollify::phi_eps(x - 0.5, 0.1), (0.4, 0.6)).unwrap();
        assert!((v - 0.5).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn decompose_delta_stiffness() {
        let e = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::constant(1.0), DistTerm::dirac(0.5, 1.0)],
        );
        let d = decompose_positive(&e, 1.0, (-0.2, 1.2)).unwrap();
        assert_eq!(d.mu.terms, vec![DistTerm::dirac(0.5, 1.0)]);
        assert_eq!(d.reassemble(), e);
    }

    #[test]
    fn decompose_pure_constant_zero_remainder() {
        let e = DistributionalExpr::constant(Axis::Space, 1.0);
        let d = decompose_positive(&e, 1.0, (-0.2, 1.2)).unwrap();
        assert!(d.mu.terms.is_empty(), "mu = {:?}", d.mu.terms);
        assert_eq!(d.reassemble(), e);
    }

    #[test]
    fn decompose_neglog_window_minimum() {
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::neglog(0.5)]);
        // On [−0.2, 1.2] the floor bottoms out at −log(0.7) ≈ 0.3567,
        // so c0 = log 2 ≈ 0.693 must be rejected and c0 = 0.356 accepted.
        let too_big = decompose_positive(&e, std::f64::consts::LN_2, (-0.2, 1.2));
        assert!(matches!(
            too_big,
            Err(DistError::NotProvablyPositive { .. })
        ));
        let ok = decompose_positive(&e, 0.356, (-0.2, 1.2)).unwrap();
        let expect_min = -(0.7f64).ln();
        assert!(
            (ok.floor_grid_min - expect_min).abs() < 1e-6,
            "grid min {} vs −log 0.7 = {}",
            ok.floor_grid_min,
            expect_min
        );
    }

    #[test]
    fn negative_dirac_weight_rejected() {
        let e = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::constant(2.0), DistTerm::dirac(0.5, -1.0)],
        );
        assert!(matches!(
            decompose_positive(&e, 1.0, (-0.2, 1.2)),
            Err(DistError::NotProvablyPositive { .. })
        ));
    }

    #[test]
    fn constant_below_floor_rejected() {
        let e = DistributionalExpr::constant(Axis::Space, 0.5);
        assert!(matches!(
            decompose_positive(&e, 1.0, (-0.2, 1.2)),
            Err(DistError::NotProvablyPositive { .. })
        ));
    }

    #[test]
    fn reduce_identity_model() {
        let one_x = DistributionalExpr::constant(Axis::Space, 1.0);
        let one_t = DistributionalExpr::constant(Axis::Time, 1.0);
        let g1 = Forcing::new(one_x.clone(), one_t.clone());
        let m =
            reduce_physical_model(&one_x, &one_t, &PiecewiseConstant::constant(1.0), &g1).unwrap();
        assert_eq!(m.c, one_x);
        assert_eq!(m.b.as_uniform().unwrap(), &one_t);
        assert_eq!(m.g[0].2.time, one_t);
    }

    #[test]
    fn reduce_rescales_time_dirac() {
        // p(t) = p0 + p1 · δ(t − t1), constant density r0:
        // b(t) = p0 + (p1/√r0) · δ(t − t1/√r0).
        let r0: f64 = 4.0;
        let (p0, p1, t1) = (2.0, 3.0, 0.4);
        let p = DistributionalExpr::new(
            Axis::Time,
            vec![DistTerm::constant(p0), DistTerm::dirac(t1, p1)],
        );
        let one_x = DistributionalExpr::constant(Axis::Space, 1.0);
        let g1 = Forcing::zero();
        let m = reduce_physical_model(&one_x, &p, &PiecewiseConstant::constant(r0), &g1).unwrap();
        let b = m.b.as_uniform().unwrap();
        assert_eq!(
            b.terms,
            vec![
                DistTerm::constant(p0),
                DistTerm::dirac(t1 / r0.sqrt(), p1 / r0.sqrt())
            ]
        );
        // Cross-check the Dirac scaling identity through the pairing:
        // ⟨δ(√r·t − t1), φ⟩ should equal φ(t1/√r)/√r.
        let phi = |t: f64| mollify::phi_eps(t - 0.2, 0.1);
        let v = pair_with_test(b, phi, (0.0, 1.0)).unwrap();
        let expect = p0 * {
            // ∫φ over its support is 1: the constant part pairs to p0.
            1.0
        } + p1 / r0.sqrt() * phi(t1 / r0.sqrt());
        assert!((v - expect).abs() < 1e-9, "{v} vs {expect}");
    }

    #[test]
    fn reduce_constant_load_ignores_density_jump() {
        let p = DistributionalExpr::constant(Axis::Time, 5.0);
        let one_x = DistributionalExpr::constant(Axis::Space, 1.0);
        let r = PiecewiseConstant {
            breakpoints: vec![0.5],
            values: vec![1.0, 9.0],
        };
        let m = reduce_physical_model(&one_x, &p, &r, &Forcing::zero()).unwrap();
        for (_, _, e) in &m.b.regions {
            assert_eq!(e.terms, vec![DistTerm::constant(5.0)]);
        }
    }

    #[test]
    fn nonpositive_density_rejected() {
        let one_x = DistributionalExpr::constant(Axis::Space, 1.0);
        let p = DistributionalExpr::constant(Axis::Time, 1.0);
        let r = PiecewiseConstant::constant(-1.0);
        assert!(matches!(
            reduce_physical_model(&one_x, &p, &r, &Forcing::zero()),
            Err(DistError::InvalidDensity { .. })
        ));
    }

    #[test]
    fn pairing_is_linear() {
        // a·e1 + e2 paired = a·⟨e1,φ⟩ + ⟨e2,φ⟩ to 1e−10 relative.
        let e1 = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::constant(2.0), DistTerm::dirac(0.3, 1.5)],
        );
        let e2 = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::heaviside(0.5, 1.0), DistTerm::neglog(0.7)],
        );
        let a = 3.25;
        let phi = |x: f64| mollify::phi_eps(x - 0.5, 0.45);
        let combined = e1.scaled(a).plus(&e2);
        let lhs = pair_with_test(&combined, phi, (0.0, 1.0)).unwrap();
        let rhs = a * pair_with_test(&e1, phi, (0.0, 1.0)).unwrap()
            + pair_with_test(&e2, phi, (0.0, 1.0)).unwrap();
        assert!(
            (lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
            "{lhs} vs {rhs}"
        );
    }
}
