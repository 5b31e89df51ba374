//! Clamped Hermite-cubic finite elements on a uniform mesh of (0, 1).
//!
//! The discrete space is C¹ piecewise-cubic with value and slope degrees of
//! freedom at every node; clamping removes both DOFs at each end, modelling
//! u(0) = u′(0) = u(1) = u′(1) = 0. The module assembles
//!
//! * the mass matrix `M = ⟨u, v⟩`,
//! * the bending matrix `Kc = ⟨c_ε u″, v″⟩` (symmetric),
//! * the axial matrix `Kb = ⟨b_ε u″, v⟩` (nonsymmetric),
//! * the Sobolev Gram matrices `G0 ⊂ G1 ⊂ G2` for the L², H¹, H² norms
//!   (sum convention: ‖v‖²_{H²} = ‖v‖² + ‖v′‖² + ‖v″‖²),
//! * load vectors, initial-data projections, and point evaluation.
//!
//! Mollified coefficients vary at scale ε, so element quadrature uses
//! composite 5-point Gauss panels, at least four panels across each bump.

use crate::banded::{Banded, SymBanded};
use crate::distmodel::{DistributionalExpr, TermKind};
use crate::mollify::RegularizedField;
use crate::quad;
use std::fmt;

/// Uniform mesh of [0, 1] with `n` elements of width `h = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteMesh {
    n: usize,
}

impl HermiteMesh {
    /// Element count.
    pub fn elements(&self) -> usize {
        self.n
    }

    /// Element width.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Coordinate of node `k` (0 ..= n).
    pub fn node(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    /// All DOFs before clamping: value and slope at each of n+1 nodes.
    pub fn total_dofs(&self) -> usize {
        2 * (self.n + 1)
    }

    /// DOFs after removing value and slope at both ends.
    pub fn free_dofs(&self) -> usize {
        2 * (self.n + 1) - 4
    }

    /// Maps a global DOF index to its free (constrained-system) index.
    fn free_index(&self, global: usize) -> Option<usize> {
        if global >= 2 && global < 2 * self.n {
            Some(global - 2)
        } else {
            None
        }
    }
}

/// Builds the clamped Hermite space on `n ≥ 2` uniform elements.
pub fn build_space(n: usize) -> HermiteMesh {
    assert!(n >= 2, "need at least two elements, got {n}");
    HermiteMesh { n }
}

/// Hermite shape functions on the reference element ξ ∈ [0, 1] for element
/// width `h`: returns (values, first, second derivatives in x) of the four
/// local functions (value-left, slope-left, value-right, slope-right).
pub fn shapes(xi: f64, h: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let x2 = xi * xi;
    let x3 = x2 * xi;
    let n = [
        1.0 - 3.0 * x2 + 2.0 * x3,
        h * (xi - 2.0 * x2 + x3),
        3.0 * x2 - 2.0 * x3,
        h * (x3 - x2),
    ];
    let d1 = [
        (6.0 * x2 - 6.0 * xi) / h,
        1.0 - 4.0 * xi + 3.0 * x2,
        (6.0 * xi - 6.0 * x2) / h,
        3.0 * x2 - 2.0 * xi,
    ];
    let d2 = [
        (12.0 * xi - 6.0) / (h * h),
        (6.0 * xi - 4.0) / h,
        (6.0 - 12.0 * xi) / (h * h),
        (6.0 * xi - 2.0) / h,
    ];
    (n, d1, d2)
}

/// Composite-Gauss element quadrature: 5 points per panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub panels: usize,
}

impl QuadratureSpec {
    /// One panel: exact for the polynomial integrands of constant
    /// coefficients (degree ≤ 6 against the 5-point rule's degree 9).
    pub fn plain() -> Self {
        QuadratureSpec { panels: 1 }
    }

    /// Panels sized so a mollifier bump at effective scale `eps_eff` is
    /// sampled by at least four panels: max(1, ⌈4h/ε⌉).
    pub fn resolving(mesh: &HermiteMesh, eps_eff: f64) -> Self {
        assert!(eps_eff > 0.0);
        let panels = (4.0 * mesh.h() / eps_eff).ceil().max(1.0) as usize;
        QuadratureSpec { panels }
    }
}

/// Assembled matrices of the regularized problem on the clamped space.
#[derive(Debug, Clone)]
pub struct HermiteSystem {
    pub mesh: HermiteMesh,
    /// Mass matrix ⟨u, v⟩.
    pub m: SymBanded,
    /// Bending matrix ⟨c_ε u″, v″⟩.
    pub kc: SymBanded,
    /// Axial matrix ⟨b_ε u″, v⟩ (spatial part; scale by the temporal
    /// factor of a separable b before use).
    pub kb: Banded,
    /// ⟨u′, v′⟩.
    pub s1: SymBanded,
    /// ⟨u″, v″⟩ (unweighted).
    pub s2: SymBanded,
    /// L² Gram matrix (= mass).
    pub g0: SymBanded,
    /// H¹ Gram matrix G0 + S1.
    pub g1: SymBanded,
    /// H² Gram matrix G0 + S1 + S2.
    pub g2: SymBanded,
    /// Spatial load vector ⟨g_ε-space, v_i⟩ on free DOFs.
    pub load_space: Vec<f64>,
    /// Non-fatal assembly diagnostics (e.g. under-resolved bumps).
    pub warnings: Vec<String>,
}

impl HermiteSystem {
    pub fn free_dofs(&self) -> usize {
        self.mesh.free_dofs()
    }

    /// Stiffness Kc + τ·Kb for the axial time factor τ.
    pub fn stiffness(&self, b_time_factor: f64) -> Banded {
        let nf = self.free_dofs();
        let mut k = Banded::zeros(nf, 3, 3);
        k.add_sym_scaled(&self.kc, 1.0);
        k.add_banded_scaled(&self.kb, b_time_factor);
        k
    }
}

/// Half-bandwidth of the clamped Hermite system (element e couples free
/// DOFs 2e−2 .. 2e+1).
const HALF_BW: usize = 3;

/// Assembles mass, bending, axial, and Gram matrices plus the spatial load
/// vector, with `quad.panels` 5-point Gauss panels per element.
///
/// A warning is recorded when a mollified field is narrower than two
/// elements (ε_eff < 2h): the mesh cannot represent such a bump and sweep
/// results at that ε say more about the mesh than about the data.
pub fn assemble(
    c: &RegularizedField,
    b: &RegularizedField,
    g_space: &RegularizedField,
    mesh: HermiteMesh,
    quad_spec: QuadratureSpec,
) -> HermiteSystem {
    let n = mesh.elements();
    let h = mesh.h();
    let nf = mesh.free_dofs();
    let mut m = SymBanded::zeros(nf, HALF_BW);
    let mut kc = SymBanded::zeros(nf, HALF_BW);
    let mut s1 = SymBanded::zeros(nf, HALF_BW);
    let mut s2 = SymBanded::zeros(nf, HALF_BW);
    let mut kb = Banded::zeros(nf, HALF_BW, HALF_BW);
    let mut load = vec![0.0; nf];

    let panels = quad_spec.panels.max(1);
    for e in 0..n {
        for p in 0..panels {
            let lo = p as f64 / panels as f64;
            let hi = (p + 1) as f64 / panels as f64;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for q in 0..5 {
                let xi = mid + half * quad::GL5_NODES[q];
                let w = quad::GL5_WEIGHTS[q] * half * h;
                let x = (e as f64 + xi) * h;
                let (nv, d1, d2) = shapes(xi, h);
                let cv = c.eval(x);
                let bv = b.eval(x);
                let gv = g_space.eval(x);
                for li in 0..4 {
                    let gi = 2 * e + li;
                    let Some(fi) = mesh.free_index(gi) else {
                        continue;
                    };
                    load[fi] += w * gv * nv[li];
                    for lj in 0..4 {
                        let gj = 2 * e + lj;
                        let Some(fj) = mesh.free_index(gj) else {
                            continue;
                        };
                        kb.add(fi, fj, w * bv * nv[li] * d2[lj]);
                        if lj >= li {
                            m.add(fi, fj, w * nv[li] * nv[lj]);
                            kc.add(fi, fj, w * cv * d2[li] * d2[lj]);
                            s1.add(fi, fj, w * d1[li] * d1[lj]);
                            s2.add(fi, fj, w * d2[li] * d2[lj]);
                        }
                    }
                }
            }
        }
    }

    let mut warnings = Vec::new();
    for (name, field) in [("c", c), ("b", b), ("g-space", g_space)] {
        let eps = field.epsilon_used;
        if eps > 0.0 && eps < 2.0 * h {
            warnings.push(format!(
                "field {name}: mollification scale {eps} is narrower than two elements \
                 (2h = {}); refine the mesh or stop the sweep earlier",
                2.0 * h
            ));
        }
    }

    let g0 = m.clone();
    let g1 = g0.add_matrix(&s1);
    let g2 = g1.add_matrix(&s2);
    HermiteSystem {
        mesh,
        m,
        kc,
        kb,
        s1,
        s2,
        g0,
        g1,
        g2,
        load_space: load,
        warnings,
    }
}

/// Load vector ⟨f, v_i⟩ on free DOFs for a pointwise-evaluable f, using
/// composite 5-point Gauss panels per element.
pub fn load_vector<F: Fn(f64) -> f64>(
    f: F,
    mesh: HermiteMesh,
    quad_spec: QuadratureSpec,
) -> Vec<f64> {
    let n = mesh.elements();
    let h = mesh.h();
    let mut load = vec![0.0; mesh.free_dofs()];
    let panels = quad_spec.panels.max(1);
    for e in 0..n {
        for p in 0..panels {
            let lo = p as f64 / panels as f64;
            let hi = (p + 1) as f64 / panels as f64;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for q in 0..5 {
                let xi = mid + half * quad::GL5_NODES[q];
                let w = quad::GL5_WEIGHTS[q] * half * h;
                let x = (e as f64 + xi) * h;
                let (nv, _, _) = shapes(xi, h);
                let gv = f(x);
                for li in 0..4 {
                    if let Some(fi) = mesh.free_index(2 * e + li) {
                        load[fi] += w * gv * nv[li];
                    }
                }
            }
        }
    }
    load
}

/// Exact load vector of a spatial point impulse w·δ(x−x₀): entry i is
/// w·v_i(x₀). Point evaluation is bounded on the C¹ space, so no
/// mollification is needed; the mollified path uses this as a cross-check.
pub fn dirac_load(x0: f64, weight: f64, mesh: HermiteMesh) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&x0), "impulse position outside [0,1]");
    let h = mesh.h();
    let n = mesh.elements();
    let e = ((x0 / h) as usize).min(n - 1);
    let xi = x0 / h - e as f64;
    let (nv, _, _) = shapes(xi, h);
    let mut load = vec![0.0; mesh.free_dofs()];
    for li in 0..4 {
        if let Some(fi) = mesh.free_index(2 * e + li) {
            load[fi] += weight * nv[li];
        }
    }
    load
}

/// Errors from initial-data projection.
#[derive(Debug, Clone, PartialEq)]
pub enum FemError {
    /// The data evaluated to a non-finite value.
    NonFinite { x: f64 },
}

impl fmt::Display for FemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FemError::NonFinite { x } => write!(f, "initial data is not finite at x = {x}"),
        }
    }
}

impl std::error::Error for FemError {}

/// Initial data accepted by [`project_initial`].
#[derive(Debug, Clone)]
pub enum InitialData<'a> {
    /// A smooth regularized field: interpolated by nodal values and slopes.
    Field(&'a RegularizedField),
    /// A raw expression: interpolated when C¹ (constants and smooth terms
    /// with derivatives), L²-projected otherwise.
    Expr(&'a DistributionalExpr),
}

/// Hermite interpolation from nodal value/slope functions (free DOFs only:
/// clamped ends are dropped, which is exact for admissible data).
fn interpolate<V: Fn(f64) -> f64, S: Fn(f64) -> f64>(
    value: V,
    slope: S,
    mesh: HermiteMesh,
) -> Result<Vec<f64>, FemError> {
    let mut coeffs = vec![0.0; mesh.free_dofs()];
    for k in 1..mesh.elements() {
        let x = mesh.node(k);
        let (v, s) = (value(x), slope(x));
        if !v.is_finite() || !s.is_finite() {
            return Err(FemError::NonFinite { x });
        }
        coeffs[2 * k - 2] = v;
        coeffs[2 * k - 1] = s;
    }
    Ok(coeffs)
}

/// Projects initial data onto the clamped space.
///
/// C¹ data (regularized fields; expressions whose every term carries a
/// derivative) is Hermite-interpolated — exact nodal values and slopes.
/// Everything else is L²-projected: solve G0·a = ⟨f, v_i⟩ with atom terms
/// (Dirac, Heaviside) paired analytically and −log|·−x₀| integrated by the
/// singularity-graded rule.
pub fn project_initial(
    data: InitialData<'_>,
    mesh: HermiteMesh,
    quad_spec: QuadratureSpec,
) -> Result<Vec<f64>, FemError> {
    match data {
        InitialData::Field(f) => interpolate(|x| f.eval(x), |x| f.eval_deriv(x), mesh),
        InitialData::Expr(expr) => {
            let c1 = expr.terms.iter().all(|t| match &t.kind {
                TermKind::Constant { .. } => true,
                TermKind::Smooth(f) => f.has_derivative(),
                _ => false,
            });
            if c1 {
                let value = |x: f64| -> f64 {
                    expr.terms
                        .iter()
                        .map(|t| match &t.kind {
                            TermKind::Constant { value } => *value,
                            TermKind::Smooth(f) => f.eval(x),
                            _ => unreachable!(),
                        })
                        .sum()
                };
                let slope = |x: f64| -> f64 {
                    expr.terms
                        .iter()
                        .map(|t| match &t.kind {
                            TermKind::Constant { .. } => 0.0,
                            TermKind::Smooth(f) => f.derivative(x).unwrap(),
                            _ => unreachable!(),
                        })
                        .sum()
                };
                interpolate(value, slope, mesh)
            } else {
                let rhs = expr_load(expr, mesh, quad_spec)?;
                let g0 = mass_matrix(mesh);
                let chol = g0
                    .cholesky()
                    .expect("mass matrix is symmetric positive definite");
                Ok(chol.solve(&rhs))
            }
        }
    }
}

/// Mass matrix alone (used by the L² projection path).
fn mass_matrix(mesh: HermiteMesh) -> SymBanded {
    let one = RegularizedField::constant(1.0);
    let zero = RegularizedField::constant(0.0);
    assemble(&one, &zero, &zero, mesh, QuadratureSpec::plain()).m
}

/// ⟨expr, v_i⟩ on free DOFs, term by term.
fn expr_load(
    expr: &DistributionalExpr,
    mesh: HermiteMesh,
    quad_spec: QuadratureSpec,
) -> Result<Vec<f64>, FemError> {
    let mut load = vec![0.0; mesh.free_dofs()];
    let h = mesh.h();
    for term in &expr.terms {
        match &term.kind {
            TermKind::Constant { value } => {
                let v = *value;
                axpy(&mut load, &load_vector(|_| v, mesh, quad_spec));
            }
            TermKind::Smooth(f) => {
                axpy(&mut load, &load_vector(|x| f.eval(x), mesh, quad_spec));
            }
            TermKind::Dirac { x0, weight } => {
                axpy(&mut load, &dirac_load(*x0, *weight, mesh));
            }
            TermKind::Heaviside { x0, jump } => {
                let (x0, j) = (*x0, *jump);
                axpy(
                    &mut load,
                    &load_vector(|x| if x >= x0 { j } else { 0.0 }, mesh, quad_spec),
                );
            }
            TermKind::NegLog { x0 } => {
                // Per-element graded quadrature against each shape function.
                let x0 = *x0;
                for e in 0..mesh.elements() {
                    let (a, b) = (e as f64 * h, (e + 1) as f64 * h);
                    for li in 0..4 {
                        let Some(fi) = mesh.free_index(2 * e + li) else {
                            continue;
                        };
                        let v = quad::singular_tiled(
                            |x| {
                                if x == x0 {
                                    return 0.0;
                                }
                                let (nv, _, _) = shapes((x - a) / h, h);
                                -(x - x0).abs().ln() * nv[li]
                            },
                            a,
                            b,
                            x0,
                        );
                        load[fi] += v;
                    }
                }
            }
        }
    }
    if let Some(bad) = load.iter().position(|v| !v.is_finite()) {
        return Err(FemError::NonFinite {
            x: (bad / 2 + 1) as f64 * h,
        });
    }
    Ok(load)
}

fn axpy(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Evaluates the discrete solution (or its first or second derivative) at
/// x ∈ [0, 1] from its free-DOF coefficients.
pub fn eval_solution(coeffs: &[f64], mesh: HermiteMesh, x: f64, deriv: u8) -> f64 {
    assert!(deriv <= 2, "only u, u', u'' are defined");
    assert_eq!(coeffs.len(), mesh.free_dofs());
    let h = mesh.h();
    let n = mesh.elements();
    let e = ((x / h) as usize).min(n - 1);
    let xi = x / h - e as f64;
    let (nv, d1, d2) = shapes(xi, h);
    let basis = match deriv {
        0 => nv,
        1 => d1,
        _ => d2,
    };
    let mut acc = 0.0;
    for li in 0..4 {
        if let Some(fi) = mesh.free_index(2 * e + li) {
            acc += basis[li] * coeffs[fi];
        }
    }
    acc
}

/// L² distance between the discrete solution and a reference function,
/// by 8-point Gauss per element.
pub fn l2_error<F: Fn(f64) -> f64>(coeffs: &[f64], mesh: HermiteMesh, reference: F) -> f64 {
    let h = mesh.h();
    let mut acc = 0.0;
    for e in 0..mesh.elements() {
        let a = e as f64 * h;
        acc += quad::gl8(
            |x| {
                let d = eval_solution(coeffs, mesh, x, 0) - reference(x);
                d * d
            },
            a,
            a + h,
        );
    }
    acc.sqrt()
}

/// Quadrature-assembled 4×4 element blocks (mass, bending, first-derivative,
/// axial with unit coefficients) for element width `h`; the unit tests pin
/// these against exact symbolic integrals.
#[cfg(test)]
pub(crate) fn element_blocks(h: f64) -> [[[f64; 4]; 4]; 4] {
    let mut mass = [[0.0; 4]; 4];
    let mut bend = [[0.0; 4]; 4];
    let mut first = [[0.0; 4]; 4];
    let mut axial = [[0.0; 4]; 4];
    for q in 0..5 {
        let xi = 0.5 + 0.5 * quad::GL5_NODES[q];
        let w = quad::GL5_WEIGHTS[q] * 0.5 * h;
        let (nv, d1, d2) = shapes(xi, h);
        for i in 0..4 {
            for j in 0..4 {
                mass[i][j] += w * nv[i] * nv[j];
                bend[i][j] += w * d2[i] * d2[j];
                first[i][j] += w * d1[i] * d1[j];
                axial[i][j] += w * nv[i] * d2[j];
            }
        }
    }
    [mass, bend, first, axial]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::{Axis, DistTerm, SmoothFn};
    use crate::mollify::{self, MollifierNet, PHI_AT_ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_fields() -> (RegularizedField, RegularizedField, RegularizedField) {
        (
            RegularizedField::constant(1.0),
            RegularizedField::constant(1.0),
            RegularizedField::constant(1.0),
        )
    }

    #[test]
    fn dof_counts() {
        let m2 = build_space(2);
        assert_eq!(m2.total_dofs(), 6);
        assert_eq!(m2.free_dofs(), 2);
        let m256 = build_space(256);
        assert_eq!(m256.free_dofs(), 510);
    }

    #[test]
    #[should_panic(expected = "at least two elements")]
    fn single_element_rejected() {
        build_space(1);
    }

    #[test]
    fn basis_is_c1_across_nodes() {
        // A random coefficient vector must have continuous value and slope
        // at every interior node.
        let mesh = build_space(8);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let coeffs: Vec<f64> = (0..mesh.free_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let d = 1e-12;
        for k in 1..mesh.elements() {
            let x = mesh.node(k);
            for deriv in [0u8, 1] {
                let left = eval_solution(&coeffs, mesh, x - d, deriv);
                let right = eval_solution(&coeffs, mesh, x + d, deriv);
                assert!(
                    (left - right).abs() < 1e-7,
                    "node {k} deriv {deriv}: {left} vs {right}"
                );
            }
        }
    }

    #[test]
    fn element_blocks_match_symbolic_integrals() {
        for &h in &[0.125, 0.3] {
            let [mass, bend, first, axial] = element_blocks(h);
            let h2 = h * h;
            let mass_exact = [
                [156.0, 22.0 * h, 54.0, -13.0 * h],
                [22.0 * h, 4.0 * h2, 13.0 * h, -3.0 * h2],
                [54.0, 13.0 * h, 156.0, -22.0 * h],
                [-13.0 * h, -3.0 * h2, -22.0 * h, 4.0 * h2],
            ];
            let bend_exact = [
                [12.0, 6.0 * h, -12.0, 6.0 * h],
                [6.0 * h, 4.0 * h2, -6.0 * h, 2.0 * h2],
                [-12.0, -6.0 * h, 12.0, -6.0 * h],
                [6.0 * h, 2.0 * h2, -6.0 * h, 4.0 * h2],
            ];
            let first_exact = [
                [36.0, 3.0 * h, -36.0, 3.0 * h],
                [3.0 * h, 4.0 * h2, -3.0 * h, -h2],
                [-36.0, -3.0 * h, 36.0, -3.0 * h],
                [3.0 * h, -h2, -3.0 * h, 4.0 * h2],
            ];
            let axial_exact = [
                [-36.0 / h, -33.0, 36.0 / h, -3.0],
                [-3.0, -4.0 * h, 3.0, h],
                [36.0 / h, 3.0, -36.0 / h, 33.0],
                [-3.0, h, 3.0, -4.0 * h],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    let checks = [
                        (mass[i][j], mass_exact[i][j] * h / 420.0, "mass"),
                        (bend[i][j], bend_exact[i][j] / (h2 * h), "bend"),
                        (first[i][j], first_exact[i][j] / (30.0 * h), "first"),
                        (axial[i][j], axial_exact[i][j] / 30.0, "axial"),
                    ];
                    for (got, want, label) in checks {
                        assert!(
                            (got - want).abs() <= 1e-12 * (1.0 + want.abs()),
                            "h={h} {label}[{i}][{j}]: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn biharmonic_weak_identity_for_quartic() {
        // u = x²(x−1)² has ∂⁴u = 24; ⟨Kc u_I, v⟩ must match ⟨24, v⟩ up to
        // interpolation error for every v, i.e. the residual vector is
        // small against the n=256 load of the constant 24.
        let mesh = build_space(256);
        let (c, b, g) = unit_fields();
        let sys = assemble(&c, &b, &g, mesh, QuadratureSpec::plain());
        let u = project_initial(
            InitialData::Expr(&DistributionalExpr::new(
                Axis::Space,
                vec![DistTerm::smooth(SmoothFn::with_derivative(
                    "quartic",
                    |x| x * x * (x - 1.0) * (x - 1.0),
                    |x| 2.0 * x * (x - 1.0) * (2.0 * x - 1.0),
                ))],
            )),
            mesh,
            QuadratureSpec::plain(),
        )
        .unwrap();
        let lhs = sys.kc.mul_vec(&u);
        let rhs = load_vector(|_| 24.0, mesh, QuadratureSpec::plain());
        let err: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // Measured residual at n=256 is ~3e−9 (interpolation of the
        // quartic commits O(h⁴) nodally, amplified by 1/h² in bending).
        assert!(err < 1e-7, "max residual {err}");
    }

    #[test]
    fn zero_axial_coefficient_gives_zero_matrix() {
        let mesh = build_space(16);
        let zero = RegularizedField::constant(0.0);
        let one = RegularizedField::constant(1.0);
        let sys = assemble(&one, &zero, &one, mesh, QuadratureSpec::plain());
        for i in 0..mesh.free_dofs() {
            for j in i.saturating_sub(3)..(i + 4).min(mesh.free_dofs()) {
                assert_eq!(sys.kb.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn gram_matrices_are_spd_across_mesh_sizes() {
        for n in [8, 16, 32, 64, 128, 256, 512] {
            let mesh = build_space(n);
            let (c, b, g) = unit_fields();
            let sys = assemble(&c, &b, &g, mesh, QuadratureSpec::plain());
            assert!(sys.m.cholesky().is_ok(), "M not SPD at n={n}");
            assert!(sys.g0.cholesky().is_ok(), "G0 not SPD at n={n}");
            assert!(sys.g2.cholesky().is_ok(), "G2 not SPD at n={n}");
        }
    }

    #[test]
    fn gram_norms_nest() {
        let mesh = build_space(32);
        let (c, b, g) = unit_fields();
        let sys = assemble(&c, &b, &g, mesh, QuadratureSpec::plain());
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let v: Vec<f64> = (0..mesh.free_dofs())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let q0 = sys.g0.quadratic_form(&v);
            let q1 = sys.g1.quadratic_form(&v);
            let q2 = sys.g2.quadratic_form(&v);
            assert!(q0 <= q1 * (1.0 + 1e-13) && q1 <= q2 * (1.0 + 1e-13));
        }
    }

    #[test]
    fn cubic_patch_test() {
        // Hermite cubics reproduce cubics exactly, so the unclamped
        // discrete bending form on u = x³, v = x³ + x² must equal the
        // symbolic values: a₀(x³,x³) = ∫(6x)² = 12, a₀(x³, x³+x²) =
        // 12 + ∫6x·2 = 18.
        let n = 8;
        let h = 1.0 / n as f64;
        let [_, bend, _, _] = element_blocks(h);
        let du = |x: f64| 3.0 * x * x;
        let u = |x: f64| x * x * x;
        let v = |x: f64| x * x * x + x * x;
        let dv = |x: f64| 3.0 * x * x + 2.0 * x;
        let mut a_uu = 0.0;
        let mut a_uv = 0.0;
        for e in 0..n {
            let (x0, x1) = (e as f64 * h, (e + 1) as f64 * h);
            let ue = [u(x0), du(x0), u(x1), du(x1)];
            let ve = [v(x0), dv(x0), v(x1), dv(x1)];
            for i in 0..4 {
                for j in 0..4 {
                    a_uu += ue[i] * bend[i][j] * ue[j];
                    a_uv += ve[i] * bend[i][j] * ue[j];
                }
            }
        }
        assert!((a_uu - 12.0).abs() < 1e-10, "a0(u,u) = {a_uu}");
        assert!((a_uv - 18.0).abs() < 1e-10, "a0(u,v) = {a_uv}");
    }

    #[test]
    fn panel_doubling_leaves_polynomial_assembly_fixed() {
        // Constant coefficients: each entry is a polynomial integral that
        // the 5-point rule already integrates exactly, so doubling panels
        // moves nothing beyond roundoff.
        let mesh = build_space(32);
        let (c, b, g) = unit_fields();
        let s1 = assemble(&c, &b, &g, mesh, QuadratureSpec { panels: 1 });
        let s2 = assemble(&c, &b, &g, mesh, QuadratureSpec { panels: 2 });
        let nf = mesh.free_dofs();
        let mut worst = 0.0f64;
        for i in 0..nf {
            for j in i.saturating_sub(3)..(i + 4).min(nf) {
                worst = worst.max((s1.kc.get(i, j) - s2.kc.get(i, j)).abs());
                worst = worst.max((s1.m.get(i, j) - s2.m.get(i, j)).abs());
                worst = worst.max((s1.kb.get(i, j) - s2.kb.get(i, j)).abs());
            }
        }
        assert!(worst < 1e-9, "entry drift {worst}");
    }

    #[test]
    fn panel_doubling_is_converged_for_mollified_coefficients() {
        // Mollified bump at ε = 0.2 with the production panel rule vs.
        // twice as many panels: drift stays far below matrix scale
        // (measured ~1.9e−7 relative at n=64).
        let mesh = build_space(64);
        let net = MollifierNet::identity(0.2).unwrap();
        let cexpr = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::constant(1.0), DistTerm::dirac(0.5, 1.0)],
        );
        let cf = mollify::mollify_expr(&cexpr, &net, (0.0, 1.0)).unwrap();
        let one = RegularizedField::constant(1.0);
        let base = QuadratureSpec::resolving(&mesh, 0.2);
        let s1 = assemble(&cf, &one, &one, mesh, base);
        let s2 = assemble(
            &cf,
            &one,
            &one,
            mesh,
            QuadratureSpec {
                panels: 2 * base.panels,
            },
        );
        let nf = mesh.free_dofs();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..nf {
            for j in i.saturating_sub(3)..(i + 4).min(nf) {
                worst = worst.max((s1.kc.get(i, j) - s2.kc.get(i, j)).abs());
                scale = scale.max(s1.kc.get(i, j).abs());
            }
        }
        assert!(worst <= 1e-6 * scale, "drift {worst} at scale {scale}");
    }

    #[test]
    fn constant_load_vector_is_exact() {
        // ⟨1, v_i⟩: h for interior value DOFs, 0 for slope DOFs.
        let mesh = build_space(16);
        let h = mesh.h();
        let load = load_vector(|_| 1.0, mesh, QuadratureSpec::plain());
        for k in 1..mesh.elements() {
            assert!((load[2 * k - 2] - h).abs() < 1e-15);
            assert!(load[2 * k - 1].abs() < 1e-16);
        }
    }

    #[test]
    fn projection_of_zero_is_zero() {
        let mesh = build_space(8);
        let zero = RegularizedField::constant(0.0);
        let coeffs =
            project_initial(InitialData::Field(&zero), mesh, QuadratureSpec::plain()).unwrap();
        assert!(coeffs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quartic_interpolation_converges_at_fourth_order() {
        let f = |x: f64| x * x * (x - 1.0) * (x - 1.0);
        let df = |x: f64| 2.0 * x * (x - 1.0) * (2.0 * x - 1.0);
        let expr = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::smooth(SmoothFn::with_derivative(
                "quartic", f, df,
            ))],
        );
        let mut errors = Vec::new();
        for n in [8, 16, 32, 64] {
            let mesh = build_space(n);
            let coeffs =
                project_initial(InitialData::Expr(&expr), mesh, QuadratureSpec::plain()).unwrap();
            errors.push(l2_error(&coeffs, mesh, f));
        }
        // Consecutive-halving slopes all close to 4.
        for w in errors.windows(2) {
            let slope = (w[0] / w[1]).ln() / 2.0f64.ln();
            assert!(
                (slope - 4.0).abs() < 0.2,
                "slope {slope}; errors {errors:?}"
            );
        }
    }

    #[test]
    fn interpolated_mollifier_peak_is_accurate() {
        let mesh = build_space(256);
        let net = MollifierNet::identity(0.1).unwrap();
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]);
        let field = mollify::mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
        let coeffs =
            project_initial(InitialData::Field(&field), mesh, QuadratureSpec::plain()).unwrap();
        let peak = eval_solution(&coeffs, mesh, 0.5, 0);
        let expect = PHI_AT_ZERO / 0.1;
        assert!(
            (peak - expect).abs() < 0.01 * expect,
            "peak {peak} vs {expect}"
        );
    }

    #[test]
    fn l2_projection_of_dirac_matches_exact_pairing() {
        // δ(x−x₀) L²-projects to a vector whose pairing with the load of
        // any smooth w equals w(x₀) up to projection error; cheaper check:
        // G0·a equals the exact point-evaluation load.
        let mesh = build_space(64);
        let expr = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.37, 2.0)]);
        let coeffs =
            project_initial(InitialData::Expr(&expr), mesh, QuadratureSpec::plain()).unwrap();
        let (c, b, g) = unit_fields();
        let sys = assemble(&c, &b, &g, mesh, QuadratureSpec::plain());
        let back = sys.g0.mul_vec(&coeffs);
        let exact = dirac_load(0.37, 2.0, mesh);
        for (i, (got, want)) in back.iter().zip(&exact).enumerate() {
            assert!((got - want).abs() < 1e-10, "entry {i}: {got} vs {want}");
        }
    }

    #[test]
    fn eval_solution_basics() {
        let mesh = build_space(64);
        let zero = vec![0.0; mesh.free_dofs()];
        assert_eq!(eval_solution(&zero, mesh, 0.33, 0), 0.0);
        let expr = DistributionalExpr::new(
            Axis::Space,
            vec![DistTerm::smooth(SmoothFn::with_derivative(
                "quartic",
                |x| x * x * (x - 1.0) * (x - 1.0),
                |x| 2.0 * x * (x - 1.0) * (2.0 * x - 1.0),
            ))],
        );
        let coeffs =
            project_initial(InitialData::Expr(&expr), mesh, QuadratureSpec::plain()).unwrap();
        let mid = eval_solution(&coeffs, mesh, 0.5, 0);
        assert!((mid - 0.0625).abs() < 1e-6, "u(0.5) = {mid}");
        // Clamped ends: value and slope vanish for any free vector.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..mesh.free_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        for deriv in [0u8, 1] {
            assert_eq!(eval_solution(&v, mesh, 0.0, deriv), 0.0);
            assert_eq!(eval_solution(&v, mesh, 1.0, deriv), 0.0);
        }
    }

    #[test]
    fn under_resolved_bump_warns() {
        let mesh = build_space(8);
        // ε = 0.01 ≪ 2h = 0.25.
        let net = MollifierNet::identity(0.01).unwrap();
        let e = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]);
        let cf = mollify::mollify_expr(&e, &net, (0.0, 1.0)).unwrap();
        let one = RegularizedField::constant(1.0);
        let sys = assemble(
            &cf,
            &one,
            &one,
            mesh,
            QuadratureSpec::resolving(&mesh, 0.01),
        );
        assert!(!sys.warnings.is_empty());
        // A well-resolved field does not warn.
        let net2 = MollifierNet::identity(0.5).unwrap();
        let cf2 = mollify::mollify_expr(&e, &net2, (0.0, 1.0)).unwrap();
        let sys2 = assemble(
            &cf2,
            &one,
            &one,
            mesh,
            QuadratureSpec::resolving(&mesh, 0.5),
        );
        assert!(sys2.warnings.is_empty());
    }

    #[test]
    fn resolving_panel_rule() {
        let mesh = build_space(256);
        assert_eq!(QuadratureSpec::resolving(&mesh, 0.2).panels, 1);
        assert_eq!(QuadratureSpec::resolving(&mesh, 0.01).panels, 2);
        let coarse = build_space(8);
        assert_eq!(QuadratureSpec::resolving(&coarse, 0.05).panels, 10);
    }

    #[test]
    fn dirac_load_is_point_evaluation() {
        // uᵀ·dirac_load(x₀) = u_h(x₀) for any discrete u: the load vector
        // is the Riesz representer of point evaluation.
        let mesh = build_space(32);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u: Vec<f64> = (0..mesh.free_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        for &x0 in &[0.0, 0.1875, 0.5, 0.77, 1.0] {
            let load = dirac_load(x0, 1.0, mesh);
            let paired: f64 = u.iter().zip(&load).map(|(a, b)| a * b).sum();
            let direct = eval_solution(&u, mesh, x0, 0);
            assert!(
                (paired - direct).abs() < 1e-12,
                "x0={x0}: {paired} vs {direct}"
            );
        }
    }
}
