//! Numerical integration kernels.
//!
//! Everything in this crate integrates either polynomials of small fixed
//! degree (element matrices), smooth bumps at a known scale (mollified
//! fields), or an isolated integrable singularity at a known location
//! (log-type stiffness). Three tools cover all of it:
//!
//! * fixed Gauss–Legendre rules of order 4 and 8 (exact through degree 7
//!   and 15 respectively),
//! * composite versions of those rules on uniform panels,
//! * geometrically graded panels refining toward a known singular point,
//! * a doubling-refinement driver for "integrate to a requested tolerance"
//!   jobs such as computing the mollifier normalizer.

/// Nodes of the 4-point Gauss–Legendre rule on [-1, 1].
pub const GL4_NODES: [f64; 4] = [
    -0.861136311594052575223946488893,
    -0.339981043584856264802665759103,
    0.339981043584856264802665759103,
    0.861136311594052575223946488893,
];

/// Weights of the 4-point Gauss–Legendre rule on [-1, 1].
pub const GL4_WEIGHTS: [f64; 4] = [
    0.347854845137453857373063949222,
    0.652145154862546142626936050778,
    0.652145154862546142626936050778,
    0.347854845137453857373063949222,
];

/// Nodes of the 5-point Gauss–Legendre rule on [-1, 1].
pub const GL5_NODES: [f64; 5] = [
    -0.906179845938663992797626878299,
    -0.538469310105683091036314420700,
    0.0,
    0.538469310105683091036314420700,
    0.906179845938663992797626878299,
];

/// Weights of the 5-point Gauss–Legendre rule on [-1, 1].
pub const GL5_WEIGHTS: [f64; 5] = [
    0.236926885056189087514264040720,
    0.478628670499366468041291514836,
    0.568888888888888888888888888889,
    0.478628670499366468041291514836,
    0.236926885056189087514264040720,
];

/// Nodes of the 8-point Gauss–Legendre rule on [-1, 1].
pub const GL8_NODES: [f64; 8] = [
    -0.960289856497536231683560868569,
    -0.796666477413626739591553936476,
    -0.525532409916328985817739049189,
    -0.183434642495649804939476142360,
    0.183434642495649804939476142360,
    0.525532409916328985817739049189,
    0.796666477413626739591553936476,
    0.960289856497536231683560868569,
];

/// Weights of the 8-point Gauss–Legendre rule on [-1, 1].
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101228536290376259152531354310,
    0.222381034453374470544355994426,
    0.313706645877887287337962201987,
    0.362683783378361982965150449277,
    0.362683783378361982965150449277,
    0.313706645877887287337962201987,
    0.222381034453374470544355994426,
    0.101228536290376259152531354310,
];

/// Integrates `f` over `[a, b]` with a single 4-point Gauss–Legendre panel.
///
/// Exact for polynomials of degree ≤ 7 up to rounding.
pub fn gl4<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrates `f` over `[a, b]` with a single 8-point Gauss–Legendre panel.
///
/// Exact for polynomials of degree ≤ 15 up to rounding.
pub fn gl8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite 8-point Gauss–Legendre rule on `panels` uniform panels.
pub fn gl8_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 1, "at least one panel required");
    let width = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        acc += gl8(&f, lo, lo + width);
    }
    acc
}

/// Integrates `f` over `[a, b]` to the requested absolute tolerance by
/// doubling the number of composite 8-point panels until two successive
/// refinements agree.
///
/// Refinement starts at 64 panels (512 nodes), so features wider than
/// about a five-hundredth of the interval cannot slip between nodes of the
/// first coarse level and trigger a spuriously converged result.
///
/// Returns `Err(residual)` with the last refinement gap if 2¹⁴ panels are
/// not enough; for the smooth integrands this crate feeds it, that
/// indicates a modelling error rather than a hard integral.
pub fn adaptive_checked<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, f64> {
    let mut panels = 64usize;
    let mut prev = gl8_composite(&f, a, b, panels);
    loop {
        panels *= 2;
        let cur = gl8_composite(&f, a, b, panels);
        let residual = (cur - prev).abs();
        if residual <= tol {
            return Ok(cur);
        }
        if panels > (1 << 14) {
            return Err(residual);
        }
        prev = cur;
    }
}

/// Panicking wrapper over [`adaptive_checked`] for integrands known smooth.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive_checked(f, a, b, tol).unwrap_or_else(|residual| {
        panic!("adaptive quadrature stalled at residual {residual:e} (tolerance {tol:e}) on [{a}, {b}]")
    })
}

/// Uniform tiles laid across the interval by the base singular rule.
const SING_TILES: usize = 32;
/// Geometric panels radiating from the singular point on each side.
const SING_PPS: u32 = 24;

/// Integrates `f` over `[a, b]` where `f` has one integrable singularity at
/// `s` (which may also lie outside the interval).
///
/// The interval is covered by uniform tiles of width `(b−a)/32` — enough to
/// resolve structure on the scale of the interval itself — and, when the
/// singular point lies within one interval-length of `[a, b]`, panel edges
/// additionally radiate from it geometrically (ratio 2, 24 panels, finest
/// width `tile/2²³`) before the uniform tiling takes over. Every panel
/// carries an 8-point Gauss–Legendre rule. For log-type singularities the
/// measured worst-case error is ~1e−10, far below the discretization
/// errors the result feeds into.
pub fn singular_tiled<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, s: f64) -> f64 {
    singular_tiled_with(f, a, b, s, SING_TILES)
}

fn singular_tiled_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, s: f64, tiles: usize) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    let tile_w = len / tiles as f64;
    // Far away the integrand is smooth on the tile scale: plain tiling.
    if s < a - len || s > b + len {
        let mut acc = 0.0;
        for k in 0..tiles {
            acc += gl8(&f, a + k as f64 * tile_w, a + (k + 1) as f64 * tile_w);
        }
        return acc;
    }
    let sc = s.clamp(a, b);
    let mut edges: Vec<f64> = vec![a, b];
    if a < sc && sc < b {
        edges.push(sc);
    }
    for sign in [1.0, -1.0] {
        // Geometric section: offsets tile_w/2²³, …, tile_w/2, tile_w.
        for k in 1..=SING_PPS {
            let e = sc + sign * tile_w / (2.0f64).powi((SING_PPS - k) as i32);
            if a < e && e < b {
                edges.push(e);
            }
        }
        // Uniform continuation out to the boundary.
        let mut reach = tile_w;
        loop {
            reach += tile_w;
            let e = sc + sign * reach;
            if e <= a || e >= b {
                break;
            }
            edges.push(e);
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let mut acc = 0.0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            acc += gl8(&f, w[0], w[1]);
        }
    }
    acc
}

/// Self-checking variant of [`singular_tiled`]: doubles the tile count until
/// two successive results agree within `tol`, or reports the last increment
/// as `Err` once 4096 tiles have been reached.
pub fn singular_adaptive_checked<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    s: f64,
    tol: f64,
) -> Result<f64, f64> {
    let mut prev = singular_tiled_with(&f, a, b, s, SING_TILES);
    let mut tiles = SING_TILES * 2;
    let mut last_inc = f64::INFINITY;
    while tiles <= 4096 {
        let cur = singular_tiled_with(&f, a, b, s, tiles);
        last_inc = (cur - prev).abs();
        if last_inc <= tol {
            return Ok(cur);
        }
        prev = cur;
        tiles *= 2;
    }
    Err(last_inc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl4_exact_for_degree_seven() {
        // ∫₀¹ x⁷ dx = 1/8; a single 4-point panel must nail it.
        let v = gl4(|x| x.powi(7), 0.0, 1.0);
        assert!((v - 0.125).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn gl4_not_exact_for_degree_eight() {
        // Sanity check that degree 8 is genuinely beyond the rule.
        let v = gl4(|x| x.powi(8), 0.0, 1.0);
        assert!((v - 1.0 / 9.0).abs() > 1e-9, "got {v}");
    }

    #[test]
    fn gl8_exact_for_degree_fifteen() {
        // ∫₀¹ x¹⁵ dx = 1/16.
        let v = gl8(|x| x.powi(15), 0.0, 1.0);
        assert!((v - 1.0 / 16.0).abs() < 1e-14, "got {v}");
    }

    #[test]
    fn composite_handles_oscillation() {
        // ∫₀^{2π} sin²(x) dx = π.
        let v = gl8_composite(|x| x.sin().powi(2), 0.0, 2.0 * std::f64::consts::PI, 8);
        assert!((v - std::f64::consts::PI).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn adaptive_reaches_tolerance() {
        let v = adaptive(|x: f64| (-x * x).exp(), -3.0, 3.0, 1e-12);
        // erf-based reference: √π · erf(3).
        let reference = 1.77241469651904;
        assert!((v - reference).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn singular_handles_log_at_endpoint() {
        // ∫₀¹ (−log x) dx = 1 with the singularity at the left endpoint.
        let v = singular_tiled(|x: f64| -x.ln(), 0.0, 1.0, 0.0);
        assert!((v - 1.0).abs() < 5e-10, "got {v}");
    }

    #[test]
    fn singular_handles_log_in_interior() {
        // ∫₋₁¹ (−log|x|) dx = 2.
        let v = singular_tiled(|x: f64| -(x.abs()).ln(), -1.0, 1.0, 0.0);
        assert!((v - 2.0).abs() < 5e-10, "got {v}");
    }

    #[test]
    fn singular_point_far_outside_uses_plain_tiling() {
        // ∫₀^{0.1} −ln(s−x) dx with s = 0.25, i.e. beyond one interval
        // length away; antiderivative G(x) = (s−x)(ln(s−x) − 1).
        let s = 0.25f64;
        let g = |x: f64| (s - x) * ((s - x).ln() - 1.0);
        let v = singular_tiled(|x: f64| -(s - x).ln(), 0.0, 0.1, s);
        assert!((v - (g(0.1) - g(0.0))).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn singular_point_just_outside_is_clamped() {
        // Singularity at b + 0.4·(b−a): graded toward the right edge.
        let s = 1.4f64;
        let g = |x: f64| (s - x) * ((s - x).ln() - 1.0);
        let v = singular_tiled(|x: f64| -(s - x).ln(), 0.0, 1.0, s);
        assert!((v - (g(1.0) - g(0.0))).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn singular_rule_covers_constants_exactly() {
        let v = singular_tiled(|_| 1.0, 0.3, 0.9, 0.5);
        assert!((v - 0.6).abs() < 1e-13, "got {v}");
    }

    #[test]
    fn singular_adaptive_tightens_narrow_structure() {
        // A narrow bump far from the singularity is missed by coarse tiles;
        // the doubling variant must still land within tolerance.
        let f = |x: f64| {
            let z: f64 = (x - 0.31) / 0.004;
            -(x - 0.9f64).abs().ln() + (-z * z).exp()
        };
        let v = singular_adaptive_checked(f, 0.0, 1.0, 0.9, 1e-11).unwrap();
        // Reference: ∫−ln|x−0.9| over [0,1] + √π·0.004 (Gaussian tails
        // are ~1e−300 outside the interval).
        let g = |d: f64| d - d * d.abs().ln();
        let reference = g(0.9) + g(0.1) + 0.004 * std::f64::consts::PI.sqrt();
        assert!((v - reference).abs() < 1e-9, "got {v} vs {reference}");
    }
}
