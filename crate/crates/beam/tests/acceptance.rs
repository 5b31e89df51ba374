//! Acceptance gate: twelve end-to-end checks over the library's numerics.
//!
//! Each test covers one numbered criterion and prints a single
//! `criterion NN: PASS/FAIL — detail` line (visible with `--nocapture`;
//! cargo's own per-test `ok`/`FAILED` line carries the same verdict).
//! Tolerances are pinned inline next to each check.
//!
//! Expensive ε-sweeps are computed once per scenario and shared between
//! criteria through a process-wide cache.

// Deliberate idioms: `!(x > y)` guards reject NaN, and immediately-invoked
// closures emulate try-blocks so each criterion reads as one fallible block.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::redundant_closure_call)]

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use beam::asympt::Verdict;
use beam::distmodel::{Axis, DistTerm, DistributionalExpr};
use beam::femcore::{assemble, build_space, QuadratureSpec};
use beam::march::{newmark_march, Load, TimeGrid};
use beam::mollify::{mollify_expr, phi_eps, MollifierNet, RegularizedField};
use beam::quad;
use beam::scenario::{
    consistency_probe, convergence_study, fitted_rate, impulse_profile, sweep, uniqueness_probe,
    BeamScenario, SweepOutcome, SWEEP_EPS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

fn gate(id: u32, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {id:02}: PASS — {detail}"),
        Err(why) => {
            println!("criterion {id:02}: FAIL — {why}");
            panic!("criterion {id:02} failed: {why}");
        }
    }
}

fn sweeps() -> &'static Mutex<HashMap<String, Arc<SweepOutcome>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<SweepOutcome>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// ε-sweep of a built-in scenario at its contract sizes, computed once.
fn sweep_of(name: &str) -> Arc<SweepOutcome> {
    let mut cache = sweeps().lock().unwrap();
    if let Some(hit) = cache.get(name) {
        return Arc::clone(hit);
    }
    let sc = BeamScenario::by_name(name).unwrap_or_else(|| panic!("unknown scenario {name}"));
    let outcome = Arc::new(sweep(&sc, &SWEEP_EPS).unwrap_or_else(|e| panic!("{name} sweep: {e}")));
    cache.insert(name.to_string(), Arc::clone(&outcome));
    outcome
}

fn fmt_net(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| format!("{v:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

// ---------------------------------------------------------------------------
// 1. Manufactured-solution convergence
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_manufactured_convergence() {
    gate(1, {
        let started = Instant::now();
        let sizes = [(32, 32), (64, 64), (128, 128), (256, 256)];
        let points = convergence_study(&sizes).map_err(|e| e.to_string());
        points.and_then(|points| {
            let elapsed = started.elapsed().as_secs_f64();
            let errors: Vec<f64> = points.iter().map(|p| p.e_l2).collect();
            for w in errors.windows(2) {
                if !(w[1] < w[0]) {
                    return Err(format!(
                        "errors not strictly decreasing: {}",
                        fmt_net(errors)
                    ));
                }
            }
            let rate = fitted_rate(&points);
            if !(0.55..=0.95).contains(&rate) {
                return Err(format!("fitted slope {rate:.4} outside [0.55, 0.95]"));
            }
            if elapsed >= 120.0 {
                return Err(format!("study took {elapsed:.1} s (budget 120 s)"));
            }
            Ok(format!(
                "slope {rate:.3}, errors {} in {elapsed:.1} s",
                fmt_net(errors)
            ))
        })
    });
}

// ---------------------------------------------------------------------------
// 2. Element-matrix oracle (quadrature assembly vs. symbolic integration)
// ---------------------------------------------------------------------------

/// Exact free-DOF matrices on the 4-element unit mesh, integrated
/// symbolically (exact rational arithmetic, printed to f64): mass, bending
/// with c ≡ 1, and bending with c(x) = 1 + 2x − 3x² + 4x³.
const MASS_ORACLE: [[f64; 6]; 6] = [
    [
        0.18571428571428572,
        0.0,
        0.03214285714285714,
        -0.0019345238095238096,
        0.0,
        0.0,
    ],
    [
        0.0,
        0.00029761904761904765,
        0.0019345238095238096,
        -0.00011160714285714285,
        0.0,
        0.0,
    ],
    [
        0.03214285714285714,
        0.0019345238095238096,
        0.18571428571428572,
        0.0,
        0.03214285714285714,
        -0.0019345238095238096,
    ],
    [
        -0.0019345238095238096,
        -0.00011160714285714285,
        0.0,
        0.00029761904761904765,
        0.0019345238095238096,
        -0.00011160714285714285,
    ],
    [
        0.0,
        0.0,
        0.03214285714285714,
        0.0019345238095238096,
        0.18571428571428572,
        0.0,
    ],
    [
        0.0,
        0.0,
        -0.0019345238095238096,
        -0.00011160714285714285,
        0.0,
        0.00029761904761904765,
    ],
];

const BEND_UNIT_ORACLE: [[f64; 6]; 6] = [
    [1536.0, 0.0, -768.0, 96.0, 0.0, 0.0],
    [0.0, 32.0, -96.0, 8.0, 0.0, 0.0],
    [-768.0, -96.0, 1536.0, 0.0, -768.0, 96.0],
    [96.0, 8.0, 0.0, 32.0, -96.0, 8.0],
    [0.0, 0.0, -768.0, -96.0, 1536.0, 0.0],
    [0.0, 0.0, 96.0, 8.0, 0.0, 32.0],
];

const BEND_CUBIC_ORACLE: [[f64; 6]; 6] = [
    [2112.0, 22.4, -1192.8, 155.0, 0.0, 0.0],
    [22.4, 44.0, -143.2, 12.45, 0.0, 0.0],
    [-1192.8, -143.2, 2803.2, 34.4, -1610.4, 213.2],
    [155.0, 12.45, 34.4, 56.8, -189.4, 16.85],
    [0.0, 0.0, -1610.4, -189.4, 4070.4, 70.4],
    [0.0, 0.0, 213.2, 16.85, 70.4, 81.6],
];

#[test]
fn criterion_02_element_matrix_oracle() {
    gate(2, {
        let mesh = build_space(4);
        let zero = RegularizedField::constant(0.0);
        let check = |kc_got: &beam::banded::SymBanded,
                     m_got: &beam::banded::SymBanded,
                     kc_want: &[[f64; 6]; 6],
                     label: &str|
         -> Result<f64, String> {
            let mut worst = 0.0f64;
            for i in 0..6 {
                for j in 0..6 {
                    for (got, want, mat) in [
                        (m_got.get(i, j), MASS_ORACLE[i][j], "mass"),
                        (kc_got.get(i, j), kc_want[i][j], "bending"),
                    ] {
                        let err = (got - want).abs() / want.abs().max(1.0);
                        worst = worst.max(err);
                        if err > 1e-12 {
                            return Err(format!(
                                "{label} {mat}[{i}][{j}] = {got:.17e}, oracle {want:.17e} \
                                 (scaled error {err:.2e} > 1e-12)"
                            ));
                        }
                    }
                }
            }
            Ok(worst)
        };

        let unit = assemble(
            &RegularizedField::constant(1.0),
            &zero,
            &zero,
            mesh,
            QuadratureSpec::plain(),
        );
        let cubic_field = RegularizedField::from_function(
            |x| 1.0 + 2.0 * x - 3.0 * x * x + 4.0 * x * x * x,
            |x| 2.0 - 6.0 * x + 12.0 * x * x,
        );
        let cubic = assemble(&cubic_field, &zero, &zero, mesh, QuadratureSpec::plain());

        check(&unit.kc, &unit.m, &BEND_UNIT_ORACLE, "c==1").and_then(|w1| {
            check(&cubic.kc, &cubic.m, &BEND_CUBIC_ORACLE, "cubic c").map(|w2| {
                format!(
                    "worst scaled entry error {:.2e} (tolerance 1e-12)",
                    w1.max(w2)
                )
            })
        })
    });
}

// ---------------------------------------------------------------------------
// 3. Mollifier suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_mollifier_suite() {
    gate(
        3,
        (|| -> Result<String, String> {
            let mut worst_mass = 0.0f64;
            let mut worst_jump = 0.0f64;
            for &eps in &SWEEP_EPS {
                // Unit mass: |∫ φ_ε − 1| ≤ 1e−9.
                let mass = quad::adaptive(|x| phi_eps(x, eps), -eps, eps, 1e-13);
                let mass_err = (mass - 1.0).abs();
                worst_mass = worst_mass.max(mass_err);
                if mass_err > 1e-9 {
                    return Err(format!("eps {eps}: |mass − 1| = {mass_err:.3e} > 1e-9"));
                }

                // Exact support: identically zero on |x| ≥ ε, positive inside.
                for x in [eps, -eps, eps * (1.0 + 1e-14), 2.0 * eps, -5.0 * eps] {
                    if phi_eps(x, eps) != 0.0 {
                        return Err(format!("eps {eps}: nonzero value outside support at {x}"));
                    }
                }
                for k in 0..=SUPPORT_GRID {
                    let x = eps * (k as f64 / SUPPORT_GRID as f64 * 1.9 - 0.95);
                    if !(phi_eps(x, eps) > 0.0) {
                        return Err(format!("eps {eps}: not positive inside support at {x}"));
                    }
                }

                // δ ∗ φ_ε ≡ φ_ε (pointwise, ≤ 1e−12).
                let net = MollifierNet::identity(eps).map_err(|e| e.to_string())?;
                let dirac = DistributionalExpr::new(Axis::Space, vec![DistTerm::dirac(0.5, 1.0)]);
                let field = mollify_expr(&dirac, &net, (0.0, 1.0)).map_err(|e| e.to_string())?;
                for k in 0..=200 {
                    let x = 0.5 - 1.2 * eps + 2.4 * eps * k as f64 / 200.0;
                    let diff = (field.eval(x) - phi_eps(x - 0.5, eps)).abs();
                    if diff > 1e-12 {
                        return Err(format!(
                        "eps {eps}: impulse regularization differs from φ_ε by {diff:.3e} at {x}"
                    ));
                    }
                }

                // H ∗ φ_ε at the jump = 1/2 (≤ 1e−9).
                let step =
                    DistributionalExpr::new(Axis::Space, vec![DistTerm::heaviside(0.5, 1.0)]);
                let sfield = mollify_expr(&step, &net, (0.0, 1.0)).map_err(|e| e.to_string())?;
                let jump_err = (sfield.eval(0.5) - 0.5).abs();
                worst_jump = worst_jump.max(jump_err);
                if jump_err > 1e-9 {
                    return Err(format!(
                        "eps {eps}: step value at jump off by {jump_err:.3e}"
                    ));
                }
            }
            Ok(format!(
                "mass error ≤ {worst_mass:.2e}, jump error ≤ {worst_jump:.2e}, \
             support exact, impulse pointwise ≤ 1e-12"
            ))
        })(),
    );
}

/// Interior sample count for the support-positivity scan.
const SUPPORT_GRID: usize = 100;

// ---------------------------------------------------------------------------
// 4. Positivity of the regularized stiffness
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_stiffness_positivity() {
    gate(
        4,
        (|| -> Result<String, String> {
            let mut details = Vec::new();
            for name in ["deltaC", "logC"] {
                let sc = BeamScenario::by_name(name).unwrap();
                let c0 = sc.certified_c0().map_err(|e| e.to_string())?;
                let outcome = sweep_of(name);
                for d in &outcome.report.diagnostics {
                    if !(d.c_min_grid >= c0 - 1e-12) {
                        return Err(format!(
                            "{name} eps {}: grid min {:.15e} below floor {c0:.15e} − 1e-12",
                            d.epsilon, d.c_min_grid
                        ));
                    }
                }
                let slack = outcome
                    .report
                    .diagnostics
                    .iter()
                    .map(|d| d.c_min_grid - c0)
                    .fold(f64::INFINITY, f64::min);
                details.push(format!("{name}: floor {c0:.6}, min slack {slack:.2e}"));
            }
            Ok(details.join("; "))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 5. Energy-estimate margin on every built-in scenario
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_energy_margin() {
    gate(
        5,
        (|| -> Result<String, String> {
            let mut lows = Vec::new();
            let mut min_margin = f64::INFINITY;
            for name in ["regular", "logC", "deltaC", "deltaB", "deltaTG"] {
                for d in &sweep_of(name).report.diagnostics {
                    min_margin = min_margin.min(d.margin);
                    if !(d.margin >= 1.0) {
                        lows.push(format!("{name} eps {}: margin {:.4}", d.epsilon, d.margin));
                    }
                }
            }
            if lows.is_empty() {
                Ok(format!(
                    "margin ≥ 1 on all 20 sweep cells (min {min_margin:.3})"
                ))
            } else {
                Err(format!(
                    "a-priori bound violated by the discrete functional on: {}",
                    lows.join("; ")
                ))
            }
        })(),
    );
}

// ---------------------------------------------------------------------------
// 6. Moderateness of the singular scenarios
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_moderateness() {
    gate(
        6,
        (|| -> Result<String, String> {
            let mut details = Vec::new();
            for name in ["deltaC", "deltaB", "deltaTG"] {
                match sweep_of(name).report.verdict.clone() {
                    Verdict::Moderate { n, r2, bounded } => {
                        if !n.is_finite() {
                            return Err(format!("{name}: fitted exponent not finite"));
                        }
                        if !(r2 >= 0.9 || bounded) {
                            return Err(format!(
                                "{name}: fit R² {r2:.3} < 0.9 and tail not bounded"
                            ));
                        }
                        details.push(format!(
                            "{name}: N {n:.3} ({})",
                            if bounded { "bounded" } else { "R² ok" }
                        ));
                    }
                    other => return Err(format!("{name}: verdict {other} is not moderate")),
                }
            }
            Ok(details.join("; "))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 7. Irregularity error decreases with ε (point-stiffness scenario)
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_point_stiffness_error_trend() {
    gate(
        7,
        (|| -> Result<String, String> {
            let outcome = sweep_of("deltaC");
            let errs: Vec<f64> = outcome
                .report
                .diagnostics
                .iter()
                .map(|d| {
                    d.e_l2
                        .ok_or_else(|| format!("eps {}: no reference error", d.epsilon))
                })
                .collect::<Result<_, _>>()?;
            for w in errs.windows(2) {
                if !(w[1] < w[0]) {
                    return Err(format!("not strictly decreasing: {}", fmt_net(errs)));
                }
            }
            Ok(format!("errors {}", fmt_net(errs)))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 8. Time-impulse response: onset location and sharpening
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_impulse_onset_and_sharpening() {
    gate(
        8,
        (|| -> Result<String, String> {
            let outcome = sweep_of("deltaTG");
            let profiles: Vec<_> = outcome
                .runs
                .iter()
                .map(|r| (r.diagnostics.epsilon, impulse_profile(r, 0.5)))
                .collect();
            let (eps_last, fine) = profiles.last().ok_or("empty sweep")?;
            if (*eps_last - 0.01).abs() > 1e-15 {
                return Err(format!("expected finest eps 0.01, got {eps_last}"));
            }
            if !(0.15..=0.3).contains(&fine.onset_time) {
                return Err(format!(
                    "onset {:.4} at eps 0.01 outside [0.15, 0.3]",
                    fine.onset_time
                ));
            }
            for pair in profiles.windows(2) {
                let (ea, a) = &pair[0];
                let (eb, b) = &pair[1];
                if !(b.peak_curvature > a.peak_curvature) {
                    return Err(format!(
                    "response does not sharpen: curvature {:.4} at eps {ea} vs {:.4} at eps {eb}",
                    a.peak_curvature, b.peak_curvature
                ));
                }
            }
            Ok(format!(
                "onset {:.4} at eps 0.01; curvature {}",
                fine.onset_time,
                fmt_net(profiles.iter().map(|(_, p)| p.peak_curvature))
            ))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 9. Consistency with the unregularized reference
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_consistency() {
    gate(
        9,
        (|| -> Result<String, String> {
            let regular = BeamScenario::by_name("regular").unwrap();
            let rep = consistency_probe(&regular, &SWEEP_EPS).map_err(|e| e.to_string())?;
            let dists: Vec<f64> = rep.samples.iter().map(|&(_, d)| d).collect();
            for w in dists.windows(2) {
                if !(w[1] < w[0]) {
                    return Err(format!("distances not decreasing: {}", fmt_net(dists)));
                }
            }

            // Constant coefficients: the regularization changes nothing at all.
            let constant = BeamScenario::by_name("deltaC")
                .unwrap()
                .baseline_variant()
                .ok_or("no constant-coefficient companion")?;
            let zero_rep = consistency_probe(&constant, &SWEEP_EPS).map_err(|e| e.to_string())?;
            for &(eps, d) in &zero_rep.samples {
                if d != 0.0 {
                    return Err(format!(
                        "constant case eps {eps}: distance {d:e} is not exactly zero"
                    ));
                }
            }
            Ok(format!(
                "distances {} decreasing; constant case exactly zero",
                fmt_net(dists)
            ))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 10. Higher-order perturbations stay negligible (uniqueness surrogate)
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_perturbation_decay() {
    gate(
        10,
        (|| -> Result<String, String> {
            let mut details = Vec::new();
            for name in ["regular", "deltaC"] {
                let sc = BeamScenario::by_name(name).unwrap();
                let rep = uniqueness_probe(&sc, 3, &SWEEP_EPS).map_err(|e| e.to_string())?;
                let dists: Vec<f64> = rep.samples.iter().map(|&(_, d)| d).collect();
                for w in dists.windows(2) {
                    if !(w[1] < w[0]) {
                        return Err(format!("{name}: not monotone: {}", fmt_net(dists)));
                    }
                }
                details.push(format!("{name}: {}", fmt_net(dists)));
            }
            Ok(format!(
                "order-3 perturbation distances decay ({})",
                details.join("; ")
            ))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 11. Classifier calibration on planted growth laws
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_classifier_calibration() {
    gate(
        11,
        (|| -> Result<String, String> {
            use beam::asympt::classify_net;
            // 12 points log-spaced over eight decades.
            let grid: Vec<f64> = (0..12)
                .map(|i| 10f64.powf(-1.0 - 8.0 * i as f64 / 11.0))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(0xACCE5);
            let mut worst_exponent_err = 0.0f64;
            for trial in 0..30u32 {
                let noise: Vec<f64> = (0..grid.len())
                    .map(|_| 1.0 + 0.05 * rng.gen_range(-1.0..1.0))
                    .collect();
                match trial % 3 {
                    0 => {
                        let n = [0.5, 1.0, 2.0][(trial as usize / 3) % 3];
                        let c = 0.5 + 4.5 * rng.gen_range(0.0..1.0);
                        let y: Vec<f64> = grid
                            .iter()
                            .zip(&noise)
                            .map(|(e, w)| c * e.powf(-n) * w)
                            .collect();
                        match classify_net(&grid, &y).map_err(|e| e.to_string())? {
                            Verdict::Moderate { n: got, .. } => {
                                let err = (got - n).abs();
                                worst_exponent_err = worst_exponent_err.max(err);
                                if err > 0.1 {
                                    return Err(format!(
                                    "trial {trial}: exponent {got:.4} vs planted {n} (> 0.1 off)"
                                ));
                                }
                            }
                            other => {
                                return Err(format!("trial {trial}: growth plant verdict {other}"))
                            }
                        }
                    }
                    1 => {
                        let c = 1.0 + 4.0 * rng.gen_range(0.0..1.0);
                        let y: Vec<f64> = grid
                            .iter()
                            .zip(&noise)
                            .map(|(e, w)| c * (1.0 / e).ln() * w)
                            .collect();
                        match classify_net(&grid, &y).map_err(|e| e.to_string())? {
                            Verdict::LogType { .. } => {}
                            other => {
                                return Err(format!("trial {trial}: log plant verdict {other}"))
                            }
                        }
                    }
                    _ => {
                        let q = [1.0, 2.0, 3.0][(trial as usize / 3) % 3];
                        let c = 0.5 + 4.5 * rng.gen_range(0.0..1.0);
                        let y: Vec<f64> = grid
                            .iter()
                            .zip(&noise)
                            .map(|(e, w)| c * e.powf(q) * w)
                            .collect();
                        match classify_net(&grid, &y).map_err(|e| e.to_string())? {
                            Verdict::Negligible { q: got } => {
                                let err = (got - q).abs();
                                worst_exponent_err = worst_exponent_err.max(err);
                                if err > 0.1 {
                                    return Err(format!(
                                        "trial {trial}: decay {got:.4} vs planted {q} (> 0.1 off)"
                                    ));
                                }
                            }
                            other => {
                                return Err(format!("trial {trial}: decay plant verdict {other}"))
                            }
                        }
                    }
                }
            }
            Ok(format!(
                "30/30 planted laws recovered, worst exponent error {worst_exponent_err:.4}"
            ))
        })(),
    );
}

// ---------------------------------------------------------------------------
// 12. Energy conservation of the average-acceleration march
// ---------------------------------------------------------------------------

#[test]
fn criterion_12_newmark_energy_conservation() {
    gate(
        12,
        (|| -> Result<String, String> {
            let mesh = build_space(16);
            let one = RegularizedField::constant(1.0);
            let zero = RegularizedField::constant(0.0);
            let sys = assemble(&one, &zero, &zero, mesh, QuadratureSpec::plain());
            let nf = sys.free_dofs();

            // Lowest generalized eigenvector by inverse iteration on K x = λ M x.
            let klu = sys
                .stiffness(0.0)
                .lu()
                .map_err(|e| format!("stiffness factorization: {e:?}"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            let mut x: Vec<f64> = (0..nf).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for _ in 0..200 {
                let y = klu.solve(&sys.m.mul_vec(&x));
                let norm = sys.m.quadratic_form(&y).sqrt();
                x = y.iter().map(|v| v / norm).collect();
            }
            let k = sys.stiffness(0.0);
            let lambda = k
                .mul_vec(&x)
                .iter()
                .zip(&x)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / sys.m.quadratic_form(&x);

            let grid = TimeGrid::new(1.0, 256);
            let v0 = vec![0.0; nf];
            let traj =
                newmark_march(&sys.m, &k, &Load::Zero, grid, &x, &v0).map_err(|e| e.to_string())?;

            let energy = |u: &[f64], v: &[f64]| {
                let ku = k.mul_vec(u);
                0.5 * (sys.m.quadratic_form(v) + ku.iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
            };
            let e0 = energy(&traj.u[0], &traj.v[0]);
            let mut drift = 0.0f64;
            for (u, v) in traj.u.iter().zip(&traj.v) {
                drift = drift.max((energy(u, v) - e0).abs());
            }
            let rel = drift / e0;
            if rel > 1e-9 {
                return Err(format!(
                    "relative energy drift {rel:.3e} > 1e-9 over 256 steps (λ = {lambda:.3e})"
                ));
            }
            Ok(format!(
                "relative drift {rel:.2e} over 256 steps (mode λ = {lambda:.4e})"
            ))
        })(),
    );
}
