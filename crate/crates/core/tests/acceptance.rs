//! Acceptance criteria 1 to 10. Each test writes one `criterion N: PASS|FAIL`
//! line straight to stdout (not captured by the harness) and then asserts.

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};

use qchaos::control::{lyapunov_series, saturation, simulate_sync, ControllerConfig, SyncRun};
use qchaos::diagnostics::{largest_lyapunov, largest_lyapunov_default, periodogram, LleResult, DOMINANT_FRACTION};
use qchaos::integrator::{integrate, IntegratorSettings, PhaseState, Trajectory};
use qchaos::model::{derive_params, eval_eigenstate, velocity_excited, Branch, ComplexPoint, EigenstateSpec, StateField};

const T_ANALYSIS: f64 = 1000.0;
const DT: f64 = 1e-3;
const STRIDE: usize = 100;

const MASTER: PhaseState = PhaseState::new(2.0, 0.0, 2.0, 0.0);
const SLAVES: [PhaseState; 3] = [
    PhaseState::new(0.4, 0.0, 0.4, 0.0),
    PhaseState::new(1.1, 0.0, 0.0, 0.0),
    PhaseState::new(1.1, 0.0, 1.0, 0.0),
];
const REFERENCE_LLE: [f64; 3] = [0.01, 0.148, 0.294];

/// Frozen after the calibration run: the two strongest peaks of a controlled
/// series must carry at least this share of the non-DC power.
const TOP2_MIN_FRACTION: f64 = 0.5;

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n}: {verdict}: {detail}");
}

struct Graded {
    uncontrolled: Trajectory,
    controlled: SyncRun,
    lle_uncontrolled: LleResult,
    lle_controlled: LleResult,
}

fn graded() -> &'static [Graded] {
    static CELL: OnceLock<Vec<Graded>> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        let settings = IntegratorSettings::new(T_ANALYSIS, DT, STRIDE).unwrap();
        std::thread::scope(|s| {
            let handles: Vec<_> = SLAVES
                .iter()
                .map(|&slave| {
                    s.spawn(move || {
                        let uncontrolled = integrate(&StateField::first_excited(p), slave, T_ANALYSIS, DT, STRIDE).unwrap();
                        let controlled = simulate_sync(&p, &ControllerConfig::default(), MASTER, slave, settings).unwrap();
                        assert!(uncontrolled.abort.is_none() && controlled.abort.is_none());
                        Graded {
                            lle_uncontrolled: largest_lyapunov_default(&uncontrolled.x_real(), uncontrolled.dt_sample).unwrap(),
                            lle_controlled: largest_lyapunov_default(&controlled.slave.x_real(), controlled.slave.dt_sample).unwrap(),
                            uncontrolled,
                            controlled,
                        }
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    })
}

fn strong_chaos_run() -> &'static SyncRun {
    static CELL: OnceLock<SyncRun> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        simulate_sync(
            &p,
            &ControllerConfig::default(),
            PhaseState::new(1.0, 0.5, 0.0, 0.5),
            PhaseState::new(1.0, 0.0, 0.0, 0.0),
            IntegratorSettings::new(100.0, DT, 10).unwrap(),
        )
        .unwrap()
    })
}

#[test]
fn criterion_01_coefficients() {
    let start = Instant::now();
    let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
    let elapsed = start.elapsed();
    let want = [("a1", p.a1, 0.9868), ("a3", p.a3, -0.5759), ("a4", p.a4, 0.1714), ("a5", p.a5, -0.2304), ("b1", p.b1, 0.2668)];
    let worst = want.iter().map(|(_, got, w)| (got - w).abs()).fold(0.0, f64::max);
    let pass = worst < 5e-4 && elapsed.as_secs_f64() < 1e-3;
    report(1, pass, &format!("max deviation {worst:.2e} (tol 5e-4), {:.1} us", elapsed.as_secs_f64() * 1e6));
    assert!(pass);
}

#[test]
fn criterion_02_algebraic_identities() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let beta = rng.random_range(0.0..2.0);
        let gamma = loop {
            let g = rng.random_range(0.01..2.0);
            if (g - 1.0f64).abs() > 1e-3 {
                break g;
            }
        };
        let branch = if rng.random::<bool>() { Branch::Plus } else { Branch::Minus };
        let p = derive_params(beta, gamma, branch).unwrap();
        worst = worst.max((p.eta1 * p.eta2 - gamma).abs());
    }
    let limits_exact = [0.2, 0.5, 0.9, 1.3, 1.9].iter().all(|&g| {
        let p = derive_params(0.0, g, Branch::Plus).unwrap();
        p.eta1 == 1.0 && p.eta2 == g && p.rho1 == 0.0 && p.rho2 == 0.0
    });
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && limits_exact && elapsed < 1.0;
    report(2, pass, &format!("max |eta1 eta2 - gamma| = {worst:.1e}, zero-field limit exact: {limits_exact}, {elapsed:.3} s"));
    assert!(pass);
}

/// `x' = -2i a3 x + a4 y`, `y' = a4 x - 2i a5 y`, solved by the matrix exponential.
fn ground_oracle(a3: f64, a4: f64, a5: f64, x0: Complex64, y0: Complex64, t: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let m = Matrix2::new(-2.0 * i * a3, Complex64::from(a4), Complex64::from(a4), -2.0 * i * a5);
    let v = (m * Complex64::from(t)).exp() * Vector2::new(x0, y0);
    (v[0], v[1])
}

#[test]
fn criterion_03_ground_state_oracle() {
    let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
    let s0 = PhaseState::new(1.0, 0.0, 1.0, 0.0);
    let (x0, y0) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let field = StateField::ground(p);
    let err_at = |tr: &Trajectory, k: usize| {
        let (x, y) = ground_oracle(p.a3, p.a4, p.a5, x0, y0, tr.time(k));
        let s = tr.states[k];
        [s.x_r - x.re, s.x_i - x.im, s.y_r - y.re, s.y_i - y.im].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let tr = integrate(&field, s0, 100.0, 1e-3, 10).unwrap();
    let max_err = (0..tr.len()).map(|k| err_at(&tr, k)).fold(0.0, f64::max);

    let final_err = |dt: f64| {
        let tr = integrate(&field, s0, 100.0, dt, 1).unwrap();
        err_at(&tr, tr.len() - 1)
    };
    let (e1, e2) = (final_err(0.04), final_err(0.02));
    let order = (e1 / e2).log2();
    let pass = max_err < 1e-6 && (3.7..=4.3).contains(&order);
    report(3, pass, &format!("max error {max_err:.2e} over t in [0, 100], observed order {order:.3}"));
    assert!(pass);
}

#[test]
fn criterion_04_velocity_cross_check() {
    let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
    let spec = EigenstateSpec::first_excited();
    let mut rng = StdRng::seed_from_u64(4);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let pt = ComplexPoint::from_parts(
            rng.random_range(-2.0..2.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-2.0..2.0),
            rng.random_range(-0.5..0.5),
        );
        // regular points only: keep away from the node a1 x + i b1 y = 0
        if (p.a1 * pt.x + Complex64::i() * p.b1 * pt.y).norm() < 0.1 {
            continue;
        }
        n += 1;
        let psi = |dx: f64, dy: f64| {
            eval_eigenstate(&p, &spec, &ComplexPoint::new(pt.x + dx, pt.y + dy), 0.0).unwrap()
        };
        let c = psi(0.0, 0.0);
        let vx = -Complex64::i() * (psi(h, 0.0) - psi(-h, 0.0)) / (2.0 * h * c);
        let vy = -Complex64::i() * (psi(0.0, h) - psi(0.0, -h)) / (2.0 * h * c);
        let (ax, ay) = velocity_excited(&p, &pt).unwrap();
        worst = worst.max((ax - vx).norm()).max((ay - vy).norm());
    }
    let pass = worst < 1e-6;
    report(4, pass, &format!("max |closed form - numeric log-derivative| = {worst:.2e} at 100 points"));
    assert!(pass);
}

#[test]
fn criterion_05_chaos_grading() {
    let g = graded();
    let n_delays = g[0].lle_uncontrolled.per_delay_slopes.len();
    let ordered = (0..n_delays).all(|d| {
        g.windows(2).all(|w| w[0].lle_uncontrolled.per_delay_slopes[d] < w[1].lle_uncontrolled.per_delay_slopes[d])
    });
    let mut in_band = Vec::new();
    let mut detail = Vec::new();
    for (row, reference) in g.iter().zip(REFERENCE_LLE) {
        let v = row.lle_uncontrolled.slope;
        let ok = if reference < 0.05 { (v - reference).abs() <= 0.05 } else { (v - reference).abs() <= 0.5 * reference };
        in_band.push(ok);
        detail.push(format!("{v:.4} (ref {reference})"));
    }
    let pass = ordered && in_band.iter().all(|b| *b);
    report(5, pass, &format!("ordering at every delay: {ordered}; estimates {}", detail.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_06_synchronization() {
    let g = graded();
    let mut parts = Vec::new();
    let mut pass = true;
    for row in g {
        let m = row.controlled.max_error_after(15.0);
        let lle = row.lle_controlled.slope;
        pass &= m < 1e-2 && lle < 0.02;
        let s = row.controlled.slave.states[0];
        parts.push(format!("slave ({}, {}, {}, {}) max|e| after 15 = {m:.2e}, controlled lle {lle:.4}", s.x_r, s.x_i, s.y_r, s.y_i));
    }
    let strong = strong_chaos_run().max_error_after(15.0);
    pass &= strong < 1e-2;
    parts.push(format!("strong-chaos pair max|e| after 15 = {strong:.2e}"));
    report(6, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_07_lyapunov_descent() {
    let mut runs: Vec<&SyncRun> = graded().iter().map(|g| &g.controlled).collect();
    runs.push(strong_chaos_run());
    let mut vdot_ok = true;
    let mut worst_rise = f64::NEG_INFINITY;
    for run in runs {
        let cfg = &run.config;
        for &(_, _, vd) in &lyapunov_series(run, cfg) {
            vdot_ok &= vd <= 0.0;
        }
        // direct evaluation as well as the helper
        for &s in &run.sliding {
            vdot_ok &= -cfg.r * s * s - cfg.q * s * saturation(s, cfg.epsilon) <= 0.0;
        }
        for w in run.lyap_v.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
    }
    let pass = vdot_ok && worst_rise <= 1e-9;
    report(7, pass, &format!("dV/dt <= 0 at all samples: {vdot_ok}; largest per-sample rise of V {worst_rise:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_08_gain_study() {
    let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
    let settings = IntegratorSettings::new(30.0, DT, 1).unwrap();
    let run = |q: f64, r: f64| {
        let cfg = ControllerConfig::with_gains(q, r).unwrap();
        let run = simulate_sync(&p, &cfg, MASTER, SLAVES[2], settings).unwrap();
        let reach = run.reach_time(cfg.epsilon).expect("sliding value settles");
        (reach, run.control_total_variation(reach))
    };
    let levels = [1.0, 3.0, 6.0];
    let q_sweep: Vec<(f64, f64)> = levels.iter().map(|&q| run(q, 1.0)).collect();
    let r_sweep: Vec<(f64, f64)> = levels.iter().map(|&r| run(1.0, r)).collect();
    let dec = |v: &[(f64, f64)]| v.windows(2).all(|w| w[1].0 < w[0].0);
    let (q_dec, r_dec) = (dec(&q_sweep), dec(&r_sweep));
    let (tv_q, tv_r) = (q_sweep[2].1, r_sweep[2].1);
    let pass = q_dec && r_dec && tv_q > tv_r;
    let fmt = |v: &[(f64, f64)]| v.iter().map(|x| format!("{:.3}", x.0)).collect::<Vec<_>>().join(" > ");
    report(8, pass, &format!("T_reach over q: {}; over r: {}; TV(u) q=6 {tv_q:.3} vs r=6 {tv_r:.3}", fmt(&q_sweep), fmt(&r_sweep)));
    assert!(pass);
}

#[test]
fn criterion_09_spectral_contrast() {
    let mut pass = true;
    let mut parts = Vec::new();
    for row in graded() {
        let su = periodogram(&row.uncontrolled.x_real(), row.uncontrolled.dt_sample).unwrap();
        let sc = periodogram(&row.controlled.slave.x_real(), row.controlled.slave.dt_sample).unwrap();
        let dominant = sc.dominant_peaks(DOMINANT_FRACTION).len();
        let top2 = sc.top_peak_fraction(2);
        pass &= sc.flatness < su.flatness && dominant == 2 && top2 >= TOP2_MIN_FRACTION;
        parts.push(format!("flatness {:.2e} < {:.2e}, {dominant} dominant peaks, top-2 share {top2:.3}", sc.flatness, su.flatness));
    }
    report(9, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_10_diagnostics_oracles() {
    let sine: Vec<f64> = (0..5000).map(|i| (2.0 * std::f64::consts::PI * 0.037 * i as f64).sin()).collect();
    let lam_sine = largest_lyapunov_default(&sine, 1.0).unwrap().slope;

    let mut x = 0.123_456_7;
    for _ in 0..1000 {
        x = 4.0 * x * (1.0 - x);
    }
    let orbit: Vec<f64> = (0..5000)
        .map(|_| {
            let v = x;
            x = 4.0 * x * (1.0 - x);
            v
        })
        .collect();
    // oracle: orbit average of ln|f'(x)| = ln|4 - 8x|
    let oracle = orbit.iter().map(|v| (4.0 - 8.0 * v).abs().ln()).sum::<f64>() / orbit.len() as f64;
    let lam_log = largest_lyapunov(&orbit, 1.0, 2, &[1]).unwrap().slope;
    let ln2 = std::f64::consts::LN_2;
    let pass = lam_sine.abs() < 0.01 && (lam_log - ln2).abs() <= 0.15 * ln2 && (oracle - ln2).abs() <= 0.15 * ln2;
    report(10, pass, &format!("sinusoid {lam_sine:.2e}; logistic {lam_log:.4} vs orbit average {oracle:.4} (ln 2 = {ln2:.4})"));
    assert!(pass);
}
