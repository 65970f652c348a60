//! Built-in scenario batch: exponent tables before and after control, the
//! strong-chaos pair, and the switching/reaching gain sweeps.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::commands::{
    divergence_plot, error_plot, state_label, write_divergence_csv, Outcome, Writer, SYNC_TOLERANCE,
};
use crate::control::{lyapunov_series, simulate_sync, ControllerConfig, SyncRun};
use crate::diagnostics::{largest_lyapunov, periodogram, ChaosRow, ChaosTable, LleResult, LleSettings, DOMINANT_FRACTION};
use crate::error::Result;
use crate::integrator::{integrate, IntegratorSettings, PhaseState, Trajectory};
use crate::model::{derive_params, Branch, OscillatorParams, StateField};

pub const ANALYSIS_T_FINAL: f64 = 1000.0;
pub const ANALYSIS_DT: f64 = 1e-3;
/// Analysis series are sampled every 0.1 time units.
pub const ANALYSIS_STRIDE: usize = 100;
pub const SYNC_AFTER: f64 = 15.0;
pub const CONTROLLED_LLE_MAX: f64 = 0.02;
pub const V_STEP_TOL: f64 = 1e-9;
pub const GAIN_LEVELS: [f64; 3] = [1.0, 3.0, 6.0];
pub const SWEEP_T_FINAL: f64 = 30.0;

pub const FIXED_MASTER: PhaseState = PhaseState::new(2.0, 0.0, 2.0, 0.0);
pub const GRADED_SLAVES: [PhaseState; 3] = [
    PhaseState::new(0.4, 0.0, 0.4, 0.0),
    PhaseState::new(1.1, 0.0, 0.0, 0.0),
    PhaseState::new(1.1, 0.0, 1.0, 0.0),
];
/// Reference exponents for `GRADED_SLAVES`, weakest first.
pub const REFERENCE_LLE: [f64; 3] = [0.01, 0.148, 0.294];
pub const VARIED_MASTERS: [PhaseState; 3] = [
    PhaseState::new(0.0, 0.0, 0.4, 0.0),
    PhaseState::new(3.0, 0.0, 0.0, 0.0),
    PhaseState::new(1.5, 0.0, 0.8, 0.0),
];
pub const STRONG_SLAVE: PhaseState = PhaseState::new(1.0, 0.0, 0.0, 0.0);
pub const STRONG_MASTER: PhaseState = PhaseState::new(1.0, 0.5, 0.0, 0.5);

/// Inclusive tolerance band around a reference exponent: 0.05 absolute for
/// the smallest, 50% relative otherwise.
pub fn reference_band(reference: f64) -> (f64, f64) {
    if reference < 0.05 {
        (reference - 0.05, reference + 0.05)
    } else {
        (0.5 * reference, 1.5 * reference)
    }
}

pub fn reference_params() -> OscillatorParams {
    derive_params(0.8, 0.4, Branch::Plus).expect("reference parameters are valid")
}

pub fn analysis_settings() -> IntegratorSettings {
    IntegratorSettings { t_final: ANALYSIS_T_FINAL, dt: ANALYSIS_DT, stride: ANALYSIS_STRIDE }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Counts towards the exit status.
    pub gated: bool,
}

struct Pair {
    uncontrolled: Trajectory,
    lle_uncontrolled: LleResult,
    controlled: SyncRun,
    lle_controlled: LleResult,
}

fn run_pair(p: &OscillatorParams, slave: PhaseState, master: PhaseState, lle: &LleSettings) -> Result<Pair> {
    let s = analysis_settings();
    let uncontrolled = integrate(&StateField::first_excited(*p), slave, s.t_final, s.dt, s.stride)?;
    let controlled = simulate_sync(p, &ControllerConfig::default(), master, slave, s)?;
    let est = |t: &Trajectory| largest_lyapunov(&t.x_real(), t.dt_sample, lle.embed_dim, &lle.taus);
    Ok(Pair {
        lle_uncontrolled: est(&uncontrolled)?,
        lle_controlled: est(&controlled.slave)?,
        uncontrolled,
        controlled,
    })
}

fn table(pairs: &[Pair]) -> ChaosTable {
    ChaosTable {
        rows: pairs
            .iter()
            .map(|p| ChaosRow {
                slave: p.uncontrolled.states[0],
                uncontrolled: p.lle_uncontrolled.slope,
                controlled: p.lle_controlled.slope,
                master: p.controlled.master.states[0],
            })
            .collect(),
    }
}

fn lyapunov_descent(run: &SyncRun) -> (bool, f64) {
    let series = lyapunov_series(run, &run.config);
    let vdot_ok = series.iter().all(|&(_, _, vd)| vd <= 0.0);
    let worst_rise = series.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::NEG_INFINITY, f64::max);
    (vdot_ok && worst_rise <= V_STEP_TOL, worst_rise)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub q: f64,
    pub r: f64,
    pub reach: Option<f64>,
    pub total_variation: f64,
}

pub fn gain_sweep(p: &OscillatorParams) -> Result<Vec<SweepPoint>> {
    let settings = IntegratorSettings::new(SWEEP_T_FINAL, ANALYSIS_DT, 1)?;
    let mut gains: Vec<(f64, f64)> = GAIN_LEVELS.iter().map(|&q| (q, 1.0)).collect();
    gains.extend(GAIN_LEVELS.iter().skip(1).map(|&r| (1.0, r)));
    gains
        .par_iter()
        .map(|&(q, r)| {
            let cfg = ControllerConfig::with_gains(q, r)?;
            let run = simulate_sync(p, &cfg, FIXED_MASTER, GRADED_SLAVES[2], settings)?;
            let reach = run.reach_time(cfg.epsilon);
            Ok(SweepPoint { q, r, reach, total_variation: run.control_total_variation(reach.unwrap_or(SWEEP_T_FINAL)) })
        })
        .collect()
}

fn strictly_decreasing(v: &[Option<f64>]) -> bool {
    v.iter().all(Option::is_some) && v.windows(2).all(|w| w[1] < w[0])
}

pub fn reproduce(out_dir: &Path) -> Result<Outcome> {
    let p = reference_params();
    let lle = LleSettings::default();
    let mut w = Writer::with_formats(out_dir, true, true)?;
    let mut verdicts = Vec::new();
    let mut report = String::new();

    let graded: Vec<Pair> = GRADED_SLAVES
        .par_iter()
        .map(|s| run_pair(&p, *s, FIXED_MASTER, &lle))
        .collect::<Result<_>>()?;
    let varied: Vec<Pair> = VARIED_MASTERS
        .par_iter()
        .map(|m| run_pair(&p, GRADED_SLAVES[2], *m, &lle))
        .collect::<Result<_>>()?;
    let strong = run_pair(&p, STRONG_SLAVE, STRONG_MASTER, &lle)?;
    let sweep = gain_sweep(&p)?;

    for pair in graded.iter().chain(&varied).chain([&strong]) {
        for abort in [&pair.uncontrolled.abort, &pair.controlled.abort].into_iter().flatten() {
            w.outcome.singular |= abort.error.is_singularity();
        }
    }

    // exponent grading
    let ordered_every_delay = (0..lle.taus.len()).all(|d| {
        graded.windows(2).all(|g| g[0].lle_uncontrolled.per_delay_slopes[d] < g[1].lle_uncontrolled.per_delay_slopes[d])
    });
    verdicts.push(Verdict {
        name: "exponent ordering across initial conditions at every delay".into(),
        pass: ordered_every_delay,
        detail: graded
            .iter()
            .map(|g| format!("{:?}", g.lle_uncontrolled.per_delay_slopes.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()))
            .collect::<Vec<_>>()
            .join(" < "),
        gated: true,
    });
    for (g, r) in graded.iter().zip(REFERENCE_LLE) {
        let (lo, hi) = reference_band(r);
        let v = g.lle_uncontrolled.slope;
        verdicts.push(Verdict {
            name: format!("exponent magnitude {}", state_label(&g.uncontrolled.states[0])),
            pass: (lo..=hi).contains(&v),
            detail: format!("{v:.4} vs reference {r} (band [{lo:.3}, {hi:.3}])"),
            gated: true,
        });
    }

    // synchronization and descent
    for g in graded.iter().chain([&strong]) {
        let m = g.controlled.max_error_after(SYNC_AFTER);
        let last = g.controlled.last_error_excursion(SYNC_TOLERANCE);
        verdicts.push(Verdict {
            name: format!(
                "slave {} synchronizes to {} after t = {SYNC_AFTER}",
                state_label(&g.uncontrolled.states[0]),
                state_label(&g.controlled.master.states[0])
            ),
            pass: m < SYNC_TOLERANCE,
            detail: format!("max |e| after t = {SYNC_AFTER}: {m:.3e}; last |e| >= {SYNC_TOLERANCE} at t = {last:?}"),
            gated: true,
        });
    }
    for g in &graded {
        let v = g.lle_controlled.slope;
        verdicts.push(Verdict {
            name: format!("controlled exponent {}", state_label(&g.uncontrolled.states[0])),
            pass: v < CONTROLLED_LLE_MAX,
            detail: format!("{v:.4} < {CONTROLLED_LLE_MAX}"),
            gated: true,
        });
    }
    for g in graded.iter().chain(&varied).chain([&strong]) {
        let (ok, rise) = lyapunov_descent(&g.controlled);
        verdicts.push(Verdict {
            name: format!(
                "Lyapunov descent {} -> {}",
                state_label(&g.uncontrolled.states[0]),
                state_label(&g.controlled.master.states[0])
            ),
            pass: ok,
            detail: format!("largest per-sample rise of V: {rise:.3e}"),
            gated: true,
        });
    }
    for g in varied.iter().chain([&strong]) {
        verdicts.push(Verdict {
            name: format!(
                "controlled below uncontrolled {} -> {}",
                state_label(&g.uncontrolled.states[0]),
                state_label(&g.controlled.master.states[0])
            ),
            pass: g.lle_controlled.slope < g.lle_uncontrolled.slope,
            detail: format!("{:.4} vs {:.4}", g.lle_controlled.slope, g.lle_uncontrolled.slope),
            gated: false,
        });
    }

    // gain sweep
    let q_reach: Vec<Option<f64>> = sweep.iter().filter(|s| s.r == 1.0).map(|s| s.reach).collect();
    let r_reach: Vec<Option<f64>> = sweep.iter().filter(|s| s.q == 1.0).map(|s| s.reach).collect();
    verdicts.push(Verdict {
        name: "reaching time decreases with q".into(),
        pass: strictly_decreasing(&q_reach),
        detail: format!("{q_reach:?}"),
        gated: true,
    });
    verdicts.push(Verdict {
        name: "reaching time decreases with r".into(),
        pass: strictly_decreasing(&r_reach),
        detail: format!("{r_reach:?}"),
        gated: true,
    });
    let top = |f: fn(&SweepPoint) -> bool| sweep.iter().filter(|s| f(s)).last().map_or(0.0, |s| s.total_variation);
    let tv_q = top(|s| s.r == 1.0);
    let tv_r = top(|s| s.q == 1.0);
    verdicts.push(Verdict {
        name: "control chatters more at the largest q than at the largest r".into(),
        pass: tv_q > tv_r,
        detail: format!("total variation {tv_q:.4} vs {tv_r:.4}"),
        gated: true,
    });

    // spectra
    for g in &graded {
        let su = periodogram(&g.uncontrolled.x_real(), g.uncontrolled.dt_sample)?;
        let sc = periodogram(&g.controlled.slave.x_real(), g.controlled.slave.dt_sample)?;
        let dom = sc.dominant_peaks(DOMINANT_FRACTION);
        verdicts.push(Verdict {
            name: format!("spectral contrast {}", state_label(&g.uncontrolled.states[0])),
            pass: sc.flatness < su.flatness && dom.len() == 2,
            detail: format!(
                "flatness {:.3e} (controlled) vs {:.3e}; dominant peaks {:?}",
                sc.flatness,
                su.flatness,
                dom.iter().map(|d| (d.0 * 1e4).round() / 1e4).collect::<Vec<_>>()
            ),
            gated: true,
        });
    }

    // emit
    let tables = [("lle_fixed_master", table(&graded)), ("lle_varied_master", table(&varied)), ("lle_strong_chaos", table(std::slice::from_ref(&strong)))];
    for (name, t) in &tables {
        let _ = writeln!(report, "{name}\n{}", t.to_text());
        w.csv(name, |b| t.write_csv(b))?;
    }
    let _ = writeln!(report, "gain sweep\n{:>5} {:>5} {:>10} {:>12}", "q", "r", "T_reach", "TV(u)");
    for s in &sweep {
        let _ = writeln!(
            report,
            "{:>5} {:>5} {:>10} {:>12.4}",
            s.q,
            s.r,
            s.reach.map_or("never".into(), |t| format!("{t:.3}")),
            s.total_variation
        );
    }
    w.csv("gain_sweep", |b| {
        let mut cw = csv::Writer::from_writer(b);
        let err = |e: csv::Error| crate::error::Error::InvalidArgument(format!("csv: {e}"));
        cw.write_record(["q", "r", "t_reach", "total_variation"]).map_err(err)?;
        for s in &sweep {
            cw.write_record([s.q.to_string(), s.r.to_string(), s.reach.map(|t| t.to_string()).unwrap_or_default(), s.total_variation.to_string()])
                .map_err(err)?;
        }
        cw.flush().map_err(|e| crate::error::Error::InvalidArgument(e.to_string()))
    })?;
    let _ = writeln!(report);
    for v in &verdicts {
        let tag = match (v.pass, v.gated) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        let _ = writeln!(report, "{tag} {}: {}", v.name, v.detail);
    }
    print!("{report}");
    w.text("report.txt", &report)?;

    for (i, g) in graded.iter().enumerate() {
        w.svg(&format!("sync_fixed_{i}"), || error_plot(&g.controlled, &format!("error, slave {}", state_label(&g.uncontrolled.states[0]))))?;
        w.csv(&format!("divergence_fixed_{i}"), |b| write_divergence_csv(&g.lle_uncontrolled, b))?;
        w.svg(&format!("divergence_fixed_{i}"), || divergence_plot(&g.lle_uncontrolled, "uncontrolled divergence"))?;
    }
    w.svg("sync_strong", || error_plot(&strong.controlled, "error, strong-chaos pair"))?;

    w.outcome.acceptance_failed = verdicts.iter().any(|v| v.gated && !v.pass);
    Ok(w.outcome)
}
