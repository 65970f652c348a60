//! Master-slave synchronization: active cancellation of the nonlinear block
//! plus sliding-mode control of the remaining linear error dynamics.

use std::io::Write;

use super::law::{
    balance_control, dot, mat_vec, saturation, sliding_value, switching_control, ControllerConfig,
    Mat4, Vec4,
};
use crate::error::{Error, Result};
use crate::integrator::{
    rk4_step, Abort, IntegratorSettings, PhaseState, Trajectory, TrajectoryMeta,
};
use crate::model::{velocity::SINGULARITY_FLOOR, EigenstateSpec, OscillatorParams};

/// Nonlinear (pole) part of the first-excited field in real coordinates
/// `(x_r, x_i, y_r, y_i)`.
pub fn nonlinear_block(params: &OscillatorParams, s: &Vec4) -> Result<Vec4> {
    let (a1, b1) = (params.a1, params.b1);
    let [xr, xi, yr, yi] = *s;
    let den = a1 * a1 * (xr * xr + xi * xi)
        + b1 * b1 * (yr * yr + yi * yi)
        + 2.0 * a1 * b1 * (xi * yr - xr * yi);
    let mag = den.max(0.0).sqrt();
    if !(mag > SINGULARITY_FLOOR) {
        return Err(Error::NodalSingularity {
            magnitude: mag,
            floor: SINGULARITY_FLOOR,
        });
    }
    Ok([
        -(a1 * a1 * xi + a1 * b1 * yr) / den,
        -(a1 * a1 * xr - a1 * b1 * yi) / den,
        (-b1 * b1 * yi + a1 * b1 * xr) / den,
        -(b1 * b1 * yr + a1 * b1 * xi) / den,
    ])
}

fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Everything the controller computes at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSample {
    /// `u = K w - F`.
    pub u: Vec4,
    pub w: f64,
    pub w_eq: f64,
    /// `F = f(slave) - f(master)`.
    pub f_diff: Vec4,
    pub s: f64,
}

/// Control input for the given master and slave states.
pub fn control_input<N>(
    cfg: &ControllerConfig,
    master: &PhaseState,
    slave: &PhaseState,
    a: &Mat4,
    nonlinear: N,
) -> Result<ControlSample>
where
    N: Fn(&Vec4) -> Result<Vec4>,
{
    let (m, sl) = (master.to_array(), slave.to_array());
    let e = sub(&sl, &m);
    let f_diff = sub(&nonlinear(&sl)?, &nonlinear(&m)?);
    let w = switching_control(cfg, a, &e)?;
    let w_eq = balance_control(cfg, a, &e)?;
    let mut u = [0.0; 4];
    for i in 0..4 {
        u[i] = cfg.k[i] * w - f_diff[i];
    }
    Ok(ControlSample {
        u,
        w,
        w_eq,
        f_diff,
        s: sliding_value(cfg, &e),
    })
}

/// Joint record of a controlled run, every series on the master's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncRun {
    pub master: Trajectory,
    pub slave: Trajectory,
    pub error: Vec<Vec4>,
    pub control: Vec<Vec4>,
    pub sliding: Vec<f64>,
    pub lyap_v: Vec<f64>,
    pub w: Vec<f64>,
    pub w_eq: Vec<f64>,
    pub nonlinear_diff: Vec<Vec4>,
    pub a_matrix: Mat4,
    pub config: ControllerConfig,
    pub abort: Option<Abort>,
}

impl SyncRun {
    pub fn len(&self) -> usize {
        self.sliding.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sliding.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.master.time(k)
    }

    /// `H = K w` at sample `k`.
    pub fn h(&self, k: usize) -> Vec4 {
        self.config.k.map(|ki| ki * self.w[k])
    }

    /// Largest `|e_i|` over samples with `t > t_from`.
    pub fn max_error_after(&self, t_from: f64) -> f64 {
        (0..self.len())
            .filter(|&k| self.time(k) > t_from)
            .flat_map(|k| self.error[k])
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Last time at which any `|e_i| >= tol`, or `None` if never.
    pub fn last_error_excursion(&self, tol: f64) -> Option<f64> {
        (0..self.len())
            .rev()
            .find(|&k| self.error[k].iter().any(|v| v.abs() >= tol))
            .map(|k| self.time(k))
    }

    /// Earliest sample time after which `|s| < epsilon` holds for the rest
    /// of the run.
    pub fn reach_time(&self, epsilon: f64) -> Option<f64> {
        let last_out = (0..self.len()).rev().find(|&k| self.sliding[k].abs() >= epsilon);
        match last_out {
            None => Some(self.time(0)),
            Some(k) if k + 1 < self.len() => Some(self.time(k + 1)),
            Some(_) => None,
        }
    }

    /// Sum over channels of `|u(t_{k+1}) - u(t_k)|` for `t_k >= t_from`.
    pub fn control_total_variation(&self, t_from: f64) -> f64 {
        (1..self.len())
            .filter(|&k| self.time(k - 1) >= t_from)
            .map(|k| {
                (0..4)
                    .map(|i| (self.control[k][i] - self.control[k - 1][i]).abs())
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Integrate master and slave together with fixed-step RK4. The controller is
/// re-evaluated inside every stage.
pub fn simulate_sync(
    params: &OscillatorParams,
    cfg: &ControllerConfig,
    master0: PhaseState,
    slave0: PhaseState,
    settings: IntegratorSettings,
) -> Result<SyncRun> {
    cfg.validate()?;
    let settings = IntegratorSettings::new(settings.t_final, settings.dt, settings.stride)?;
    let a = params.linear_matrix();
    let f = |s: &Vec4| nonlinear_block(params, s);

    let mut rhs = |z: &[f64; 8]| -> Result<[f64; 8]> {
        let m: Vec4 = [z[0], z[1], z[2], z[3]];
        let sl: Vec4 = [z[4], z[5], z[6], z[7]];
        let ctl = control_input(cfg, &PhaseState::from_array(m), &PhaseState::from_array(sl), &a, f)?;
        let fm = f(&m)?;
        let fs = f(&sl)?;
        let am = mat_vec(&a, &m);
        let asl = mat_vec(&a, &sl);
        let mut out = [0.0; 8];
        for i in 0..4 {
            out[i] = am[i] + fm[i];
            out[i + 4] = asl[i] + fs[i] + ctl.u[i];
        }
        Ok(out)
    };

    let steps = settings.steps();
    let capacity = steps / settings.stride + 1;
    let mut masters = Vec::with_capacity(capacity);
    let mut slaves = Vec::with_capacity(capacity);
    let mut samples = Vec::with_capacity(capacity);

    let record = |z: &[f64; 8]| -> Result<(PhaseState, PhaseState, ControlSample)> {
        let m = PhaseState::new(z[0], z[1], z[2], z[3]);
        let s = PhaseState::new(z[4], z[5], z[6], z[7]);
        let ctl = control_input(cfg, &m, &s, &a, f)?;
        Ok((m, s, ctl))
    };

    let mut z = [0.0; 8];
    z[..4].copy_from_slice(&master0.to_array());
    z[4..].copy_from_slice(&slave0.to_array());
    let (m0, s0, c0) = record(&z)?;
    masters.push(m0);
    slaves.push(s0);
    samples.push(c0);

    let mut abort = None;
    for step in 1..=steps {
        let next = rk4_step(&mut rhs, &z, settings.dt).and_then(|n| {
            if n.iter().all(|v| v.is_finite()) {
                Ok(n)
            } else {
                Err(Error::InvalidArgument(format!("non-finite state at step {step}")))
            }
        });
        let next = match next {
            Ok(n) => n,
            Err(error) => {
                abort = Some(Abort {
                    t: (masters.len() - 1) as f64 * settings.dt_sample(),
                    error,
                });
                break;
            }
        };
        z = next;
        if step % settings.stride == 0 {
            match record(&z) {
                Ok((m, s, c)) => {
                    masters.push(m);
                    slaves.push(s);
                    samples.push(c);
                }
                Err(error) => {
                    abort = Some(Abort {
                        t: (masters.len() - 1) as f64 * settings.dt_sample(),
                        error,
                    });
                    break;
                }
            }
        }
    }

    let meta = TrajectoryMeta {
        settings,
        params: Some(*params),
        spec: Some(EigenstateSpec::first_excited()),
    };
    let traj = |states: Vec<PhaseState>| Trajectory {
        t0: 0.0,
        dt_sample: settings.dt_sample(),
        states,
        meta: meta.clone(),
        abort: abort.clone(),
    };
    let error: Vec<Vec4> = masters
        .iter()
        .zip(&slaves)
        .map(|(m, s)| sub(&s.to_array(), &m.to_array()))
        .collect();
    let sliding: Vec<f64> = samples.iter().map(|c| c.s).collect();
    Ok(SyncRun {
        master: traj(masters),
        slave: traj(slaves),
        error,
        control: samples.iter().map(|c| c.u).collect(),
        lyap_v: sliding.iter().map(|s| 0.5 * s * s).collect(),
        sliding,
        w: samples.iter().map(|c| c.w).collect(),
        w_eq: samples.iter().map(|c| c.w_eq).collect(),
        nonlinear_diff: samples.iter().map(|c| c.f_diff).collect(),
        a_matrix: a,
        config: *cfg,
        abort,
    })
}

/// `(t, V, dV/dt)` with `V = s^2 / 2` and `dV/dt = -r s^2 - q s sat(s)`.
pub fn lyapunov_series(run: &SyncRun, cfg: &ControllerConfig) -> Vec<(f64, f64, f64)> {
    run.sliding
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let v = 0.5 * s * s;
            let vdot = -cfg.r * s * s - cfg.q * s * saturation(s, cfg.epsilon);
            (run.time(k), v, vdot)
        })
        .collect()
}

/// `[I - K (CK)^-1 C] A`, the error dynamics while sliding.
pub fn sliding_mode_matrix(cfg: &ControllerConfig, a: &Mat4) -> Mat4 {
    let ck = dot(&cfg.c, &cfg.k);
    let mut proj = [[0.0; 4]; 4];
    for (i, row) in proj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = f64::from(u8::from(i == j)) - cfg.k[i] * cfg.c[j] / ck;
        }
    }
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|m| proj[i][m] * a[m][j]).sum();
        }
    }
    out
}

pub const SYNC_HEADER: [&str; 19] = [
    "t", "m_x_r", "m_x_i", "m_y_r", "m_y_i", "s_x_r", "s_x_i", "s_y_r", "s_y_i", "e1", "e2", "e3",
    "e4", "u1", "u2", "u3", "u4", "s", "V",
];

pub fn write_sync_csv<W: Write>(run: &SyncRun, out: W) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SYNC_HEADER).map_err(err)?;
    for k in 0..run.len() {
        let mut row = Vec::with_capacity(SYNC_HEADER.len());
        row.push(run.time(k));
        row.extend(run.master.states[k].to_array());
        row.extend(run.slave.states[k].to_array());
        row.extend(run.error[k]);
        row.extend(run.control[k]);
        row.push(run.sliding[k]);
        row.push(run.lyap_v[k]);
        w.write_record(row.iter().map(|v| crate::integrator::fmt17(*v)))
            .map_err(err)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv flush: {e}")))
}
