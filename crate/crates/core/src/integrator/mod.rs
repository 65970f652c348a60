//! Fixed-step RK4 integration of complex velocity fields.

mod csv_io;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ComplexPoint, EigenstateSpec, OscillatorParams, VelocityField};

pub(crate) use csv_io::fmt17;
pub use csv_io::{read_trajectory_csv, write_trajectory_csv, TRAJECTORY_HEADER};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_STRIDE: usize = 10;

/// Real and imaginary parts of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub x_r: f64,
    pub x_i: f64,
    pub y_r: f64,
    pub y_i: f64,
}

impl PhaseState {
    pub const fn new(x_r: f64, x_i: f64, y_r: f64, y_i: f64) -> Self {
        PhaseState { x_r, x_i, y_r, y_i }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x_r, self.x_i, self.y_r, self.y_i]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        PhaseState::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

impl From<ComplexPoint> for PhaseState {
    fn from(p: ComplexPoint) -> Self {
        PhaseState::new(p.x.re, p.x.im, p.y.re, p.y.im)
    }
}

impl From<PhaseState> for ComplexPoint {
    fn from(s: PhaseState) -> Self {
        ComplexPoint::new(Complex64::new(s.x_r, s.x_i), Complex64::new(s.y_r, s.y_i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub t_final: f64,
    pub dt: f64,
    pub stride: usize,
}

impl IntegratorSettings {
    pub fn new(t_final: f64, dt: f64, stride: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_final must be > 0, got {t_final}"
            )));
        }
        if stride == 0 {
            return Err(Error::InvalidArgument("sample stride must be >= 1".into()));
        }
        Ok(IntegratorSettings { t_final, dt, stride })
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn dt_sample(&self) -> f64 {
        self.dt * self.stride as f64
    }
}

/// Why an integration stopped before `t_final`.
#[derive(Debug, Clone, PartialEq)]
pub struct Abort {
    /// Time of the last good sample.
    pub t: f64,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub settings: IntegratorSettings,
    pub params: Option<OscillatorParams>,
    pub spec: Option<EigenstateSpec>,
}

/// Uniformly sampled states starting at `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt_sample: f64,
    pub states: Vec<PhaseState>,
    pub meta: TrajectoryMeta,
    pub abort: Option<Abort>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt_sample
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(|k| self.time(k))
    }

    pub fn is_truncated(&self) -> bool {
        self.abort.is_some()
    }

    /// One real component as a series: 0 = x_r, 1 = x_i, 2 = y_r, 3 = y_i.
    pub fn component(&self, idx: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.to_array()[idx]).collect()
    }

    pub fn x_real(&self) -> Vec<f64> {
        self.component(0)
    }

    pub fn with_model(mut self, params: OscillatorParams, spec: EigenstateSpec) -> Self {
        self.meta.params = Some(params);
        self.meta.spec = Some(spec);
        self
    }

    fn same_grid(&self, other: &Trajectory) -> bool {
        let tol = 1e-12 * self.dt_sample.abs().max(1.0);
        (self.t0 - other.t0).abs() <= tol && (self.dt_sample - other.dt_sample).abs() <= tol
    }
}

/// One classical RK4 step of `y' = f(y)`.
pub fn rk4_step<const N: usize, F>(f: &mut F, y: &[f64; N], dt: f64) -> Result<[f64; N]>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    let axpy = |a: &[f64; N], s: f64, b: &[f64; N]| -> [f64; N] {
        let mut out = *a;
        for (o, v) in out.iter_mut().zip(b) {
            *o += s * v;
        }
        out
    };
    let k1 = f(y)?;
    let k2 = f(&axpy(y, dt / 2.0, &k1))?;
    let k3 = f(&axpy(y, dt / 2.0, &k2))?;
    let k4 = f(&axpy(y, dt, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn field_rhs<F: VelocityField + ?Sized>(field: &F, s: &[f64; 4]) -> Result<[f64; 4]> {
    let (dx, dy) = field.velocity(&PhaseState::from_array(*s).into())?;
    Ok([dx.re, dx.im, dy.re, dy.im])
}

/// Integrate `field` from `initial` with fixed-step RK4, keeping every
/// `stride`-th state.
///
/// A nodal singularity does not fail the call: the trajectory ends at the last
/// good sample and `abort` records why.
pub fn integrate<F: VelocityField + ?Sized>(
    field: &F,
    initial: PhaseState,
    t_final: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    let settings = IntegratorSettings::new(t_final, dt, sample_stride)?;
    if !initial.is_finite() {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }
    let steps = settings.steps();
    let mut states = Vec::with_capacity(steps / sample_stride + 1);
    states.push(initial);
    let mut y = initial.to_array();
    let mut abort = None;
    let mut rhs = |s: &[f64; 4]| field_rhs(field, s);
    for step in 1..=steps {
        match rk4_step(&mut rhs, &y, dt) {
            Ok(next) if next.iter().all(|v| v.is_finite()) => y = next,
            Ok(_) => {
                abort = Some(Abort {
                    t: (states.len() - 1) as f64 * settings.dt_sample(),
                    error: Error::InvalidArgument(format!("non-finite state at step {step}")),
                });
                break;
            }
            Err(error) => {
                abort = Some(Abort {
                    t: (states.len() - 1) as f64 * settings.dt_sample(),
                    error,
                });
                break;
            }
        }
        if step % sample_stride == 0 {
            states.push(PhaseState::from_array(y));
        }
    }
    Ok(Trajectory {
        t0: 0.0,
        dt_sample: settings.dt_sample(),
        states,
        meta: TrajectoryMeta {
            settings,
            params: None,
            spec: None,
        },
        abort,
    })
}

/// Separation of the real projections `(x_r, y_r)` sample by sample, over the
/// samples both trajectories share.
pub fn pair_divergence(a: &Trajectory, b: &Trajectory) -> Result<Vec<(f64, f64)>> {
    if !a.same_grid(b) {
        return Err(Error::MismatchedGrids);
    }
    Ok(a
        .states
        .iter()
        .zip(&b.states)
        .enumerate()
        .map(|(k, (sa, sb))| (a.time(k), (sa.x_r - sb.x_r).hypot(sa.y_r - sb.y_r)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, velocity_excited, Branch, StateField, ZeroField};

    #[test]
    fn zero_field_is_constant() {
        let s0 = PhaseState::new(0.3, -0.2, 1.0, 4.0);
        let tr = integrate(&ZeroField, s0, 1.0, 0.01, 5).unwrap();
        assert_eq!(tr.len(), 21);
        assert!(tr.states.iter().all(|s| *s == s0));
        assert!(!tr.is_truncated());
    }

    #[test]
    fn settings_validation() {
        let s0 = PhaseState::default();
        assert!(integrate(&ZeroField, s0, 1.0, 0.0, 1).is_err());
        assert!(integrate(&ZeroField, s0, -1.0, 0.1, 1).is_err());
        assert!(integrate(&ZeroField, s0, 1.0, 0.1, 0).is_err());
        assert!(integrate(&ZeroField, PhaseState::new(f64::NAN, 0., 0., 0.), 1.0, 0.1, 1).is_err());
    }

    #[test]
    fn deterministic() {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        let f = StateField::first_excited(p);
        let s0 = PhaseState::new(0.4, 0.0, 0.8, 0.0);
        let a = integrate(&f, s0, 20.0, 1e-3, 10).unwrap();
        let b = integrate(&f, s0, 20.0, 1e-3, 10).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert_eq!(x.to_array().map(f64::to_bits), y.to_array().map(f64::to_bits));
        }
    }

    #[test]
    fn singularity_truncates_and_flags() {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        // start exactly on the node x = y = 0
        let field = move |q: &ComplexPoint| velocity_excited(&p, q);
        let tr = integrate(&field, PhaseState::default(), 1.0, 1e-2, 1).unwrap();
        assert_eq!(tr.len(), 1);
        let abort = tr.abort.unwrap();
        assert!(abort.error.is_singularity());
        assert_eq!(abort.t, 0.0);
    }

    #[test]
    fn divergence_of_identical_is_zero() {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        let tr = integrate(&StateField::ground(p), PhaseState::new(1.0, 0.0, 1.0, 0.0), 2.0, 1e-3, 10).unwrap();
        let d = pair_divergence(&tr, &tr).unwrap();
        assert_eq!(d.len(), tr.len());
        assert!(d.iter().all(|&(_, s)| s == 0.0));
    }

    #[test]
    fn divergence_rejects_other_grids() {
        let a = integrate(&ZeroField, PhaseState::default(), 1.0, 0.01, 1).unwrap();
        let b = integrate(&ZeroField, PhaseState::default(), 1.0, 0.01, 2).unwrap();
        assert_eq!(pair_divergence(&a, &b), Err(Error::MismatchedGrids));
    }

    #[test]
    fn phase_state_round_trip() {
        let s = PhaseState::new(1.0, -2.0, 3.5, 0.25);
        let p: ComplexPoint = s.into();
        assert_eq!(PhaseState::from(p), s);
    }
}
