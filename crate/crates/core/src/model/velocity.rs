//! Complex velocity fields `dx/dt = -i d(ln psi)/dx`, `dy/dt = -i d(ln psi)/dy`.

use num_complex::Complex64;

use super::params::OscillatorParams;
use super::wavefunction::{excited_node, state_prefactor, ComplexPoint, EigenstateSpec};
use crate::error::{Error, Result};

/// Minimum admissible modulus of a node factor (`a1 x + i b1 y`, or the
/// Hermite prefactor of a general state).
pub const SINGULARITY_FLOOR: f64 = 1e-6;

/// Step of the complex central differences.
pub const DIFF_STEP: f64 = 1e-4;

pub type Velocity = (Complex64, Complex64);

/// Anything that maps a complex position to a complex velocity.
pub trait VelocityField: Sync {
    fn velocity(&self, p: &ComplexPoint) -> Result<Velocity>;
}

impl<F> VelocityField for F
where
    F: Fn(&ComplexPoint) -> Result<Velocity> + Sync,
{
    fn velocity(&self, p: &ComplexPoint) -> Result<Velocity> {
        self(p)
    }
}

/// Linear field of the ground state.
pub fn velocity_ground(params: &OscillatorParams, p: &ComplexPoint) -> Velocity {
    let i = Complex64::i();
    let dx = -i * (2.0 * params.a3 * p.x + i * params.a4 * p.y);
    let dy = -i * (i * params.a4 * p.x + 2.0 * params.a5 * p.y);
    (dx, dy)
}

/// Field of the first excited state: the ground-state linear part plus a
/// simple pole on the node `a1 x + i b1 y = 0`.
pub fn velocity_excited(params: &OscillatorParams, p: &ComplexPoint) -> Result<Velocity> {
    let z = excited_node(params, p);
    let mag = z.norm();
    if !(mag > SINGULARITY_FLOOR) {
        return Err(Error::NodalSingularity {
            magnitude: mag,
            floor: SINGULARITY_FLOOR,
        });
    }
    let (lx, ly) = velocity_ground(params, p);
    let i = Complex64::i();
    Ok((lx - i * params.a1 / z, ly + params.b1 / z))
}

fn shifted(p: &ComplexPoint, dx: f64, dy: f64) -> ComplexPoint {
    ComplexPoint::new(p.x + dx, p.y + dy)
}

/// Evaluates `psi` at `p` with the Gaussian envelope folded in relative to
/// `p`, so that ratios stay well scaled far from the origin.
struct LogDerivatives {
    center: Complex64,
    xp: Complex64,
    xm: Complex64,
    yp: Complex64,
    ym: Complex64,
}

fn sample(params: &OscillatorParams, spec: &EigenstateSpec, p: &ComplexPoint) -> Result<LogDerivatives> {
    let h = DIFF_STEP;
    let env0 = super::wavefunction::gaussian_exponent(params, p);
    let eval = |q: &ComplexPoint| -> Result<Complex64> {
        let env = super::wavefunction::gaussian_exponent(params, q) - env0;
        Ok(state_prefactor(params, spec, q, 0.0)? * env.exp())
    };
    let center = state_prefactor(params, spec, p, 0.0)?;
    let mag = center.norm();
    if !(mag > SINGULARITY_FLOOR) {
        return Err(Error::NodalSingularity {
            magnitude: mag,
            floor: SINGULARITY_FLOOR,
        });
    }
    Ok(LogDerivatives {
        center,
        xp: eval(&shifted(p, h, 0.0))?,
        xm: eval(&shifted(p, -h, 0.0))?,
        yp: eval(&shifted(p, 0.0, h))?,
        ym: eval(&shifted(p, 0.0, -h))?,
    })
}

/// `-i grad ln psi` by central differences of the wavefunction itself.
///
/// Independent of the closed-form fields and used to cross-check them.
pub fn velocity_numeric(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
) -> Result<Velocity> {
    let s = sample(params, spec, p)?;
    let h2 = 2.0 * DIFF_STEP;
    let i = Complex64::i();
    let dlx = (s.xp - s.xm) / (h2 * s.center);
    let dly = (s.yp - s.ym) / (h2 * s.center);
    Ok((-i * dlx, -i * dly))
}

/// Laplacian of `ln psi` by second central differences.
pub(crate) fn log_laplacian_numeric(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
) -> Result<Complex64> {
    let s = sample(params, spec, p)?;
    let h = DIFF_STEP;
    let c = s.center;
    let dx = (s.xp - s.xm) / (2.0 * h * c);
    let dy = (s.yp - s.ym) / (2.0 * h * c);
    let dxx = (s.xp - 2.0 * c + s.xm) / (h * h * c);
    let dyy = (s.yp - 2.0 * c + s.ym) / (h * h * c);
    Ok(dxx - dx * dx + dyy - dy * dy)
}

/// Zero velocity everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl VelocityField for ZeroField {
    fn velocity(&self, _p: &ComplexPoint) -> Result<Velocity> {
        Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)))
    }
}

/// Field driven by a given eigenstate: closed forms for the ground and first
/// excited states, numeric log-derivative otherwise.
#[derive(Debug, Clone)]
pub struct StateField {
    params: OscillatorParams,
    spec: EigenstateSpec,
}

impl StateField {
    pub fn new(params: OscillatorParams, spec: EigenstateSpec) -> Self {
        StateField { params, spec }
    }

    pub fn ground(params: OscillatorParams) -> Self {
        Self::new(params, EigenstateSpec::ground())
    }

    pub fn first_excited(params: OscillatorParams) -> Self {
        Self::new(params, EigenstateSpec::first_excited())
    }

    pub fn params(&self) -> &OscillatorParams {
        &self.params
    }

    pub fn spec(&self) -> &EigenstateSpec {
        &self.spec
    }
}

impl VelocityField for StateField {
    fn velocity(&self, p: &ComplexPoint) -> Result<Velocity> {
        if self.spec.is_ground() {
            Ok(velocity_ground(&self.params, p))
        } else if self.spec.is_first_excited() {
            velocity_excited(&self.params, p)
        } else {
            velocity_numeric(&self.params, &self.spec, p)
        }
    }
}
