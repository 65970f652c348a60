//! Quantum and total potentials.

use num_complex::Complex64;

use super::params::OscillatorParams;
use super::velocity::{log_laplacian_numeric, SINGULARITY_FLOOR};
use super::wavefunction::{excited_node, ComplexPoint, EigenstateSpec};
use crate::error::{Error, Result};

/// `Q = -1/2 (d2/dx2 + d2/dy2) ln psi`; closed form for the ground and first
/// excited states, second differences otherwise.
pub fn quantum_potential(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
) -> Result<Complex64> {
    let base = Complex64::new(-(params.a3 + params.a5), 0.0);
    if spec.is_ground() {
        return Ok(base);
    }
    if spec.is_first_excited() {
        let z = excited_node(params, p);
        let mag = z.norm();
        if !(mag > SINGULARITY_FLOOR) {
            return Err(Error::NodalSingularity {
                magnitude: mag,
                floor: SINGULARITY_FLOOR,
            });
        }
        return Ok(base + (params.a1 * params.a1 - params.b1 * params.b1) / (2.0 * z * z));
    }
    quantum_potential_numeric(params, spec, p)
}

/// Second-difference evaluation, valid for every state.
pub fn quantum_potential_numeric(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
) -> Result<Complex64> {
    Ok(-0.5 * log_laplacian_numeric(params, spec, p)?)
}

/// Harmonic trap `(x^2 + gamma y^2) / 2` in the dimensionless coordinates.
pub fn classical_potential(params: &OscillatorParams, p: &ComplexPoint) -> Complex64 {
    0.5 * (p.x * p.x + params.gamma * p.y * p.y)
}

pub fn total_potential(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
) -> Result<Complex64> {
    Ok(classical_potential(params, p) + quantum_potential(params, spec, p)?)
}

/// Rectangular lattice over the real parts `(x_r, y_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl RealGrid {
    pub fn square(half_width: f64, n: usize) -> Self {
        RealGrid {
            x_min: -half_width,
            x_max: half_width,
            nx: n,
            y_min: -half_width,
            y_max: half_width,
            ny: n,
        }
    }

    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![min];
        }
        let step = (max - min) / (n - 1) as f64;
        (0..n).map(|k| min + step * k as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.ny)
    }
}

/// `Re V_total` sampled on a grid, row-major in `y` then `x`.
/// `None` marks node cells where the potential is not computable.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub x_imag: f64,
    pub y_imag: f64,
    pub value: Vec<Option<f64>>,
    /// `(dV/dx_r, dV/dy_r)`; the force is its negative.
    pub gradient: Vec<Option<(f64, f64)>>,
}

impl PotentialGrid {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> Option<f64> {
        self.value[self.index(ix, iy)]
    }

    /// Cell with the largest `|V|`, as `(x_r, y_r, value)`.
    pub fn max_magnitude(&self) -> Option<(f64, f64, f64)> {
        let mut best: Option<(f64, f64, f64)> = None;
        for (iy, &y) in self.ys.iter().enumerate() {
            for (ix, &x) in self.xs.iter().enumerate() {
                if let Some(v) = self.value_at(ix, iy) {
                    if best.is_none_or(|b| v.abs() > b.2.abs()) {
                        best = Some((x, y, v));
                    }
                }
            }
        }
        best
    }
}

pub fn total_potential_grid(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    x_imag: f64,
    y_imag: f64,
    grid: &RealGrid,
) -> Result<PotentialGrid> {
    if grid.nx == 0 || grid.ny == 0 {
        return Err(Error::InvalidArgument("potential grid must be nonempty".into()));
    }
    let xs = grid.xs();
    let ys = grid.ys();
    let eval = |xr: f64, yr: f64| -> Option<f64> {
        let p = ComplexPoint::from_parts(xr, x_imag, yr, y_imag);
        total_potential(params, spec, &p).ok().map(|v| v.re).filter(|v| v.is_finite())
    };
    let h = super::velocity::DIFF_STEP;
    let mut value = Vec::with_capacity(xs.len() * ys.len());
    let mut gradient = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let v = eval(x, y);
            value.push(v);
            let g = v.and_then(|_| {
                let gx = (eval(x + h, y)? - eval(x - h, y)?) / (2.0 * h);
                let gy = (eval(x, y + h)? - eval(x, y - h)?) / (2.0 * h);
                Some((gx, gy))
            });
            gradient.push(g);
        }
    }
    Ok(PotentialGrid {
        xs,
        ys,
        x_imag,
        y_imag,
        value,
        gradient,
    })
}
