//! Eigenstate wavefunctions in the dimensionless complex plane.

use num_complex::Complex64;

use super::params::{energy, OscillatorParams};
use super::special::{binomial, half_gamma_ratio, hermite_poly, hyp2f1_terminating};
use crate::error::{Error, Result};

/// A point `(x, y)` with both coordinates complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub x: Complex64,
    pub y: Complex64,
}

impl ComplexPoint {
    pub fn new(x: Complex64, y: Complex64) -> Self {
        ComplexPoint { x, y }
    }

    pub fn from_parts(x_r: f64, x_i: f64, y_r: f64, y_i: f64) -> Self {
        ComplexPoint {
            x: Complex64::new(x_r, x_i),
            y: Complex64::new(y_r, y_i),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Which stationary state (or superposition of them) drives the motion.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenstateSpec {
    pub n1: u32,
    pub n2: u32,
    /// `(coefficient, n1, n2)` terms; when present it replaces `(n1, n2)`.
    pub superposition: Option<Vec<(Complex64, u32, u32)>>,
}

impl EigenstateSpec {
    pub fn new(n1: u32, n2: u32) -> Self {
        EigenstateSpec {
            n1,
            n2,
            superposition: None,
        }
    }

    pub fn ground() -> Self {
        Self::new(0, 0)
    }

    pub fn first_excited() -> Self {
        Self::new(1, 0)
    }

    pub fn superposition(terms: Vec<(Complex64, u32, u32)>) -> Result<Self> {
        if terms.is_empty() || terms.iter().all(|(c, _, _)| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidArgument(
                "superposition needs at least one nonzero coefficient".into(),
            ));
        }
        let (n1, n2) = (terms[0].1, terms[0].2);
        Ok(EigenstateSpec {
            n1,
            n2,
            superposition: Some(terms),
        })
    }

    pub fn is_ground(&self) -> bool {
        self.superposition.is_none() && self.n1 == 0 && self.n2 == 0
    }

    pub fn is_first_excited(&self) -> bool {
        self.superposition.is_none() && self.n1 == 1 && self.n2 == 0
    }

    /// `(coefficient, n1, n2)` terms, with a single eigenstate as one unit term.
    pub fn terms(&self) -> Vec<(Complex64, u32, u32)> {
        match &self.superposition {
            Some(t) => t.clone(),
            None => vec![(Complex64::new(1.0, 0.0), self.n1, self.n2)],
        }
    }
}

/// Gaussian exponent `a3 x^2 + i a4 x y + a5 y^2` shared by every eigenstate.
pub fn gaussian_exponent(params: &OscillatorParams, p: &ComplexPoint) -> Complex64 {
    let i = Complex64::i();
    params.a3 * p.x * p.x + i * params.a4 * p.x * p.y + params.a5 * p.y * p.y
}

/// Node factor `a1 x + i b1 y` of the first excited state.
pub fn excited_node(params: &OscillatorParams, p: &ComplexPoint) -> Complex64 {
    params.a1 * p.x + Complex64::i() * params.b1 * p.y
}

/// Expansion coefficient `c_kl(n1, n2)`, normalized so that `c_00 = 1`.
pub fn coeff_ckl(params: &OscillatorParams, n1: u32, n2: u32, k: u32, l: u32) -> Result<f64> {
    if k > n1 || l > n2 {
        return Err(Error::IndexOutOfRange(format!(
            "c_kl needs 0 <= k <= n1 and 0 <= l <= n2, got k = {k}, l = {l}, n1 = {n1}, n2 = {n2}"
        )));
    }
    if (k + l) % 2 == 1 {
        return Ok(0.0);
    }
    let d = params.cap_d;
    let g = params.cap_g;
    let (kf, lf) = (f64::from(k), f64::from(l));
    let prefactor = 2f64.powi((2 * k + l) as i32)
        * binomial(n1, k)
        * binomial(n2, l)
        * half_gamma_ratio((k + l) / 2)
        * g.powi(l as i32)
        * (2.0 * d * d - 1.0).powi((k as i32 - l as i32) / 2);

    let (a, b, c) = (-lf / 2.0, (1.0 - lf) / 2.0, (1.0 - kf - lf) / 2.0);
    let series = if l == 0 {
        1.0
    } else if d != 0.0 {
        let z = 1.0 / (2.0 * d * d) + 1.0 / (2.0 * g * g) - 1.0 / (4.0 * d * d * g * g);
        d.powi(l as i32) * hyp2f1_terminating(a, b, c, z)?
    } else {
        // D -> 0: only the highest power of z survives D^l.
        let m = l / 2;
        let mut coef = 1.0;
        for j in 0..m {
            let jf = f64::from(j);
            coef *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0));
        }
        let w = 0.5 - 1.0 / (4.0 * g * g);
        coef * w.powi(m as i32)
    };
    Ok(prefactor * series)
}

/// Spatial part of a single eigenstate, without the time phase.
fn stationary(params: &OscillatorParams, n1: u32, n2: u32, p: &ComplexPoint) -> Result<Complex64> {
    let envelope = gaussian_exponent(params, p).exp();
    Ok(polynomial_part(params, n1, n2, p)? * envelope)
}

/// Hermite-sum prefactor of an eigenstate (the wavefunction divided by its
/// Gaussian envelope). Its zeros are the nodes.
pub(crate) fn polynomial_part(
    params: &OscillatorParams,
    n1: u32,
    n2: u32,
    p: &ComplexPoint,
) -> Result<Complex64> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let i = Complex64::i();
    match (n1, n2) {
        (0, 0) => Ok(Complex64::new(1.0, 0.0)),
        (1, 0) => Ok(2.0 * sqrt2 * excited_node(params, p)),
        _ => {
            let u = sqrt2 * (params.a1 * p.x + i * params.b1 * p.y);
            let v = sqrt2 * (params.a2 * p.x - i * params.b2 * p.y);
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..=n1 {
                for l in 0..=n2 {
                    let c = coeff_ckl(params, n1, n2, k, l)?;
                    if c != 0.0 {
                        sum += c * hermite_poly(n1 - k, u) * hermite_poly(n2 - l, v);
                    }
                }
            }
            Ok(sum)
        }
    }
}

/// Prefactor of the whole state (superpositions divide by the common envelope).
pub(crate) fn state_prefactor(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
    t: f64,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (c, n1, n2) in spec.terms() {
        let phase = Complex64::new(0.0, -energy(params, n1, n2) * t).exp();
        sum += c * phase * polynomial_part(params, n1, n2, p)?;
    }
    Ok(sum)
}

/// Wavefunction value at `p` and dimensionless time `t`.
pub fn eval_eigenstate(
    params: &OscillatorParams,
    spec: &EigenstateSpec,
    p: &ComplexPoint,
    t: f64,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (c, n1, n2) in spec.terms() {
        let phase = Complex64::new(0.0, -energy(params, n1, n2) * t).exp();
        sum += c * phase * stationary(params, n1, n2, p)?;
    }
    Ok(sum)
}
