//! Dimensionless model coefficients derived from the field strength `beta`
//! and the trap frequency ratio `gamma`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sign choice for the `±` appearing in `rho1` and `rho2`.
///
/// `Plus` reproduces the tabulated coefficients at `(beta, gamma) = (0.8, 0.4)`
/// and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::InvalidParams(format!(
                "unknown branch `{other}` (expected `plus` or `minus`)"
            ))),
        }
    }
}

/// Every model constant used downstream. Immutable once derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub beta: f64,
    pub gamma: f64,
    pub branch: Branch,
    pub rho1: f64,
    pub rho2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub cap_d: f64,
    pub cap_g: f64,
}

/// Derive all coefficients for `beta >= 0`, `gamma > 0`, `gamma != 1`.
///
/// At `beta == 0` the conversion formulas are `0/0`; the analytic limit
/// (decoupled oscillators: `rho1 = rho2 = 0`, `eta1 = 1`, `eta2 = gamma`,
/// `mu1 = mu2 = 1`) is returned instead.
pub fn derive_params(beta: f64, gamma: f64, branch: Branch) -> Result<OscillatorParams> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParams(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    let g2 = gamma * gamma;
    let b2 = beta * beta;
    let sgn = if g2 < 1.0 {
        1.0
    } else if g2 > 1.0 {
        -1.0
    } else {
        return Err(Error::DegenerateAnisotropy { gamma });
    };

    let sum = 1.0 + g2 + b2;
    // sqrt((1 + g^2 + b^2)^2 - 4 g^2), written as a product to avoid cancellation
    let root = ((sum - 2.0 * gamma) * (sum + 2.0 * gamma)).sqrt();

    // eta1 * eta2 = gamma exactly; the quotient form keeps eta2 accurate when
    // sum - root is a small difference of large numbers.
    let (eta1, eta2, mu1, mu2) = if beta == 0.0 {
        (1.0, gamma, 1.0, 1.0)
    } else {
        let eta1 = ((sum + sgn * root) / 2.0).sqrt();
        (
            eta1,
            gamma / eta1,
            2.0 * root / (sgn * (1.0 - g2 + b2) + root),
            2.0 * root / (sgn * (1.0 - g2 - b2) + root),
        )
    };

    let s = branch.sign();
    let (rho1, rho2) = if beta == 0.0 {
        (0.0, 0.0)
    } else {
        (((g2 - 1.0) + s * root) / (2.0 * beta), s * beta / root)
    };

    let m1 = mu1 * eta1;
    let m2 = mu2 * eta2;
    let prod = m1 * m2;
    let den = rho2 * rho2 * prod + 1.0;

    let a1 = m1.sqrt() / den;
    let b1 = m1.sqrt() * rho2 * m2 / den;
    let a2 = m2.sqrt() * rho2 * m1 / den;
    let b2c = m2.sqrt() / den;
    let a3 = -m1 / (2.0 * den);
    let a4 = rho1 - rho2 * prod / den;
    let a5 = -m2 / (2.0 * den);

    let cap_d = (2.0 * rho2 * rho2 * prod / den).sqrt();
    let cap_g = -sgn * (2.0 / den).sqrt();

    let params = OscillatorParams {
        beta,
        gamma,
        branch,
        rho1,
        rho2,
        eta1,
        eta2,
        mu1,
        mu2,
        a1,
        a2,
        b1,
        b2: b2c,
        a3,
        a4,
        a5,
        cap_d,
        cap_g,
    };
    if !params.all_finite() {
        return Err(Error::InvalidParams(format!(
            "non-finite coefficient for beta = {beta}, gamma = {gamma}"
        )));
    }
    Ok(params)
}

/// Dimensionless eigenenergy `(n1 + 1/2) eta1 + (n2 + 1/2) eta2`.
pub fn energy(params: &OscillatorParams, n1: u32, n2: u32) -> f64 {
    (f64::from(n1) + 0.5) * params.eta1 + (f64::from(n2) + 0.5) * params.eta2
}

impl OscillatorParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        derive_params(beta, gamma, Branch::default())
    }

    pub fn energy(&self, n1: u32, n2: u32) -> f64 {
        energy(self, n1, n2)
    }

    /// The real 4x4 linear block acting on `(x_r, x_i, y_r, y_i)`.
    pub fn linear_matrix(&self) -> [[f64; 4]; 4] {
        let (a3, a4, a5) = (self.a3, self.a4, self.a5);
        [
            [0.0, 2.0 * a3, a4, 0.0],
            [-2.0 * a3, 0.0, 0.0, a4],
            [a4, 0.0, 0.0, 2.0 * a5],
            [0.0, a4, -2.0 * a5, 0.0],
        ]
    }

    fn all_finite(&self) -> bool {
        [
            self.rho1, self.rho2, self.eta1, self.eta2, self.mu1, self.mu2, self.a1, self.a2,
            self.b1, self.b2, self.a3, self.a4, self.a5, self.cap_d, self.cap_g,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Named coefficient table, in a fixed order, for reports and the CLI.
    pub fn table(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("a1", self.a1),
            ("a2", self.a2),
            ("b1", self.b1),
            ("b2", self.b2),
            ("a3", self.a3),
            ("a4", self.a4),
            ("a5", self.a5),
            ("D", self.cap_d),
            ("G", self.cap_g),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_coefficients() {
        let p = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        assert!((p.a1 - 0.9868).abs() < 5e-4, "a1 = {}", p.a1);
        assert!((p.a3 + 0.5759).abs() < 5e-4, "a3 = {}", p.a3);
        assert!((p.a4 - 0.1714).abs() < 5e-4, "a4 = {}", p.a4);
        assert!((p.a5 + 0.2304).abs() < 5e-4, "a5 = {}", p.a5);
        assert!((p.b1 - 0.2668).abs() < 5e-4, "b1 = {}", p.b1);
        assert!(p.a3 < 0.0 && p.a5 < 0.0);
    }

    #[test]
    fn minus_branch_differs() {
        let p = derive_params(0.8, 0.4, Branch::Minus).unwrap();
        assert!((p.b1 - 0.2668).abs() > 1e-2);
        assert!((p.eta1 * p.eta2 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn zero_field_limit() {
        let p = derive_params(0.0, 0.5, Branch::Plus).unwrap();
        assert_eq!(p.rho1, 0.0);
        assert_eq!(p.rho2, 0.0);
        assert_eq!(p.eta1, 1.0);
        assert_eq!(p.eta2, 0.5);
        assert_eq!(p.mu1, 1.0);
        assert_eq!(p.mu2, 1.0);
        assert_eq!(p.a4, 0.0);
        assert_eq!(p.b1, 0.0);
    }

    #[test]
    fn zero_field_limit_above_unity() {
        let p = derive_params(0.0, 1.5, Branch::Minus).unwrap();
        assert_eq!(p.eta1, 1.0);
        assert_eq!(p.eta2, 1.5);
        // continuity with small beta
        let q = derive_params(1e-6, 1.5, Branch::Minus).unwrap();
        assert!((q.eta1 - 1.0).abs() < 1e-9 && (q.eta2 - 1.5).abs() < 1e-9);
    }

    #[test]
    fn gamma_one_rejected() {
        assert_eq!(
            derive_params(0.3, 1.0, Branch::Plus),
            Err(Error::DegenerateAnisotropy { gamma: 1.0 })
        );
        assert!(derive_params(-0.1, 0.5, Branch::Plus).is_err());
        assert!(derive_params(0.1, 0.0, Branch::Plus).is_err());
    }

    #[test]
    fn energies() {
        let p = derive_params(0.0, 0.5, Branch::Plus).unwrap();
        assert_eq!(energy(&p, 1, 0), 1.75);
        let q = derive_params(0.8, 0.4, Branch::Plus).unwrap();
        assert_eq!(energy(&q, 0, 0), (q.eta1 + q.eta2) / 2.0);
        assert!((energy(&q, 1, 0) - (1.5 * q.eta1 + 0.5 * q.eta2)).abs() < 1e-15);
    }

    #[test]
    fn branch_parse() {
        assert_eq!("plus".parse::<Branch>().unwrap(), Branch::Plus);
        assert_eq!("Minus".parse::<Branch>().unwrap(), Branch::Minus);
        assert!("sideways".parse::<Branch>().is_err());
    }
}
