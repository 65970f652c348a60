//! Sliding surface, saturation, and the switching law.

use crate::error::{Error, Result};

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

pub const DEFAULT_SURFACE: Vec4 = [1.0, 2.0, 2.0, 1.0];
pub const DEFAULT_GAIN: Vec4 = [1.0, 0.0, 1.0, 0.0];
pub const DEFAULT_EPSILON: f64 = 0.05;

pub(crate) fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn mat_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = dot(row, v);
    }
    out
}

/// Surface row `C`, gain column `K`, switching gain `q`, reaching gain `r`
/// and boundary-layer width `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub c: Vec4,
    pub k: Vec4,
    pub q: f64,
    pub r: f64,
    pub epsilon: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            c: DEFAULT_SURFACE,
            k: DEFAULT_GAIN,
            q: 1.0,
            r: 1.0,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl ControllerConfig {
    pub fn new(c: Vec4, k: Vec4, q: f64, r: f64, epsilon: f64) -> Result<Self> {
        let cfg = ControllerConfig { c, k, q, r, epsilon };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_gains(q: f64, r: f64) -> Result<Self> {
        Self::new(DEFAULT_SURFACE, DEFAULT_GAIN, q, r, DEFAULT_EPSILON)
    }

    pub fn ck(&self) -> f64 {
        dot(&self.c, &self.k)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidController(m));
        if self.c[3] != 1.0 {
            return bad(format!("last surface coefficient must be 1, got {}", self.c[3]));
        }
        if self.k[1] != 0.0 || self.k[3] != 0.0 {
            return bad("gain entries 2 and 4 (imaginary channels) must be 0".into());
        }
        for (name, v) in [("q", self.q), ("r", self.r), ("epsilon", self.epsilon)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.ck() == 0.0 {
            return Err(Error::UncontrollableSurface { ck: 0.0 });
        }
        if !routh_hurwitz(self.c[0], self.c[1], self.c[2]) {
            return bad(format!(
                "surface {:?} fails the Routh-Hurwitz test for l^3 + c3 l^2 + c2 l + c1",
                self.c
            ));
        }
        Ok(())
    }
}

/// `l^3 + c3 l^2 + c2 l + c1` is Hurwitz iff `c3 > 0`, `c1 > 0`, `c2 c3 > c1`.
pub fn routh_hurwitz(c1: f64, c2: f64, c3: f64) -> bool {
    c3 > 0.0 && c1 > 0.0 && c2 * c3 > c1
}

/// `sign(s)` outside the boundary layer, `s / epsilon` inside it.
pub fn saturation(s: f64, epsilon: f64) -> f64 {
    if s.abs() > epsilon {
        s.signum()
    } else {
        s / epsilon
    }
}

pub fn sliding_value(cfg: &ControllerConfig, e: &Vec4) -> f64 {
    dot(&cfg.c, e)
}

fn checked_ck(cfg: &ControllerConfig) -> Result<f64> {
    let ck = cfg.ck();
    if ck == 0.0 || !ck.is_finite() {
        return Err(Error::UncontrollableSurface { ck });
    }
    Ok(ck)
}

/// Equivalent control `-(CK)^-1 C A e` that holds `ds/dt = 0`.
pub fn balance_control(cfg: &ControllerConfig, a: &Mat4, e: &Vec4) -> Result<f64> {
    let ck = checked_ck(cfg)?;
    Ok(-dot(&cfg.c, &mat_vec(a, e)) / ck)
}

/// `w = -(CK)^-1 [C (r I + A) e + q sat(s)]`.
pub fn switching_control(cfg: &ControllerConfig, a: &Mat4, e: &Vec4) -> Result<f64> {
    let ck = checked_ck(cfg)?;
    let ae = mat_vec(a, e);
    let mut c_term = 0.0;
    for i in 0..4 {
        c_term += cfg.c[i] * (cfg.r * e[i] + ae[i]);
    }
    let s = sliding_value(cfg, e);
    Ok(-(c_term + cfg.q * saturation(s, cfg.epsilon)) / ck)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix() -> Mat4 {
        [
            [0.0, -1.15, 0.17, 0.0],
            [1.15, 0.0, 0.0, 0.17],
            [0.17, 0.0, 0.0, -0.46],
            [0.0, 0.17, 0.46, 0.0],
        ]
    }

    #[test]
    fn routh_cases() {
        assert!(routh_hurwitz(1.0, 2.0, 2.0));
        assert!(!routh_hurwitz(1.0, 1.0, 0.0));
        assert!(routh_hurwitz(6.0, 11.0, 6.0));
        // marginal: c2 c3 == c1 puts a pair on the imaginary axis
        assert!(!routh_hurwitz(4.0, 2.0, 2.0));
        assert!(!routh_hurwitz(-1.0, 2.0, 2.0));
    }

    #[test]
    fn saturation_regions() {
        assert_eq!(saturation(0.5, 0.1), 1.0);
        assert_eq!(saturation(-0.5, 0.1), -1.0);
        assert_eq!(saturation(0.0, 0.3), 0.0);
        assert!((saturation(0.05, 0.1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sliding_values() {
        let cfg = ControllerConfig::default();
        assert_eq!(sliding_value(&cfg, &[0.0; 4]), 0.0);
        assert_eq!(sliding_value(&cfg, &[1.0, 0.0, 0.0, 0.0]), 1.0);
        assert!((sliding_value(&cfg, &[0.1, 0.2, 0.3, 0.4]) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn config_invariants() {
        assert!(ControllerConfig::default().validate().is_ok());
        assert_eq!(ControllerConfig::default().ck(), 3.0);
        assert!(ControllerConfig::new([1.0, 2.0, 2.0, 0.5], DEFAULT_GAIN, 1.0, 1.0, 0.05).is_err());
        assert!(ControllerConfig::new(DEFAULT_SURFACE, [1.0, 1.0, 1.0, 0.0], 1.0, 1.0, 0.05).is_err());
        assert!(ControllerConfig::with_gains(0.0, 1.0).is_err());
        assert!(ControllerConfig::with_gains(1.0, -1.0).is_err());
        assert!(ControllerConfig::new([1.0, 1.0, 0.0, 1.0], DEFAULT_GAIN, 1.0, 1.0, 0.05).is_err());
        // C K = 1 - 1 = 0
        assert!(matches!(
            ControllerConfig::new([1.0, 2.0, -1.0, 1.0], DEFAULT_GAIN, 1.0, 1.0, 0.05),
            Err(Error::UncontrollableSurface { .. }) | Err(Error::InvalidController(_))
        ));
    }

    #[test]
    fn switching_zero_error() {
        let cfg = ControllerConfig::default();
        assert_eq!(switching_control(&cfg, &test_matrix(), &[0.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn switching_reduces_to_balance_without_gains() {
        let cfg = ControllerConfig { q: 0.0, r: 0.0, ..ControllerConfig::default() };
        let a = test_matrix();
        let e = [0.3, -0.1, 0.7, 0.2];
        let w = switching_control(&cfg, &a, &e).unwrap();
        let weq = balance_control(&cfg, &a, &e).unwrap();
        assert!((w - weq).abs() < 1e-15);
    }

    #[test]
    fn switching_matches_explicit_arithmetic() {
        let cfg = ControllerConfig::default();
        let a = test_matrix();
        let e = [0.3, -0.1, 0.7, 0.2];
        let mut cre = 0.0;
        for i in 0..4 {
            let mut row = cfg.r * e[i];
            for j in 0..4 {
                row += a[i][j] * e[j];
            }
            cre += cfg.c[i] * row;
        }
        let s = 0.3 - 0.2 + 1.4 + 0.2;
        let want = -(cre + saturation(s, 0.05)) / 3.0;
        assert!((switching_control(&cfg, &a, &e).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn uncontrollable_surface_error() {
        let cfg = ControllerConfig { k: [1.0, 0.0, -0.5, 0.0], c: [1.0, 2.0, 2.0, 1.0], ..ControllerConfig::default() };
        assert!(matches!(
            switching_control(&cfg, &test_matrix(), &[1.0; 4]),
            Err(Error::UncontrollableSurface { .. })
        ));
    }
}
