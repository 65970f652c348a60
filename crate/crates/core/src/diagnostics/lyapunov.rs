//! Largest Lyapunov exponent from a scalar series (Rosenstein's method).
//!
//! Per delay: embed, pair every point with its nearest neighbour outside a
//! temporal exclusion window of one mean period, follow the pairs forward and
//! average `ln` of their separation. The exponent is the least-squares slope of
//! the early part of that curve. The reported value is the median over delays.

use rayon::prelude::*;

use super::embed::delay_embed_flat;
use crate::error::{Error, Result};

pub const MIN_LLE_LEN: usize = 2000;
pub const DEFAULT_EMBED_DIM: usize = 6;
pub const DEFAULT_TAUS: std::ops::RangeInclusive<usize> = 5..=15;
/// Divergence is followed for this many mean periods.
pub const HORIZON_PERIODS: usize = 10;
/// Share of the divergence curve used for the fit.
pub const FIT_FRACTION: f64 = 0.1;
/// The curve counts as flat once it has covered this share of its total rise.
pub const FLAT_RISE: f64 = 0.9;
const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceCurve {
    pub tau: usize,
    /// Mean `ln` separation after `i` samples.
    pub mean_log: Vec<f64>,
    /// Number of leading points used in the fit.
    pub fit_len: usize,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LleResult {
    pub embed_dim: usize,
    pub delays: Vec<usize>,
    pub dt_sample: f64,
    /// Temporal exclusion window, in samples.
    pub exclusion: usize,
    pub divergence_curves: Vec<DivergenceCurve>,
    pub per_delay_slopes: Vec<f64>,
    /// Median of `per_delay_slopes`.
    pub slope: f64,
}

/// Samples per cycle, from upward crossings of the mean.
pub fn mean_period(series: &[f64]) -> Option<f64> {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let ups = series
        .windows(2)
        .filter(|w| w[0] - mean < 0.0 && w[1] - mean >= 0.0)
        .count();
    (ups > 0).then(|| series.len() as f64 / ups as f64)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 0 {
        0.5 * (s[m - 1] + s[m])
    } else {
        s[m]
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn linear_slope(y: &[f64], dt: f64) -> f64 {
    let n = y.len() as f64;
    let tm = (n - 1.0) / 2.0 * dt;
    let ym = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, v) in y.iter().enumerate() {
        let t = i as f64 * dt - tm;
        num += t * (v - ym);
        den += t * t;
    }
    num / den
}

/// Leading points to fit: `FIT_FRACTION` of the curve, cut short where the
/// curve has covered `FLAT_RISE` of its rise.
fn fit_length(curve: &[f64]) -> usize {
    let by_fraction = ((curve.len() as f64 * FIT_FRACTION).round() as usize).max(MIN_FIT_POINTS);
    let start = curve[0];
    let top = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rise = top - start;
    let by_flat = if rise > 0.0 {
        curve
            .iter()
            .position(|&c| c - start >= FLAT_RISE * rise)
            .map_or(curve.len(), |i| i + 1)
    } else {
        curve.len()
    };
    by_fraction.min(by_flat).max(MIN_FIT_POINTS).min(curve.len())
}

fn divergence_curve(
    series: &[f64],
    d: usize,
    tau: usize,
    exclusion: usize,
    horizon: usize,
) -> Result<Vec<f64>> {
    let emb = delay_embed_flat(series, d, tau)?;
    let n = emb.len() / d;
    if n <= horizon + 2 * exclusion + 2 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            min: series.len() + horizon + 2 * exclusion + 3 - n,
        });
    }
    // reference points must be followable for the whole horizon
    let m = n - horizon;
    let point = |i: usize| &emb[i * d..(i + 1) * d];
    let neighbours: Vec<Option<usize>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let pj = point(j);
            let mut best: Option<(f64, usize)> = None;
            for k in 0..m {
                if k.abs_diff(j) <= exclusion {
                    continue;
                }
                let dd = dist2(pj, point(k));
                if dd > 0.0 && best.is_none_or(|(b, _)| dd < b) {
                    best = Some((dd, k));
                }
            }
            best.map(|(_, k)| k)
        })
        .collect();

    let curve: Vec<f64> = (0..horizon)
        .into_par_iter()
        .map(|i| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (j, nb) in neighbours.iter().enumerate() {
                if let Some(k) = nb {
                    let dd = dist2(point(j + i), point(k + i));
                    if dd > 0.0 {
                        sum += 0.5 * dd.ln();
                        count += 1;
                    }
                }
            }
            if count == 0 {
                f64::NAN
            } else {
                sum / count as f64
            }
        })
        .collect();
    if curve.iter().any(|c| !c.is_finite()) {
        return Err(Error::UndefinedExponent(format!(
            "no separable neighbour pairs at delay {tau}"
        )));
    }
    Ok(curve)
}

/// Rosenstein estimate for each delay in `taus`, summarized by the median.
pub fn largest_lyapunov(
    series: &[f64],
    dt_sample: f64,
    d: usize,
    taus: &[usize],
) -> Result<LleResult> {
    if series.len() < MIN_LLE_LEN {
        return Err(Error::SeriesTooShort { len: series.len(), min: MIN_LLE_LEN });
    }
    if !(dt_sample > 0.0 && dt_sample.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt_sample must be > 0, got {dt_sample}")));
    }
    if taus.is_empty() {
        return Err(Error::InvalidArgument("delay list is empty".into()));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let first = series[0];
    if series.iter().all(|&v| v == first) {
        return Err(Error::UndefinedExponent("constant series".into()));
    }
    let period = mean_period(series).unwrap_or(series.len() as f64 / 4.0);
    let exclusion = period.ceil() as usize;
    let horizon = (HORIZON_PERIODS * exclusion).min(series.len() / 4).max(2 * MIN_FIT_POINTS);

    let curves: Vec<DivergenceCurve> = taus
        .iter()
        .map(|&tau| {
            let mean_log = divergence_curve(series, d, tau, exclusion, horizon)?;
            let fit_len = fit_length(&mean_log);
            let slope = linear_slope(&mean_log[..fit_len], dt_sample);
            Ok(DivergenceCurve { tau, mean_log, fit_len, slope })
        })
        .collect::<Result<_>>()?;
    let per_delay_slopes: Vec<f64> = curves.iter().map(|c| c.slope).collect();
    Ok(LleResult {
        embed_dim: d,
        delays: taus.to_vec(),
        dt_sample,
        exclusion,
        slope: median(&per_delay_slopes),
        per_delay_slopes,
        divergence_curves: curves,
    })
}

/// [`largest_lyapunov`] with `d = 6`, delays 5 through 15.
pub fn largest_lyapunov_default(series: &[f64], dt_sample: f64) -> Result<LleResult> {
    let taus: Vec<usize> = DEFAULT_TAUS.collect();
    largest_lyapunov(series, dt_sample, DEFAULT_EMBED_DIM, &taus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let y: Vec<f64> = (0..10).map(|i| 2.0 + 0.5 * i as f64 * 0.1).collect();
        assert!((linear_slope(&y, 0.1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn fit_stops_at_flattening() {
        let mut c: Vec<f64> = (0..10).map(|i| i as f64).collect();
        c.extend(std::iter::repeat_n(9.0, 190));
        // 10% would be 20 points; the curve is 90% risen at index 9 (8.1 needed)
        assert_eq!(fit_length(&c), 10);
        let flat = vec![1.0; 50];
        assert_eq!(fit_length(&flat), 5);
    }

    #[test]
    fn period_of_sine() {
        let x: Vec<f64> = (0..10_000).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 100.0 + 0.3).sin()).collect();
        assert!((mean_period(&x).unwrap() - 100.0).abs() < 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(largest_lyapunov_default(&[1.0; 100], 0.1), Err(Error::SeriesTooShort { .. })));
        assert!(matches!(largest_lyapunov_default(&[1.0; 3000], 0.1), Err(Error::UndefinedExponent(_))));
        let x: Vec<f64> = (0..3000).map(|i| (i as f64 * 0.1).sin()).collect();
        assert!(largest_lyapunov(&x, 0.1, 6, &[]).is_err());
        assert!(largest_lyapunov(&x, -0.1, 6, &[5]).is_err());
    }
}
