use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

pub const MIN_SPECTRUM_LEN: usize = 64;
/// Peak threshold above the median power, in dB.
pub const PEAK_DB: f64 = 10.0;
/// Share of total power a peak needs to count as dominant.
pub const DOMINANT_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Bin frequencies `k / (N dt)` for `k = 0..=N/2`.
    pub freqs: Vec<f64>,
    /// One-sided power; sums to the mean square of the windowed series.
    pub power: Vec<f64>,
    /// `(freq, power)` local maxima more than `PEAK_DB` above the median,
    /// strongest first.
    pub peaks: Vec<(f64, f64)>,
    pub flatness: f64,
}

impl SpectrumResult {
    /// Power excluding the DC bin.
    pub fn total_power(&self) -> f64 {
        self.power.iter().skip(1).sum()
    }

    pub fn dominant_peaks(&self, fraction: f64) -> Vec<(f64, f64)> {
        let total = self.total_power();
        self.peaks
            .iter()
            .copied()
            .filter(|&(_, p)| total > 0.0 && p >= fraction * total)
            .collect()
    }

    /// Fraction of non-DC power carried by the `n` strongest peaks.
    pub fn top_peak_fraction(&self, n: usize) -> f64 {
        let total = self.total_power();
        if total <= 0.0 {
            return 0.0;
        }
        self.peaks.iter().take(n).map(|p| p.1).sum::<f64>() / total
    }
}

pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / m).cos()))
        .collect()
}

/// Mean-removed, Hann-windowed one-sided periodogram.
pub fn periodogram(series: &[f64], dt_sample: f64) -> Result<SpectrumResult> {
    let n = series.len();
    if n < MIN_SPECTRUM_LEN {
        return Err(Error::SeriesTooShort { len: n, min: MIN_SPECTRUM_LEN });
    }
    if !(dt_sample > 0.0 && dt_sample.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt_sample must be > 0, got {dt_sample}")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .zip(hann(n))
        .map(|(x, w)| Complex::new((x - mean) * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let nf = n as f64;
    let power: Vec<f64> = (0..=half)
        .map(|k| {
            let twice = k != 0 && !(n % 2 == 0 && k == half);
            let scale = if twice { 2.0 } else { 1.0 };
            scale * buf[k].norm_sqr() / (nf * nf)
        })
        .collect();
    let freqs: Vec<f64> = (0..=half).map(|k| k as f64 / (nf * dt_sample)).collect();
    let peaks = find_peaks(&freqs, &power);
    let flatness = flatness_of(&power[1..]);
    Ok(SpectrumResult { freqs, power, peaks, flatness })
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

fn find_peaks(freqs: &[f64], power: &[f64]) -> Vec<(f64, f64)> {
    let body = &power[1..];
    if body.len() < 3 {
        return Vec::new();
    }
    let floor = median(body) * 10f64.powf(PEAK_DB / 10.0);
    let last = power.len() - 1;
    let mut peaks: Vec<(f64, f64)> = (1..power.len())
        .filter(|&k| {
            let left = power[k] > power[k - 1] || k == 1;
            let right = k == last || power[k] >= power[k + 1];
            left && right && power[k] > floor
        })
        .map(|k| (freqs[k], power[k]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    peaks
}

fn flatness_of(power: &[f64]) -> f64 {
    if power.is_empty() {
        return 0.0;
    }
    let arith = power.iter().sum::<f64>() / power.len() as f64;
    if arith <= 0.0 || power.iter().any(|&p| p <= 0.0) {
        return 0.0;
    }
    let geo = (power.iter().map(|p| p.ln()).sum::<f64>() / power.len() as f64).exp();
    (geo / arith).clamp(0.0, 1.0)
}

/// Geometric over arithmetic mean of the non-DC power.
pub fn spectral_flatness(spec: &SpectrumResult) -> f64 {
    flatness_of(spec.power.get(1..).unwrap_or(&[]))
}
