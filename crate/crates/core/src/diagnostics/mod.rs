//! Spectra, delay embedding and largest-Lyapunov-exponent estimation.

pub mod embed;
pub mod lyapunov;
pub mod report;
pub mod spectrum;

pub use embed::delay_embed;
pub use lyapunov::{
    largest_lyapunov, largest_lyapunov_default, mean_period, DivergenceCurve, LleResult,
    DEFAULT_EMBED_DIM, DEFAULT_TAUS, MIN_LLE_LEN,
};
pub use report::{chaos_report, ChaosRow, ChaosTable, LleSettings, ReportEntry};
pub use spectrum::{
    hann, periodogram, spectral_flatness, SpectrumResult, DOMINANT_FRACTION, MIN_SPECTRUM_LEN,
    PEAK_DB,
};
