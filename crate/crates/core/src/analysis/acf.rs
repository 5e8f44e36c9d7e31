use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcfConfig {
    /// Largest lag reported and searched for sidelobes; `None` covers every lag.
    pub max_lag: Option<usize>,
    /// Lags with `|l| < mainlobe` belong to the mainlobe.
    pub mainlobe: usize,
}

impl Default for AcfConfig {
    fn default() -> Self {
        Self { max_lag: Some(20), mainlobe: 2 }
    }
}

impl AcfConfig {
    pub fn full_range() -> Self {
        Self { max_lag: None, ..Self::default() }
    }
}

/// Normalized aperiodic autocorrelation over lags `-L..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfResult {
    pub lags: Vec<i64>,
    pub magnitude_db: Vec<f64>,
    /// Peak sidelobe level in dB; `-inf` when no lag lies outside the mainlobe.
    pub psll_db: f64,
}

/// `r(l) = Σ_i c(i) c*(i − l)` for `l = 0..n`, via a zero-padded FFT.
fn raw_acf(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    buf[..n].copy_from_slice(c);
    planner.plan_fft_forward(size).process(&mut buf);
    buf.iter_mut().for_each(|z| *z = Complex64::new(z.norm_sqr(), 0.0));
    planner.plan_fft_inverse(size).process(&mut buf);
    buf.truncate(n);
    buf.iter_mut().for_each(|z| *z /= size as f64);
    buf
}

pub fn autocorrelation(c: &[Complex64], cfg: &AcfConfig) -> Result<AcfResult> {
    let n = c.len();
    if n < 2 {
        return Err(Error::param("c", "autocorrelation needs at least two samples"));
    }
    let r = raw_acf(c);
    let r0 = r[0].re;
    if r0 <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    let max_lag = cfg.max_lag.unwrap_or(n - 1).min(n - 1);
    let mag_db: Vec<f64> = r[..=max_lag]
        .iter()
        .map(|z| (20.0 * (z.norm() / r0).log10()).min(0.0))
        .collect();
    let psll_db = mag_db.iter().skip(cfg.mainlobe).copied().fold(f64::NEG_INFINITY, f64::max);
    // |r(−l)| = |r(l)| for the aperiodic autocorrelation, so the negative side mirrors.
    let lags = (-(max_lag as i64)..=max_lag as i64).collect();
    let magnitude_db = mag_db.iter().rev().chain(mag_db.iter().skip(1)).copied().collect();
    Ok(AcfResult { lags, magnitude_db, psll_db })
}

/// Peak sidelobe level of `c` in dB.
pub fn psll_db(c: &[Complex64], cfg: &AcfConfig) -> Result<f64> {
    autocorrelation(c, cfg).map(|r| r.psll_db)
}
