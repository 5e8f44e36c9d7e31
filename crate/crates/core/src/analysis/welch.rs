use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::window::Window;
use crate::error::{Error, Result};

/// Smallest linear power mapped to dB, keeping exact zeros finite.
const POWER_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchConfig {
    pub segment_len: usize,
    /// Fraction of a segment shared with the next one, in `[0, 1)`.
    pub overlap: f64,
    pub window: Window,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self { segment_len: 1000, overlap: 0.5, window: Window::BlackmanHarris4 }
    }
}

impl WelchConfig {
    pub fn with_segment_len(segment_len: usize) -> Self {
        Self { segment_len, ..Self::default() }
    }

    fn hop(&self) -> usize {
        ((self.segment_len as f64 * (1.0 - self.overlap)).round() as usize).max(1)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.segment_len == 0 {
            return Err(Error::param("segment_len", "must be positive"));
        }
        if self.segment_len > n {
            return Err(Error::param("segment_len", format!("{} exceeds signal length {n}", self.segment_len)));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::param("overlap", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Reference level used when expressing a PSD in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    Absolute,
    /// Relative to the mean of the estimate itself.
    OwnMean,
    /// Relative to a given linear level, typically another estimate's mean.
    Reference(f64),
}

/// Two-sided PSD on the natural FFT grid `k / n`, `k = 0..n`, in cycles per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub frequencies: Vec<f64>,
    /// Linear power density per bin.
    pub power: Vec<f64>,
    pub normalization: Normalization,
    pub segments: usize,
}

impl PsdEstimate {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        self.power.iter().sum::<f64>() / self.power.len() as f64
    }

    pub fn normalized(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Linear level that maps to 0 dB.
    pub fn reference_level(&self) -> f64 {
        match self.normalization {
            Normalization::Absolute => 1.0,
            Normalization::OwnMean => self.mean_power(),
            Normalization::Reference(level) => level,
        }
    }

    pub fn power_db(&self) -> Vec<f64> {
        let r = self.reference_level();
        self.power.iter().map(|&p| 10.0 * (p.max(POWER_FLOOR) / r).log10()).collect()
    }

    /// `(frequency in Hz, dB)` pairs ordered from `-fs/2` upward.
    pub fn centered_hz(&self, sample_rate: f64) -> Vec<(f64, f64)> {
        let n = self.len();
        let db = self.power_db();
        let half = n.div_ceil(2);
        (0..n)
            .map(|i| {
                let k = (i + half) % n;
                let f = if k >= half { k as f64 - n as f64 } else { k as f64 };
                (f * sample_rate / n as f64, db[k])
            })
            .collect()
    }
}

fn segment_starts(n: usize, cfg: &WelchConfig) -> Vec<usize> {
    (0..=(n - cfg.segment_len) / cfg.hop()).map(|i| i * cfg.hop()).collect()
}

/// Windowed periodograms `|FFT(w·x)|² / Σw²` of every segment, in segment order.
fn periodograms(c: &[Complex64], cfg: &WelchConfig) -> Vec<Vec<f64>> {
    let len = cfg.segment_len;
    let w = cfg.window.coefficients(len);
    let gain: f64 = w.iter().map(|v| v * v).sum();
    let fft = FftPlanner::new().plan_fft_forward(len);
    segment_starts(c.len(), cfg)
        .par_iter()
        .map(|&s| {
            let mut buf: Vec<Complex64> = c[s..s + len].iter().zip(&w).map(|(x, &wi)| x * wi).collect();
            fft.process(&mut buf);
            buf.iter().map(|z| z.norm_sqr() / gain).collect()
        })
        .collect()
}

/// Welch estimate: the average of the segment periodograms.
pub fn welch_psd(c: &[Complex64], cfg: &WelchConfig) -> Result<PsdEstimate> {
    cfg.validate(c.len())?;
    let segs = periodograms(c, cfg);
    let mut power = vec![0.0; cfg.segment_len];
    for p in &segs {
        for (acc, v) in power.iter_mut().zip(p) {
            *acc += v;
        }
    }
    let count = segs.len() as f64;
    power.iter_mut().for_each(|v| *v /= count);
    Ok(PsdEstimate {
        frequencies: (0..cfg.segment_len).map(|k| k as f64 / cfg.segment_len as f64).collect(),
        power,
        normalization: Normalization::Absolute,
        segments: segs.len(),
    })
}

/// Short-time periodograms in dB relative to the largest value over the whole matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// Start sample of every time slice.
    pub starts: Vec<usize>,
    pub frequencies: Vec<f64>,
    /// `power_db[slice][bin]`.
    pub power_db: Vec<Vec<f64>>,
}

/// Spectrogram with the given segmenting; the common choice is 200 samples at 50 % overlap.
pub fn spectrogram(c: &[Complex64], cfg: &WelchConfig) -> Result<Spectrogram> {
    cfg.validate(c.len())?;
    let segs = periodograms(c, cfg);
    let peak = segs.iter().flatten().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(Spectrogram {
        starts: segment_starts(c.len(), cfg),
        frequencies: (0..cfg.segment_len).map(|k| k as f64 / cfg.segment_len as f64).collect(),
        power_db: segs
            .into_iter()
            .map(|p| p.into_iter().map(|v| 10.0 * (v.max(POWER_FLOOR) / peak).log10()).collect())
            .collect(),
    })
}
