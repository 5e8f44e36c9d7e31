//! Uniform mid-rise DAC quantization of complex waveforms and its error statistics.

use num_complex::Complex64;

use crate::analysis::{notch_depth, welch_psd, BandDepth, NotchConfig, WelchConfig};
use crate::error::{Error, Result};
use crate::sequence::ComplexSequence;
use crate::spectral::StopBand;

/// Largest supported bit depth; beyond this the step falls below `f64` resolution on [-1, 1].
pub const MAX_BITS: u32 = 48;

fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::param("bits", format!("must be in 1..={MAX_BITS}")));
    }
    Ok(())
}

/// Quantization step `Δ_b = 2 / 2^b`.
pub fn step(bits: u32) -> f64 {
    2.0 / 2f64.powi(bits as i32)
}

/// Error variance `Δ_b² / 12` of a uniform quantizer.
pub fn theory_variance(bits: u32) -> f64 {
    let d = step(bits);
    d * d / 12.0
}

/// Maps `x ∈ [-1, 1]` to the nearest of the `2^b` levels `-1 + Δ/2 + kΔ`.
pub fn quantize_part(x: f64, bits: u32) -> f64 {
    let d = step(bits);
    let top = 2f64.powi(bits as i32) - 1.0;
    let k = ((x + 1.0) / d).floor().clamp(0.0, top);
    -1.0 + d * (k + 0.5)
}

/// Quantizes real and imaginary parts independently.
pub fn quantize(c: &[Complex64], bits: u32) -> Result<ComplexSequence> {
    check_bits(bits)?;
    for (index, z) in c.iter().enumerate() {
        for v in [z.re, z.im] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { index, value: v });
            }
        }
    }
    ComplexSequence::new(c.iter().map(|z| Complex64::new(quantize_part(z.re, bits), quantize_part(z.im, bits))).collect())
}

/// Scales `c` so that the largest real or imaginary magnitude is exactly 1.
///
/// Returns the normalized sequence and the factor applied (`normalized = c · scale`).
pub fn full_scale_normalize(c: &[Complex64]) -> Result<(ComplexSequence, f64)> {
    let peak = c.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::ZeroSignal);
    }
    // Division (not multiplication by 1/peak) keeps the peak component exactly at ±1.
    let out: Vec<Complex64> = c.iter().map(|z| Complex64::new(z.re / peak, z.im / peak)).collect();
    Ok((ComplexSequence::new(out)?, 1.0 / peak))
}

/// Binned counts of the real-part error over `[-Δ/2, Δ/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationReport {
    pub bits: u32,
    pub step: f64,
    /// `‖c − č_b‖²`.
    pub energy_diff: f64,
    pub est_variance_re: f64,
    pub est_variance_im: f64,
    pub theory_variance: f64,
    pub error_histogram: ErrorHistogram,
}

/// Default bin count of [`QuantizationReport::error_histogram`].
pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

fn sample_variance(x: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = x.clone().count() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mean = x.clone().sum::<f64>() / n;
    x.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

pub fn quantization_report(c: &[Complex64], bits: u32, histogram_bins: usize) -> Result<QuantizationReport> {
    if histogram_bins == 0 {
        return Err(Error::param("histogram_bins", "must be positive"));
    }
    let q = quantize(c, bits)?;
    let err: Vec<Complex64> = c.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
    let energy_diff = crate::sequence::energy(&err);
    let d = step(bits);

    let mut counts = vec![0u64; histogram_bins];
    for e in &err {
        let pos = ((e.re + d / 2.0) / d * histogram_bins as f64).floor();
        counts[(pos.max(0.0) as usize).min(histogram_bins - 1)] += 1;
    }
    let edges = (0..=histogram_bins).map(|i| -d / 2.0 + d * i as f64 / histogram_bins as f64).collect();

    Ok(QuantizationReport {
        bits,
        step: d,
        energy_diff,
        est_variance_re: sample_variance(err.iter().map(|e| e.re)),
        est_variance_im: sample_variance(err.iter().map(|e| e.im)),
        theory_variance: theory_variance(bits),
        error_histogram: ErrorHistogram { edges, counts },
    })
}

/// Measured notch depths of a quantized waveform at one bit depth.
#[derive(Debug, Clone, PartialEq)]
pub struct NotchDegradation {
    pub bits: u32,
    pub bands: Vec<BandDepth>,
}

impl NotchDegradation {
    /// Average over bands of the mean in-band depth.
    pub fn mean_depth_db(&self) -> f64 {
        self.bands.iter().map(|b| b.depth_mean_db).sum::<f64>() / self.bands.len() as f64
    }
}

/// Full-scale normalizes `c`, quantizes it at every bit depth and meters the notches.
pub fn notch_degradation(
    c: &[Complex64],
    bands: &[StopBand],
    bits: &[u32],
    welch: &WelchConfig,
    notch: &NotchConfig,
) -> Result<Vec<NotchDegradation>> {
    let (normalized, _) = full_scale_normalize(c)?;
    bits.iter()
        .map(|&b| {
            let q = quantize(&normalized, b)?;
            let psd = welch_psd(&q, welch)?;
            Ok(NotchDegradation { bits: b, bands: notch_depth(&psd, bands, notch)?.bands })
        })
        .collect()
}
