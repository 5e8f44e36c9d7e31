use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SimError};

/// Unit-energy linear FM pulse sweeping `offset ± bandwidth/2`.
pub fn chirp_pulse(bandwidth: f64, pulse_width: f64, fs: f64, offset: f64) -> Result<Vec<Complex64>> {
    if !(bandwidth > 0.0 && bandwidth <= fs) {
        return Err(SimError::param("bandwidth", "must lie in (0, fs]"));
    }
    if offset.abs() + bandwidth / 2.0 > fs / 2.0 + 1e-9 {
        return Err(SimError::param("offset", "chirp extends past ±fs/2"));
    }
    let n = (pulse_width * fs).round() as usize;
    if n < 2 {
        return Err(SimError::param("pulse_width", "pulse must span at least two samples"));
    }
    let t_len = n as f64 / fs;
    let rate = bandwidth / t_len;
    let amp = 1.0 / (n as f64).sqrt();
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let phase = 2.0 * PI * ((offset - bandwidth / 2.0) * t + 0.5 * rate * t * t);
            Complex64::from_polar(amp, phase)
        })
        .collect())
}

/// FFT correlator against a fixed template for segments of one length.
pub struct MatchedFilter {
    template_len: usize,
    segment_len: usize,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl MatchedFilter {
    pub fn new(template: &[Complex64], segment_len: usize) -> Result<Self> {
        if template.is_empty() || segment_len < template.len() {
            return Err(SimError::param("segment_len", "segments must be at least as long as the template"));
        }
        let size = segment_len.next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); size];
        spectrum[..template.len()].copy_from_slice(template);
        forward.process(&mut spectrum);
        let scale = 1.0 / size as f64;
        spectrum.iter_mut().for_each(|z| *z = z.conj() * scale);
        Ok(Self { template_len: template.len(), segment_len, spectrum, forward, inverse })
    }

    /// Number of fully overlapped lags `segment_len − template_len + 1`.
    pub fn output_len(&self) -> usize {
        self.segment_len - self.template_len + 1
    }

    /// `y[h] = Σ_n conj(s[n]) x[h + n]` for the fully overlapped lags.
    pub fn apply(&self, segment: &[Complex64]) -> Result<Vec<Complex64>> {
        if segment.len() != self.segment_len {
            return Err(SimError::param("segment", format!("expected {} samples, got {}", self.segment_len, segment.len())));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.spectrum.len()];
        buf[..segment.len()].copy_from_slice(segment);
        self.forward.process(&mut buf);
        buf.iter_mut().zip(&self.spectrum).for_each(|(x, s)| *x *= s);
        self.inverse.process(&mut buf);
        buf.truncate(self.output_len());
        Ok(buf)
    }
}

/// Sum of the first `m` per-pulse outputs.
pub fn coherent_sum(outputs: &[Vec<Complex64>], m: usize) -> Result<Vec<Complex64>> {
    if m == 0 || m > outputs.len() {
        return Err(SimError::param("pulses", format!("must lie in 1..={}", outputs.len())));
    }
    let len = outputs[0].len();
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    for out in &outputs[..m] {
        acc.iter_mut().zip(out).for_each(|(a, b)| *a += b);
    }
    Ok(acc)
}

/// `max_h |y_R(h)|² / mean_h |y_J(h)|²` in dB.
pub fn estimate_sinr(y_radar: &[Complex64], y_jam: &[Complex64]) -> Result<f64> {
    if y_jam.is_empty() || y_radar.is_empty() {
        return Err(SimError::param("y_jam", "need at least one sample in each window"));
    }
    let peak = y_radar.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let floor = y_jam.iter().map(|z| z.norm_sqr()).sum::<f64>() / y_jam.len() as f64;
    if floor <= 0.0 {
        return Err(SimError::param("y_jam", "interference-plus-noise window has zero power"));
    }
    Ok(10.0 * (peak / floor).log10())
}
