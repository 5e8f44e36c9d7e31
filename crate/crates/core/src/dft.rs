//! Thin wrappers over `rustfft` with the unitary scaling used throughout the crate.
//!
//! The forward transform is `X[k] = n^{-1/2} Σ_m x[m] e^{-j2πkm/n}`, so `X[k]` is the
//! inner product of `x` with the grid steering vector at `f = k/n`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse unitary transforms of one fixed length.
#[derive(Clone)]
pub struct UnitaryDft {
    n: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for UnitaryDft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitaryDft").field("n", &self.n).finish()
    }
}

impl UnitaryDft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "transform length mismatch");
        self.forward.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "transform length mismatch");
        self.inverse.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.inverse_in_place(&mut buf);
        buf
    }
}

/// Unitary forward DFT of `x`.
pub fn unitary_dft(x: &[Complex64]) -> Vec<Complex64> {
    UnitaryDft::new(x.len()).forward(x)
}

/// Unitary inverse DFT of `x`.
pub fn unitary_idft(x: &[Complex64]) -> Vec<Complex64> {
    UnitaryDft::new(x.len()).inverse(x)
}

/// Linear cross-correlation `y[h] = Σ_n conj(template[n]) · signal[h + n]` for
/// `h = 0 .. signal.len()`, treating samples past the end of `signal` as zero.
pub fn cross_correlate(signal: &[Complex64], template: &[Complex64]) -> Vec<Complex64> {
    if signal.is_empty() || template.is_empty() {
        return vec![Complex64::new(0.0, 0.0); signal.len()];
    }
    let size = (signal.len() + template.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut a = vec![Complex64::new(0.0, 0.0); size];
    a[..signal.len()].copy_from_slice(signal);
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    b[..template.len()].copy_from_slice(template);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    inv.process(&mut a);
    let norm = 1.0 / size as f64;
    a.truncate(signal.len());
    a.iter_mut().for_each(|z| *z *= norm);
    a
}

/// Full linear convolution of `signal` with `taps` (length `signal.len() + taps.len() - 1`).
pub fn convolve(signal: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    if signal.is_empty() || taps.is_empty() {
        return Vec::new();
    }
    let out_len = signal.len() + taps.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut a = vec![Complex64::new(0.0, 0.0); size];
    a[..signal.len()].copy_from_slice(signal);
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    for (dst, &t) in b.iter_mut().zip(taps) {
        dst.re = t;
    }
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let norm = 1.0 / size as f64;
    a.truncate(out_len);
    a.iter_mut().for_each(|z| *z *= norm);
    a
}
