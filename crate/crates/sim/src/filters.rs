//! FIR designs used by the link simulation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Result, SimError};

/// Root-raised-cosine taps spanning `span` symbols on each side of the peak,
/// `2·span·sps + 1` taps in total, scaled to unit energy.
pub fn rrc_taps(roll_off: f64, sps: usize, span: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&roll_off) {
        return Err(SimError::param("roll_off", "must lie in [0, 1]"));
    }
    if sps < 2 || span == 0 {
        return Err(SimError::param("sps", "need at least two samples per symbol and a nonzero span"));
    }
    let a = roll_off;
    let mid = (span * sps) as isize;
    let mut taps: Vec<f64> = (-mid..=mid)
        .map(|i| {
            let t = i as f64 / sps as f64;
            if i == 0 {
                1.0 - a + 4.0 * a / PI
            } else if a > 0.0 && ((4.0 * a * t).abs() - 1.0).abs() < 1e-12 {
                let x = PI / (4.0 * a);
                a * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * x.sin() + (1.0 - 2.0 / PI) * x.cos())
            } else {
                let num = (PI * t * (1.0 - a)).sin() + 4.0 * a * t * (PI * t * (1.0 + a)).cos();
                num / (PI * t * (1.0 - (4.0 * a * t).powi(2)))
            }
        })
        .collect();
    let norm = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|v| *v /= norm);
    Ok(taps)
}

/// Zeroth-order modified Bessel function of the first kind, by its power series.
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let (mut term, mut sum, mut k) = (1.0, 1.0, 1.0);
    while term > 1e-17 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Kaiser-windowed sinc low-pass with unit DC gain.
///
/// `pass` and `stop` are band edges in cycles per sample; `atten_db` is the minimum
/// stop-band attenuation. The tap count is odd, so the delay is `(len − 1)/2` samples.
pub fn kaiser_lowpass(pass: f64, stop: f64, atten_db: f64) -> Result<Vec<f64>> {
    if !(0.0 < pass && pass < stop && stop < 0.5) {
        return Err(SimError::param("stop", "need 0 < pass < stop < 0.5 cycles per sample"));
    }
    if !(atten_db > 21.0) {
        return Err(SimError::param("atten_db", "must exceed 21 dB"));
    }
    let beta = if atten_db > 50.0 { 0.1102 * (atten_db - 8.7) } else { 0.5842 * (atten_db - 21.0).powf(0.4) + 0.07886 * (atten_db - 21.0) };
    let order = ((atten_db - 7.95) / (14.36 * (stop - pass))).ceil() as usize;
    let half = order.div_ceil(2);
    let fc = (pass + stop) / 2.0;
    let i0b = bessel_i0(beta);
    let mut taps: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let m = i as f64 - half as f64;
            let sinc = if m == 0.0 { 2.0 * fc } else { (2.0 * PI * fc * m).sin() / (PI * m) };
            let r = m / half as f64;
            sinc * bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0b
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= dc);
    Ok(taps)
}
