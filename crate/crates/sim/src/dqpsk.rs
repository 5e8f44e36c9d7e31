use std::f64::consts::{FRAC_PI_4, PI};

use notchwave_core::dft::convolve;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::filters::{kaiser_lowpass, rrc_taps};

/// Baseband π/4-DQPSK link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DqpskParams {
    pub sample_rate: f64,
    pub symbol_rate: f64,
    pub roll_off: f64,
    /// Carrier offset from the center of the simulated band, in Hz.
    pub offset_hz: f64,
    /// RRC half-length in symbols.
    pub span_symbols: usize,
}

impl Default for DqpskParams {
    fn default() -> Self {
        Self { sample_rate: 20e6, symbol_rate: 400e3, roll_off: 0.25, offset_hz: 8.5e6, span_symbols: 8 }
    }
}

impl DqpskParams {
    pub fn samples_per_symbol(&self) -> Result<usize> {
        let sps = self.sample_rate / self.symbol_rate;
        if !(sps >= 2.0) || (sps - sps.round()).abs() > 1e-9 {
            return Err(SimError::param("symbol_rate", "sample rate must be an integer multiple (≥ 2) of the symbol rate"));
        }
        Ok(sps.round() as usize)
    }

    /// Occupied bandwidth `(1 + α)·R_s`.
    pub fn occupied_bandwidth(&self) -> f64 {
        (1.0 + self.roll_off) * self.symbol_rate
    }

    /// Checks the signal fits in `allowed` Hz and inside `[-fs/2, fs/2]`.
    pub fn check_bandwidth(&self, allowed: f64) -> Result<()> {
        let occupied = self.occupied_bandwidth();
        if occupied > allowed * (1.0 + 1e-12) {
            return Err(SimError::Bandwidth { occupied, allowed });
        }
        if self.offset_hz.abs() + occupied / 2.0 > self.sample_rate / 2.0 {
            return Err(SimError::param("offset_hz", "signal extends past ±fs/2"));
        }
        Ok(())
    }

    fn taps(&self) -> Result<Vec<f64>> {
        rrc_taps(self.roll_off, self.samples_per_symbol()?, self.span_symbols)
    }

    /// Channel-select filter: flat over the occupied band, 100 dB down from twice its
    /// half-width on, so strong interference next to the channel cannot leak through the
    /// truncated RRC's sidelobes.
    fn channel_filter(&self) -> Result<Vec<f64>> {
        let half = self.occupied_bandwidth() / 2.0 / self.sample_rate;
        kaiser_lowpass(half, (2.0 * half).min(0.49), 100.0)
    }

    /// Samples a burst needs between itself and either end of a capture so that the
    /// receive filters never straddle the capture edge.
    pub fn receiver_margin(&self) -> Result<usize> {
        Ok(self.channel_filter()?.len() / 2)
    }
}

/// Phase increment for one bit pair: 00 → π/4, 01 → 3π/4, 10 → −π/4, 11 → −3π/4.
pub fn transition(b0: bool, b1: bool) -> f64 {
    match (b0, b1) {
        (false, false) => FRAC_PI_4,
        (false, true) => 3.0 * FRAC_PI_4,
        (true, false) => -FRAC_PI_4,
        (true, true) => -3.0 * FRAC_PI_4,
    }
}

/// Nearest transition, read off the quadrant of `(cos θ, sin θ)`.
pub fn decide(theta: f64) -> (bool, bool) {
    (theta.sin() < 0.0, theta.cos() < 0.0)
}

/// Unit-modulus symbols: a phase reference followed by one symbol per bit pair.
pub fn dqpsk_symbols(bits: &[bool]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(SimError::OddBitCount(bits.len()));
    }
    let mut phase = 0.0;
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for pair in bits.chunks_exact(2) {
        phase = (phase + transition(pair[0], pair[1])) % (2.0 * PI);
        out.push(Complex64::from_polar(1.0, phase));
    }
    Ok(out)
}

fn mix(c: &mut [Complex64], freq_hz: f64, fs: f64) {
    let w = 2.0 * PI * freq_hz / fs;
    for (n, z) in c.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, w * n as f64);
    }
}

/// RRC-shaped, carrier-shifted π/4-DQPSK burst with unit energy per symbol.
///
/// Symbol `k` peaks at sample `(k + span)·sps`; the burst is
/// `(n_sym − 1 + 2·span)·sps + 1` samples long.
pub fn dqpsk_modulate(bits: &[bool], params: &DqpskParams) -> Result<Vec<Complex64>> {
    let symbols = dqpsk_symbols(bits)?;
    let sps = params.samples_per_symbol()?;
    let taps = params.taps()?;
    let mut impulses = vec![Complex64::new(0.0, 0.0); (symbols.len() - 1) * sps + 1];
    for (k, s) in symbols.iter().enumerate() {
        impulses[k * sps] = *s;
    }
    let mut out = convolve(&impulses, &taps);
    mix(&mut out, params.offset_hz, params.sample_rate);
    Ok(out)
}

/// Output of [`dqpsk_demodulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    pub bits: Vec<bool>,
    /// Differential phases `θ_d` in `(−π, π]`.
    pub transitions: Vec<f64>,
    /// `(a_I, a_Q) = (cos θ_d, sin θ_d)`.
    pub scatter: Vec<(f64, f64)>,
    /// Capture index at which the phase-reference symbol's pulse peaks.
    pub timing: usize,
}

/// Filter outputs whose taps lie entirely inside `x`; output `i` is centered on input
/// `i + (taps.len() − 1)/2`.
fn valid_filter(x: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    if x.len() < taps.len() {
        return Vec::new();
    }
    convolve(x, taps)[taps.len() - 1..x.len()].to_vec()
}

/// Recovers `n_bits` bits from a received capture containing one burst.
///
/// Mixes down, applies a channel-select low-pass and the RRC matched filter, then picks
/// the symbol-spaced sampling instants that collect the most energy. Only filter outputs
/// computed entirely from captured samples are searched, so a burst needs
/// [`DqpskParams::receiver_margin`] samples of capture on either side.
pub fn dqpsk_demodulate(rx: &[Complex64], params: &DqpskParams, n_bits: usize) -> Result<Demodulated> {
    if n_bits % 2 != 0 {
        return Err(SimError::OddBitCount(n_bits));
    }
    let sps = params.samples_per_symbol()?;
    let n_sym = n_bits / 2 + 1;
    let taps = params.taps()?;
    let select = params.channel_filter()?;
    let mut base = rx.to_vec();
    mix(&mut base, -params.offset_hz, params.sample_rate);
    let y = valid_filter(&valid_filter(&base, &select), &taps);
    let offset = (select.len() - 1) / 2 + (taps.len() - 1) / 2;
    let needed = (n_sym - 1) * sps + 1;
    if y.len() < needed {
        return Err(SimError::SyncFailure(format!(
            "capture of {} samples is shorter than one {}-symbol burst",
            rx.len(),
            n_sym
        )));
    }

    let power: Vec<f64> = y.iter().map(|z| z.norm_sqr()).collect();
    let timing = (0..=y.len() - needed)
        .map(|t| (t, (0..n_sym).map(|k| power[t + k * sps]).sum::<f64>()))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;

    let samples: Vec<Complex64> = (0..n_sym).map(|k| y[timing + k * sps]).collect();
    let transitions: Vec<f64> = samples.windows(2).map(|w| (w[1] * w[0].conj()).arg()).collect();
    let scatter = transitions.iter().map(|t| (t.cos(), t.sin())).collect();
    let bits = transitions
        .iter()
        .flat_map(|&t| {
            let (b0, b1) = decide(t);
            [b0, b1]
        })
        .collect();
    Ok(Demodulated { bits, transitions, scatter, timing: timing + offset })
}

/// Fraction of differing positions, in percent.
pub fn bit_error_rate_pct(sent: &[bool], received: &[bool]) -> f64 {
    let errors = sent.iter().zip(received).filter(|(a, b)| a != b).count();
    100.0 * errors as f64 / sent.len().max(1) as f64
}
