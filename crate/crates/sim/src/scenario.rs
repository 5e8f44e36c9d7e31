use std::sync::Arc;

use notchwave_core::analysis::{welch_psd, WelchConfig};
use notchwave_core::projection::{generate_reference, project_notch, ProjectionRequest};
use notchwave_core::qcqp::{design_blockwise, QcqpDesignSpec, SolverConfig};
use notchwave_core::spectral::depth_to_energy;
use notchwave_core::StopBand;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dqpsk::{bit_error_rate_pct, dqpsk_demodulate, dqpsk_modulate, DqpskParams};
use crate::error::{Result, SimError};
use crate::radar::{chirp_pulse, coherent_sum, estimate_sinr, MatchedFilter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommConfig {
    pub offset_hz: f64,
    pub rf_bandwidth_hz: f64,
    pub bits: usize,
    pub symbol_rate: f64,
    pub roll_off: f64,
    pub span_symbols: usize,
    /// Symbol energy over noise density at the demodulator, `E_s/N_0`.
    pub snr_db: f64,
}

impl Default for CommConfig {
    fn default() -> Self {
        Self {
            offset_hz: 8.5e6,
            rf_bandwidth_hz: 500e3,
            bits: 368,
            symbol_rate: 400e3,
            roll_off: 0.25,
            span_symbols: 8,
            snr_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarConfig {
    pub offset_hz: f64,
    pub bandwidth_hz: f64,
    pub pulse_width_s: f64,
    pub pri_s: f64,
    /// Coherent integration lengths to report.
    pub pulses: Vec<usize>,
    pub target_delay_s: f64,
    /// Compressed-peak to noise ratio of a single pulse.
    pub snr_db: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            offset_hz: 2e6,
            bandwidth_hz: 2e6,
            pulse_width_s: 50e-6,
            // Not a divisor of the 5 ms jammer period, so no two pulses see the same jammer segment.
            pri_s: 510e-6,
            pulses: vec![1, 20, 30],
            target_delay_s: 150e-6,
            snr_db: 42.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JammerConfig {
    pub length: usize,
    pub seed: u64,
    /// Stop bands in Hz relative to the band center.
    pub bands_hz: Vec<[f64; 2]>,
    pub depth_db: f64,
    /// Block lengths of the constrained designs; the overlap is half a block.
    pub block_lens: Vec<usize>,
    /// Per-sample power of the unnotched reference over the noise power.
    pub jnr_db: f64,
}

impl Default for JammerConfig {
    fn default() -> Self {
        Self {
            length: 100_000,
            seed: 1,
            bands_hz: vec![[-4e6, -2e6], [4e6, 5e6], [8e6, 9e6]],
            depth_db: 60.0,
            block_lens: vec![5000, 1000],
            jnr_db: 57.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sample_rate: f64,
    /// Complex AWGN power per sample.
    pub noise_power: f64,
    pub trials: usize,
    pub seed: u64,
    pub comm: CommConfig,
    pub radar: RadarConfig,
    pub jammer: JammerConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            sample_rate: 20e6,
            noise_power: 1.0,
            trials: 50,
            seed: 7,
            comm: CommConfig::default(),
            radar: RadarConfig::default(),
            jammer: JammerConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn dqpsk(&self) -> DqpskParams {
        DqpskParams {
            sample_rate: self.sample_rate,
            symbol_rate: self.comm.symbol_rate,
            roll_off: self.comm.roll_off,
            offset_hz: self.comm.offset_hz,
            span_symbols: self.comm.span_symbols,
        }
    }

    /// Stop bands on the normalized grid, each capped at the configured depth.
    pub fn stop_bands(&self) -> Result<Vec<StopBand>> {
        let e = depth_to_energy(self.jammer.depth_db);
        Ok(self
            .jammer
            .bands_hz
            .iter()
            .map(|[lo, hi]| StopBand::from_hz(*lo, *hi, self.sample_rate, e))
            .collect::<std::result::Result<Vec<_>, _>>()?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(SimError::param("sample_rate", "must be positive"));
        }
        if !(self.noise_power > 0.0) {
            return Err(SimError::param("noise_power", "must be positive"));
        }
        if self.trials == 0 {
            return Err(SimError::param("trials", "need at least one snapshot"));
        }
        if self.comm.bits == 0 || self.comm.bits % 2 != 0 {
            return Err(SimError::OddBitCount(self.comm.bits));
        }
        self.dqpsk().check_bandwidth(self.comm.rf_bandwidth_hz)?;
        self.stop_bands()?;

        let half = self.comm.rf_bandwidth_hz / 2.0;
        let (lo, hi) = (self.comm.offset_hz - half, self.comm.offset_hz + half);
        if !self.jammer.bands_hz.is_empty() && !self.jammer.bands_hz.iter().any(|b| b[0] <= lo && hi <= b[1]) {
            return Err(SimError::param("comm", "communication band is not inside any declared stop band"));
        }

        let r = &self.radar;
        if r.pulses.is_empty() || r.pulses.contains(&0) {
            return Err(SimError::param("radar.pulses", "need positive integration lengths"));
        }
        let pulse = (r.pulse_width_s * self.sample_rate).round();
        if (r.target_delay_s * self.sample_rate).round() + pulse > (r.pri_s * self.sample_rate).round() {
            return Err(SimError::param("radar.target_delay_s", "echo does not fit inside one PRI"));
        }
        if self.jammer.length == 0 || self.jammer.block_lens.iter().any(|&b| b == 0 || b > self.jammer.length) {
            return Err(SimError::param("jammer.block_lens", "block lengths must lie in 1..=length"));
        }
        Ok(())
    }

    fn jammer_gain(&self) -> f64 {
        (self.jammer.length as f64 * self.noise_power * 10f64.powf(self.jammer.jnr_db / 10.0)).sqrt()
    }
}

/// One interference condition. `waveform` is at transmit scale and repeats cyclically.
#[derive(Debug, Clone, PartialEq)]
pub struct Jammer {
    pub label: String,
    pub waveform: Option<Arc<Vec<Complex64>>>,
}

impl Jammer {
    pub fn silent() -> Self {
        Self { label: "none".into(), waveform: None }
    }

    pub fn new(label: impl Into<String>, waveform: Vec<Complex64>) -> Self {
        Self { label: label.into(), waveform: Some(Arc::new(waveform)) }
    }
}

/// The jammer set: none, the unnotched reference, the projection design and one
/// constrained design per configured block length, all with the same transmit gain.
pub fn design_jammers(cfg: &ScenarioConfig) -> Result<Vec<Jammer>> {
    cfg.validate()?;
    let j = &cfg.jammer;
    let gain = cfg.jammer_gain();
    let bands = cfg.stop_bands()?;
    let reference = generate_reference(j.length, j.seed)?;
    let scaled = |c: &[Complex64]| c.iter().map(|z| z * gain).collect::<Vec<_>>();

    let mut out = vec![Jammer::silent(), Jammer::new("reference", scaled(&reference))];
    let proj = project_notch(&ProjectionRequest::new(reference.clone(), bands.clone()))?;
    out.push(Jammer::new("proj", scaled(&proj)));
    for &block in &j.block_lens {
        let spec = QcqpDesignSpec::new(reference.clone(), block, block / 2, bands.clone(), SolverConfig::default())?;
        let design = design_blockwise(&spec)?;
        if !design.converged() {
            return Err(SimError::param("jammer", format!("constrained design with block length {block} did not converge")));
        }
        out.push(Jammer::new(format!("qcqp-{block}"), scaled(&design.waveform)));
    }
    Ok(out)
}

/// Welch PSD of the received communication capture, in dB, from `-fs/2` upward.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdSummary {
    pub frequencies_hz: Vec<f64>,
    pub power_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JammerRow {
    pub label: String,
    /// Bit error rate averaged over snapshots, in percent.
    pub error_rate_pct: f64,
    /// Snapshots whose demodulator lost sync; each counts as 50 %.
    pub failed_snapshots: usize,
    /// Mean SINR over snapshots, one entry per configured pulse count.
    pub sinr_db: Vec<f64>,
    /// Constellation of the first snapshot.
    pub scatter: Vec<(f64, f64)>,
    pub psd: PsdSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoexistenceReport {
    pub pulses: Vec<usize>,
    pub trials: usize,
    pub rows: Vec<JammerRow>,
}

impl CoexistenceReport {
    pub fn row(&self, label: &str) -> Option<&JammerRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn sinr(&self, label: &str, pulses: usize) -> Option<f64> {
        let i = self.pulses.iter().position(|&m| m == pulses)?;
        self.row(label).map(|r| r.sinr_db[i])
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<CoexistenceReport> {
    run_with_jammers(cfg, &design_jammers(cfg)?)
}

fn tiled(w: &[Complex64], start: usize, len: usize) -> Vec<Complex64> {
    (0..len).map(|k| w[(start + k) % w.len()]).collect()
}

fn add(a: &mut [Complex64], b: &[Complex64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
}

fn noise(rng: &mut ChaCha8Rng, dist: &Normal<f64>, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(dist.sample(rng), dist.sample(rng))).collect()
}

/// Fixed per-run quantities shared by every snapshot.
struct Setup {
    params: DqpskParams,
    comm_amp: f64,
    pulse: Vec<Complex64>,
    echo_amp: f64,
    pri_len: usize,
    delay: usize,
    lead: usize,
    mf: MatchedFilter,
    /// Matched-filter output of the noiseless echo within one PRI.
    mf_echo: Vec<Complex64>,
    max_pulses: usize,
}

impl Setup {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let r = &cfg.radar;
        let params = cfg.dqpsk();
        let pulse = chirp_pulse(r.bandwidth_hz, r.pulse_width_s, cfg.sample_rate, r.offset_hz)?;
        let pri_len = (r.pri_s * cfg.sample_rate).round() as usize;
        let delay = (r.target_delay_s * cfg.sample_rate).round() as usize;
        let echo_amp = (cfg.noise_power * 10f64.powf(r.snr_db / 10.0)).sqrt();
        let mf = MatchedFilter::new(&pulse, pri_len)?;
        let mut echo = vec![Complex64::new(0.0, 0.0); pri_len];
        echo[delay..delay + pulse.len()].iter_mut().zip(&pulse).for_each(|(e, p)| *e = p * echo_amp);
        let mf_echo = mf.apply(&echo)?;
        Ok(Self {
            params,
            comm_amp: (cfg.noise_power * 10f64.powf(cfg.comm.snr_db / 10.0)).sqrt(),
            echo_amp,
            lead: params.receiver_margin()? + 4 * params.samples_per_symbol()?,
            pulse,
            pri_len,
            delay,
            mf,
            mf_echo,
            max_pulses: *r.pulses.iter().max().expect("validated non-empty"),
        })
    }
}

/// Components of one communication capture, kept apart for bookkeeping.
struct CommCapture {
    bits: Vec<bool>,
    comm: Vec<Complex64>,
    radar: Vec<Complex64>,
    noise: Vec<Complex64>,
}

impl CommCapture {
    fn draw(cfg: &ScenarioConfig, setup: &Setup, rng: &mut ChaCha8Rng, dist: &Normal<f64>) -> Result<Self> {
        let bits: Vec<bool> = (0..cfg.comm.bits).map(|_| rng.random()).collect();
        let tx = dqpsk_modulate(&bits, &setup.params)?;
        let len = tx.len() + 2 * setup.lead;
        let mut comm = vec![Complex64::new(0.0, 0.0); len];
        comm[setup.lead..setup.lead + tx.len()].iter_mut().zip(&tx).for_each(|(c, t)| *c = t * setup.comm_amp);
        let mut radar = vec![Complex64::new(0.0, 0.0); len];
        let at = (len.saturating_sub(setup.pulse.len())) / 2;
        radar[at..].iter_mut().zip(&setup.pulse).for_each(|(r, p)| *r = p * setup.echo_amp);
        let noise = noise(rng, dist, len);
        Ok(Self { bits, comm, radar, noise })
    }

    /// Superposition with the jammer segment starting at fraction `phase` of the
    /// waveform. The segment stays within one period when the waveform is long enough:
    /// a blockwise design is not constrained across its own end-to-start junction.
    fn received(&self, jammer: Option<&[Complex64]>, phase: f64) -> Vec<Complex64> {
        let mut rx = self.noise.clone();
        add(&mut rx, &self.comm);
        add(&mut rx, &self.radar);
        if let Some(w) = jammer {
            let span = if w.len() >= rx.len() { w.len() - rx.len() + 1 } else { w.len() };
            let segment = tiled(w, (phase * span as f64) as usize, rx.len());
            add(&mut rx, &segment);
        }
        rx
    }
}

struct SnapshotResult {
    error_pct: Vec<f64>,
    failed: Vec<bool>,
    /// `[jammer][pulse count]`.
    sinr_db: Vec<Vec<f64>>,
    scatter: Vec<Vec<(f64, f64)>>,
    received: Vec<Vec<Complex64>>,
}

fn snapshot(cfg: &ScenarioConfig, setup: &Setup, jammers: &[Jammer], index: usize) -> Result<SnapshotResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let dist = Normal::new(0.0, (cfg.noise_power / 2.0).sqrt()).map_err(|e| SimError::param("noise_power", e.to_string()))?;

    let capture = CommCapture::draw(cfg, setup, &mut rng, &dist)?;
    let comm_phase: f64 = rng.random();
    let offset: usize = rng.random_range(0..usize::MAX / 2);
    let mf_noise = (0..setup.max_pulses)
        .map(|_| setup.mf.apply(&noise(&mut rng, &dist, setup.pri_len)))
        .collect::<Result<Vec<_>>>()?;
    let y_radar: Vec<Vec<Complex64>> = mf_noise
        .iter()
        .map(|n| n.iter().zip(&setup.mf_echo).map(|(a, b)| a + b).collect())
        .collect();

    let mut out = SnapshotResult { error_pct: vec![], failed: vec![], sinr_db: vec![], scatter: vec![], received: vec![] };
    for jammer in jammers {
        let w = jammer.waveform.as_deref().map(|v| v.as_slice());
        let rx = capture.received(w, comm_phase);
        match dqpsk_demodulate(&rx, &setup.params, cfg.comm.bits) {
            Ok(d) => {
                out.error_pct.push(bit_error_rate_pct(&capture.bits, &d.bits));
                out.failed.push(false);
                out.scatter.push(d.scatter);
            }
            Err(SimError::SyncFailure(_)) => {
                out.error_pct.push(50.0);
                out.failed.push(true);
                out.scatter.push(Vec::new());
            }
            Err(e) => return Err(e),
        }
        out.received.push(rx);

        let y_jam = match w {
            None => mf_noise.clone(),
            Some(w) => mf_noise
                .iter()
                .enumerate()
                .map(|(m, n)| {
                    let mut y = setup.mf.apply(&tiled(w, offset + m * setup.pri_len, setup.pri_len))?;
                    add(&mut y, n);
                    Ok(y)
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let sinr = cfg
            .radar
            .pulses
            .iter()
            .map(|&m| estimate_sinr(&coherent_sum(&y_radar, m)?, &coherent_sum(&y_jam, m)?))
            .collect::<Result<Vec<_>>>()?;
        out.sinr_db.push(sinr);
    }
    Ok(out)
}

/// Runs `cfg.trials` snapshots against each jammer with common random numbers: every
/// jammer sees the same bits, noise and jammer phase within a snapshot.
pub fn run_with_jammers(cfg: &ScenarioConfig, jammers: &[Jammer]) -> Result<CoexistenceReport> {
    cfg.validate()?;
    if jammers.iter().any(|j| j.waveform.as_ref().is_some_and(|w| w.is_empty())) {
        return Err(SimError::param("jammers", "jammer waveforms must be non-empty"));
    }
    let setup = Setup::new(cfg)?;
    debug_assert!(setup.delay + setup.pulse.len() <= setup.pri_len);
    let snaps = (0..cfg.trials)
        .into_par_iter()
        .map(|i| snapshot(cfg, &setup, jammers, i))
        .collect::<Result<Vec<_>>>()?;

    let trials = cfg.trials as f64;
    let welch = WelchConfig::with_segment_len(1000.min(snaps[0].received[0].len()));
    let rows = jammers
        .iter()
        .enumerate()
        .map(|(j, jammer)| {
            let psd = welch_psd(&snaps[0].received[j], &welch)?;
            let (frequencies_hz, power_db) = psd.centered_hz(cfg.sample_rate).into_iter().unzip();
            Ok(JammerRow {
                label: jammer.label.clone(),
                error_rate_pct: snaps.iter().map(|s| s.error_pct[j]).sum::<f64>() / trials,
                failed_snapshots: snaps.iter().filter(|s| s.failed[j]).count(),
                sinr_db: (0..cfg.radar.pulses.len())
                    .map(|m| snaps.iter().map(|s| s.sinr_db[j][m]).sum::<f64>() / trials)
                    .collect(),
                scatter: snaps[0].scatter[j].clone(),
                psd: PsdSummary { frequencies_hz, power_db },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoexistenceReport { pulses: cfg.radar.pulses.clone(), trials: cfg.trials, rows })
}
