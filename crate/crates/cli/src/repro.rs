//! Canned desk-scale regeneration of the reference figures and tables.

use clap::ValueEnum;
use notchwave_core::analysis::{autocorrelation, notch_depth, psll_db, welch_psd, AcfConfig, NotchConfig, Normalization, WelchConfig};
use notchwave_core::projection::{generate_reference, project_notch, ProjectionRequest};
use notchwave_core::qcqp::{design_blockwise, QcqpDesignSpec, SolverConfig, WindowDiagnostics};
use notchwave_core::quantizer::{full_scale_normalize, quantization_report, quantize};
use notchwave_core::spectral::depth_to_energy;
use notchwave_core::{Complex64, StopBand};
use notchwave_sim::{run_scenario, ScenarioConfig};

use crate::commands::coexistence_reports;
use crate::error::{CliError, Result};
use crate::report::{num, Csv, NamedCsv};

pub const SAMPLE_RATE: f64 = 20e6;
/// The three protected bands of the main scenario, in Hz.
pub const SCENARIO_BANDS_HZ: [(f64, f64); 3] = [(-4e6, -2e6), (4e6, 5e6), (8e6, 9e6)];
pub const SCENARIO_LENGTH: usize = 100_000;
pub const SCENARIO_DEPTH_DB: f64 = 60.0;
pub const SCENARIO_BLOCKS: [usize; 2] = [5000, 1000];
pub const QUANTIZER_BITS: [u32; 5] = [8, 10, 12, 14, 16];
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Artifact {
    /// PSD of the reference and the three designs, with notch depths.
    Fig2,
    /// Autocorrelation of the whole sequence and of a 200-sample segment, with PSLL.
    Fig4,
    /// PSLL of the 1000-block constrained design against notch depth.
    Fig5,
    /// PSD and notch depths of the quantized projection design.
    Fig6,
    /// Energy of the quantization error against bit depth.
    Table1,
    /// Estimated against theoretical quantization-error variance.
    Table2,
    /// Coexistence table: error rate and SINR per jammer.
    Table3,
    /// Single block against ten blocks on a 1000-sample two-band design.
    Fig11,
    /// The three multi-emitter designs with three, four and six bands.
    Cases,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReproOptions {
    /// Waveform length for the figures built on the main scenario.
    pub length: Option<usize>,
    pub seed: Option<u64>,
}

impl ReproOptions {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn length(&self) -> usize {
        self.length.unwrap_or(SCENARIO_LENGTH)
    }
}

/// A named waveform with its solver record, if it came from the constrained designer.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub label: String,
    pub samples: Vec<Complex64>,
    pub windows: Vec<WindowDiagnostics>,
}

pub fn bands_from_hz(bands_hz: &[(f64, f64, f64)], fs: f64) -> Result<Vec<StopBand>> {
    Ok(bands_hz
        .iter()
        .map(|&(lo, hi, depth)| StopBand::from_hz(lo, hi, fs, depth_to_energy(depth)))
        .collect::<std::result::Result<Vec<_>, _>>()?)
}

pub fn scenario_bands(depth_db: f64) -> Result<Vec<StopBand>> {
    let with_depth: Vec<_> = SCENARIO_BANDS_HZ.iter().map(|&(lo, hi)| (lo, hi, depth_db)).collect();
    bands_from_hz(&with_depth, SAMPLE_RATE)
}

pub fn reference_design(n: usize, seed: u64) -> Result<Design> {
    Ok(Design { label: "reference".into(), samples: generate_reference(n, seed)?.into_inner(), windows: Vec::new() })
}

pub fn projection_design(n: usize, seed: u64, bands: &[StopBand]) -> Result<Design> {
    let c = project_notch(&ProjectionRequest::seeded(n, seed, bands.to_vec())?)?;
    Ok(Design { label: "proj".into(), samples: c.into_inner(), windows: Vec::new() })
}

/// Constrained design labelled `qcqp-<block_len>`; fails unless every window converged.
pub fn qcqp_design(n: usize, seed: u64, block_len: usize, overlap: usize, bands: &[StopBand]) -> Result<Design> {
    let spec = QcqpDesignSpec::seeded(n, seed, block_len, overlap, bands.to_vec(), SolverConfig::default())?;
    let d = design_blockwise(&spec)?;
    if !d.converged() {
        return Err(CliError::Solver(format!("block length {block_len}: a window did not converge")));
    }
    Ok(Design { label: format!("qcqp-{block_len}"), samples: d.waveform.into_inner(), windows: d.windows })
}

/// Reference, projection and one constrained design per block length (overlap half a block).
pub fn scenario_designs(n: usize, seed: u64, depth_db: f64, blocks: &[usize]) -> Result<Vec<Design>> {
    let bands = scenario_bands(depth_db)?;
    let mut out = vec![reference_design(n, seed)?, projection_design(n, seed, &bands)?];
    for &b in blocks.iter().filter(|&&b| b <= n) {
        out.push(qcqp_design(n, seed, b, b / 2, &bands)?);
    }
    Ok(out)
}

/// Bands `(lo_hz, hi_hz, depth_db)` of the three multi-emitter cases.
pub fn multi_emitter_cases() -> Vec<(&'static str, Vec<(f64, f64, f64)>)> {
    vec![
        ("case1", vec![(-10e6, -6e6, 10.0), (-3e6, -2e6, 40.0), (2e6, 4e6, 80.0)]),
        ("case2", vec![(-7e6, -6e6, 10.0), (-3e6, -2e6, 30.0), (2e6, 4e6, 80.0), (6.5e6, 9e6, 10.0)]),
        (
            "case3",
            vec![
                (-9e6, -8e6, 10.0),
                (-7e6, -6e6, 60.0),
                (-5e6, -4e6, 10.0),
                (-3e6, -2e6, 10.0),
                (2e6, 4e6, 80.0),
                (6.5e6, 9e6, 30.0),
            ],
        ),
    ]
}

pub const CASE_LENGTH: usize = 1000;

/// Welch settings used to meter the 1000-sample designs.
pub fn short_welch() -> WelchConfig {
    WelchConfig::with_segment_len(CASE_LENGTH)
}

/// Columns `freq_hz, <label>...` of PSDs in dB relative to `level`, or each curve's own
/// mean when `level` is `None`.
fn psd_table(curves: &[(String, &[Complex64])], welch: &WelchConfig, level: Option<f64>) -> Result<Csv> {
    let mut cols = Vec::new();
    for (_, c) in curves {
        let psd = welch_psd(c, welch)?;
        let norm = level.map_or(Normalization::OwnMean, Normalization::Reference);
        cols.push(psd.normalized(norm).centered_hz(SAMPLE_RATE));
    }
    let mut header = vec!["freq_hz".to_string()];
    header.extend(curves.iter().map(|(l, _)| l.clone()));
    let mut csv = Csv::new(header);
    for i in 0..cols[0].len() {
        let mut row = vec![num(cols[0][i].0)];
        row.extend(cols.iter().map(|c| num(c[i].1)));
        csv.push(row);
    }
    Ok(csv)
}

fn notch_rows(csv: &mut Csv, label: &str, c: &[Complex64], bands: &[StopBand], welch: &WelchConfig) -> Result<()> {
    let report = notch_depth(&welch_psd(c, welch)?, bands, &NotchConfig::default())?;
    for b in &report.bands {
        csv.push([
            label.to_string(),
            b.band.to_string(),
            num(b.depth_mean_db),
            num(b.depth_min_db),
            num(b.edge_lo_db),
            num(b.edge_hi_db),
        ]);
    }
    Ok(())
}

fn notch_header() -> Csv {
    Csv::new(["design", "band", "depth_mean_db", "depth_min_db", "edge_lo_db", "edge_hi_db"])
}

fn acf_table(curves: &[(String, &[Complex64])], max_lag: usize) -> Result<Csv> {
    let cfg = AcfConfig { max_lag: Some(max_lag), ..AcfConfig::default() };
    let acfs = curves.iter().map(|(_, c)| autocorrelation(c, &cfg)).collect::<std::result::Result<Vec<_>, _>>()?;
    let mut header = vec!["lag".to_string()];
    header.extend(curves.iter().map(|(l, _)| l.clone()));
    let mut csv = Csv::new(header);
    for (i, lag) in acfs[0].lags.iter().enumerate() {
        let mut row = vec![lag.to_string()];
        row.extend(acfs.iter().map(|a| num(a.magnitude_db[i])));
        csv.push(row);
    }
    Ok(csv)
}

fn curves(designs: &[Design]) -> Vec<(String, &[Complex64])> {
    designs.iter().map(|d| (d.label.clone(), d.samples.as_slice())).collect()
}

const PLOT_LAGS: usize = 50;
pub const SEGMENT_LEN: usize = 200;

fn fig2(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let designs = scenario_designs(opts.length(), opts.seed(), SCENARIO_DEPTH_DB, &SCENARIO_BLOCKS)?;
    let welch = WelchConfig::default();
    let level = welch_psd(&designs[0].samples, &welch)?.mean_power();
    let bands = scenario_bands(SCENARIO_DEPTH_DB)?;
    let mut notch = notch_header();
    for d in &designs {
        notch_rows(&mut notch, &d.label, &d.samples, &bands, &welch)?;
    }
    Ok(vec![NamedCsv::new("psd.csv", psd_table(&curves(&designs), &welch, Some(level))?), NamedCsv::new("notch.csv", notch)])
}

fn fig4(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let designs = scenario_designs(opts.length(), opts.seed(), SCENARIO_DEPTH_DB, &SCENARIO_BLOCKS)?;
    let cfg = AcfConfig::default();
    let mut psll = Csv::new(["design", "psll_db", "psll_segment_db"]);
    for d in &designs {
        psll.push([d.label.clone(), num(psll_db(&d.samples, &cfg)?), num(psll_db(&d.samples[..SEGMENT_LEN], &cfg)?)]);
    }
    let segments: Vec<(String, &[Complex64])> = designs.iter().map(|d| (d.label.clone(), &d.samples[..SEGMENT_LEN])).collect();
    Ok(vec![
        NamedCsv::new("acf.csv", acf_table(&curves(&designs), PLOT_LAGS)?),
        NamedCsv::new("acf_segment.csv", acf_table(&segments, PLOT_LAGS)?),
        NamedCsv::new("psll.csv", psll),
    ])
}

pub const TRADEOFF_DEPTHS_DB: [f64; 5] = [5.0, 10.0, 20.0, 30.0, 60.0];
pub const TRADEOFF_BLOCK: usize = 1000;

fn fig5(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let (n, seed) = (opts.length(), opts.seed());
    let mut designs = vec![reference_design(n, seed)?];
    for depth in TRADEOFF_DEPTHS_DB {
        let mut d = qcqp_design(n, seed, TRADEOFF_BLOCK, TRADEOFF_BLOCK / 2, &scenario_bands(depth)?)?;
        d.label = format!("{}-{depth}db", d.label);
        designs.push(d);
    }
    let cfg = AcfConfig::default();
    let mut psll = Csv::new(["design", "depth_db", "psll_db"]);
    psll.push(["reference".to_string(), "none".into(), num(psll_db(&designs[0].samples, &cfg)?)]);
    for (d, depth) in designs[1..].iter().zip(TRADEOFF_DEPTHS_DB) {
        psll.push([d.label.clone(), num(depth), num(psll_db(&d.samples, &cfg)?)]);
    }
    Ok(vec![NamedCsv::new("acf.csv", acf_table(&curves(&designs), PLOT_LAGS)?), NamedCsv::new("psll.csv", psll)])
}

/// The full-scale projection design that the quantization artifacts start from.
pub fn quantizer_input(opts: &ReproOptions) -> Result<Vec<Complex64>> {
    let d = projection_design(opts.length(), opts.seed(), &scenario_bands(SCENARIO_DEPTH_DB)?)?;
    Ok(full_scale_normalize(&d.samples)?.0.into_inner())
}

fn fig6(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let c = quantizer_input(opts)?;
    let bands = scenario_bands(SCENARIO_DEPTH_DB)?;
    let welch = WelchConfig::default();
    let mut versions = vec![("unquantized".to_string(), c.clone())];
    for b in QUANTIZER_BITS {
        versions.push((format!("b{b}"), quantize(&c, b)?.into_inner()));
    }
    let level = welch_psd(&c, &welch)?.mean_power();
    let refs: Vec<(String, &[Complex64])> = versions.iter().map(|(l, v)| (l.clone(), v.as_slice())).collect();
    let mut notch = notch_header();
    for (label, v) in &versions {
        notch_rows(&mut notch, label, v, &bands, &welch)?;
    }
    Ok(vec![NamedCsv::new("psd.csv", psd_table(&refs, &welch, Some(level))?), NamedCsv::new("notch.csv", notch)])
}

fn table1(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let c = quantizer_input(opts)?;
    let mut csv = Csv::new(["bits", "energy_diff", "theory_energy"]);
    for b in QUANTIZER_BITS {
        let r = quantization_report(&c, b, 1)?;
        csv.push([b.to_string(), num(r.energy_diff), num(2.0 * c.len() as f64 * r.theory_variance)]);
    }
    Ok(vec![NamedCsv::new("table1.csv", csv)])
}

fn table2(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let c = quantizer_input(opts)?;
    let mut csv = Csv::new(["bits", "theory_var", "est_var_re", "est_var_im"]);
    for b in QUANTIZER_BITS {
        let r = quantization_report(&c, b, 1)?;
        csv.push([b.to_string(), format!("{:.4e}", r.theory_variance), num(r.est_variance_re), num(r.est_variance_im)]);
    }
    Ok(vec![NamedCsv::new("table2.csv", csv)])
}

fn table3(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let mut cfg = ScenarioConfig::default();
    if let Some(n) = opts.length {
        cfg.jammer.length = n;
    }
    if let Some(s) = opts.seed {
        cfg.jammer.seed = s;
    }
    Ok(coexistence_reports(&run_scenario(&cfg)?))
}

pub const FIG11_BANDS_HZ: [(f64, f64, f64); 2] = [(-8e6, -4e6, 80.0), (4e6, 6e6, 10.0)];
pub const FIG11_BLOCKS: [usize; 2] = [1000, 100];

/// The single-block and ten-block designs, without overlap.
pub fn fig11_designs(seed: u64) -> Result<Vec<Design>> {
    let bands = bands_from_hz(&FIG11_BANDS_HZ, SAMPLE_RATE)?;
    FIG11_BLOCKS
        .iter()
        .map(|&b| {
            let mut d = qcqp_design(CASE_LENGTH, seed, b, 0, &bands)?;
            d.label = format!("l{}", CASE_LENGTH / b);
            Ok(d)
        })
        .collect()
}

fn fig11(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let designs = fig11_designs(opts.seed())?;
    let bands = bands_from_hz(&FIG11_BANDS_HZ, SAMPLE_RATE)?;
    let welch = short_welch();
    let mut notch = notch_header();
    for d in &designs {
        notch_rows(&mut notch, &d.label, &d.samples, &bands, &welch)?;
    }
    Ok(vec![NamedCsv::new("psd.csv", psd_table(&curves(&designs), &welch, None)?), NamedCsv::new("notch.csv", notch)])
}

/// One single-block constrained design per multi-emitter case.
pub fn case_designs(seed: u64) -> Result<Vec<(Design, Vec<StopBand>, Vec<f64>)>> {
    multi_emitter_cases()
        .into_iter()
        .map(|(name, spec)| {
            let bands = bands_from_hz(&spec, SAMPLE_RATE)?;
            let mut d = qcqp_design(CASE_LENGTH, seed, CASE_LENGTH, 0, &bands)?;
            d.label = name.into();
            Ok((d, bands, spec.iter().map(|s| s.2).collect()))
        })
        .collect()
}

fn cases(opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    let welch = short_welch();
    let mut notch = Csv::new(["case", "band", "target_db", "depth_mean_db", "depth_min_db", "min_slack"]);
    let mut out = Vec::new();
    for (d, bands, targets) in case_designs(opts.seed())? {
        let report = notch_depth(&welch_psd(&d.samples, &welch)?, &bands, &NotchConfig::default())?;
        let slacks = &d.windows[0];
        for ((b, t), s) in report.bands.iter().zip(&targets).zip(slacks.relative_slacks()) {
            notch.push([d.label.clone(), b.band.to_string(), num(*t), num(b.depth_mean_db), num(b.depth_min_db), num(s)]);
        }
        out.push(NamedCsv::new(format!("psd_{}.csv", d.label), psd_table(&[(d.label.clone(), &d.samples)], &welch, None)?));
    }
    out.insert(0, NamedCsv::new("notch.csv", notch));
    Ok(out)
}

pub fn run(artifact: Artifact, opts: &ReproOptions) -> Result<Vec<NamedCsv>> {
    match artifact {
        Artifact::Fig2 => fig2(opts),
        Artifact::Fig4 => fig4(opts),
        Artifact::Fig5 => fig5(opts),
        Artifact::Fig6 => fig6(opts),
        Artifact::Table1 => table1(opts),
        Artifact::Table2 => table2(opts),
        Artifact::Table3 => table3(opts),
        Artifact::Fig11 => fig11(opts),
        Artifact::Cases => cases(opts),
    }
}
