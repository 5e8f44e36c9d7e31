//! The `design`, `analyze`, `quantize` and `simulate` commands as library calls.

use std::path::Path;

use notchwave_core::analysis::{
    autocorrelation, notch_depth, psll_db, spectrogram, welch_psd, AcfConfig, NotchConfig, Normalization, WelchConfig,
};
use notchwave_core::projection::{generate_reference, project_notch, ProjectionRequest};
use notchwave_core::qcqp::{design_blockwise, QcqpDesignSpec, WindowDiagnostics};
use notchwave_core::quantizer::{full_scale_normalize, notch_degradation, quantization_report};
use notchwave_core::spectral::check_constraints;
use notchwave_core::{Complex64, FrequencyGrid, StopBand};
use notchwave_sim::{run_scenario, CoexistenceReport, ScenarioConfig};

use crate::config::{BandSpec, DesignConfig, Method};
use crate::error::{CliError, Result};
use crate::report::{file_stem, num, Csv, NamedCsv};
use crate::waveform_file::{diagnostics_path, sidecar_path, DiagnosticsDigest, WaveformFile, WaveformMetadata};

/// Result of a design run, not yet written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutput {
    pub file: WaveformFile,
    pub metadata: WaveformMetadata,
    /// Per-window solver record, for `qcqp` only.
    pub diagnostics: Option<Csv>,
}

impl DesignOutput {
    pub fn converged(&self) -> bool {
        self.metadata.diagnostics.as_ref().is_none_or(|d| d.converged)
    }
}

pub fn diagnostics_csv(windows: &[WindowDiagnostics]) -> Csv {
    let k = windows.first().map_or(0, |w| w.band_caps.len());
    let mut header: Vec<String> =
        ["window", "start", "window_len", "prefix_len", "iterations", "converged", "objective", "energy_slack"]
            .map(String::from)
            .to_vec();
    header.extend((0..k).map(|i| format!("band{i}_slack")));
    let mut csv = Csv::new(header);
    for w in windows {
        let mut row = vec![
            w.index.to_string(),
            w.start.to_string(),
            w.window_len.to_string(),
            w.prefix_len.to_string(),
            w.iterations.to_string(),
            w.converged.to_string(),
            num(w.objective),
            num(w.energy_cap - w.window_energy),
        ];
        row.extend(w.slacks().into_iter().map(num));
        csv.push(row);
    }
    csv
}

/// Runs the designer described by `cfg`.
///
/// Projection ignores band depths and block settings: every stop-band component is removed.
pub fn run_design(cfg: &DesignConfig) -> Result<DesignOutput> {
    let bands = cfg.stop_bands()?;
    let reference = generate_reference(cfg.length, cfg.seed)?;
    let (samples, digest, band_specs, blocks) = match cfg.method {
        Method::Proj => {
            let c = project_notch(&ProjectionRequest::new(reference, bands.clone()))?;
            let nulls = cfg.bands.iter().map(|b| BandSpec { depth_db: None, ..*b }).collect();
            (c.into_inner(), None, nulls, (None, None))
        }
        Method::Qcqp => {
            let spec = QcqpDesignSpec::new(reference, cfg.block_len, cfg.overlap, bands.clone(), cfg.solver)?;
            let design = design_blockwise(&spec)?;
            let digest = DiagnosticsDigest {
                windows: design.windows.len(),
                converged: design.converged(),
                max_iterations: design.windows.iter().map(|w| w.iterations).max().unwrap_or(0),
                min_relative_slack: design
                    .windows
                    .iter()
                    .flat_map(|w| w.relative_slacks())
                    .fold(f64::INFINITY, f64::min),
            };
            let csv = diagnostics_csv(&design.windows);
            (design.waveform.into_inner(), Some((digest, csv)), cfg.bands.clone(), (Some(cfg.block_len), Some(cfg.overlap)))
        }
    };

    let check = check_constraints(&samples, &bands, &FrequencyGrid::new(cfg.length)?)?;
    let max_band_energy = check.bands.iter().map(|b| b.band_energy).reduce(f64::max);
    let (samples, gain) = if cfg.full_scale {
        let (s, g) = full_scale_normalize(&samples)?;
        (s.into_inner(), Some(g))
    } else {
        (samples, None)
    };
    let (digest, diagnostics) = digest.unzip();
    let metadata = WaveformMetadata {
        method: cfg.method.name().into(),
        length: cfg.length,
        sample_rate: cfg.sample_rate,
        seed: cfg.seed,
        block_len: blocks.0,
        overlap: blocks.1,
        max_band_energy,
        full_scale_gain: gain,
        bands: band_specs,
        diagnostics: digest,
    };
    let file = WaveformFile { sample_rate: cfg.sample_rate, full_scale: cfg.full_scale, metadata: metadata.to_toml(), samples };
    Ok(DesignOutput { file, metadata, diagnostics })
}

/// `design`: writes the waveform, its sidecar and, for `qcqp`, the diagnostics CSV.
///
/// A run that does not converge writes only the diagnostics and fails with a solver error.
pub fn cmd_design(config: &Path, output: &Path) -> Result<DesignOutput> {
    let cfg = DesignConfig::load(config)?;
    let out = run_design(&cfg)?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    if let Some(diag) = &out.diagnostics {
        diag.write(&diagnostics_path(output))?;
    }
    if !out.converged() {
        return Err(CliError::Solver(format!(
            "at least one window did not converge within {} iterations; see {}",
            cfg.solver.max_iters,
            diagnostics_path(output).display()
        )));
    }
    out.file.write(output)?;
    let sidecar = sidecar_path(output);
    std::fs::write(&sidecar, &out.file.metadata).map_err(|e| CliError::io(&sidecar, e))?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub welch: WelchConfig,
    pub max_lag: usize,
    /// Also report the PSLL of the first this-many samples.
    pub segment: Option<usize>,
    /// Segment length of an optional spectrogram (50 % overlap).
    pub spectrogram_len: Option<usize>,
    /// Bands to meter; the file's own metadata bands when empty.
    pub bands: Vec<BandSpec>,
    pub guard_bins: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            welch: WelchConfig::default(),
            max_lag: 20,
            segment: None,
            spectrogram_len: None,
            bands: Vec::new(),
            guard_bins: NotchConfig::default().guard_bins,
        }
    }
}

fn bands_for(file: &WaveformFile, explicit: &[BandSpec]) -> Vec<BandSpec> {
    if explicit.is_empty() {
        file.parsed_metadata().map(|m| m.bands).unwrap_or_default()
    } else {
        explicit.to_vec()
    }
}

fn stop_bands(specs: &[BandSpec], fs: f64) -> Result<Vec<StopBand>> {
    specs.iter().map(|b| b.stop_band(fs)).collect()
}

pub fn acf_csv(c: &[Complex64], max_lag: usize) -> Result<Csv> {
    let acf = autocorrelation(c, &AcfConfig { max_lag: Some(max_lag), ..AcfConfig::default() })?;
    let mut csv = Csv::new(["lag", "acf_db"]);
    for (l, v) in acf.lags.iter().zip(&acf.magnitude_db) {
        csv.push([l.to_string(), num(*v)]);
    }
    Ok(csv)
}

/// `analyze`: PSD, autocorrelation, notch depths and a summary, plus an optional spectrogram.
pub fn analyze(file: &WaveformFile, opts: &AnalyzeOptions) -> Result<Vec<NamedCsv>> {
    let c = &file.samples;
    let fs = file.sample_rate;
    let psd = welch_psd(c, &opts.welch)?.normalized(Normalization::OwnMean);
    let mut psd_table = Csv::new(["freq_hz", "psd_db"]);
    for (f, p) in psd.centered_hz(fs) {
        psd_table.push([num(f), num(p)]);
    }
    let acf_cfg = AcfConfig { max_lag: Some(opts.max_lag), ..AcfConfig::default() };
    let psll = psll_db(c, &acf_cfg)?;

    let mut summary = Csv::new(["metric", "value"]);
    summary.push(["length".to_string(), c.len().to_string()]);
    summary.push(["welch_segments".to_string(), psd.segments.to_string()]);
    summary.push(["psll_db".to_string(), num(psll)]);
    if let Some(m) = opts.segment {
        if m < 2 || m > c.len() {
            return Err(CliError::config(format!("segment length must lie in 2..={}", c.len())));
        }
        summary.push([format!("psll_first_{m}_db"), num(psll_db(&c[..m], &acf_cfg)?)]);
    }

    let mut out = vec![NamedCsv::new("psd.csv", psd_table), NamedCsv::new("acf.csv", acf_csv(c, opts.max_lag)?)];

    let specs = bands_for(file, &opts.bands);
    if !specs.is_empty() {
        let report = notch_depth(&psd, &stop_bands(&specs, fs)?, &NotchConfig { guard_bins: opts.guard_bins })?;
        let mut table = Csv::new(["band", "lo_hz", "hi_hz", "depth_mean_db", "depth_min_db", "edge_lo_db", "edge_hi_db"]);
        for (b, spec) in report.bands.iter().zip(&specs) {
            table.push([
                b.band.to_string(),
                num(spec.lo_hz),
                num(spec.hi_hz),
                num(b.depth_mean_db),
                num(b.depth_min_db),
                num(b.edge_lo_db),
                num(b.edge_hi_db),
            ]);
        }
        summary.push(["min_depth_db".to_string(), num(report.min_depth_db())]);
        out.push(NamedCsv::new("notch.csv", table));
    }

    if let Some(len) = opts.spectrogram_len {
        let s = spectrogram(c, &WelchConfig { segment_len: len, overlap: 0.5, window: opts.welch.window })?;
        let mut table = Csv::new(["start_s", "freq_hz", "power_db"]);
        let half = len.div_ceil(2);
        for (start, row) in s.starts.iter().zip(&s.power_db) {
            for i in 0..len {
                let k = (i + half) % len;
                let f = if k >= half { k as f64 - len as f64 } else { k as f64 };
                table.push([num(*start as f64 / fs), num(f * fs / len as f64), num(row[k])]);
            }
        }
        out.push(NamedCsv::new("spectrogram.csv", table));
    }
    out.push(NamedCsv::new("summary.csv", summary));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizeOptions {
    pub bits: Vec<u32>,
    pub histogram_bins: usize,
    /// Scale to full scale before quantizing; otherwise samples must already lie in [−1, 1].
    pub normalize: bool,
    pub welch: WelchConfig,
    pub bands: Vec<BandSpec>,
}

impl Default for QuantizeOptions {
    fn default() -> Self {
        Self {
            bits: vec![8, 10, 12, 14, 16],
            histogram_bins: notchwave_core::quantizer::DEFAULT_HISTOGRAM_BINS,
            normalize: true,
            welch: WelchConfig::default(),
            bands: Vec::new(),
        }
    }
}

/// `quantize`: error statistics per bit depth, error histograms and, when bands are
/// known, the quantized notch depths.
pub fn quantize(file: &WaveformFile, opts: &QuantizeOptions) -> Result<Vec<NamedCsv>> {
    if opts.bits.is_empty() {
        return Err(CliError::config("give at least one bit depth"));
    }
    let c = if opts.normalize { full_scale_normalize(&file.samples)?.0.into_inner() } else { file.samples.clone() };
    let mut stats = Csv::new(["bits", "step", "energy_diff", "est_var_re", "est_var_im", "theory_var"]);
    let mut hist = Csv::new(["bits", "bin_lo", "bin_hi", "count"]);
    for &b in &opts.bits {
        let r = quantization_report(&c, b, opts.histogram_bins)?;
        stats.push([
            b.to_string(),
            num(r.step),
            num(r.energy_diff),
            num(r.est_variance_re),
            num(r.est_variance_im),
            num(r.theory_variance),
        ]);
        let h = &r.error_histogram;
        for (i, count) in h.counts.iter().enumerate() {
            hist.push([b.to_string(), num(h.edges[i]), num(h.edges[i + 1]), count.to_string()]);
        }
    }
    let mut out = vec![NamedCsv::new("quantization.csv", stats), NamedCsv::new("histogram.csv", hist)];

    let specs = bands_for(file, &opts.bands);
    if !specs.is_empty() {
        let bands = stop_bands(&specs, file.sample_rate)?;
        let rows = notch_degradation(&c, &bands, &opts.bits, &opts.welch, &NotchConfig::default())?;
        let mut table = Csv::new(["bits", "band", "depth_mean_db", "depth_min_db"]);
        for r in &rows {
            for b in &r.bands {
                table.push([r.bits.to_string(), b.band.to_string(), num(b.depth_mean_db), num(b.depth_min_db)]);
            }
        }
        out.push(NamedCsv::new("notch_degradation.csv", table));
    }
    Ok(out)
}

/// Table, scatter and PSD reports of a coexistence run.
pub fn coexistence_reports(report: &CoexistenceReport) -> Vec<NamedCsv> {
    let mut header = vec!["jammer".to_string(), "error_rate_pct".into(), "failed_snapshots".into()];
    header.extend(report.pulses.iter().map(|m| format!("sinr_m{m}_db")));
    let mut table = Csv::new(header);
    let mut out = Vec::new();
    for row in &report.rows {
        let mut cells = vec![row.label.clone(), num(row.error_rate_pct), row.failed_snapshots.to_string()];
        cells.extend(row.sinr_db.iter().map(|&s| num(s)));
        table.push(cells);

        let mut scatter = Csv::new(["a_i", "a_q"]);
        for &(i, q) in &row.scatter {
            scatter.push([num(i), num(q)]);
        }
        let mut psd = Csv::new(["freq_hz", "psd_db"]);
        for (f, p) in row.psd.frequencies_hz.iter().zip(&row.psd.power_db) {
            psd.push([num(*f), num(*p)]);
        }
        let stem = file_stem(&row.label);
        out.push(NamedCsv::new(format!("scatter_{stem}.csv"), scatter));
        out.push(NamedCsv::new(format!("psd_{stem}.csv"), psd));
    }
    out.insert(0, NamedCsv::new("coexistence.csv", table));
    out
}

/// `simulate`: runs the coexistence scenario, defaults unless a scenario file is given.
pub fn simulate(scenario: Option<&Path>) -> Result<Vec<NamedCsv>> {
    let cfg: ScenarioConfig = match scenario {
        Some(p) => crate::config::load_toml(p)?,
        None => ScenarioConfig::default(),
    };
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(coexistence_reports(&run_scenario(&cfg)?))
}
