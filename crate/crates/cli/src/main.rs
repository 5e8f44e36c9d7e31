use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use notchwave_cli::commands::{analyze, cmd_design, quantize, simulate, AnalyzeOptions, QuantizeOptions};
use notchwave_cli::config::BandSpec;
use notchwave_cli::report::write_all;
use notchwave_cli::repro::{self, Artifact, ReproOptions};
use notchwave_cli::waveform_file::WaveformFile;
use notchwave_cli::{CliError, Result};
use notchwave_core::analysis::WelchConfig;

/// Design, analyze and simulate noise-like waveforms with spectral notches.
///
/// Relative config paths that do not exist are also looked up in every directory of
/// NOTCHWAVE_CONFIG_PATH. Errors are printed to stderr as one JSON object; the exit
/// code is 2 for config errors, 3 for solver failures, 4 for file errors and 1 otherwise.
#[derive(Debug, Parser)]
#[command(name = "notchwave", version)]
struct Cli {
    /// Worker threads for parallel stages; results do not depend on it. Default: all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a waveform from a TOML design config.
    Design {
        #[arg(long)]
        config: PathBuf,
        /// Waveform file; `<output>.meta.toml` and, for qcqp, `<output>.diag.csv` are written next to it.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// PSD, autocorrelation and notch-depth reports for a waveform file.
    Analyze {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        welch: WelchArgs,
        /// Largest autocorrelation lag reported and searched for the PSLL.
        #[arg(long, default_value_t = 20)]
        max_lag: usize,
        /// Also report the PSLL of the first this-many samples.
        #[arg(long)]
        segment: Option<usize>,
        /// Write a spectrogram with this segment length (50 % overlap).
        #[arg(long)]
        spectrogram: Option<usize>,
        /// Bins next to each band edge left out of the depth statistics.
        #[arg(long, default_value_t = 4)]
        guard_bins: usize,
        #[command(flatten)]
        bands: BandArgs,
    },
    /// Quantization-error statistics for a list of DAC bit depths.
    Quantize {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,10,12,14,16")]
        bits: Vec<u32>,
        #[arg(long, default_value_t = 50)]
        histogram_bins: usize,
        /// Quantize the samples as stored instead of scaling them to full scale first.
        #[arg(long)]
        no_normalize: bool,
        #[command(flatten)]
        welch: WelchArgs,
        #[command(flatten)]
        bands: BandArgs,
    },
    /// Run the jammer, communication link and radar coexistence scenario.
    Simulate {
        /// TOML scenario; built-in defaults when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Regenerate the data behind one reference figure or table.
    Repro {
        #[arg(value_enum)]
        artifact: Artifact,
        #[arg(long)]
        out_dir: PathBuf,
        /// Waveform length for the artifacts built on the 100000-sample scenario.
        #[arg(long)]
        length: Option<usize>,
        /// Reference-sequence seed. Default: 1.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct WelchArgs {
    /// Welch segment length.
    #[arg(long, default_value_t = 1000)]
    segment_len: usize,
    /// Welch segment overlap fraction.
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
}

impl WelchArgs {
    fn config(&self) -> WelchConfig {
        WelchConfig { segment_len: self.segment_len, overlap: self.overlap, ..WelchConfig::default() }
    }
}

#[derive(Debug, Args)]
struct BandArgs {
    /// Band to meter as LO_HZ:HI_HZ, repeatable; defaults to the bands in the file metadata.
    #[arg(long = "band", value_parser = parse_band, allow_hyphen_values = true)]
    bands: Vec<BandSpec>,
}

fn parse_band(s: &str) -> std::result::Result<BandSpec, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO_HZ:HI_HZ")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    if !(lo < hi) {
        return Err(format!("band [{lo}, {hi}] needs LO_HZ < HI_HZ"));
    }
    Ok(BandSpec { lo_hz: lo, hi_hz: hi, depth_db: None })
}

fn report(paths: Vec<PathBuf>) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Design { config, output } => {
            let out = cmd_design(&config, &output)?;
            println!("{}", output.display());
            if let Some(d) = out.metadata.diagnostics {
                println!("windows={} max_iterations={} min_relative_slack={:e}", d.windows, d.max_iterations, d.min_relative_slack);
            }
        }
        Command::Analyze { input, out_dir, welch, max_lag, segment, spectrogram, guard_bins, bands } => {
            let file = WaveformFile::read(&input)?;
            let opts = AnalyzeOptions {
                welch: welch.config(),
                max_lag,
                segment,
                spectrogram_len: spectrogram,
                bands: bands.bands,
                guard_bins,
            };
            report(write_all(&out_dir, &analyze(&file, &opts)?)?);
        }
        Command::Quantize { input, out_dir, bits, histogram_bins, no_normalize, welch, bands } => {
            let file = WaveformFile::read(&input)?;
            let opts = QuantizeOptions { bits, histogram_bins, normalize: !no_normalize, welch: welch.config(), bands: bands.bands };
            report(write_all(&out_dir, &quantize(&file, &opts)?)?);
        }
        Command::Simulate { scenario, out_dir } => {
            report(write_all(&out_dir, &simulate(scenario.as_deref())?)?);
        }
        Command::Repro { artifact, out_dir, length, seed } => {
            report(write_all(&out_dir, &repro::run(artifact, &ReproOptions { length, seed })?)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
