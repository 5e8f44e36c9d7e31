//! Design configuration files and the config search path.

use std::path::{Path, PathBuf};

use notchwave_core::qcqp::SolverConfig;
use notchwave_core::spectral::depth_to_energy;
use notchwave_core::StopBand;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Colon-separated directories searched for relative config paths that do not exist
/// relative to the working directory.
pub const CONFIG_PATH_ENV: &str = "NOTCHWAVE_CONFIG_PATH";

/// Finds `path` as given, then under every directory of [`CONFIG_PATH_ENV`].
pub fn resolve_config_path(path: &Path) -> Result<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Some(dirs) = std::env::var_os(CONFIG_PATH_ENV) {
            if let Some(found) = std::env::split_paths(&dirs).map(|d| d.join(path)).find(|p| p.exists()) {
                return Ok(found);
            }
        }
    }
    Err(CliError::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "config file not found")))
}

/// Reads and parses a TOML config found through [`resolve_config_path`].
pub fn load_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let path = resolve_config_path(path)?;
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proj,
    Qcqp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Proj => "proj",
            Method::Qcqp => "qcqp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum NullWord {
    #[serde(rename = "null")]
    Null,
}

/// Notch depth in dB, or the word `"null"` for a complete null.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
enum DepthField {
    Db(f64),
    Null(NullWord),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandField {
    lo_hz: f64,
    hi_hz: f64,
    depth_db: Option<DepthField>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksField {
    pub block_len: usize,
    #[serde(default)]
    pub overlap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SolverField {
    feasibility_tol: f64,
    optimality_tol: f64,
    max_iters: usize,
}

impl Default for SolverField {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self { feasibility_tol: d.feasibility_tol, optimality_tol: d.optimality_tol, max_iters: d.max_iters }
    }
}

/// Raw file contents; see [`DesignConfig::parse`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignFile {
    sample_rate: f64,
    length: Option<usize>,
    duration: Option<f64>,
    method: Method,
    blocks: Option<BlocksField>,
    #[serde(default)]
    bands: Vec<BandField>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    solver: SolverField,
    #[serde(default)]
    full_scale: bool,
}

/// One protected band in Hz relative to the band center. `depth_db = None` is a null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub lo_hz: f64,
    pub hi_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_db: Option<f64>,
}

impl BandSpec {
    pub fn stop_band(&self, sample_rate: f64) -> Result<StopBand> {
        let cap = self.depth_db.map_or(0.0, depth_to_energy);
        StopBand::from_hz(self.lo_hz, self.hi_hz, sample_rate, cap).map_err(|e| CliError::config(e.to_string()))
    }
}

/// A validated design request.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    pub sample_rate: f64,
    pub length: usize,
    pub method: Method,
    /// Block length and overlap; the whole sequence as one block when absent.
    pub block_len: usize,
    pub overlap: usize,
    pub bands: Vec<BandSpec>,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Scale the result so its largest I or Q magnitude is exactly 1.
    pub full_scale: bool,
}

impl DesignConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let path = resolve_config_path(path)?;
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: DesignFile = toml::from_str(text).map_err(|e| CliError::config(e.message().to_string()))?;
        let fs = raw.sample_rate;
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(CliError::config("sample_rate must be positive and finite"));
        }
        let length = match (raw.length, raw.duration) {
            (Some(n), None) => n,
            (None, Some(t)) => {
                let n = t * fs;
                if !(n.is_finite() && n >= 1.0) || (n - n.round()).abs() > 1e-6 * n.max(1.0) {
                    return Err(CliError::config(format!("duration {t} s is not a whole number of samples at {fs} Hz")));
                }
                n.round() as usize
            }
            _ => return Err(CliError::config("give exactly one of `length` and `duration`")),
        };
        if length < 2 {
            return Err(CliError::config("waveform needs at least two samples"));
        }

        let mut bands = Vec::with_capacity(raw.bands.len());
        for (i, b) in raw.bands.iter().enumerate() {
            if !(b.lo_hz.is_finite() && b.hi_hz.is_finite()) || b.lo_hz >= b.hi_hz {
                return Err(CliError::config(format!("band {i}: need finite lo_hz < hi_hz, got [{}, {}]", b.lo_hz, b.hi_hz)));
            }
            if b.lo_hz < -fs / 2.0 || b.hi_hz > fs / 2.0 {
                return Err(CliError::config(format!("band {i}: [{}, {}] Hz lies outside [-fs/2, fs/2]", b.lo_hz, b.hi_hz)));
            }
            let depth_db = match b.depth_db {
                Some(DepthField::Db(d)) if !d.is_finite() => {
                    return Err(CliError::config(format!("band {i}: depth_db must be finite or \"null\"")))
                }
                Some(DepthField::Db(d)) => Some(d),
                Some(DepthField::Null(NullWord::Null)) | None => None,
            };
            let spec = BandSpec { lo_hz: b.lo_hz, hi_hz: b.hi_hz, depth_db };
            spec.stop_band(fs).map_err(|e| CliError::config(format!("band {i}: {e}")))?;
            bands.push(spec);
        }

        let (block_len, overlap) = match raw.blocks {
            Some(BlocksField { block_len, overlap }) => {
                if block_len == 0 || block_len > length {
                    return Err(CliError::config(format!("blocks.block_len must lie in 1..={length}")));
                }
                if 2 * overlap > block_len {
                    return Err(CliError::config("blocks.overlap must not exceed half the block length"));
                }
                (block_len, overlap)
            }
            None => (length, 0),
        };

        let solver = SolverConfig {
            feasibility_tol: raw.solver.feasibility_tol,
            optimality_tol: raw.solver.optimality_tol,
            max_iters: raw.solver.max_iters,
        };
        solver.validate().map_err(|e| CliError::config(format!("solver: {e}")))?;

        Ok(Self {
            sample_rate: fs,
            length,
            method: raw.method,
            block_len,
            overlap,
            bands,
            seed: raw.seed,
            solver,
            full_scale: raw.full_scale,
        })
    }

    pub fn stop_bands(&self) -> Result<Vec<StopBand>> {
        self.bands.iter().map(|b| b.stop_band(self.sample_rate)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        sample_rate = 20e6
        length = 1000
        method = "qcqp"
        seed = 3
        [blocks]
        block_len = 500
        overlap = 250
        [[bands]]
        lo_hz = -4e6
        hi_hz = -2e6
        depth_db = 60
        [[bands]]
        lo_hz = 4e6
        hi_hz = 5e6
        depth_db = "null"
    "#;

    #[test]
    fn parses_full_config() {
        let c = DesignConfig::parse(BASE).unwrap();
        assert_eq!((c.length, c.block_len, c.overlap, c.seed), (1000, 500, 250, 3));
        assert_eq!(c.bands[0].depth_db, Some(60.0));
        assert_eq!(c.bands[1].depth_db, None);
        let sb = c.stop_bands().unwrap();
        assert!((sb[0].f_lo() - 0.8).abs() < 1e-12 && sb[1].max_energy() == 0.0);
        assert_eq!(c.solver, SolverConfig::default());
    }

    #[test]
    fn duration_converts_to_samples() {
        let c = DesignConfig::parse("sample_rate = 20e6\nduration = 5e-3\nmethod = \"proj\"").unwrap();
        assert_eq!((c.length, c.block_len, c.overlap), (100_000, 100_000, 0));
        assert!(DesignConfig::parse("sample_rate = 20e6\nduration = 1.23456789e-6\nmethod = \"proj\"").is_err());
        assert!(DesignConfig::parse("sample_rate = 20e6\nmethod = \"proj\"").is_err());
    }

    #[test]
    fn rejects_schema_violations() {
        let bad = [
            BASE.replace("hi_hz = -2e6", "hi_hz = -5e6"),
            BASE.replace("lo_hz = 4e6", "lo_hz = 4e6\n        color = 1"),
            BASE.replace("hi_hz = 5e6", "hi_hz = 11e6"),
            BASE.replace("\"null\"", "\"deep\""),
            BASE.replace("method = \"qcqp\"", "method = \"gradient\""),
            BASE.replace("overlap = 250", "overlap = 300"),
            BASE.replace("seed = 3", "seed = 3\nextra = true"),
            BASE.replace("lo_hz = -4e6", "lo_hz = -1e6").replace("hi_hz = -2e6", "hi_hz = 1e6"),
        ];
        for text in bad {
            let err = DesignConfig::parse(&text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }
}
