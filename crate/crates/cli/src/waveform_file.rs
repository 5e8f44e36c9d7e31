//! The `NWF1` waveform container and its metadata sidecar.
//!
//! Layout, all little-endian:
//!
//! | bytes | field |
//! |---|---|
//! | 4 | magic `NWF1` |
//! | 2 | version (u16) |
//! | 8 | N (u64) |
//! | 8 | sample rate in Hz (f64) |
//! | 1 | full-scale flag (0 or 1) |
//! | 4 | metadata length M (u32) |
//! | M | metadata, UTF-8 TOML |
//! | 16·N | samples as interleaved (Re, Im) f64 pairs |

use std::path::{Path, PathBuf};

use notchwave_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::BandSpec;
use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"NWF1";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 8 + 1 + 4;

/// Summary of the solver run that produced a waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsDigest {
    pub windows: usize,
    pub converged: bool,
    pub max_iterations: usize,
    /// Smallest `1 − energy/cap` over every window and band constraint.
    pub min_relative_slack: f64,
}

/// Structured description stored in the file header and in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformMetadata {
    pub method: String,
    pub length: usize,
    pub sample_rate: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<usize>,
    /// Largest full-sequence band energy, measured before any full-scale scaling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_band_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_scale_gain: Option<f64>,
    #[serde(default)]
    pub bands: Vec<BandSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsDigest>,
}

impl WaveformMetadata {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata has only TOML-representable fields")
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformFile {
    pub sample_rate: f64,
    pub full_scale: bool,
    /// Free-form TOML; normally a serialized [`WaveformMetadata`].
    pub metadata: String,
    pub samples: Vec<Complex64>,
}

impl WaveformFile {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let meta = self.metadata.as_bytes();
        let meta_len = u32::try_from(meta.len()).map_err(|_| CliError::config("metadata longer than 4 GiB"))?;
        let mut out = Vec::with_capacity(HEADER_LEN + meta.len() + 16 * self.samples.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.samples.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.sample_rate.to_le_bytes());
        out.push(u8::from(self.full_scale));
        out.extend_from_slice(&meta_len.to_le_bytes());
        out.extend_from_slice(meta);
        for z in &self.samples {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        Ok(out)
    }

    /// Parses a buffer; `path` only labels errors.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| CliError::format(path, reason);
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the {HEADER_LEN}-byte header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("missing NWF1 magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
        let sample_rate = f64::from_le_bytes(bytes[14..22].try_into().unwrap());
        let full_scale = match bytes[22] {
            0 => false,
            1 => true,
            v => return Err(bad(format!("full-scale flag must be 0 or 1, got {v}"))),
        };
        let meta_len = u32::from_le_bytes(bytes[23..27].try_into().unwrap()) as usize;
        let payload_start = HEADER_LEN + meta_len;
        let expected = usize::try_from(n)
            .ok()
            .and_then(|n| n.checked_mul(16))
            .and_then(|p| p.checked_add(payload_start))
            .ok_or_else(|| bad(format!("sample count {n} is too large")))?;
        if bytes.len() != expected {
            return Err(bad(format!("expected {expected} bytes for {n} samples, found {}", bytes.len())));
        }
        let metadata = std::str::from_utf8(&bytes[HEADER_LEN..payload_start])
            .map_err(|_| bad("metadata is not UTF-8".into()))?
            .to_string();
        let samples = bytes[payload_start..]
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap()))
            })
            .collect();
        Ok(Self { sample_rate, full_scale, metadata, samples })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }

    /// Parsed metadata, if the header carries any in the expected schema.
    pub fn parsed_metadata(&self) -> Option<WaveformMetadata> {
        WaveformMetadata::from_toml(&self.metadata).ok()
    }
}

/// `<output>.meta.toml`
pub fn sidecar_path(output: &Path) -> PathBuf {
    suffixed(output, ".meta.toml")
}

/// `<output>.diag.csv`
pub fn diagnostics_path(output: &Path) -> PathBuf {
    suffixed(output, ".diag.csv")
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
