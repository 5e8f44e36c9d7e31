use super::welch::PsdEstimate;
use crate::error::{Error, Result};
use crate::spectral::{band_grid_indices, FrequencyGrid, StopBand};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotchConfig {
    /// Bins next to a band edge excluded from both the in-band statistics and the
    /// passband mean. Four bins cover the 4-term Blackman-Harris mainlobe.
    pub guard_bins: usize,
}

impl Default for NotchConfig {
    fn default() -> Self {
        Self { guard_bins: 4 }
    }
}

/// Depth of one notch in dB below the passband mean (positive = suppressed).
#[derive(Debug, Clone, PartialEq)]
pub struct BandDepth {
    pub band: usize,
    /// From the linear mean of the interior in-band bins.
    pub depth_mean_db: f64,
    /// From the highest interior in-band bin.
    pub depth_min_db: f64,
    /// At the first and last in-band bins.
    pub edge_lo_db: f64,
    pub edge_hi_db: f64,
    pub interior_bins: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NotchReport {
    /// Linear mean of the passband bins.
    pub passband_level: f64,
    pub bands: Vec<BandDepth>,
}

impl NotchReport {
    pub fn min_depth_db(&self) -> f64 {
        self.bands.iter().map(|b| b.depth_min_db).fold(f64::INFINITY, f64::min)
    }
}

fn ratio_db(reference: f64, level: f64) -> f64 {
    10.0 * (reference / level.max(1e-300)).log10()
}

/// Meters every band of `bands` on the grid of `psd`.
pub fn notch_depth(psd: &PsdEstimate, bands: &[StopBand], cfg: &NotchConfig) -> Result<NotchReport> {
    let n = psd.len();
    let grid = FrequencyGrid::new(n)?;
    let ranges = bands
        .iter()
        .map(|b| band_grid_indices(b, &grid))
        .collect::<Result<Vec<_>>>()?;

    let g = cfg.guard_bins;
    let near_band = |k: usize| {
        ranges.iter().any(|ix| {
            let (lo, hi) = (ix[0], ix[ix.len() - 1]);
            (lo..=hi).contains(&k) || (lo + n - k) % n <= g || (k + n - hi) % n <= g
        })
    };
    let pass: Vec<f64> = (0..n).filter(|&k| !near_band(k)).map(|k| psd.power[k]).collect();
    if pass.is_empty() {
        return Err(Error::param("bands", "no passband bins remain outside the guarded stop bands"));
    }
    let passband_level = pass.iter().sum::<f64>() / pass.len() as f64;

    let bands = ranges
        .iter()
        .enumerate()
        .map(|(band, ix)| {
            let interior = if ix.len() > 2 * g { &ix[g..ix.len() - g] } else { &ix[ix.len() / 2..=ix.len() / 2] };
            let levels: Vec<f64> = interior.iter().map(|&k| psd.power[k]).collect();
            let mean = levels.iter().sum::<f64>() / levels.len() as f64;
            let max = levels.iter().copied().fold(0.0, f64::max);
            BandDepth {
                band,
                depth_mean_db: ratio_db(passband_level, mean),
                depth_min_db: ratio_db(passband_level, max),
                edge_lo_db: ratio_db(passband_level, psd.power[ix[0]]),
                edge_hi_db: ratio_db(passband_level, psd.power[ix[ix.len() - 1]]),
                interior_bins: levels.len(),
            }
        })
        .collect();
    Ok(NotchReport { passband_level, bands })
}
