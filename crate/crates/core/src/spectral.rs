//! Frequency grid, steering vectors, stop bands and band interference-energy operators.
//!
//! Steering vectors use the `e^{+j2πfm}` phase convention so that `p_f† c` is exactly
//! the unitary DFT coefficient of `c` at `f`. With that choice the PSD of `c` at `f`
//! is `N |p_f† c|²` and a band's grid coefficients can be read straight off an FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dft::UnitaryDft;
use crate::error::{Error, Result};
use crate::sequence::ComplexSequence;

/// Slack used when snapping band edges to grid points, so that an edge that is a
/// grid frequency up to rounding is treated as lying on the grid.
const SNAP_EPS: f64 = 1e-9;

/// The `n`-point normalized frequency grid `f_i = i/n`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    n: usize,
}

impl FrequencyGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "grid must have at least one point"));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn frequency(&self, index: usize) -> f64 {
        index as f64 / self.n as f64
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.frequency(i))
    }
}

/// Notch depth in dB relative to a flat unit-energy reference, to a band energy cap.
pub fn depth_to_energy(depth_db: f64) -> f64 {
    10f64.powf(-depth_db / 10.0)
}

pub fn energy_to_depth(energy: f64) -> f64 {
    -10.0 * energy.log10()
}

/// One protected band `[f_lo, f_hi] ⊂ [0, 1]` with its interference-energy cap.
///
/// A cap of `f64::INFINITY` marks a band that is declared but unconstrained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopBand {
    f_lo: f64,
    f_hi: f64,
    max_energy: f64,
}

impl StopBand {
    pub fn new(f_lo: f64, f_hi: f64, max_energy: f64) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidBand { f_lo, f_hi, reason: reason.into() };
        if !(f_lo.is_finite() && f_hi.is_finite()) {
            return Err(bad("edges must be finite"));
        }
        if !(0.0..1.0).contains(&f_lo) || !(f_hi > 0.0 && f_hi <= 1.0) {
            return Err(bad("edges must satisfy 0 <= f_lo < 1 and 0 < f_hi <= 1"));
        }
        if f_lo >= f_hi {
            return Err(bad("f_lo must be below f_hi"));
        }
        if max_energy.is_nan() || max_energy < 0.0 {
            return Err(bad("energy cap must be nonnegative"));
        }
        Ok(Self { f_lo, f_hi, max_energy })
    }

    pub fn with_depth_db(f_lo: f64, f_hi: f64, depth_db: f64) -> Result<Self> {
        if depth_db.is_nan() {
            return Err(Error::InvalidBand { f_lo, f_hi, reason: "depth is NaN".into() });
        }
        Self::new(f_lo, f_hi, depth_to_energy(depth_db))
    }

    /// A band given in Hz relative to the band center at sample rate `fs`.
    ///
    /// Bands wholly below zero wrap to the top of `[0, 1)`; a band straddling DC is rejected.
    pub fn from_hz(lo_hz: f64, hi_hz: f64, fs: f64, max_energy: f64) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::param("sample_rate", "must be positive and finite"));
        }
        let (lo, hi) = (lo_hz / fs, hi_hz / fs);
        if lo < -0.5 || hi > 0.5 {
            return Err(Error::InvalidBand {
                f_lo: lo,
                f_hi: hi,
                reason: "band must lie within [-fs/2, fs/2]".into(),
            });
        }
        if hi <= 0.0 {
            Self::new(lo + 1.0, hi + 1.0, max_energy)
        } else if lo >= 0.0 {
            Self::new(lo, hi, max_energy)
        } else {
            Err(Error::InvalidBand {
                f_lo: lo,
                f_hi: hi,
                reason: "band straddles DC; split it into a negative and a positive part".into(),
            })
        }
    }

    pub fn f_lo(&self) -> f64 {
        self.f_lo
    }

    pub fn f_hi(&self) -> f64 {
        self.f_hi
    }

    pub fn width(&self) -> f64 {
        self.f_hi - self.f_lo
    }

    pub fn max_energy(&self) -> f64 {
        self.max_energy
    }

    pub fn depth_db(&self) -> f64 {
        energy_to_depth(self.max_energy)
    }

    pub fn with_max_energy(self, max_energy: f64) -> Result<Self> {
        Self::new(self.f_lo, self.f_hi, max_energy)
    }
}

/// Unit-norm steering vector `p_f[m] = e^{j2πfm}/√n`.
pub fn steering_vector(f: f64, n: usize) -> Result<ComplexSequence> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::InvalidFrequency(f));
    }
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let scale = 1.0 / (n as f64).sqrt();
    ComplexSequence::new((0..n).map(|m| Complex64::from_polar(scale, 2.0 * PI * f * m as f64)).collect())
}

/// Zero-based indices of the grid frequencies inside the closed band.
pub fn band_grid_indices(band: &StopBand, grid: &FrequencyGrid) -> Result<Vec<usize>> {
    let n = grid.len();
    let k_lo = (band.f_lo * n as f64 - SNAP_EPS).ceil().max(0.0) as usize;
    let k_hi = ((band.f_hi * n as f64 + SNAP_EPS).floor() as usize).min(n - 1);
    if k_lo > k_hi {
        return Err(Error::EmptyBand { f_lo: band.f_lo, f_hi: band.f_hi, n });
    }
    Ok((k_lo..=k_hi).collect())
}

/// Rejects band sets whose snapped index sets intersect.
pub fn validate_disjoint(bands: &[StopBand], grid: &FrequencyGrid) -> Result<()> {
    let ranges = bands
        .iter()
        .map(|b| band_grid_indices(b, grid).map(|ix| (ix[0], ix[ix.len() - 1])))
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in ranges.iter().enumerate() {
        for (j, b) in ranges.iter().enumerate().skip(i + 1) {
            if a.0 <= b.1 && b.0 <= a.1 {
                return Err(Error::OverlappingBands { first: i, second: j, n: grid.len() });
            }
        }
    }
    Ok(())
}

/// The operator `R = Q Q† / width` for one band on one grid, kept in factored form.
///
/// `Q` is never materialized; its columns are the grid steering vectors at
/// [`indices`](Self::indices).
#[derive(Debug, Clone, PartialEq)]
pub struct BandOperator {
    band: StopBand,
    n: usize,
    indices: Vec<usize>,
}

impl BandOperator {
    pub fn new(band: StopBand, grid: &FrequencyGrid) -> Result<Self> {
        let indices = band_grid_indices(&band, grid)?;
        Ok(Self { band, n: grid.len(), indices })
    }

    pub fn band(&self) -> &StopBand {
        &self.band
    }

    /// Sequence length the operator acts on.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n_cols(&self) -> usize {
        self.indices.len()
    }

    pub fn width_norm(&self) -> f64 {
        self.band.width()
    }

    /// Energy cap on `‖Q†c‖²` implied by a cap `e` on `c†Rc`.
    pub fn coefficient_cap(&self, e: f64) -> f64 {
        e * self.width_norm()
    }

    /// Column `j` of `Q`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        let f = self.indices[j] as f64 / self.n as f64;
        let scale = 1.0 / (self.n as f64).sqrt();
        (0..self.n).map(|m| Complex64::from_polar(scale, 2.0 * PI * f * m as f64)).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: len });
        }
        Ok(())
    }

    /// `Q† c` extracted from the unitary spectrum of `c`.
    pub fn coefficients(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(c.len())?;
        let spectrum = UnitaryDft::new(self.n).forward(c);
        Ok(self.coefficients_from_spectrum(&spectrum))
    }

    pub fn coefficients_from_spectrum(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        self.indices.iter().map(|&k| spectrum[k]).collect()
    }

    /// `c† R c`.
    pub fn band_energy(&self, c: &[Complex64]) -> Result<f64> {
        self.check_len(c.len())?;
        let spectrum = UnitaryDft::new(self.n).forward(c);
        Ok(self.band_energy_from_spectrum(&spectrum))
    }

    pub fn band_energy_from_spectrum(&self, spectrum: &[Complex64]) -> f64 {
        self.indices.iter().map(|&k| spectrum[k].norm_sqr()).sum::<f64>() / self.width_norm()
    }

    /// `c† R c` through explicit column inner products, `O(N·S)`.
    pub fn band_energy_by_columns(&self, c: &[Complex64]) -> Result<f64> {
        self.check_len(c.len())?;
        let total: f64 = (0..self.n_cols())
            .map(|j| {
                self.column(j)
                    .iter()
                    .zip(c)
                    .map(|(p, x)| p.conj() * x)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        Ok(total / self.width_norm())
    }
}

/// Evaluation of one band constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCheck {
    pub band_energy: f64,
    pub max_energy: f64,
    /// `max_energy − band_energy`; negative when violated.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub bands: Vec<BandCheck>,
}

impl ConstraintReport {
    /// True when every band energy is within `tolerance` of its cap.
    pub fn feasible(&self, tolerance: f64) -> bool {
        self.bands.iter().all(|b| b.band_energy <= b.max_energy + tolerance)
    }

    pub fn min_slack(&self) -> f64 {
        self.bands.iter().map(|b| b.slack).fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates every band constraint of `c` on `grid`.
pub fn check_constraints(c: &[Complex64], bands: &[StopBand], grid: &FrequencyGrid) -> Result<ConstraintReport> {
    if c.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), actual: c.len() });
    }
    let spectrum = UnitaryDft::new(grid.len()).forward(c);
    let bands = bands
        .iter()
        .map(|&band| {
            let op = BandOperator::new(band, grid)?;
            let band_energy = op.band_energy_from_spectrum(&spectrum);
            Ok(BandCheck { band_energy, max_energy: band.max_energy, slack: band.max_energy - band_energy })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstraintReport { bands })
}
