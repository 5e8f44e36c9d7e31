//! Spectral notching by orthogonal projection onto the complement of the stop-band
//! steering subspace.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dft::UnitaryDft;
use crate::error::{Error, Result};
use crate::sequence::ComplexSequence;
use crate::spectral::{band_grid_indices, FrequencyGrid, StopBand};

/// Unit-energy constant-modulus sequence with i.i.d. uniform phases.
pub fn generate_reference(n: usize, seed: u64) -> Result<ComplexSequence> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = 1.0 / (n as f64).sqrt();
    ComplexSequence::new(
        (0..n)
            .map(|_| Complex64::from_polar(amp, 2.0 * PI * rng.random::<f64>()))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionRequest {
    pub reference: ComplexSequence,
    pub bands: Vec<StopBand>,
}

impl ProjectionRequest {
    pub fn new(reference: ComplexSequence, bands: Vec<StopBand>) -> Self {
        Self { reference, bands }
    }

    /// Request whose reference is drawn by [`generate_reference`].
    pub fn seeded(n: usize, seed: u64, bands: Vec<StopBand>) -> Result<Self> {
        Ok(Self::new(generate_reference(n, seed)?, bands))
    }
}

/// Zero-based grid indices covered by any band, sorted and deduplicated.
pub fn stop_band_indices(bands: &[StopBand], grid: &FrequencyGrid) -> Result<Vec<usize>> {
    let mut all = Vec::new();
    for band in bands {
        all.extend(band_grid_indices(band, grid)?);
    }
    all.sort_unstable();
    all.dedup();
    Ok(all)
}

/// `c = c0 − Σ_{f_i ∈ Ω} p_{f_i} p_{f_i}† c0`, computed by zeroing DFT bins.
///
/// Band energy caps are ignored: every stop-band grid component is removed.
pub fn project_notch(req: &ProjectionRequest) -> Result<ComplexSequence> {
    let n = req.reference.len();
    let grid = FrequencyGrid::new(n)?;
    let indices = stop_band_indices(&req.bands, &grid)?;
    if indices.is_empty() {
        return Ok(req.reference.clone());
    }
    let dft = UnitaryDft::new(n);
    let mut buf = req.reference.to_vec();
    dft.forward_in_place(&mut buf);
    for k in indices {
        buf[k] = Complex64::new(0.0, 0.0);
    }
    dft.inverse_in_place(&mut buf);
    ComplexSequence::new(buf)
}
