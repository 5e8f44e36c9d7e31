use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::dykstra::{solve_window, WindowBand};
use super::sets::BandFactor;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::projection::generate_reference;
use crate::sequence::ComplexSequence;
use crate::spectral::{validate_disjoint, BandOperator, FrequencyGrid, StopBand};

/// A full block-wise synthesis request. The total length is the reference length.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpDesignSpec {
    reference: ComplexSequence,
    block_len: usize,
    overlap: usize,
    bands: Vec<StopBand>,
    solver: SolverConfig,
}

impl QcqpDesignSpec {
    pub fn new(
        reference: ComplexSequence,
        block_len: usize,
        overlap: usize,
        bands: Vec<StopBand>,
        solver: SolverConfig,
    ) -> Result<Self> {
        solver.validate()?;
        if block_len == 0 || block_len > reference.len() {
            return Err(Error::param("block_len", format!("must be in 1..={}", reference.len())));
        }
        if 2 * overlap > block_len {
            return Err(Error::param("overlap", "must not exceed half the block length"));
        }
        validate_disjoint(&bands, &FrequencyGrid::new(block_len)?)?;
        Ok(Self { reference, block_len, overlap, bands, solver })
    }

    /// Spec whose reference is drawn by [`generate_reference`].
    pub fn seeded(
        n_total: usize,
        seed: u64,
        block_len: usize,
        overlap: usize,
        bands: Vec<StopBand>,
        solver: SolverConfig,
    ) -> Result<Self> {
        Self::new(generate_reference(n_total, seed)?, block_len, overlap, bands, solver)
    }

    pub fn reference(&self) -> &ComplexSequence {
        &self.reference
    }

    pub fn n_total(&self) -> usize {
        self.reference.len()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn bands(&self) -> &[StopBand] {
        &self.bands
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    /// Number of blocks `L = ⌈N / N̄⌉` sharing the unit energy budget.
    pub fn n_blocks(&self) -> usize {
        self.n_total().div_ceil(self.block_len)
    }

    /// `1 + ⌈(N − N̄)/(N̄ − W)⌉`.
    pub fn window_count(&self) -> usize {
        1 + (self.n_total() - self.block_len).div_ceil(self.block_len - self.overlap)
    }
}

/// Per-window solver record.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowDiagnostics {
    pub index: usize,
    /// Position of the first free sample in the output.
    pub start: usize,
    pub window_len: usize,
    pub prefix_len: usize,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    pub band_energies: Vec<f64>,
    pub band_caps: Vec<f64>,
    pub window_energy: f64,
    pub energy_cap: f64,
}

impl WindowDiagnostics {
    /// `cap − c†Rc` per band.
    pub fn slacks(&self) -> Vec<f64> {
        self.band_caps.iter().zip(&self.band_energies).map(|(c, e)| c - e).collect()
    }

    /// Slack divided by the cap; bands with a zero or unbounded cap report the raw slack.
    pub fn relative_slacks(&self) -> Vec<f64> {
        self.band_caps
            .iter()
            .zip(&self.band_energies)
            .map(|(&c, &e)| if c > 0.0 && c.is_finite() { (c - e) / c } else { c - e })
            .collect()
    }
}

/// One solved window: the full window samples and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignedBlock {
    pub window: Vec<Complex64>,
    pub diagnostics: WindowDiagnostics,
}

impl DesignedBlock {
    /// Newly designed samples (the window without its fixed prefix).
    pub fn free_samples(&self) -> &[Complex64] {
        &self.window[self.diagnostics.prefix_len..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcqpDesign {
    pub waveform: ComplexSequence,
    pub windows: Vec<WindowDiagnostics>,
}

impl QcqpDesign {
    pub fn converged(&self) -> bool {
        self.windows.iter().all(|w| w.converged)
    }
}

/// Solves windows in order, yielding each as soon as it is available.
pub struct BlockwiseDesigner<'a> {
    spec: &'a QcqpDesignSpec,
    next_window: usize,
    next_start: usize,
    tail: Vec<Complex64>,
    operators: HashMap<usize, Vec<BandOperator>>,
    factors: HashMap<(usize, usize), Vec<Arc<BandFactor>>>,
    failed: bool,
}

impl<'a> BlockwiseDesigner<'a> {
    pub fn new(spec: &'a QcqpDesignSpec) -> Self {
        Self {
            spec,
            next_window: 0,
            next_start: 0,
            tail: Vec::new(),
            operators: HashMap::new(),
            factors: HashMap::new(),
            failed: false,
        }
    }

    fn operators_for(&mut self, n: usize) -> Result<Vec<BandOperator>> {
        if let Some(ops) = self.operators.get(&n) {
            return Ok(ops.clone());
        }
        let grid = FrequencyGrid::new(n)?;
        let ops = self.spec.bands.iter().map(|b| BandOperator::new(*b, &grid)).collect::<Result<Vec<_>>>()?;
        self.operators.insert(n, ops.clone());
        Ok(ops)
    }

    fn factors_for(&mut self, ops: &[BandOperator], n: usize, prefix_len: usize) -> Vec<Option<Arc<BandFactor>>> {
        if prefix_len == 0 {
            return vec![None; ops.len()];
        }
        self.factors
            .entry((n, prefix_len))
            .or_insert_with(|| ops.iter().map(|op| Arc::new(BandFactor::new(n, prefix_len, op.indices()))).collect())
            .iter()
            .cloned()
            .map(Some)
            .collect()
    }

    fn solve_next(&mut self) -> Result<DesignedBlock> {
        let spec = self.spec;
        let (nbar, w, n_total) = (spec.block_len, spec.overlap, spec.n_total());
        let index = self.next_window;
        let start = self.next_start;
        let (prefix, free_len) = if index == 0 {
            (Vec::new(), nbar)
        } else {
            (self.tail.clone(), (nbar - w).min(n_total - start))
        };
        let n = prefix.len() + free_len;
        let scale = n as f64 / nbar as f64;
        let l = spec.n_blocks() as f64;
        let radius2 = scale / l;

        let ops = self.operators_for(n)?;
        let factors = self.factors_for(&ops, n, prefix.len());
        let caps: Vec<f64> = spec.bands.iter().map(|b| scale * b.max_energy() / l).collect();
        let bands: Vec<WindowBand<'_>> = ops
            .iter()
            .zip(&caps)
            .zip(factors)
            .map(|((op, &e_max), factor)| WindowBand { op, e_max, factor })
            .collect();

        let reference = &spec.reference[start..start + free_len];
        let sol = solve_window(reference, &bands, radius2, &prefix, &spec.solver).map_err(|e| match e {
            Error::Infeasible { reason, .. } => Error::Infeasible { window: index, reason },
            other => other,
        })?;

        let mut window = prefix;
        window.extend_from_slice(&sol.samples);
        self.tail = window[window.len() - w.min(window.len())..].to_vec();
        self.next_window += 1;
        self.next_start += free_len;

        let diagnostics = WindowDiagnostics {
            index,
            start,
            window_len: n,
            prefix_len: n - free_len,
            iterations: sol.iterations,
            converged: sol.converged,
            objective: sol.objective,
            band_energies: sol.band_energies,
            band_caps: caps,
            window_energy: sol.window_energy,
            energy_cap: radius2,
        };
        Ok(DesignedBlock { window, diagnostics })
    }
}

impl Iterator for BlockwiseDesigner<'_> {
    type Item = Result<DesignedBlock>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next_start >= self.spec.n_total() {
            return None;
        }
        let out = self.solve_next();
        self.failed = out.is_err();
        Some(out)
    }
}

/// Runs every window and concatenates the free samples.
pub fn design_blockwise(spec: &QcqpDesignSpec) -> Result<QcqpDesign> {
    let mut samples = Vec::with_capacity(spec.n_total());
    let mut windows = Vec::with_capacity(spec.window_count());
    for block in BlockwiseDesigner::new(spec) {
        let block = block?;
        samples.extend_from_slice(block.free_samples());
        windows.push(block.diagnostics);
    }
    Ok(QcqpDesign { waveform: ComplexSequence::new(samples)?, windows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{project_notch, ProjectionRequest};

    fn bands(depth: f64) -> Vec<StopBand> {
        vec![StopBand::with_depth_db(0.1, 0.2, depth).unwrap(), StopBand::with_depth_db(0.6, 0.65, depth).unwrap()]
    }

    #[test]
    fn window_count_and_lengths() {
        let spec = QcqpDesignSpec::seeded(1000, 1, 100, 50, bands(30.0), SolverConfig::default()).unwrap();
        assert_eq!(spec.n_blocks(), 10);
        assert_eq!(spec.window_count(), 19);
        let out = design_blockwise(&spec).unwrap();
        assert_eq!(out.windows.len(), 19);
        assert_eq!(out.waveform.len(), 1000);
        assert!(out.converged());

        // Final window is shortened when the stride does not divide the remainder.
        let spec = QcqpDesignSpec::seeded(1030, 1, 100, 40, bands(30.0), SolverConfig::default()).unwrap();
        let out = design_blockwise(&spec).unwrap();
        assert_eq!(out.windows.len(), spec.window_count());
        let last = out.windows.last().unwrap();
        assert_eq!(last.window_len, 40 + (1030 - 100) % 60);
        assert_eq!(out.waveform.len(), 1030);
    }

    #[test]
    fn overlap_samples_are_held_fixed() {
        let spec = QcqpDesignSpec::seeded(600, 3, 200, 100, bands(40.0), SolverConfig::default()).unwrap();
        let mut out = Vec::new();
        for block in BlockwiseDesigner::new(&spec) {
            let block = block.unwrap();
            let p = block.diagnostics.prefix_len;
            assert_eq!(&block.window[..p], &out[out.len() - p..]);
            out.extend_from_slice(block.free_samples());
            assert!(block.diagnostics.window_energy <= block.diagnostics.energy_cap * (1.0 + 1e-9));
            assert!(block.diagnostics.relative_slacks().iter().all(|&s| s >= -1e-9), "{:?}", block.diagnostics);
        }
        assert_eq!(out.len(), 600);
    }

    #[test]
    fn single_block_zero_cap_equals_projection() {
        let b = vec![StopBand::new(0.1, 0.2, 0.0).unwrap(), StopBand::new(0.7, 0.8, 0.0).unwrap()];
        let spec = QcqpDesignSpec::seeded(256, 5, 256, 0, b.clone(), SolverConfig::default()).unwrap();
        let q = design_blockwise(&spec).unwrap();
        let p = project_notch(&ProjectionRequest::new(spec.reference().clone(), b)).unwrap();
        let diff: f64 = q.waveform.iter().zip(p.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(diff.sqrt() / p.norm() < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        let r = generate_reference(100, 1).unwrap();
        let cfg = SolverConfig::default();
        assert!(QcqpDesignSpec::new(r.clone(), 0, 0, vec![], cfg).is_err());
        assert!(QcqpDesignSpec::new(r.clone(), 200, 0, vec![], cfg).is_err());
        assert!(QcqpDesignSpec::new(r.clone(), 10, 6, vec![], cfg).is_err());
        let overlapping = vec![StopBand::new(0.1, 0.3, 0.0).unwrap(), StopBand::new(0.25, 0.4, 0.0).unwrap()];
        assert!(QcqpDesignSpec::new(r, 10, 5, overlapping, cfg).is_err());
    }
}
