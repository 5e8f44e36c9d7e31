use std::sync::Arc;

use num_complex::Complex64;

use super::sets::{BandFactor, Ball, ConvexSet, PrefixedBand, SpectralBand};
use super::SolverConfig;
use crate::dft::UnitaryDft;
use crate::error::{Error, Result};
use crate::sequence::energy;
use crate::spectral::BandOperator;

/// Result of one window solve. `samples` holds only the free (optimized) part.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolution {
    pub samples: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖x − reference‖²` over the free samples.
    pub objective: f64,
    /// `c†Rc` of the full window `[prefix; x]` for every band.
    pub band_energies: Vec<f64>,
    /// `‖[prefix; x]‖²`.
    pub window_energy: f64,
}

pub(crate) struct WindowBand<'a> {
    pub op: &'a BandOperator,
    pub e_max: f64,
    pub factor: Option<Arc<BandFactor>>,
}

/// Euclidean projection of `reference` onto the intersection of the window ball and
/// every band set, via Dykstra's alternating projections.
///
/// `bands` pairs each operator (built on the full window grid) with its cap on `c†Rc`.
/// `radius2` bounds the energy of the full window including `fixed_prefix`.
pub fn solve_block(
    reference: &[Complex64],
    bands: &[(BandOperator, f64)],
    radius2: f64,
    fixed_prefix: Option<&[Complex64]>,
    cfg: &SolverConfig,
) -> Result<BlockSolution> {
    let bands: Vec<WindowBand<'_>> =
        bands.iter().map(|(op, e)| WindowBand { op, e_max: *e, factor: None }).collect();
    solve_window(reference, &bands, radius2, fixed_prefix.unwrap_or(&[]), cfg)
}

pub(crate) fn solve_window(
    reference: &[Complex64],
    bands: &[WindowBand<'_>],
    radius2: f64,
    prefix: &[Complex64],
    cfg: &SolverConfig,
) -> Result<BlockSolution> {
    cfg.validate()?;
    if reference.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !(radius2 >= 0.0 && radius2.is_finite()) {
        return Err(Error::param("radius2", "must be finite and nonnegative"));
    }
    let n = prefix.len() + reference.len();
    for b in bands {
        if b.op.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: b.op.len() });
        }
        if !(b.e_max >= 0.0) {
            return Err(Error::param("e_max", "band caps must be nonnegative"));
        }
    }

    let prefix_energy = energy(prefix);
    let mut free_radius2 = radius2 - prefix_energy;
    if free_radius2 < 0.0 {
        if free_radius2 < -1e-12 * radius2 {
            return Err(Error::Infeasible {
                window: 0,
                reason: format!("fixed prefix energy {prefix_energy:e} exceeds the window cap {radius2:e}"),
            });
        }
        free_radius2 = 0.0;
    }
    let abs_floor = cfg.feasibility_tol * cfg.feasibility_tol * radius2;

    let (samples, iterations, converged) = if prefix.is_empty() {
        let dft = UnitaryDft::new(n);
        let mut sets: Vec<Box<dyn ConvexSet>> = bands
            .iter()
            .map(|b| {
                Box::new(SpectralBand {
                    indices: b.op.indices().to_vec(),
                    cap: b.op.coefficient_cap(b.e_max),
                    abs_floor,
                }) as Box<dyn ConvexSet>
            })
            .collect();
        sets.push(Box::new(Ball { radius2: free_radius2 }));
        let y = dft.forward(reference);
        let (mut x, it, ok) = dykstra(&y, &sets, cfg);
        dft.inverse_in_place(&mut x);
        (x, it, ok)
    } else {
        let mut sets: Vec<Box<dyn ConvexSet>> = Vec::with_capacity(bands.len() + 1);
        for b in bands {
            let factor = match &b.factor {
                Some(f) if f.n() == n && f.prefix_len() == prefix.len() => f.clone(),
                _ => Arc::new(BandFactor::new(n, prefix.len(), b.op.indices())),
            };
            sets.push(Box::new(PrefixedBand::new(factor, prefix, b.op.coefficient_cap(b.e_max), abs_floor)?));
        }
        sets.push(Box::new(Ball { radius2: free_radius2 }));
        dykstra(reference, &sets, cfg)
    };

    let objective = samples.iter().zip(reference).map(|(a, b)| (a - b).norm_sqr()).sum();
    let mut window = prefix.to_vec();
    window.extend_from_slice(&samples);
    let window_energy = energy(&window);
    let spectrum = UnitaryDft::new(n).forward(&window);
    let band_energies = bands.iter().map(|b| b.op.band_energy_from_spectrum(&spectrum)).collect();
    Ok(BlockSolution { samples, iterations, converged, objective, band_energies, window_energy })
}

/// Dykstra's algorithm. The final projection of every sweep is onto the last set.
///
/// Stops once the iterate moved less than `optimality_tol` (max-norm) over a sweep and
/// every set is satisfied with half the feasibility tolerance, leaving headroom for
/// re-evaluating the constraints through a different code path.
fn dykstra(y: &[Complex64], sets: &[Box<dyn ConvexSet>], cfg: &SolverConfig) -> (Vec<Complex64>, usize, bool) {
    let zero = Complex64::new(0.0, 0.0);
    let mut x = y.to_vec();
    let mut increments = vec![vec![zero; y.len()]; sets.len()];
    let mut z = vec![zero; y.len()];
    for iter in 1..=cfg.max_iters {
        let start = x.clone();
        for (set, inc) in sets.iter().zip(increments.iter_mut()) {
            for ((zz, xx), ii) in z.iter_mut().zip(&x).zip(inc.iter()) {
                *zz = xx + ii;
            }
            x.copy_from_slice(&z);
            set.project_in_place(&mut x);
            for ((ii, zz), xx) in inc.iter_mut().zip(&z).zip(&x) {
                *ii = zz - xx;
            }
        }
        let change = x.iter().zip(&start).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if change < cfg.optimality_tol && sets.iter().all(|s| s.satisfied(&x, 0.5 * cfg.feasibility_tol)) {
            return (x, iter, true);
        }
    }
    (x, cfg.max_iters, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FrequencyGrid, StopBand};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(seed: u64, n: usize, scale: f64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale).collect()
    }

    #[test]
    fn unconstrained_interior_point_is_returned() {
        let y = random_vec(1, 16, 0.1);
        let sol = solve_block(&y, &[], 1.0, None, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.samples.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn single_active_band_matches_closed_form() {
        // Project onto {‖Q†x‖² ≤ τ} ∩ {‖x‖² ≤ r}. With both active the solution keeps
        // the in-band part on its cap and scales the rest to fill r − τ.
        let n = 16;
        let y = random_vec(2, n, 1.0);
        let grid = FrequencyGrid::new(n).unwrap();
        let op = BandOperator::new(StopBand::new(0.25, 0.5, 0.0).unwrap(), &grid).unwrap();
        let dft = UnitaryDft::new(n);
        let spec = dft.forward(&y);
        let in_band: f64 = op.indices().iter().map(|&k| spec[k].norm_sqr()).sum();
        let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
        let tau = 0.2 * in_band;
        let cfg = SolverConfig { optimality_tol: 1e-13, ..Default::default() };

        for radius2 in [10.0 * total, 0.5 * (total - in_band) + tau] {
            let sol = solve_block(&y, &[(op.clone(), tau / op.width_norm())], radius2, None, &cfg).unwrap();
            assert!(sol.converged);
            let mut expect = spec.clone();
            let s_in = (tau / in_band).sqrt();
            let out_energy = total - in_band;
            let s_out = if out_energy + tau > radius2 { ((radius2 - tau) / out_energy).sqrt() } else { 1.0 };
            for (k, e) in expect.iter_mut().enumerate() {
                *e *= if op.indices().contains(&k) { s_in } else { s_out };
            }
            let expect = dft.inverse(&expect);
            for (a, b) in sol.samples.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-8, "radius2 {radius2}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn prefix_energy_above_cap_is_infeasible() {
        let prefix = vec![Complex64::new(1.0, 0.0); 4];
        let y = random_vec(3, 4, 0.1);
        let err = solve_block(&y, &[], 1.0, Some(&prefix), &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn objective_is_monotone_in_cap() {
        let n = 24;
        let y = random_vec(5, n, 0.3);
        let prefix = random_vec(6, 6, 0.05);
        let grid = FrequencyGrid::new(n).unwrap();
        let op = BandOperator::new(StopBand::new(0.1, 0.3, 0.0).unwrap(), &grid).unwrap();
        let cfg = SolverConfig::default();
        let mut last = f64::INFINITY;
        for e in [0.0, 1e-4, 1e-3, 1e-2, 1e-1] {
            let sol = solve_block(&y[..n - 6], &[(op.clone(), e)], 10.0, Some(&prefix), &cfg).unwrap();
            assert!(sol.converged);
            assert!(sol.objective <= last * (1.0 + 1e-9));
            assert!(sol.band_energies[0] <= e * (1.0 + 1e-9) + 1e-20);
            last = sol.objective;
        }
    }
}
