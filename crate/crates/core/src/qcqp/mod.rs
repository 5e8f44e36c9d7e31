//! Block-wise least-distance synthesis under a per-window energy cap and per-band
//! interference-energy caps.
//!
//! Every window problem is the Euclidean projection of a reference segment onto the
//! intersection of a ball and `K` band sets, solved with Dykstra's alternating
//! projections. Windows after the first hold the trailing `W` samples of the
//! previous window fixed and optimize only the remaining free samples.

mod blockwise;
mod dykstra;
mod sets;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use blockwise::{design_blockwise, BlockwiseDesigner, DesignedBlock, QcqpDesign, QcqpDesignSpec, WindowDiagnostics};
pub use dykstra::{solve_block, BlockSolution};
pub use sets::project_band_constraint;

/// Stopping rules for the alternating-projection solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Allowed relative excess of a band energy over its cap.
    pub feasibility_tol: f64,
    /// Bound on the max-norm change of the iterate over one sweep.
    pub optimality_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { feasibility_tol: 1e-9, optimality_tol: 1e-8, max_iters: 5000 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.feasibility_tol > 0.0 && self.feasibility_tol.is_finite()) {
            return Err(Error::param("feasibility_tol", "must be positive"));
        }
        if !(self.optimality_tol > 0.0 && self.optimality_tol.is_finite()) {
            return Err(Error::param("optimality_tol", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Euclidean projection onto `{x : ‖x‖² ≤ radius2}`.
pub fn project_ball(c: &[Complex64], radius2: f64) -> Result<Vec<Complex64>> {
    if !(radius2 >= 0.0) {
        return Err(Error::param("radius2", "must be nonnegative"));
    }
    let mut out = c.to_vec();
    sets::ball_in_place(&mut out, radius2);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_examples() {
        let c = vec![Complex64::new(0.5, 0.5), Complex64::new(0.0, 0.0)];
        assert_eq!(project_ball(&c, 1.0).unwrap(), c);
        let big = vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)];
        let p = project_ball(&big, 1.0).unwrap();
        assert!((p[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(project_ball(&big, -1.0).is_err());
        assert_eq!(project_ball(&big, 0.0).unwrap()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { max_iters: 0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { feasibility_tol: 0.0, ..Default::default() }.validate().is_err());
    }
}
