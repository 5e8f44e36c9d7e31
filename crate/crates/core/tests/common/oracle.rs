//! Dense dual projected-Newton solver for small least-distance problems
//!
//!   min ‖x − y‖²  s.t.  ‖x‖² ≤ r,  ‖a_k + B_k†x‖² ≤ τ_k,
//!
//! used as an independent check of the alternating-projection solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub struct DenseBand {
    pub b: DMatrix<Complex64>,
    pub a: DVector<Complex64>,
    pub tau: f64,
}

pub struct DenseProblem {
    pub y: DVector<Complex64>,
    pub radius2: f64,
    pub bands: Vec<DenseBand>,
}

pub struct OracleSolution {
    pub x: DVector<Complex64>,
    pub objective: f64,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

impl DenseProblem {
    /// Minimizer of the Lagrangian for multipliers `mu = [μ_ball, μ_1, …]`.
    pub fn primal(&self, mu: &[f64]) -> DVector<Complex64> {
        let n = self.y.len();
        let mut h = DMatrix::<Complex64>::identity(n, n).scale(1.0 + mu[0]);
        let mut rhs = self.y.clone();
        for (band, &m) in self.bands.iter().zip(&mu[1..]) {
            if m > 0.0 {
                h += (&band.b * band.b.adjoint()).scale(m);
                rhs -= (&band.b * &band.a).scale(m);
            }
        }
        h.cholesky().expect("Lagrangian Hessian is positive definite").solve(&rhs)
    }

    /// Constraint values `g_i(x)` (≤ 0 when feasible); also the dual gradient.
    pub fn residuals(&self, x: &DVector<Complex64>) -> Vec<f64> {
        std::iter::once(x.norm_squared() - self.radius2)
            .chain(self.bands.iter().map(|b| (&b.a + b.b.adjoint() * x).norm_squared() - b.tau))
            .collect()
    }

    pub fn objective(&self, x: &DVector<Complex64>) -> f64 {
        (x - &self.y).norm_squared()
    }

    fn scale(&self, i: usize) -> f64 {
        if i == 0 {
            self.radius2
        } else {
            self.bands[i - 1].tau
        }
        .max(1e-300)
    }

    fn hessian(&self, mu: &[f64]) -> DMatrix<Complex64> {
        let n = self.y.len();
        let mut h = DMatrix::<Complex64>::identity(n, n).scale(1.0 + mu[0]);
        for (band, &m) in self.bands.iter().zip(&mu[1..]) {
            if m > 0.0 {
                h += (&band.b * band.b.adjoint()).scale(m);
            }
        }
        h
    }

    /// Dual function value and its gradient (the constraint residuals).
    fn dual(&self, mu: &[f64]) -> (f64, DVector<Complex64>, Vec<f64>) {
        let x = self.primal(mu);
        let g = self.residuals(&x);
        let value = self.objective(&x) + mu.iter().zip(&g).map(|(m, g)| m * g).sum::<f64>();
        (value, x, g)
    }

    /// Projected Newton ascent on the dual with an Armijo line search, run until the
    /// projected gradient is negligible relative to each constraint's own scale, above a
    /// round-off floor tied to the signal energy.
    pub fn solve(&self, rel_tol: f64, max_iters: usize) -> OracleSolution {
        let m = self.bands.len() + 1;
        let mut mu = vec![0.0; m];
        let (mut value, mut x, mut g) = self.dual(&mu);
        let mut iterations = 0;
        for it in 0..max_iters {
            iterations = it;
            let done = (0..m).all(|i| {
                let stationary = if mu[i] > 0.0 { g[i].abs() } else { g[i].max(0.0) };
                stationary <= rel_tol * self.scale(i) + 1e-13 * self.radius2
            });
            if done {
                break;
            }
            // Sensitivities v_j = ∂(gradient of g_j)/2 so that ∂g_i/∂μ_j = −2 Re(v_i† H⁻¹ v_j).
            let v: Vec<DVector<Complex64>> = std::iter::once(x.clone())
                .chain(self.bands.iter().map(|b| &b.b * (&b.a + b.b.adjoint() * &x)))
                .collect();
            let chol = self.hessian(&mu).cholesky().expect("Lagrangian Hessian is positive definite");
            let hv: Vec<DVector<Complex64>> = v.iter().map(|vj| chol.solve(vj)).collect();
            let free: Vec<usize> = (0..m).filter(|&i| mu[i] > 0.0 || g[i] > 0.0).collect();
            let k = free.len();
            // Curvature of the (concave) dual restricted to the free multipliers, negated.
            let curv = DMatrix::from_fn(k, k, |a, b| 2.0 * v[free[a]].dotc(&hv[free[b]]).re);
            let rhs = DVector::from_fn(k, |a, _| g[free[a]]);
            let mut dir = vec![0.0; m];
            match curv.clone().cholesky() {
                Some(c) => c.solve(&rhs).iter().zip(&free).for_each(|(d, &i)| dir[i] = *d),
                None => free.iter().for_each(|&i| dir[i] = g[i] / curv[(0, 0)].max(1e-300)),
            }
            let mut alpha = 1.0;
            loop {
                let trial: Vec<f64> = (0..m).map(|i| (mu[i] + alpha * dir[i]).max(0.0)).collect();
                let (tv, tx, tg) = self.dual(&trial);
                let gain: f64 = (0..m).map(|i| g[i] * (trial[i] - mu[i])).sum();
                // Once the ascent is below the resolution of the dual value, the line
                // search can no longer tell steps apart; take the Newton step as is.
                let unresolvable = gain <= 1e-12 * value.abs();
                if tv >= value + 1e-4 * gain || unresolvable || alpha < 1e-20 {
                    mu = trial;
                    value = tv;
                    x = tx;
                    g = tg;
                    break;
                }
                alpha *= 0.5;
            }
        }
        OracleSolution { objective: self.objective(&x), x, multipliers: mu, iterations }
    }
}

/// Dense form of one window: steering blocks split at the prefix boundary.
pub fn window_problem(
    y: &[Complex64],
    prefix: &[Complex64],
    radius2: f64,
    bands: &[(notchwave_core::BandOperator, f64)],
) -> DenseProblem {
    let w = prefix.len();
    let n = w + y.len();
    let bands = bands
        .iter()
        .map(|(op, e)| {
            let cols: Vec<Vec<Complex64>> = (0..op.n_cols()).map(|j| op.column(j)).collect();
            let b = DMatrix::from_fn(n - w, cols.len(), |m, j| cols[j][w + m]);
            let a = DVector::from_fn(cols.len(), |j, _| {
                cols[j][..w].iter().zip(prefix).map(|(q, p)| q.conj() * p).sum::<Complex64>()
            });
            DenseBand { b, a, tau: op.coefficient_cap(*e) }
        })
        .collect();
    DenseProblem { y: DVector::from_column_slice(y), radius2: radius2 - prefix.iter().map(|z| z.norm_sqr()).sum::<f64>(), bands }
}
