//! Convex sets of the window problems and their exact Euclidean projections.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::dft::UnitaryDft;
use crate::error::{Error, Result};
use crate::spectral::BandOperator;

/// Gram eigenvalues below this fraction of the largest are treated as exact zeros.
const EIGEN_FLOOR: f64 = 1e-14;

pub(crate) trait ConvexSet: Send + Sync {
    fn project_in_place(&self, z: &mut [Complex64]);

    /// Whether `x` lies in the set up to a relative tolerance on the defining bound.
    fn satisfied(&self, x: &[Complex64], rel_tol: f64) -> bool;

    /// Band coefficient energy of `x` (`‖a + B†x‖²`), or `None` for non-band sets.
    fn band_energy(&self, _x: &[Complex64]) -> Option<f64> {
        None
    }
}

pub(crate) fn ball_in_place(x: &mut [Complex64], radius2: f64) {
    let e: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if e > radius2 {
        let s = if radius2 > 0.0 { (radius2 / e).sqrt() } else { 0.0 };
        x.iter_mut().for_each(|z| *z *= s);
    }
}

pub(crate) struct Ball {
    pub radius2: f64,
}

impl ConvexSet for Ball {
    fn project_in_place(&self, z: &mut [Complex64]) {
        ball_in_place(z, self.radius2);
    }

    fn satisfied(&self, x: &[Complex64], rel_tol: f64) -> bool {
        x.iter().map(|z| z.norm_sqr()).sum::<f64>() <= self.radius2 * (1.0 + rel_tol)
    }
}

/// `{X : Σ_{k∈idx} |X_k|² ≤ cap}` in unitary-DFT coordinates.
pub(crate) struct SpectralBand {
    pub indices: Vec<usize>,
    pub cap: f64,
    pub abs_floor: f64,
}

impl ConvexSet for SpectralBand {
    fn project_in_place(&self, z: &mut [Complex64]) {
        let e: f64 = self.indices.iter().map(|&k| z[k].norm_sqr()).sum();
        if e > self.cap {
            let s = if self.cap > 0.0 { (self.cap / e).sqrt() } else { 0.0 };
            for &k in &self.indices {
                z[k] *= s;
            }
        }
    }

    fn satisfied(&self, x: &[Complex64], rel_tol: f64) -> bool {
        self.band_energy(x).unwrap() <= self.cap * (1.0 + rel_tol) + self.abs_floor
    }

    fn band_energy(&self, x: &[Complex64]) -> Option<f64> {
        Some(self.indices.iter().map(|&k| x[k].norm_sqr()).sum())
    }
}

/// Geometry of one band on a window of length `n` whose first `prefix_len` samples are fixed.
///
/// `B` is the free-sample block of the band's steering columns. Its Gram matrix
/// `B†B = D T D†` with `T` real symmetric Toeplitz and `D` a diagonal phase, so the
/// eigenvectors of `B†B` are `V = D U` for `T = U Λ Uᵀ`. Products with `B` and `B†`
/// go through length-`n` FFTs; only `U` is stored densely.
pub(crate) struct BandFactor {
    n: usize,
    prefix_len: usize,
    indices: Vec<usize>,
    /// Diagonal of `D`, `e^{−jαk_j}`.
    phase: Vec<Complex64>,
    u: DMatrix<f64>,
    /// Eigenvalues of `B†B`, with numerically null ones set to exactly zero.
    lam: Vec<f64>,
    dft: UnitaryDft,
}

impl BandFactor {
    pub fn new(n: usize, prefix_len: usize, indices: &[usize]) -> Self {
        assert!(prefix_len < n, "window must keep at least one free sample");
        let m_free = (n - prefix_len) as f64;
        let nf = n as f64;
        let s = indices.len();
        let kernel = |d: i64| -> f64 {
            if d == 0 {
                m_free / nf
            } else {
                let x = PI * d as f64 / nf;
                (x * m_free).sin() / (nf * x.sin())
            }
        };
        let t = DMatrix::from_fn(s, s, |j, l| kernel(indices[j] as i64 - indices[l] as i64));
        let eig = SymmetricEigen::new(t);
        let lam_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let lam = eig.eigenvalues.iter().map(|&l| if l > EIGEN_FLOOR * lam_max { l } else { 0.0 }).collect();
        let alpha = PI * (2.0 * prefix_len as f64 + m_free - 1.0) / nf;
        let phase = indices.iter().map(|&k| Complex64::from_polar(1.0, -alpha * k as f64)).collect();
        Self {
            n,
            prefix_len,
            indices: indices.to_vec(),
            phase,
            u: eig.eigenvectors,
            lam,
            dft: UnitaryDft::new(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    /// `V† Q† [prefix; z]`.
    fn coordinates(&self, prefix: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
        let mut buf = Vec::with_capacity(self.n);
        buf.extend_from_slice(prefix);
        buf.extend_from_slice(z);
        self.dft.forward_in_place(&mut buf);
        let dq: Vec<Complex64> = self.indices.iter().zip(&self.phase).map(|(&k, p)| p.conj() * buf[k]).collect();
        (0..self.u.ncols())
            .map(|i| self.u.column(i).iter().zip(&dq).map(|(&uji, x)| x * uji).sum())
            .collect()
    }

    /// `B V c`, a vector over the free samples.
    fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for (j, (&k, p)) in self.indices.iter().zip(&self.phase).enumerate() {
            let uc: Complex64 = self.u.row(j).iter().zip(c).map(|(&uji, ci)| ci * uji).sum();
            buf[k] = p * uc;
        }
        self.dft.inverse_in_place(&mut buf);
        buf.split_off(self.prefix_len)
    }
}

/// `{x : ‖a + B†x‖² ≤ cap}` over the free samples of a window with a fixed prefix,
/// where `a = Q_fix† prefix`.
pub(crate) struct PrefixedBand {
    factor: Arc<BandFactor>,
    prefix: Vec<Complex64>,
    cap: f64,
    abs_floor: f64,
}

impl PrefixedBand {
    pub fn new(factor: Arc<BandFactor>, prefix: &[Complex64], cap: f64, abs_floor: f64) -> Result<Self> {
        if prefix.len() != factor.prefix_len {
            return Err(Error::DimensionMismatch { expected: factor.prefix_len, actual: prefix.len() });
        }
        let zeros = vec![Complex64::new(0.0, 0.0); factor.n - factor.prefix_len];
        let va = factor.coordinates(prefix, &zeros);
        // Null directions of B†B cannot be changed by the free samples.
        let floor: f64 = va.iter().zip(&factor.lam).filter(|(_, &l)| l == 0.0).map(|(v, _)| v.norm_sqr()).sum();
        if floor > cap * (1.0 + 1e-12) + abs_floor {
            return Err(Error::Infeasible {
                window: 0,
                reason: format!(
                    "fixed prefix alone puts band energy {floor:e} above the cap {cap:e} along directions the free samples cannot reach"
                ),
            });
        }
        Ok(Self { factor, prefix: prefix.to_vec(), cap, abs_floor })
    }
}

impl ConvexSet for PrefixedBand {
    fn project_in_place(&self, z: &mut [Complex64]) {
        let t = self.factor.coordinates(&self.prefix, z);
        let lam = &self.factor.lam;
        let t2: Vec<f64> = t.iter().map(|x| x.norm_sqr()).collect();
        if t2.iter().sum::<f64>() <= self.cap {
            return;
        }
        let mu = secular_multiplier(&t2, lam, self.cap);
        let coef: Vec<Complex64> = t
            .iter()
            .zip(lam)
            .map(|(ti, &l)| match mu {
                _ if l == 0.0 => Complex64::new(0.0, 0.0),
                Some(mu) => ti * (mu / (1.0 + mu * l)),
                None => ti / l,
            })
            .collect();
        for (zz, d) in z.iter_mut().zip(self.factor.synthesize(&coef)) {
            *zz -= d;
        }
    }

    fn satisfied(&self, x: &[Complex64], rel_tol: f64) -> bool {
        self.band_energy(x).unwrap() <= self.cap * (1.0 + rel_tol) + self.abs_floor
    }

    fn band_energy(&self, x: &[Complex64]) -> Option<f64> {
        Some(self.factor.coordinates(&self.prefix, x).iter().map(|t| t.norm_sqr()).sum())
    }
}

/// Solves `Σ t2_i / (1 + μλ_i)² = target` for `μ > 0`, returning a multiplier on the
/// feasible side. `None` means the limit `μ → ∞`: the target is at or below the
/// energy in the `λ_i = 0` terms.
///
/// Newton runs on `1/√φ(μ) − 1/√target`, which is concave and increasing, so iterates
/// approach the root from below; a bracket with bisection guards against round-off.
pub(crate) fn secular_multiplier(t2: &[f64], lam: &[f64], target: f64) -> Option<f64> {
    let unreachable: f64 = t2.iter().zip(lam).filter(|(_, &l)| l == 0.0).map(|(t, _)| t).sum();
    if target <= unreachable {
        return None;
    }
    let eval = |mu: f64| -> (f64, f64) {
        t2.iter().zip(lam).fold((0.0, 0.0), |(p, dp), (&t, &l)| {
            let q = 1.0 / (1.0 + mu * l);
            (p + t * q * q, dp - 2.0 * l * t * q * q * q)
        })
    };
    let inv_sqrt_target = 1.0 / target.sqrt();
    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    let mut mu = 0.0_f64;
    for _ in 0..500 {
        let (phi, dphi) = eval(mu);
        if phi <= target {
            hi = hi.min(mu);
            if phi >= target * (1.0 - 1e-12) {
                return Some(mu);
            }
        } else {
            lo = lo.max(mu);
        }
        if hi.is_finite() && hi - lo <= 1e-15 * hi {
            return Some(hi);
        }
        let h = 1.0 / phi.sqrt() - inv_sqrt_target;
        let dh = -0.5 * dphi / (phi * phi.sqrt());
        let mut next = mu - h / dh;
        if next <= lo {
            // Newton stalled just below the root: nudge across it.
            next = lo * (1.0 + 1e-13) + f64::MIN_POSITIVE;
        }
        if !next.is_finite() || next >= hi {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo.max(1.0) };
        }
        mu = next;
    }
    Some(if hi.is_finite() { hi } else { mu })
}

/// Euclidean projection of the free segment `c` onto one band-constraint set
/// `{c : (a + B†c)†(a + B†c) / width ≤ e_max}`, where `a` is the band content of
/// `fixed_prefix` and `B` the free-sample rows of the band's steering columns.
///
/// `op` must act on the full window, i.e. `op.len() == prefix.len() + c.len()`.
pub fn project_band_constraint(
    c: &[Complex64],
    op: &BandOperator,
    e_max: f64,
    fixed_prefix: Option<&[Complex64]>,
) -> Result<Vec<Complex64>> {
    if !(e_max >= 0.0) {
        return Err(Error::param("e_max", "must be nonnegative"));
    }
    let prefix = fixed_prefix.unwrap_or(&[]);
    if prefix.len() + c.len() != op.len() {
        return Err(Error::DimensionMismatch { expected: op.len(), actual: prefix.len() + c.len() });
    }
    if c.is_empty() {
        return Err(Error::EmptySequence);
    }
    let cap = op.coefficient_cap(e_max);
    if prefix.is_empty() {
        let dft = UnitaryDft::new(op.len());
        let mut buf = c.to_vec();
        dft.forward_in_place(&mut buf);
        SpectralBand { indices: op.indices().to_vec(), cap, abs_floor: 0.0 }.project_in_place(&mut buf);
        dft.inverse_in_place(&mut buf);
        return Ok(buf);
    }
    let factor = Arc::new(BandFactor::new(op.len(), prefix.len(), op.indices()));
    let set = PrefixedBand::new(factor, prefix, cap, 0.0)?;
    let mut out = c.to_vec();
    set.project_in_place(&mut out);
    Ok(out)
}
