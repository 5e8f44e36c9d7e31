use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite, non-empty sequence of finite complex samples.
///
/// Used for reference codes, designed waveforms and simulated received signals.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    samples: Vec<Complex64>,
}

impl ComplexSequence {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(index) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { samples })
    }

    /// Builds a sequence from separate real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch { expected: re.len(), actual: im.len() });
        }
        Self::new(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.samples
    }

    /// Squared Euclidean norm.
    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|z| z * factor).collect())
    }

    /// Samples `[start, start + len)`.
    pub fn segment(&self, start: usize, len: usize) -> Result<Self> {
        let end = start.checked_add(len).filter(|&e| e <= self.len()).ok_or(
            Error::DimensionMismatch { expected: self.len(), actual: start.saturating_add(len) },
        )?;
        Self::new(self.samples[start..end].to_vec())
    }
}

impl Deref for ComplexSequence {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.samples
    }
}

impl AsRef<[Complex64]> for ComplexSequence {
    fn as_ref(&self) -> &[Complex64] {
        &self.samples
    }
}

impl TryFrom<Vec<Complex64>> for ComplexSequence {
    type Error = Error;

    fn try_from(samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples)
    }
}

/// Squared norm with compensated (Neumaier) summation, so long unit-energy
/// sequences report their energy to within a few ulps.
pub(crate) fn energy(x: &[Complex64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in x.iter().map(|z| z.norm_sqr()) {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(ComplexSequence::new(vec![]), Err(Error::EmptySequence));
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(f64::NAN, 0.0)];
        assert_eq!(ComplexSequence::new(bad), Err(Error::NonFiniteSample { index: 1 }));
        let inf = vec![Complex64::new(0.0, f64::INFINITY)];
        assert!(ComplexSequence::new(inf).is_err());
    }

    #[test]
    fn energy_and_segment() {
        let c = ComplexSequence::from_parts(&[3.0, 0.0, 1.0], &[4.0, 1.0, 0.0]).unwrap();
        assert_eq!(c.energy(), 27.0);
        assert_eq!(c.segment(1, 2).unwrap().as_slice(), &c[1..3]);
        assert!(c.segment(2, 2).is_err());
    }
}
