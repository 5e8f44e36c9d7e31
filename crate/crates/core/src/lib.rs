//! Synthesis and analysis of noise-like waveforms with controllable spectral notches.
//!
//! Two designers are provided:
//!
//! * [`projection`] removes every stop-band grid component from a reference
//!   sequence (fast, notch depth is effectively unbounded).
//! * [`qcqp`] solves a sequence of overlapping-window least-distance problems
//!   with per-band interference-energy caps, giving explicit control of the
//!   notch depth.
//!
//! [`quantizer`] models DAC amplitude quantization and [`analysis`] provides the
//! measurement tools (Welch PSD, spectrogram, autocorrelation, notch metering).

pub mod analysis;
pub mod dft;
pub mod error;
pub mod projection;
pub mod qcqp;
pub mod quantizer;
pub mod sequence;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sequence::ComplexSequence;
pub use spectral::{BandOperator, FrequencyGrid, StopBand};
