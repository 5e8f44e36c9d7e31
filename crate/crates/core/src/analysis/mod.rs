//! Measurement tools: window functions, Welch PSD, spectrogram, autocorrelation and
//! notch-depth metering.

mod acf;
mod notch;
mod welch;
mod window;

pub use acf::{autocorrelation, psll_db, AcfConfig, AcfResult};
pub use notch::{notch_depth, BandDepth, NotchConfig, NotchReport};
pub use welch::{spectrogram, welch_psd, Normalization, PsdEstimate, Spectrogram, WelchConfig};
pub use window::Window;
