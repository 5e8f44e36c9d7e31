//! Baseband stand-in for an over-the-air coexistence test: a π/4-DQPSK link and a
//! chirp radar share a band with a (possibly notched) jammer and thermal noise.

pub mod dqpsk;
pub mod error;
pub mod filters;
pub mod radar;
pub mod scenario;

pub use dqpsk::{dqpsk_demodulate, dqpsk_modulate, Demodulated, DqpskParams};
pub use error::{Result, SimError};
pub use radar::{chirp_pulse, coherent_sum, estimate_sinr, MatchedFilter};
pub use filters::{kaiser_lowpass, rrc_taps};
pub use scenario::{
    design_jammers, run_scenario, run_with_jammers, CoexistenceReport, CommConfig, Jammer, JammerConfig, JammerRow,
    PsdSummary, RadarConfig, ScenarioConfig,
};
