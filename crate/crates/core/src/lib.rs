//! Simulation and design toolkit for the generalized eight-port quantum
//! scissors device.
//!
//! Photon-number states of four optical modes are pushed through a network of
//! beam splitters and phase shifters; post-selecting on photon counts in modes
//! 2-4 truncates the field entering mode 4 and reappears (teleported) in
//! output mode 1. The crate covers
//!
//! - sparse Fock-basis states ([`fock`]),
//! - scattering matrices of the elements and of the full device ([`network`]),
//! - two independent evolution engines ([`evolution`]),
//! - conditional amplitudes, truncation defect and closed forms ([`scissors`]),
//! - derivative-free parameter search and the solution catalog ([`search`]),
//! - realistic photodetection and fidelities ([`detectors`]).
//!
//! Mode indices are zero-based throughout: mode `0` is the output mode that
//! carries the truncated state and mode `3` receives the input field.

pub mod detectors;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod network;
pub mod scissors;
pub mod search;

pub use error::{Error, Result};
pub use fock::{InputField, MultimodeState, OccupationVector, QuditState};
pub use network::{ElementSpec, GeneralBsSpec, GqsdSpec, ScatteringMatrix};
pub use scissors::{ConditionalAmplitudes, MeasurementEvent, TruncationTarget};

pub use num_complex::Complex64;

/// Amplitudes with magnitude below this are dropped from sparse states.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
