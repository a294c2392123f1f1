//! Circuit-level simulation and decoding of concatenated QLDPC-GKP codes.
//!
//! The crate models finitely squeezed GKP ancillas as Gaussian shift noise,
//! builds the faulty syndrome-measurement circuits of an outer CSS code,
//! assembles the circuit-level parity-check matrix by Pauli-frame propagation
//! and decodes it with BP-OSD using one of three soft-information regimes:
//!
//! * [`LlrMode::Uniform`]: identical LLRs on every column,
//! * [`LlrMode::Prior`]: precomputed per-location fault probabilities,
//! * [`LlrMode::RealTime`]: posteriors from the sampled GKP syndrome residues.
//!
//! The Monte Carlo memory experiment in [`experiment`] ties the pieces
//! together and estimates frame error rates.

pub mod circuit;
pub mod code;
pub mod decoder;
pub mod detector;
mod error;
pub mod exec;
pub mod experiment;
pub mod gf2;
pub mod gkp;
pub mod io;
pub mod propagation;
pub mod rng;
pub mod schedule;

pub use circuit::{Basis, FaultLocation, MeasurementCircuit, MemoryCircuit, QubitRef};
pub use code::CssCode;
pub use decoder::{BpOsdDecoder, CheckRule, DecodeResult, DecoderConfig};
pub use detector::{CircuitCheckMatrix, LlrMode, NoiseModel};
pub use error::{Error, Result};
pub use exec::Execution;
pub use experiment::{ExperimentConfig, FaultSample, FerEstimate, MemoryExperiment, PointResult, TrialOutcome};
pub use gf2::BinaryMatrix;
pub use gkp::{FaultKind, GkpParams};
pub use schedule::{Schedule, Schedules};
