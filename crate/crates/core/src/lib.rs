//! Estimation of Pauli channels from cycle benchmarking experiments.
//!
//! The crate is layered bottom-up: [`pauli`] holds the symplectic algebra,
//! [`channel`] the Pauli channel representations, [`sim`] a Pauli-frame
//! simulator and exact likelihoods, [`estimate`] the ratio-based estimators,
//! [`field`] the Markov-field reconstruction and [`oracle`] a dense matrix
//! reference used for validation.

pub mod error;
pub mod channel;
pub mod pauli;
pub mod estimate;
pub mod field;
pub mod oracle;
pub mod sim;

pub use error::{Error, Result};
pub use channel::PauliChannel;
pub use pauli::{PauliGroup, PauliString, StabilizerCovering, StabilizerGroup, SyndromeVector};
