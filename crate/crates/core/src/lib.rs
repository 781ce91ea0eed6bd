//! Simulator for single-photon two-qubit logic on down-converted photon
//! pairs: momentum entanglement is moved into polarization by a SWAP built
//! from three CNOTs, then checked with analyzer fringes and a CHSH test.
//!
//! Modules, bottom-up:
//!
//! - [`hilbert`]: basis convention, dense operators, pair density matrices.
//! - [`source`]: down-conversion pair state and the classical laser probe.
//! - [`gates`]: wave plates, M-CNOT, P-CNOT, SWAP, circuits.
//! - [`noise`]: dephasing channels and the visibility budget.
//! - [`measurement`]: analyzers, coincidence probabilities, CHSH.
//! - [`experiment`]: Poisson counts, fringe fits, scenario runs and reports.
//! - [`cli`]: the `sptq-sim` command line.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod hilbert;
pub mod measurement;
pub mod noise;
pub mod source;

pub use error::{Error, Result};
