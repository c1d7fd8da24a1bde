//! Simulation and analysis of quantum network coding on the butterfly
//! network with entanglement pre-shared between the two senders.
//!
//! - [`quantum`]: dense states, operators, measurement, partial trace.
//! - [`protocol`]: Bell measurements, Pauli frames and the coding protocol.
//! - [`network`]: butterfly topology, capacity ledger and transcript audit.
//! - [`noise`]: Werner pairs, depolarizing channels, coincidence rates.
//! - [`trajectory`]: sampled pure-state shots of the noisy protocol.
//! - [`analysis`]: count-based estimators and aggregate statistics.

pub mod analysis;
pub mod error;
pub mod network;
pub mod noise;
pub mod protocol;
pub mod quantum;
pub mod trajectory;

pub use error::{Error, Result};
