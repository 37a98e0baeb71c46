//! Simulation of entanglement distribution over a quantum code-division
//! multiple-access network whose users are separated by chaotic phase codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`chaos`]: Colpitts oscillator dynamics, Lyapunov spectra, bandwidth
//!   rescaling and Pecora-Carroll drive-response synchronization.
//! * [`spectral`]: voltage-to-detuning conversion, phase accumulation,
//!   Welch power spectra and the chaotic correction factor.
//! * [`optics`]: coherent-state algebra for phase shifters, beam splitters,
//!   loss and the end-to-end network transfer.
//! * [`entangle`]: branch-state simulation of the dispersive interaction,
//!   network propagation, pointer measurement and Bell-state fidelities.
//! * [`fock_oracle`]: an independent truncated number-basis simulator used
//!   to cross-check [`entangle`] on small amplitudes.

pub mod chaos;
pub mod entangle;
pub mod error;
pub mod fock_oracle;
pub mod optics;
pub mod spectral;

pub use error::{Error, Result};
