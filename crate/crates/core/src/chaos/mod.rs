//! Chaotic Colpitts oscillator: dynamics, Lyapunov spectra, bandwidth
//! rescaling and drive-response synchronization.

mod circuit;
mod integrate;
mod lyapunov;
mod sync;

pub use circuit::{
    equilibrium, jacobian, scale_to_bandwidth, vector_field, CircuitParams, CircuitState,
    StateRate, Transistor, REFERENCE_BANDWIDTH_HZ,
};
pub use integrate::{advance, integrate, integrate_visit, Trajectory};
pub use lyapunov::{lyapunov_spectrum, LyapunovOptions};
pub use sync::{conditional_lyapunov, pecora_carroll_receive, sync_error, Drive, SyncError};
