//! Entanglement distribution over the network: dispersive probe coupling,
//! branch-state propagation, pointer measurement with post-selection and
//! two-qubit fidelities.

mod branch;
mod density;
mod distribute;
mod measure;

pub use branch::{
    attach_probe, dispersive_interact, prepare_plus, propagate_network, Branch, BranchState, ModeId,
    QubitId, MAX_QUBITS,
};
pub use density::{fidelity, reduced_density, Bell, TwoQubitDensityMatrix};
pub use distribute::{
    closed_form_fidelity, distribute, prepare_network_state, DispersiveCoupling, DistributeConfig,
    DistributeResult, ARM_A, ARM_B,
};
pub use measure::{measure_pointer, measure_pointer_all, sample_outcome, MeasurementModel, Outcome};
