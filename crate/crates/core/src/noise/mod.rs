//! Density-matrix check that leaking a function of the wires acts on a
//! quantum state exactly like a random phase built from the same function.

mod channel;
mod density;

pub use channel::{
    channel_distance, dephasing_channel, leakage_channel, leakage_mixture, lemma_sweep, mixture_channel,
    output_validity, phase_error_identity_distance, probe_states, state_distance, Channel, SweepReport, LEMMA_TOL,
    PHASE_ERROR_TOL,
};
pub use density::{hermitian_error, max_abs_diff, min_eigenvalue, CMatrix, DensityMatrix, LeakageFunction, MAX_WIRES};
