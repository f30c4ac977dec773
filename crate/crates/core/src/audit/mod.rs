//! Z-error propagation for the Shor-state fault analysis, and structural
//! audits of compiled circuits.

mod shor;
mod transversality;
mod zmask;

pub use shor::{
    audit_shor, canonical, enumerate_single_faults, output_stabilizers, shor_decode_circuit, shor_prep_circuit,
    single_fault_sites, FaultClass, MarkedCheck, ShorAudit, SiteRecord, MARKED_SITES, SHOR_DECODE_CNOTS,
    SHOR_PREP_CNOTS, SHOR_X_MEASURED, SHOR_Z_MEASURED,
};
pub use transversality::{transversality_audit, FlagKind, TransversalityFlag, TransversalityReport};
pub use zmask::{propagate_z, syndrome_of, Basis, CliffordCircuit, FaultSite, Location, Prep, ZMask};
