//! Compiler and laboratory for leakage-resilient classical circuits.
//!
//! Reversible circuits over {NOT, CNOT, Toffoli} are compiled into circuits that
//! operate on Steane-encoded blocks, using the classical shadows of the
//! fault-tolerant gadgets (transversal gates, Steane syndrome extraction,
//! Shor-state and Toffoli-ancilla preparation). The crate also ships the tools
//! used to check the construction:
//!
//! - [`circuit`]: bit-level IR, wire events, evaluator and netlist format.
//! - [`steane`]: Hamming/Steane tables and the overlap lemmas.
//! - [`compiler`]: gadget emission, secret encoding and location reports.
//! - [`audit`]: Z-mask propagation for the Shor-state fault analysis and
//!   transversality checks.
//! - [`noise`]: small density-matrix engine comparing leakage channels with
//!   dephasing channels.
//! - [`lab`]: independent-leakage sampler and distinguishing-advantage
//!   estimators.

pub mod audit;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod lab;
pub mod noise;
pub mod rng;
pub mod steane;

pub use error::{Error, Result};
