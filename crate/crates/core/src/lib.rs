//! Reversible modular adders, residue number system selection, noisy
//! simulation and distributed residue addition.

pub mod adders;
pub mod circuit;
pub mod dqc;
pub mod reference;
pub mod report;
pub mod rns;
pub mod select;
pub mod sim;

pub use adders::{AdderError, AdderSpec, Family};
pub use circuit::{Circuit, CircuitError, Gate, GateKind, Register, RegisterRole, ResourceReport};
pub use rns::{crt_reconstruct, rns_efficiency, Efficiency, RnsError, RnsSet};
pub use select::{explain_selection, select_rns, DepthSource, SelectError, SelectionTrace, SelectorConfig};
pub use sim::{output_probability, run_exact, run_shots, NoiseModel, RunSpec, Sampling, SimError};
