//! Exact density-matrix simulation and verification of an
//! entanglement-swapping qubit bus.
//!
//! A chain of refreshable qubits is driven through a fixed-depth circuit
//! that leaves its two ends maximally entangled after a parity-conditioned
//! completion Pauli, independent of length. This crate builds that
//! protocol under three gate error models, checks the closed-form end-pair
//! fidelities against exact simulation, purifies the resulting pairs, and
//! consumes them to execute nonlocal gates.
//!
//! Module map:
//! - [`cmatrix`], [`pauli`], [`density`]: dense operator algebra and exact
//!   mixed-state evolution for small registers (the ground-truth oracle).
//! - [`noise`]: the gate error channels, detector-noisy readout, and the
//!   bilateral Pauli twirl.
//! - [`swap`]: the six-layer swapping circuit, completion parity algebra,
//!   exact bus simulation, and the serial swap-chain baseline.
//! - [`belldiag`]: the Bell-diagonal fast path and the closed-form
//!   fidelities in both exponent conventions.
//! - [`timing`]: protocol time accounting.
//! - [`purify`]: recurrence-free purification rounds and a simple nested
//!   repeater schedule.
//! - [`gate`]: teleported two-qubit gates consuming one resource pair.
//! - [`verify`]: the acceptance checks run by tests and the CLI.

pub mod belldiag;
pub mod cmatrix;
pub mod density;
pub mod error;
pub mod gate;
pub mod noise;
pub mod pauli;
pub mod purify;
pub mod swap;
pub mod timing;
pub mod verify;

pub use belldiag::{
    bell_diagonal_closed_form, compose_chain, elementary_pair, fidelity_closed_form,
    fidelity_closed_form_oracle, swap_recursion_step, BellDiagonal, ExponentConvention,
};
pub use cmatrix::{CMatrix, CVector};
pub use density::{DensityMatrix, MeasureBranch, DEFAULT_QUBIT_CAP};
pub use error::{Error, Result};
pub use gate::{gate_fidelity_closed_form, teleported_gate, GateJob, TargetGate};
pub use noise::{NoiseModel, PhaseNoise};
pub use pauli::PauliIndex;
pub use purify::{deutsch_round, nested_repeater, purify_to_target, PurifyConfig, PurifyOutcome};
pub use swap::{
    build_swap_circuit, parity_completion, simulate_bus_exact, swap_chain_baseline, BusSpec,
    ErrorModel, MeasurementRecord,
};
pub use timing::{protocol_times, TimeModel};
