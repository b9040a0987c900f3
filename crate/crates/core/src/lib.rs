//! Exact simulator of the deterministic six-state two-way QKD protocol.
//!
//! Bob sends qubit pairs prepared in two different bases out of Z, X, Y.
//! Alice either encodes two key bits with one of `I, Z, X, iY` applied to both
//! qubits, or measures them to check for an eavesdropper. The crate models
//! Eve's intercept-resend attack in arbitrary bases and the double-CNOT
//! ancilla attack, and evaluates scenarios by exhaustive branch enumeration
//! or by seeded Monte Carlo.
//!
//! Modules, bottom up:
//! - [`qcore`]: 1-3 qubit pure states, gates, projective measurement.
//! - [`chooser`]: branch resolution (sampling or exact replay).
//! - [`protocol`]: one protocol round.
//! - [`adversary`]: Eve's strategies.
//! - [`analysis`]: scenario statistics, information, sweeps.
//! - [`report`], [`claims`], [`cli`]: output and the command-line tool.

pub mod adversary;
pub mod analysis;
pub mod chooser;
pub mod claims;
pub mod cli;
pub mod protocol;
pub mod qcore;
pub mod report;

pub use adversary::{CnotSet, EveStrategy, Inference, Variant};
pub use analysis::{enumerate_scenario, monte_carlo, ScenarioConfig, ScenarioStats};
pub use qcore::{MeasBasis, PauliCode, PureState};
