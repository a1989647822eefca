//! Exact statevector simulation of the variational feature-mixing circuit.
//!
//! Qubit `j` of the register (0-indexed) is bit position `j` of the basis
//! index, least significant first. The first qubit therefore toggles basis
//! index 1, the second index 2, and so on. Global phase is never observable
//! here: only probabilities and Pauli-Z expectations leave this module.

mod circuit;
mod gradient;
mod statevector;

pub use circuit::{
    gate_sequence, run_circuit, AngleRef, CircuitParams, Gate, QuantumReadout, RotationAxis,
};
pub use gradient::{circuit_gradients, circuit_vjp, CircuitGradients, CircuitVjp, GradientMethod};
pub use statevector::{Statevector, MAX_QUBITS};
