use serde::{Deserialize, Serialize};

use super::statevector::{Statevector, MAX_QUBITS};
use crate::error::{Error, Result};

/// Angles of the embedding and variational layers.
///
/// `omega` is stored row-major as `depth × n_qubits × 3`; the innermost axis
/// holds `(α, β, γ)` of the per-qubit block `R_z(α) R_y(β) R_z(γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub depth: usize,
    pub entanglement: bool,
}

impl CircuitParams {
    pub fn new(theta: Vec<f64>, omega: Vec<f64>, depth: usize, entanglement: bool) -> Result<Self> {
        let params = Self {
            theta,
            omega,
            depth,
            entanglement,
        };
        params.validate()?;
        Ok(params)
    }

    /// All angles zero.
    pub fn zeros(n_qubits: usize, depth: usize, entanglement: bool) -> Self {
        Self {
            theta: vec![0.0; n_qubits],
            omega: vec![0.0; depth * n_qubits * 3],
            depth,
            entanglement,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.theta.len()
    }

    pub fn omega_index(&self, layer: usize, qubit: usize, axis: usize) -> usize {
        (layer * self.n_qubits() + qubit) * 3 + axis
    }

    pub fn omega_at(&self, layer: usize, qubit: usize, axis: usize) -> f64 {
        self.omega[self.omega_index(layer, qubit, axis)]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidParams(format!(
                "circuit needs 1..={MAX_QUBITS} qubits, got {n}"
            )));
        }
        if self.omega.len() != self.depth * n * 3 {
            return Err(Error::InvalidParams(format!(
                "omega has {} entries, expected depth {} x {} qubits x 3",
                self.omega.len(),
                self.depth,
                n
            )));
        }
        if let Some(bad) = self
            .theta
            .iter()
            .chain(&self.omega)
            .find(|a| !a.is_finite())
        {
            return Err(Error::InvalidParams(format!("non-finite angle {bad}")));
        }
        Ok(())
    }

    pub(crate) fn angle(&self, at: AngleRef) -> f64 {
        match at {
            AngleRef::Theta(j) => self.theta[j],
            AngleRef::Omega(i) => self.omega[i],
        }
    }

    pub(crate) fn angle_mut(&mut self, at: AngleRef) -> &mut f64 {
        match at {
            AngleRef::Theta(j) => &mut self.theta[j],
            AngleRef::Omega(i) => &mut self.omega[i],
        }
    }
}

/// Pauli-Z expectations, one per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumReadout {
    pub expectations: Vec<f64>,
}

/// Which trainable angle drives a rotation gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleRef {
    Theta(usize),
    /// Flat index into `CircuitParams::omega`.
    Omega(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationAxis {
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rotation {
        axis: RotationAxis,
        qubit: usize,
        angle: AngleRef,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub(crate) fn apply(&self, state: &mut Statevector, params: &CircuitParams) -> Result<()> {
        match *self {
            Gate::Rotation { axis, qubit, angle } => {
                apply_rotation(state, axis, qubit, params.angle(angle))
            }
            Gate::Cnot { control, target } => state.apply_cnot(control, target),
        }
    }

    pub(crate) fn apply_inverse(
        &self,
        state: &mut Statevector,
        params: &CircuitParams,
    ) -> Result<()> {
        match *self {
            Gate::Rotation { axis, qubit, angle } => {
                apply_rotation(state, axis, qubit, -params.angle(angle))
            }
            Gate::Cnot { control, target } => state.apply_cnot(control, target),
        }
    }
}

pub(crate) fn apply_rotation(
    state: &mut Statevector,
    axis: RotationAxis,
    qubit: usize,
    angle: f64,
) -> Result<()> {
    match axis {
        RotationAxis::Y => state.apply_ry(qubit, angle),
        RotationAxis::Z => state.apply_rz(qubit, angle),
    }
}

/// Gates of the full circuit in application order.
///
/// Embedding `R_y(θ_j)` on every qubit, then per layer the block
/// `R_z(γ)` → `R_y(β)` → `R_z(α)` on every qubit followed by the ring of
/// CNOTs when entanglement is on.
pub fn gate_sequence(params: &CircuitParams) -> Result<Vec<Gate>> {
    params.validate()?;
    let n = params.n_qubits();
    if params.entanglement && params.depth > 0 && n < 2 {
        return Err(Error::InvalidTopology(format!(
            "ring entanglement needs at least 2 qubits, circuit has {n}"
        )));
    }
    let mut gates = Vec::with_capacity(n + params.depth * (4 * n));
    for j in 0..n {
        gates.push(Gate::Rotation {
            axis: RotationAxis::Y,
            qubit: j,
            angle: AngleRef::Theta(j),
        });
    }
    for layer in 0..params.depth {
        for j in 0..n {
            for (axis, k) in [
                (RotationAxis::Z, 2),
                (RotationAxis::Y, 1),
                (RotationAxis::Z, 0),
            ] {
                gates.push(Gate::Rotation {
                    axis,
                    qubit: j,
                    angle: AngleRef::Omega(params.omega_index(layer, j, k)),
                });
            }
        }
        if params.entanglement {
            for j in 0..n - 1 {
                gates.push(Gate::Cnot {
                    control: j,
                    target: j + 1,
                });
            }
            gates.push(Gate::Cnot {
                control: n - 1,
                target: 0,
            });
        }
    }
    Ok(gates)
}

pub(crate) fn execute(params: &CircuitParams, gates: &[Gate]) -> Result<Statevector> {
    let mut state = Statevector::zero(params.n_qubits())?;
    for gate in gates {
        gate.apply(&mut state, params)?;
    }
    Ok(state)
}

/// Runs the circuit from `|0…0⟩` and measures every qubit in Z.
pub fn run_circuit(params: &CircuitParams) -> Result<(Statevector, QuantumReadout)> {
    let gates = gate_sequence(params)?;
    let state = execute(params, &gates)?;
    let expectations = state.z_expectations();
    Ok((state, QuantumReadout { expectations }))
}
