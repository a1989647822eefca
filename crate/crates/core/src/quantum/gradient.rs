//! Derivatives of the Z readout with respect to every circuit angle.
//!
//! Two independent routes are provided. The parameter-shift rule re-runs the
//! circuit with each angle moved by ±π/2; it is exact for `exp(-iaP/2)`
//! rotations and serves as the reference. The direct route differentiates
//! through the statevector in reverse (adjoint) order and costs about three
//! circuit executions per upstream seed, which is what training uses.

use std::f64::consts::{FRAC_PI_2, PI};

use super::circuit::{apply_rotation, execute, gate_sequence, AngleRef, CircuitParams, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMethod {
    ParameterShift,
    Direct,
}

/// Full Jacobian of the readout.
///
/// `theta[i * n + j] = ∂q_i/∂θ_j` and
/// `omega[i * P + p] = ∂q_i/∂omega[p]` with `P = depth * n * 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitGradients {
    pub n_qubits: usize,
    pub depth: usize,
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
}

impl CircuitGradients {
    pub fn d_theta(&self, output: usize, angle: usize) -> f64 {
        self.theta[output * self.n_qubits + angle]
    }

    pub fn d_omega(&self, output: usize, flat: usize) -> f64 {
        self.omega[output * self.depth * self.n_qubits * 3 + flat]
    }

    pub fn max_abs_diff(&self, other: &CircuitGradients) -> f64 {
        self.theta
            .iter()
            .zip(&other.theta)
            .chain(self.omega.iter().zip(&other.omega))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Vector-Jacobian product `gᵀ J` for an upstream gradient `g` over the
/// readout.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitVjp {
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
}

pub fn circuit_gradients(
    params: &CircuitParams,
    method: GradientMethod,
) -> Result<CircuitGradients> {
    match method {
        GradientMethod::ParameterShift => parameter_shift(params),
        GradientMethod::Direct => direct_jacobian(params),
    }
}

fn parameter_shift(params: &CircuitParams) -> Result<CircuitGradients> {
    let gates = gate_sequence(params)?;
    let n = params.n_qubits();
    let n_omega = params.omega.len();
    let mut grads = CircuitGradients {
        n_qubits: n,
        depth: params.depth,
        theta: vec![0.0; n * n],
        omega: vec![0.0; n * n_omega],
    };
    let mut shifted = params.clone();
    let mut readout_at = |at: AngleRef, shift: f64| -> Result<Vec<f64>> {
        let original = shifted.angle(at);
        *shifted.angle_mut(at) = original + shift;
        let q = execute(&shifted, &gates)?.z_expectations();
        *shifted.angle_mut(at) = original;
        Ok(q)
    };
    for j in 0..n {
        let plus = readout_at(AngleRef::Theta(j), FRAC_PI_2)?;
        let minus = readout_at(AngleRef::Theta(j), -FRAC_PI_2)?;
        for i in 0..n {
            grads.theta[i * n + j] = 0.5 * (plus[i] - minus[i]);
        }
    }
    for p in 0..n_omega {
        let plus = readout_at(AngleRef::Omega(p), FRAC_PI_2)?;
        let minus = readout_at(AngleRef::Omega(p), -FRAC_PI_2)?;
        for i in 0..n {
            grads.omega[i * n_omega + p] = 0.5 * (plus[i] - minus[i]);
        }
    }
    Ok(grads)
}

fn direct_jacobian(params: &CircuitParams) -> Result<CircuitGradients> {
    let n = params.n_qubits();
    let n_omega = params.omega.len();
    let mut grads = CircuitGradients {
        n_qubits: n,
        depth: params.depth,
        theta: vec![0.0; n * n],
        omega: vec![0.0; n * n_omega],
    };
    let mut seed = vec![0.0; n];
    for i in 0..n {
        seed.iter_mut().for_each(|s| *s = 0.0);
        seed[i] = 1.0;
        let row = circuit_vjp(params, &seed)?;
        grads.theta[i * n..(i + 1) * n].copy_from_slice(&row.theta);
        grads.omega[i * n_omega..(i + 1) * n_omega].copy_from_slice(&row.omega);
    }
    Ok(grads)
}

/// Reverse-mode derivative of `Σ_i upstream[i] · ⟨Z_i⟩`.
///
/// With `R(a) = exp(-iaP/2)` one has `dR/da = R(a + π)/2`, so every rotation
/// contributes `Re⟨λ|R(a + π)|ψ_before⟩`, where `λ` is the observable-weighted
/// final state pulled back through the later gates.
pub fn circuit_vjp(params: &CircuitParams, upstream: &[f64]) -> Result<CircuitVjp> {
    let n = params.n_qubits();
    if upstream.len() != n {
        return Err(Error::shape(format!(
            "upstream gradient has {} entries for {} qubits",
            upstream.len(),
            n
        )));
    }
    let gates = gate_sequence(params)?;
    let mut psi = execute(params, &gates)?;

    let dim = 1usize << n;
    let observable: Vec<f64> = (0..dim)
        .map(|b| {
            upstream
                .iter()
                .enumerate()
                .map(|(j, g)| if b >> j & 1 == 0 { *g } else { -*g })
                .sum()
        })
        .collect();
    let mut lambda = psi.clone();
    lambda.scale_diagonal(&observable);

    let mut out = CircuitVjp {
        theta: vec![0.0; n],
        omega: vec![0.0; params.omega.len()],
    };
    for gate in gates.iter().rev() {
        gate.apply_inverse(&mut psi, params)?;
        if let Gate::Rotation { axis, qubit, angle } = *gate {
            let mut derivative = psi.clone();
            apply_rotation(&mut derivative, axis, qubit, params.angle(angle) + PI)?;
            let g = derivative.inner(&lambda).re;
            match angle {
                AngleRef::Theta(j) => out.theta[j] += g,
                AngleRef::Omega(p) => out.omega[p] += g,
            }
        }
        gate.apply_inverse(&mut lambda, params)?;
    }
    Ok(out)
}
