//! Exact statevector simulation with unnormalized post-selection, and the
//! Born-rule readout of a single open qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{BoundCircuit, CircuitError, Gate, ParameterSet, ParameterizedCircuit};

/// Smoothing added to both class probabilities before normalization.
pub const BORN_EPSILON: f64 = 1e-9;
const TIE: f64 = 1e-12;

/// Amplitudes over `qubits` qubits, qubit 0 being the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn zero(qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { qubits, amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.qubits - 1 - q)
    }

    /// Applies `[[m00, m01], [m10, m11]]` to qubit `q`, restricted to basis
    /// states where every qubit in `controls` is set.
    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2], controls: usize) {
        let bit = self.mask(q);
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || i & controls != controls {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
            self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn post_select_zero(&mut self, q: usize) {
        let bit = self.mask(q);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Probabilities of `q` reading 0 and 1.
    pub fn marginal(&self, q: usize) -> (f64, f64) {
        let bit = self.mask(q);
        let mut p = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & bit == 0 {
                p.0 += a.norm_sqr();
            } else {
                p.1 += a.norm_sqr();
            }
        }
        p
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hadamard() -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn pauli_x() -> [[Complex64; 2]; 2] {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

/// `exp(-i theta X / 2)`
pub fn rx(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

/// `exp(-i theta Y / 2)`
pub fn ry(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

/// `exp(-i theta Z / 2)`
pub fn rz(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
}

/// Runs `circuit` on `|0...0>`. Preparation marks a qubit as fresh and
/// must come before any other gate on it.
pub fn simulate(circuit: &BoundCircuit) -> Result<Statevector, CircuitError> {
    circuit.check_qubits()?;
    let mut sv = Statevector::zero(circuit.qubit_count);
    let mut touched = vec![false; circuit.qubit_count];
    for g in &circuit.gates {
        if let Gate::PrepZero(q) = g {
            if touched[*q] {
                return Err(CircuitError::Invalid(format!("qubit {q} prepared after use")));
            }
        }
        for q in g.qubits() {
            touched[q] = true;
        }
        match *g {
            Gate::H(q) => sv.apply_1q(q, hadamard(), 0),
            Gate::Cnot(a, b) => {
                let ctrl = sv.mask(a);
                sv.apply_1q(b, pauli_x(), ctrl)
            }
            Gate::Rx(q, t) => sv.apply_1q(q, rx(t), 0),
            Gate::Ry(q, t) => sv.apply_1q(q, ry(t), 0),
            Gate::Rz(q, t) => sv.apply_1q(q, rz(t), 0),
            Gate::Crz(a, b, t) => {
                let ctrl = sv.mask(a);
                sv.apply_1q(b, rz(t), ctrl)
            }
            Gate::PrepZero(_) => {}
            Gate::PostSelectZero(q) => sv.post_select_zero(q),
        }
    }
    Ok(sv)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub l0: f64,
    pub l1: f64,
}

impl ClassDistribution {
    /// Smooths raw Born weights and normalizes them.
    pub fn from_weights(p0: f64, p1: f64) -> Self {
        let (l0, l1) = (p0 + BORN_EPSILON, p1 + BORN_EPSILON);
        let z = l0 + l1;
        Self {
            l0: l0 / z,
            l1: l1 / z,
        }
    }

    pub fn prob(&self, label: u8) -> f64 {
        if label == 0 {
            self.l0
        } else {
            self.l1
        }
    }
}

/// Readout of the single open qubit of a bound circuit.
pub fn distribution(circuit: &BoundCircuit) -> Result<ClassDistribution, CircuitError> {
    let [q] = circuit.open_outputs[..] else {
        return Err(CircuitError::Invalid(format!(
            "expected one open qubit, found {}",
            circuit.open_outputs.len()
        )));
    };
    let sv = simulate(circuit)?;
    let (p0, p1) = sv.marginal(q);
    Ok(ClassDistribution::from_weights(p0, p1))
}

pub fn class_distribution(
    circuit: &ParameterizedCircuit,
    theta: &ParameterSet,
) -> Result<ClassDistribution, CircuitError> {
    distribution(&circuit.bind(theta)?)
}

/// Most likely class; near-ties go to class 0.
pub fn predict(dist: &ClassDistribution) -> u8 {
    if (dist.l0 - dist.l1).abs() < TIE || dist.l0 > dist.l1 {
        0
    } else {
        1
    }
}
