//! One- and two-qubit gates as dense complex matrices.
//!
//! Construction checks unitarity (`U†U = I` within 1e-12) unless the gate is
//! explicitly flagged lossy, which is reserved for diagonal operators whose
//! entries have modulus below one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the `U†U = I` check at gate construction.
pub const UNITARITY_TOL: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateMatrix {
    One([[Complex64; 2]; 2]),
    Two([[Complex64; 4]; 4]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    name: String,
    matrix: GateMatrix,
    lossy: bool,
}

impl Gate {
    /// Build a single-qubit gate, verifying unitarity.
    pub fn single(name: impl Into<String>, m: [[Complex64; 2]; 2]) -> Result<Self> {
        let gate = Gate {
            name: name.into(),
            matrix: GateMatrix::One(m),
            lossy: false,
        };
        gate.check_unitary()?;
        Ok(gate)
    }

    /// Build a two-qubit gate, verifying unitarity. Row/column index is
    /// `2*b1 + b2` for target qubits `(q1, q2)`.
    pub fn two(name: impl Into<String>, m: [[Complex64; 4]; 4]) -> Result<Self> {
        let gate = Gate {
            name: name.into(),
            matrix: GateMatrix::Two(m),
            lossy: false,
        };
        gate.check_unitary()?;
        Ok(gate)
    }

    /// Diagonal two-qubit gate from its four diagonal entries.
    pub fn diagonal_two(name: impl Into<String>, d: [Complex64; 4]) -> Result<Self> {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, entry) in d.iter().enumerate() {
            m[i][i] = *entry;
        }
        Self::two(name, m)
    }

    /// Diagonal two-qubit operator with sub-unit moduli, flagged lossy.
    /// Skips the unitarity check; applying it shrinks the state norm.
    pub fn lossy_diagonal_two(name: impl Into<String>, d: [Complex64; 4]) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, entry) in d.iter().enumerate() {
            m[i][i] = *entry;
        }
        Gate {
            name: name.into(),
            matrix: GateMatrix::Two(m),
            lossy: true,
        }
    }

    /// Hadamard: |0⟩ → (|0⟩+|1⟩)/√2, |1⟩ → (|0⟩−|1⟩)/√2.
    ///
    /// This is both the atomic Hadamard (driven by classical fields) and the
    /// photonic one (a quarter-wave plate) in the protocols here.
    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Gate {
            name: "H".into(),
            matrix: GateMatrix::One([[h, h], [h, -h]]),
            lossy: false,
        }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Gate {
            name: "I".into(),
            matrix: GateMatrix::One([[one, zero], [zero, one]]),
            lossy: false,
        }
    }

    pub fn pauli_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Gate {
            name: "X".into(),
            matrix: GateMatrix::One([[zero, one], [one, zero]]),
            lossy: false,
        }
    }

    pub fn pauli_z() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Gate {
            name: "Z".into(),
            matrix: GateMatrix::One([[one, zero], [zero, -one]]),
            lossy: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        match self.matrix {
            GateMatrix::One(_) => 1,
            GateMatrix::Two(_) => 2,
        }
    }

    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    pub fn matrix(&self) -> &GateMatrix {
        &self.matrix
    }

    /// Max |(U†U − I)_ij| over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let (flat, n): (Vec<Complex64>, usize) = match &self.matrix {
            GateMatrix::One(m) => (m.iter().flatten().copied().collect(), 2),
            GateMatrix::Two(m) => (m.iter().flatten().copied().collect(), 4),
        };
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                // (U†U)_ij = Σ_k conj(U_ki) U_kj
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += flat[k * n + i].conj() * flat[k * n + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                max = max.max((s - target).norm());
            }
        }
        max
    }

    fn check_unitary(&self) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::NonUnitaryGate {
                name: self.name.clone(),
                deviation: dev,
            });
        }
        Ok(())
    }
}
