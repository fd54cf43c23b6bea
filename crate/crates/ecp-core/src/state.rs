//! Dense complex state vectors over labeled qubit registers.
//!
//! Layout convention (frozen): the label at position 0 is the most
//! significant bit of the basis index. A register `[a, b]` therefore orders
//! its four amplitudes as |a=0,b=0⟩, |a=0,b=1⟩, |a=1,b=0⟩, |a=1,b=1⟩.
//!
//! Every public operation returns a normalized state (norm 1 within 1e-10);
//! post-selection weight is reported through [`Branch::probability`], never
//! left inside the residual amplitudes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Gate, GateMatrix};
use crate::register::QubitLabel;

/// Amplitudes with modulus below this are treated as floating-point dust and
/// pruned during branch enumeration.
pub const PRUNE_EPS: f64 = 1e-14;

/// Normalization tolerance required of inputs to entanglement measures.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    labels: Vec<QubitLabel>,
    amplitudes: Vec<Complex64>,
}

/// One projective-measurement outcome: the measured bits, the Born weight,
/// and the renormalized residual state over the unmeasured labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Measured label → bit, in the order the measurement was requested.
    pub outcome: Vec<(QubitLabel, u8)>,
    /// Born probability of this outcome (the pre-normalization weight of the
    /// residual).
    pub probability: f64,
    /// Renormalized post-measurement state over the remaining labels, in
    /// register order. For a fully measured register this is a 0-qubit
    /// placeholder and `residual_is_empty` returns true.
    pub residual: StateVector,
}

impl Branch {
    /// `photon=R,atom2=g_L`-style outcome key, stable across runs.
    pub fn outcome_label(&self) -> String {
        self.outcome
            .iter()
            .map(|(l, b)| format!("{}={}", l, l.bit_name(*b)))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Bit measured for `label`, if it was part of this outcome.
    pub fn bit(&self, label: &QubitLabel) -> Option<u8> {
        self.outcome
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, b)| *b)
    }

    pub fn residual_is_empty(&self) -> bool {
        self.residual.labels.is_empty()
    }
}

fn check_unique(labels: &[QubitLabel]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.name.clone()));
        }
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state |basis_index⟩ over `labels`.
    pub fn basis(labels: Vec<QubitLabel>, basis_index: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyRegister);
        }
        check_unique(&labels)?;
        let dim = 1usize << labels.len();
        if basis_index >= dim {
            return Err(Error::IndexOutOfRange {
                index: basis_index,
                dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[basis_index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { labels, amplitudes })
    }

    /// Normalized superposition Σ c_i |basis_i⟩. Returns the state together
    /// with the norm of the raw coefficient vector (the scale divided out).
    pub fn superpose(
        labels: Vec<QubitLabel>,
        terms: &[(Complex64, usize)],
    ) -> Result<(Self, f64)> {
        if labels.is_empty() {
            return Err(Error::EmptyRegister);
        }
        check_unique(&labels)?;
        if terms.is_empty() {
            return Err(Error::EmptyTerms);
        }
        let dim = 1usize << labels.len();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for (c, idx) in terms {
            if *idx >= dim {
                return Err(Error::IndexOutOfRange { index: *idx, dim });
            }
            amplitudes[*idx] += *c;
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(Error::AllZeroCoefficients);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok((StateVector { labels, amplitudes }, norm))
    }

    /// Construct directly from amplitudes, renormalizing. Intended for tests
    /// and oracles; errors on a zero vector or a length/label mismatch.
    pub fn from_amplitudes(labels: Vec<QubitLabel>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyRegister);
        }
        check_unique(&labels)?;
        let dim = 1usize << labels.len();
        if amplitudes.len() != dim {
            return Err(Error::WrongRegisterSize {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(Error::AllZeroCoefficients);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { labels, amplitudes })
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, basis_index: usize) -> Complex64 {
        self.amplitudes[basis_index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn position(&self, label: &QubitLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.name.clone()))
    }

    /// Bit mask selecting the qubit at register position `pos` within a
    /// basis index (position 0 = most significant bit).
    fn mask(&self, pos: usize) -> usize {
        1usize << (self.labels.len() - 1 - pos)
    }

    /// Tensor product; label list is the concatenation, amplitudes the
    /// Kronecker product.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_unique(&labels)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(StateVector { labels, amplitudes })
    }

    /// Apply a gate to the targeted labels. Unitary gates preserve the norm
    /// to machine precision; lossy gates shrink it and the caller is expected
    /// to renormalize or post-select explicitly.
    pub fn apply_gate(&mut self, gate: &Gate, targets: &[&QubitLabel]) -> Result<()> {
        if gate.arity() != targets.len() {
            return Err(Error::ArityMismatch {
                gate: gate.arity(),
                targets: targets.len(),
            });
        }
        match gate.matrix() {
            GateMatrix::One(m) => {
                let mask = self.mask(self.position(targets[0])?);
                for i in 0..self.dim() {
                    if i & mask != 0 {
                        continue;
                    }
                    let j = i | mask;
                    let (v0, v1) = (self.amplitudes[i], self.amplitudes[j]);
                    self.amplitudes[i] = m[0][0] * v0 + m[0][1] * v1;
                    self.amplitudes[j] = m[1][0] * v0 + m[1][1] * v1;
                }
            }
            GateMatrix::Two(m) => {
                let p1 = self.position(targets[0])?;
                let p2 = self.position(targets[1])?;
                if p1 == p2 {
                    return Err(Error::DuplicateLabel(targets[0].name.clone()));
                }
                let (m1, m2) = (self.mask(p1), self.mask(p2));
                for i in 0..self.dim() {
                    if i & m1 != 0 || i & m2 != 0 {
                        continue;
                    }
                    let idx = [i, i | m2, i | m1, i | m1 | m2];
                    let v = idx.map(|k| self.amplitudes[k]);
                    for (row, k) in idx.into_iter().enumerate() {
                        self.amplitudes[k] = (0..4).map(|col| m[row][col] * v[col]).sum();
                    }
                }
            }
        }
        Ok(())
    }

    /// Enumerate every measurement outcome over `measured` with nonzero
    /// probability. Residuals are renormalized; the Born weight stays in
    /// [`Branch::probability`]. Probabilities sum to 1 within 1e-10.
    pub fn enumerate_branches(&self, measured: &[QubitLabel]) -> Result<Vec<Branch>> {
        if measured.is_empty() {
            return Err(Error::EmptyMeasurement);
        }
        check_unique(measured)?;
        let positions: Vec<usize> = measured
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<_>>()?;
        let residual_labels: Vec<QubitLabel> = self
            .labels
            .iter()
            .filter(|l| !measured.contains(l))
            .cloned()
            .collect();
        let residual_positions: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| !measured.contains(l))
            .map(|(p, _)| p)
            .collect();
        let n = self.labels.len();
        let rdim = 1usize << residual_labels.len();

        let mut acc: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        for (i, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm() < PRUNE_EPS {
                continue;
            }
            let mut okey = 0usize;
            for &p in &positions {
                okey = (okey << 1) | ((i >> (n - 1 - p)) & 1);
            }
            let mut ridx = 0usize;
            for &p in &residual_positions {
                ridx = (ridx << 1) | ((i >> (n - 1 - p)) & 1);
            }
            acc.entry(okey).or_insert_with(|| vec![Complex64::new(0.0, 0.0); rdim])[ridx] += amp;
        }

        let mut branches = Vec::with_capacity(acc.len());
        for (okey, mut residual) in acc {
            let p: f64 = residual.iter().map(|a| a.norm_sqr()).sum();
            if p <= 0.0 {
                continue;
            }
            let scale = p.sqrt();
            for a in &mut residual {
                *a /= scale;
            }
            let outcome = positions
                .iter()
                .enumerate()
                .map(|(k, &pos)| {
                    let bit = ((okey >> (positions.len() - 1 - k)) & 1) as u8;
                    (self.labels[pos].clone(), bit)
                })
                .collect();
            branches.push(Branch {
                outcome,
                probability: p,
                residual: StateVector {
                    labels: residual_labels.clone(),
                    amplitudes: residual,
                },
            });
        }
        Ok(branches)
    }

    /// Draw one branch according to the exact Born distribution, using a
    /// ChaCha8 generator seeded with `seed`. Identical seeds give identical
    /// outcomes.
    pub fn sample_branch(&self, measured: &[QubitLabel], seed: u64) -> Result<Branch> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_branch_with(measured, &mut rng)
    }

    /// As [`sample_branch`](Self::sample_branch) but advancing a caller-owned
    /// generator, for drawing sequences.
    pub fn sample_branch_with(
        &self,
        measured: &[QubitLabel],
        rng: &mut ChaCha8Rng,
    ) -> Result<Branch> {
        let branches = self.enumerate_branches(measured)?;
        let u: f64 = rng.gen();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let mut cum = 0.0;
        for b in &branches {
            cum += b.probability / total;
            if u < cum {
                return Ok(b.clone());
            }
        }
        // u landed in the rounding gap at the top of the CDF.
        Ok(branches.last().expect("nonempty branch list").clone())
    }

    /// Concurrence 2|ad − bc| of a pure two-qubit state a|00⟩+b|01⟩+c|10⟩+d|11⟩.
    pub fn concurrence(&self) -> Result<f64> {
        if self.labels.len() != 2 {
            return Err(Error::WrongRegisterSize {
                expected: 2,
                got: self.labels.len(),
            });
        }
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let c = 2.0
            * (self.amplitudes[0] * self.amplitudes[3]
                - self.amplitudes[1] * self.amplitudes[2])
                .norm();
        Ok(c.clamp(0.0, 1.0))
    }

    /// Squared overlap |⟨target|self⟩|², insensitive to global phase. The
    /// two states must cover the same labels; differing register order is
    /// handled by permutation.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        if self.labels.len() != target.labels.len() {
            return Err(Error::LabelMismatch);
        }
        let norm_s = self.norm();
        if (norm_s - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: norm_s });
        }
        let norm_t = target.norm();
        if (norm_t - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: norm_t });
        }
        // Position of each of self's labels inside target's register.
        let perm: Vec<usize> = self
            .labels
            .iter()
            .map(|l| target.position(l))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::LabelMismatch)?;
        let n = self.labels.len();
        let mut overlap = Complex64::new(0.0, 0.0);
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let mut j = 0usize;
            for (k, &pk) in perm.iter().enumerate() {
                let bit = (i >> (n - 1 - k)) & 1;
                j |= bit << (n - 1 - pk);
            }
            overlap += target.amplitudes[j].conj() * amp;
        }
        Ok(overlap.norm_sqr().clamp(0.0, 1.0))
    }
}
