//! Minimal dense real linear algebra over qubit registers.
//!
//! Every gate used by the amplitude-redistribution circuits is a real
//! orthogonal matrix, so operators and states store plain `f64` amplitudes.
//! Matrices are row-major with dimension `2^num_qubits`; qubit `k`
//! corresponds to bit `k` of the basis index (qubit 0 is the least
//! significant bit).
//!
//! Dense products are a verification path, not a production path: operators
//! are capped at [`MAX_DENSE_QUBITS`] and larger registers must go through
//! gate-wise state application.

use crate::error::{QaraError, Result};

/// Largest register for which dense operators may be built.
pub const MAX_DENSE_QUBITS: usize = 14;

/// A square real matrix acting on a register of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    num_qubits: usize,
    entries: Vec<f64>,
}

impl DenseOperator {
    /// Zero matrix on `num_qubits` qubits.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_DENSE_QUBITS {
            return Err(QaraError::QubitCountOutOfRange {
                n: num_qubits,
                min: 1,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        Ok(Self {
            num_qubits,
            entries: vec![0.0; dim * dim],
        })
    }

    /// Identity on `num_qubits` qubits.
    pub fn identity(num_qubits: usize) -> Result<Self> {
        let mut op = Self::zeros(num_qubits)?;
        let dim = op.dim();
        for i in 0..dim {
            op.entries[i * dim + i] = 1.0;
        }
        Ok(op)
    }

    /// Build from a flat row-major entry vector of length `4^num_qubits`.
    pub fn from_entries(num_qubits: usize, entries: Vec<f64>) -> Result<Self> {
        let op = Self::zeros(num_qubits)?;
        let dim = op.dim();
        if entries.len() != dim * dim {
            return Err(QaraError::DimensionMismatch {
                left: num_qubits,
                right: entries.len(),
            });
        }
        Ok(Self {
            num_qubits,
            entries,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Matrix dimension, `2^num_qubits`.
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let dim = self.dim();
        self.entries[row * dim + col] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Standard matrix product `self · rhs`.
    pub fn mat_mul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        if self.num_qubits != rhs.num_qubits {
            return Err(QaraError::DimensionMismatch {
                left: self.num_qubits,
                right: rhs.num_qubits,
            });
        }
        let dim = self.dim();
        let mut out = vec![0.0; dim * dim];
        // i-k-j order keeps the inner loop contiguous in both operands.
        for i in 0..dim {
            for k in 0..dim {
                let a = self.entries[i * dim + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.entries[k * dim..(k + 1) * dim];
                let acc = &mut out[i * dim..(i + 1) * dim];
                for j in 0..dim {
                    acc[j] += a * row[j];
                }
            }
        }
        Ok(DenseOperator {
            num_qubits: self.num_qubits,
            entries: out,
        })
    }

    /// Kronecker product; `self` acts on the high qubits, `rhs` on the low.
    pub fn kron(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        let num_qubits = self.num_qubits + rhs.num_qubits;
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(QaraError::QubitCountOutOfRange {
                n: num_qubits,
                min: 1,
                max: MAX_DENSE_QUBITS,
            });
        }
        let (da, db) = (self.dim(), rhs.dim());
        let dim = da * db;
        let mut out = vec![0.0; dim * dim];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.entries[ia * da + ja];
                if a == 0.0 {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib) * dim + (ja * db + jb)] = a * rhs.entries[ib * db + jb];
                    }
                }
            }
        }
        Ok(DenseOperator {
            num_qubits,
            entries: out,
        })
    }

    pub fn transpose(&self) -> DenseOperator {
        let dim = self.dim();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[j * dim + i] = self.entries[i * dim + j];
            }
        }
        DenseOperator {
            num_qubits: self.num_qubits,
            entries: out,
        }
    }

    /// Largest absolute entry difference against `rhs`.
    pub fn max_abs_diff(&self, rhs: &DenseOperator) -> Result<f64> {
        if self.num_qubits != rhs.num_qubits {
            return Err(QaraError::DimensionMismatch {
                left: self.num_qubits,
                right: rhs.num_qubits,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// True iff every entry of `self` and `rhs` agrees within `tol`.
    pub fn approx_equal(&self, rhs: &DenseOperator, tol: f64) -> Result<bool> {
        Ok(self.max_abs_diff(rhs)? <= tol)
    }

    /// `max |MᵀM − I|`; zero for an exactly orthogonal matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        let gram = self
            .transpose()
            .mat_mul(self)
            .expect("same dimensions by construction");
        let identity =
            DenseOperator::identity(self.num_qubits).expect("dimension already validated");
        gram.max_abs_diff(&identity).expect("same dimensions")
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.orthogonality_defect() <= tol
    }

    /// Apply the operator to a state, `|out⟩ = M|in⟩`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.num_qubits != state.num_qubits {
            return Err(QaraError::DimensionMismatch {
                left: self.num_qubits,
                right: state.num_qubits,
            });
        }
        let dim = self.dim();
        let mut out = vec![0.0; dim];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.entries[i * dim..(i + 1) * dim];
            *slot = row.iter().zip(&state.amplitudes).map(|(m, a)| m * a).sum();
        }
        Ok(StateVector {
            num_qubits: state.num_qubits,
            amplitudes: out,
        })
    }
}

/// Real amplitude vector over a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<f64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(QaraError::QubitCountOutOfRange {
                n: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(QaraError::ValueOutOfRange {
                value: index as u64,
                bits: num_qubits as u32,
            });
        }
        let mut amplitudes = vec![0.0; dim];
        amplitudes[index] = 1.0;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != 1 << num_qubits {
            return Err(QaraError::DimensionMismatch {
                left: num_qubits,
                right: amplitudes.len(),
            });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    /// Sum of squared amplitudes; 1 for a normalized state.
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }
}
