//! The amplitude-redistribution rotation operator `R_n(φ)` and its circuit
//! decomposition.
//!
//! `R_n(φ)` is the `2^n × 2^n` real orthogonal matrix with `cos(φ/2)` on the
//! diagonal and `±sin(φ/2)/√(2^n−1)` everywhere else. The sign layout is
//! recursive: `R_1(φ)` is the plain Y-rotation
//!
//! ```text
//!   [ cos(φ/2)  −sin(φ/2) ]
//!   [ sin(φ/2)   cos(φ/2) ]
//! ```
//!
//! and `R_{n+1} = [[A, −B], [B, A]]` where the `A` blocks carry the signs of
//! `R_n` and the `B` blocks carry the sign pattern of the `n`-qubit
//! Walsh–Hadamard transform.
//!
//! The module builds the operator three ways — entrywise closed form
//! ([`dense_rotation`]), block recursion ([`dense_rotation_recursive`]) and
//! elementary-gate decomposition ([`decompose_rotation`]) — so each route can
//! check the others.

use crate::error::{QaraError, Result};
use crate::tensor::{DenseOperator, StateVector};

/// Upper qubit bound for dense rotation construction.
pub const MAX_ROTATION_QUBITS: usize = 12;
/// Upper qubit bound for dense Walsh–Hadamard construction.
pub const MAX_HADAMARD_QUBITS: usize = 14;

/// Sign of the Walsh–Hadamard entry at `(row, col)`: `(−1)^popcount(row & col)`.
#[inline]
fn hadamard_sign(row: usize, col: usize) -> f64 {
    if (row & col).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Sign of the off-diagonal entry `(row, col)` of `R_n(φ)` under the
/// recursive layout.
///
/// Descend the block recursion while both indices fall in the same half; the
/// first half-split that separates them lands either in the `−B` block
/// (upper right) or the `+B` block (lower left), whose interior signs are
/// Walsh–Hadamard signs of the sub-indices.
#[inline]
pub(crate) fn off_diagonal_sign(row: usize, col: usize) -> f64 {
    debug_assert_ne!(row, col);
    let split = usize::BITS - 1 - (row ^ col).leading_zeros();
    let mask = (1usize << split) - 1;
    let h = hadamard_sign(row & mask, col & mask);
    if row & (1 << split) != 0 {
        h
    } else {
        -h
    }
}

fn check_qubits(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(QaraError::QubitCountOutOfRange { n, min: 1, max });
    }
    Ok(())
}

/// The `n`-qubit Walsh–Hadamard operator, the n-fold Kronecker power of the
/// 2×2 Hadamard.
pub fn hadamard_n(n: usize) -> Result<DenseOperator> {
    check_qubits(n, MAX_HADAMARD_QUBITS)?;
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    let mut op = DenseOperator::zeros(n)?;
    for row in 0..dim {
        for col in 0..dim {
            op.set(row, col, scale * hadamard_sign(row, col));
        }
    }
    Ok(op)
}

/// `R_n(φ)` built directly from the entrywise closed form.
pub fn dense_rotation(n: usize, phi: f64) -> Result<DenseOperator> {
    check_qubits(n, MAX_ROTATION_QUBITS)?;
    let dim = 1usize << n;
    let diag = (phi / 2.0).cos();
    let off = (phi / 2.0).sin() / ((dim - 1) as f64).sqrt();
    let mut op = DenseOperator::zeros(n)?;
    for row in 0..dim {
        for col in 0..dim {
            let value = if row == col {
                diag
            } else {
                off * off_diagonal_sign(row, col)
            };
            op.set(row, col, value);
        }
    }
    Ok(op)
}

/// One column of `R_n(φ)` without materializing the matrix.
///
/// This is the branch backend's workhorse: applying `R_n(φ)` to the basis
/// vector `e_col` yields exactly this column.
pub fn rotation_column(n: usize, phi: f64, col: usize) -> Vec<f64> {
    let dim = 1usize << n;
    debug_assert!(col < dim);
    let diag = (phi / 2.0).cos();
    let off = (phi / 2.0).sin() / ((dim - 1) as f64).sqrt();
    (0..dim)
        .map(|row| {
            if row == col {
                diag
            } else {
                off * off_diagonal_sign(row, col)
            }
        })
        .collect()
}

/// `R_n(φ)` built by the block recursion
/// `R_{n+1}(φ) = [[√(1−a²)·R_n(φ'), −a·H_n], [a·H_n, √(1−a²)·R_n(φ')]]`
/// with `a = √(2^n/(2^{n+1}−1))·sin(φ/2)`.
///
/// The inner angle `φ'` is fixed by the diagonal, `√(1−a²)·cos(φ'/2) =
/// cos(φ/2)`; the off-diagonal magnitudes then agree identically, which the
/// construction asserts at every level.
pub fn dense_rotation_recursive(n: usize, phi: f64) -> Result<DenseOperator> {
    check_qubits(n, MAX_ROTATION_QUBITS)?;
    if n == 1 {
        let (s, c) = (phi / 2.0).sin_cos();
        return DenseOperator::from_entries(1, vec![c, -s, s, c]);
    }
    let sub = 1usize << (n - 1);
    let (sin_half, cos_half) = (phi / 2.0).sin_cos();
    let a = (sub as f64 / (2 * sub - 1) as f64).sqrt() * sin_half;
    let b = (1.0 - a * a).sqrt();
    // Inner half-angle from the diagonal constraint; atan2 is scale-free so
    // the common 1/b factor drops out.
    let ratio = (((sub - 1) as f64) / ((2 * sub - 1) as f64)).sqrt();
    let inner_phi = 2.0 * f64::atan2(sin_half * ratio, cos_half);
    // Off-diagonal consistency between the two levels of the recursion.
    let inner_off = b * (inner_phi / 2.0).sin() / (((sub - 1).max(1)) as f64).sqrt();
    let outer_off = sin_half / ((2 * sub - 1) as f64).sqrt();
    assert!(
        (inner_off - outer_off).abs() <= 1e-12,
        "block recursion off-diagonal mismatch: {inner_off} vs {outer_off}"
    );

    let inner = dense_rotation_recursive(n - 1, inner_phi)?;
    let hadamard = hadamard_n(n - 1)?;
    let mut op = DenseOperator::zeros(n)?;
    for row in 0..sub {
        for col in 0..sub {
            let r = b * inner.get(row, col);
            let h = a * hadamard.get(row, col);
            op.set(row, col, r);
            op.set(row + sub, col + sub, r);
            op.set(row, col + sub, -h);
            op.set(row + sub, col, h);
        }
    }
    Ok(op)
}

/// True iff `H_n · R_n(φ) · H_n` equals the transpose of `R_n(φ)` within
/// `1e−11` (transpose equals the adjoint for these real matrices).
pub fn verify_hadamard_conjugation(n: usize, phi: f64) -> Result<bool> {
    let h = hadamard_n(n)?;
    let r = dense_rotation(n, phi)?;
    let conjugated = h.mat_mul(&r)?.mat_mul(&h)?;
    Ok(conjugated.max_abs_diff(&r.transpose())? <= 1e-11)
}

/// Control polarity: fire when the control qubit reads 1 or when it reads 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    One,
    Zero,
}

/// A qubit index paired with the polarity it must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn on_one(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::One,
        }
    }

    pub fn on_zero(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Zero,
        }
    }

    #[inline]
    fn satisfied_by(&self, basis_index: usize) -> bool {
        let bit = basis_index >> self.qubit & 1;
        match self.polarity {
            Polarity::One => bit == 1,
            Polarity::Zero => bit == 0,
        }
    }
}

/// Elementary single-target gate kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// Y-rotation by the given angle (radians).
    Ry(f64),
    Hadamard,
    Not,
}

impl GateKind {
    /// The 2×2 matrix `[[a, b], [c, d]]` of the gate.
    fn matrix(self) -> [f64; 4] {
        match self {
            GateKind::Ry(angle) => {
                let (s, c) = (angle / 2.0).sin_cos();
                [c, -s, s, c]
            }
            GateKind::Hadamard => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                [h, h, h, -h]
            }
            GateKind::Not => [0.0, 1.0, 1.0, 0.0],
        }
    }
}

/// A single-target gate with an arbitrary set of polarity-aware controls.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl GateOp {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn with_controls(kind: GateKind, target: usize, controls: Vec<Control>) -> Self {
        debug_assert!(controls.iter().all(|c| c.qubit != target));
        Self {
            kind,
            target,
            controls,
        }
    }

    /// All qubits the gate touches (target plus controls).
    fn support(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().map(|c| c.qubit))
    }

    fn max_qubit(&self) -> usize {
        self.support().max().unwrap_or(self.target)
    }

    /// Apply in place to an amplitude slice of length `2^register_size`.
    fn apply_to(&self, amplitudes: &mut [f64]) {
        let [a, b, c, d] = self.kind.matrix();
        let target_bit = 1usize << self.target;
        for index in 0..amplitudes.len() {
            if index & target_bit != 0 {
                continue; // visit each (0,1) pair once, from its 0 side
            }
            if !self.controls.iter().all(|ctl| ctl.satisfied_by(index)) {
                continue;
            }
            let partner = index | target_bit;
            let lo = amplitudes[index];
            let hi = amplitudes[partner];
            amplitudes[index] = a * lo + b * hi;
            amplitudes[partner] = c * lo + d * hi;
        }
    }
}

/// An ordered elementary-gate sequence over a fixed register.
///
/// Index 0 is applied to the state first (leftmost in circuit diagrams), so
/// dense evaluation multiplies the gate matrices in reverse list order.
#[derive(Debug, Clone, PartialEq)]
pub struct GateList {
    pub register_size: usize,
    pub gates: Vec<GateOp>,
}

impl GateList {
    pub fn new(register_size: usize, gates: Vec<GateOp>) -> Self {
        debug_assert!(gates.iter().all(|g| g.max_qubit() < register_size));
        Self {
            register_size,
            gates,
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Apply every gate in order to `state`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.num_qubits() != self.register_size {
            return Err(QaraError::DimensionMismatch {
                left: self.register_size,
                right: state.num_qubits(),
            });
        }
        let mut out = state.clone();
        for gate in &self.gates {
            gate.apply_to(out.amplitudes_mut());
        }
        Ok(out)
    }

    /// Evaluate the whole list as one dense operator by applying it to each
    /// basis column of the identity.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        let mut result = DenseOperator::zeros(self.register_size)?;
        let dim = result.dim();
        let mut column = vec![0.0; dim];
        for col in 0..dim {
            column.fill(0.0);
            column[col] = 1.0;
            for gate in &self.gates {
                gate.apply_to(&mut column);
            }
            for (row, &amp) in column.iter().enumerate() {
                result.set(row, col, amp);
            }
        }
        Ok(result)
    }

    /// Add `extra` controls to every gate; the result acts as the original
    /// list on the satisfied subspace and as the identity elsewhere.
    pub fn controlled(&self, extra: &[Control]) -> Result<GateList> {
        let mut register_size = self.register_size;
        for ctl in extra {
            if ctl.qubit < self.register_size {
                return Err(QaraError::ControlOverlap {
                    qubit: ctl.qubit,
                    register_size: self.register_size,
                });
            }
            register_size = register_size.max(ctl.qubit + 1);
        }
        let gates = self
            .gates
            .iter()
            .map(|gate| {
                let mut controls = gate.controls.clone();
                controls.extend_from_slice(extra);
                GateOp {
                    kind: gate.kind,
                    target: gate.target,
                    controls,
                }
            })
            .collect();
        Ok(GateList {
            register_size,
            gates,
        })
    }
}

/// Angle `ψ_k` of the sub-rotation acting on the `k` remaining qubits.
///
/// That sub-operator is the rotation whose matrix has diagonal
/// `√(2^k)/√(2^{k+1}−1)` and off-diagonal magnitude `1/√(2^{k+1}−1)`, so its
/// parameter satisfies `sin(ψ_k/2) = √((2^k−1)/(2^{k+1}−1))`. For `k = 1`
/// this reduces to `sin(ψ_1/2) = 1/√3`.
pub fn psi_angle(k: usize) -> f64 {
    let dim = (1u64 << k) as f64;
    2.0 * ((dim - 1.0) / (2.0 * dim - 1.0)).sqrt().asin()
}

/// Decompose `R_n(φ)` into the optimized ladder circuit.
///
/// Forward pass, for levels `k = n−1` down to `1`: the Hadamards on qubits
/// `0..k` all controlled by qubit `k`, then `Ry(π/2)` on qubit `k`. Then an
/// ascending run of `Ry(−ψ_k)` on qubit `k−1` controlled by qubit `k`, the
/// central `Ry(φ)` on the top qubit, and the mirrored inverse of everything.
/// Total gate count is `n² + 3n − 3`.
pub fn decompose_rotation(n: usize, phi: f64) -> Result<GateList> {
    if n == 0 {
        return Err(QaraError::QubitCountOutOfRange {
            n,
            min: 1,
            max: usize::MAX,
        });
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut gates = Vec::with_capacity(n * n + 3 * n - 3);
    for k in (1..n).rev() {
        for q in 0..k {
            gates.push(GateOp::with_controls(
                GateKind::Hadamard,
                q,
                vec![Control::on_one(k)],
            ));
        }
        gates.push(GateOp::new(GateKind::Ry(half_pi), k));
    }
    for k in 1..n {
        gates.push(GateOp::with_controls(
            GateKind::Ry(-psi_angle(k)),
            k - 1,
            vec![Control::on_one(k)],
        ));
    }
    gates.push(GateOp::new(GateKind::Ry(phi), n - 1));
    for k in (1..n).rev() {
        gates.push(GateOp::with_controls(
            GateKind::Ry(psi_angle(k)),
            k - 1,
            vec![Control::on_one(k)],
        ));
    }
    for k in 1..n {
        gates.push(GateOp::new(GateKind::Ry(-half_pi), k));
        for q in 0..k {
            gates.push(GateOp::with_controls(
                GateKind::Hadamard,
                q,
                vec![Control::on_one(k)],
            ));
        }
    }
    Ok(GateList::new(n, gates))
}

/// Gate count and depth figures for the decomposition at a given size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct GateMetrics {
    pub gate_count: usize,
    pub serial_depth: usize,
    pub parallel_depth: usize,
}

/// Measure `decompose_rotation(n, ·)` (the angle does not affect counts).
///
/// `serial_depth` executes one gate per step. `parallel_depth` packs a gate
/// into the current step when its qubits are disjoint from the step's, with
/// one exception: controlled Hadamards sharing the same single control may
/// overlap on that control, so each Hadamard fan fires as one step.
pub fn gate_metrics(n: usize) -> Result<GateMetrics> {
    let list = decompose_rotation(n, 1.0)?;
    let gate_count = list.len();
    let serial_depth = gate_count;

    let mut parallel_depth = 0usize;
    let mut step: Vec<&GateOp> = Vec::new();
    for gate in &list.gates {
        let fits = !step.is_empty()
            && step.iter().all(|placed| {
                let shared: Vec<usize> = placed
                    .support()
                    .filter(|q| gate.support().any(|g| g == *q))
                    .collect();
                if shared.is_empty() {
                    return true;
                }
                // Hadamard fan: same single control, disjoint targets.
                matches!(gate.kind, GateKind::Hadamard)
                    && matches!(placed.kind, GateKind::Hadamard)
                    && gate.controls.len() == 1
                    && placed.controls.len() == 1
                    && gate.controls[0] == placed.controls[0]
                    && shared == [gate.controls[0].qubit]
                    && gate.target != placed.target
            });
        if step.is_empty() || fits {
            if step.is_empty() {
                parallel_depth += 1;
            }
            step.push(gate);
        } else {
            parallel_depth += 1;
            step.clear();
            step.push(gate);
        }
    }
    Ok(GateMetrics {
        gate_count,
        serial_depth,
        parallel_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn hadamard_base_case_and_involution() {
        let h3 = hadamard_n(3).unwrap();
        let identity = DenseOperator::identity(3).unwrap();
        assert!(h3.mat_mul(&h3).unwrap().max_abs_diff(&identity).unwrap() <= 1e-14);
        assert!(hadamard_n(0).is_err());
        assert!(hadamard_n(15).is_err());
    }

    #[test]
    fn hadamard_two_qubits_has_uniform_magnitudes() {
        let h2 = hadamard_n(2).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                assert!((h2.get(row, col).abs() - 0.5).abs() <= 1e-15);
            }
        }
        for col in 0..4 {
            assert!(h2.get(0, col) > 0.0, "top row must be all +1/2");
        }
    }

    #[test]
    fn rotation_base_case_is_a_y_rotation() {
        let phi = 0.83;
        let r = dense_rotation(1, phi).unwrap();
        let (s, c) = (phi / 2.0).sin_cos();
        let expected = DenseOperator::from_entries(1, vec![c, -s, s, c]).unwrap();
        assert_eq!(r.max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn rotation_at_zero_angle_is_identity() {
        for n in 1..=5 {
            let r = dense_rotation(n, 0.0).unwrap();
            let identity = DenseOperator::identity(n).unwrap();
            assert_eq!(r.max_abs_diff(&identity).unwrap(), 0.0);
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // rounded 5-digit targets, not the constants
    fn rotation_entry_magnitudes_match_the_closed_form() {
        let r = dense_rotation(2, FRAC_PI_2).unwrap();
        let diag = (PI / 4.0).cos();
        let off = (PI / 4.0).sin() / 3f64.sqrt();
        assert!((diag - 0.70711).abs() < 5e-6);
        assert!((off - 0.40825).abs() < 5e-6);
        for row in 0..4 {
            for col in 0..4 {
                let expected = if row == col { diag } else { off };
                assert!((r.get(row, col).abs() - expected).abs() <= 1e-14);
            }
        }
        assert!(r.is_orthogonal(1e-12));
    }

    #[test]
    fn rotation_rejects_out_of_range_sizes() {
        assert!(dense_rotation(0, 1.0).is_err());
        assert!(dense_rotation(MAX_ROTATION_QUBITS + 1, 1.0).is_err());
    }

    #[test]
    fn recursive_and_direct_constructions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..6 {
                let phi = rng.gen::<f64>() * TAU;
                let direct = dense_rotation(n, phi).unwrap();
                let recursive = dense_rotation_recursive(n, phi).unwrap();
                assert!(
                    direct.max_abs_diff(&recursive).unwrap() <= 1e-14,
                    "n={n}, phi={phi}"
                );
            }
        }
    }

    #[test]
    fn structural_entries_hold_to_machine_precision() {
        // Both construction routes: diagonal cos(φ/2), off-diagonal
        // magnitude sin(φ/2)/√(2^n−1), everywhere.
        let phi = 1.234_567_f64;
        for n in 1..=6 {
            let diag = (phi / 2.0).cos();
            let off = (phi / 2.0).sin() / (((1u64 << n) - 1) as f64).sqrt();
            for op in [
                dense_rotation(n, phi).unwrap(),
                dense_rotation_recursive(n, phi).unwrap(),
            ] {
                for row in 0..op.dim() {
                    for col in 0..op.dim() {
                        let expected = if row == col { diag } else { off };
                        assert!(
                            (op.get(row, col).abs() - expected).abs() <= 1e-14,
                            "n={n} ({row},{col})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sign_layout_squares_to_minus_identity() {
        // With S the pure sign matrix (zero diagonal), S² = −(2^n−1)·I.
        // This is exactly why same-size rotations compose by angle addition.
        for n in 1..=5 {
            let dim = 1usize << n;
            let mut s = DenseOperator::zeros(n).unwrap();
            for row in 0..dim {
                for col in 0..dim {
                    if row != col {
                        s.set(row, col, off_diagonal_sign(row, col));
                    }
                }
            }
            let sq = s.mat_mul(&s).unwrap();
            for row in 0..dim {
                for col in 0..dim {
                    let expected = if row == col { -((dim - 1) as f64) } else { 0.0 };
                    assert_eq!(sq.get(row, col), expected, "n={n} ({row},{col})");
                }
            }
        }
    }

    #[test]
    fn rotations_compose_by_angle_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            for _ in 0..5 {
                let a = rng.gen::<f64>() * TAU;
                let b = rng.gen::<f64>() * TAU;
                let prod = dense_rotation(n, a)
                    .unwrap()
                    .mat_mul(&dense_rotation(n, b).unwrap())
                    .unwrap();
                let single = dense_rotation(n, a + b).unwrap();
                assert!(prod.max_abs_diff(&single).unwrap() <= 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn rotation_column_matches_dense_columns() {
        let phi = 2.1;
        for n in 1..=5 {
            let dense = dense_rotation(n, phi).unwrap();
            for col in 0..dense.dim() {
                let column = rotation_column(n, phi, col);
                for (row, &amp) in column.iter().enumerate() {
                    assert_eq!(amp, dense.get(row, col));
                }
            }
        }
    }

    #[test]
    fn hadamard_conjugation_examples() {
        assert!(verify_hadamard_conjugation(1, PI / 5.0).unwrap());
        for n in 1..=8 {
            assert!(verify_hadamard_conjugation(n, 0.0).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(verify_hadamard_conjugation(5, rng.gen::<f64>() * TAU).unwrap());
        }
    }

    #[test]
    fn single_qubit_decomposition_is_one_gate() {
        let list = decompose_rotation(1, 0.7).unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(list.gates[0].kind, GateKind::Ry(0.7));
        assert_eq!(list.gates[0].target, 0);
        assert!(list.gates[0].controls.is_empty());
    }

    #[test]
    fn two_qubit_decomposition_matches_the_seven_gate_pattern() {
        // Controlled H, Ry(π/2), controlled Ry(−ψ₁), Ry(φ), controlled
        // Ry(ψ₁), Ry(−π/2), controlled H — with the two redundant basis
        // transitions already cancelled.
        let phi = 0.9;
        let list = decompose_rotation(2, phi).unwrap();
        assert_eq!(list.len(), 7);
        let psi = psi_angle(1);
        assert!((2.0 * (psi / 2.0).sin().powi(2) - 2.0 / 3.0).abs() <= 1e-15);
        let kinds: Vec<GateKind> = list.gates.iter().map(|g| g.kind).collect();
        assert_eq!(
            kinds,
            vec![
                GateKind::Hadamard,
                GateKind::Ry(FRAC_PI_2),
                GateKind::Ry(-psi),
                GateKind::Ry(phi),
                GateKind::Ry(psi),
                GateKind::Ry(-FRAC_PI_2),
                GateKind::Hadamard,
            ]
        );
        assert_eq!(list.gates[0].controls, vec![Control::on_one(1)]);
        assert!(list.gates[1].controls.is_empty());
        assert_eq!(list.gates[3].target, 1);
    }

    #[test]
    fn decomposition_evaluates_to_the_dense_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=6 {
            let phi = rng.gen::<f64>() * TAU;
            let circuit = decompose_rotation(n, phi).unwrap().to_dense().unwrap();
            let dense = dense_rotation(n, phi).unwrap();
            assert!(
                circuit.max_abs_diff(&dense).unwrap() <= 1e-10,
                "n={n}, phi={phi}"
            );
        }
    }

    #[test]
    fn decomposition_n4_fidelity_at_pi_over_3() {
        let circuit = decompose_rotation(4, PI / 3.0).unwrap().to_dense().unwrap();
        let dense = dense_rotation(4, PI / 3.0).unwrap();
        assert!(circuit.max_abs_diff(&dense).unwrap() <= 1e-10);
    }

    #[test]
    fn gate_list_dense_evaluation_is_orthogonal() {
        let list = decompose_rotation(4, 1.3).unwrap();
        assert!(list.to_dense().unwrap().is_orthogonal(1e-10));
    }

    #[test]
    fn gate_wise_application_matches_the_dense_product() {
        // The gate-wise path is the production route for registers too large
        // for dense operators; both must move states identically.
        let phi = 2.3;
        for n in 1..=5 {
            let list = decompose_rotation(n, phi).unwrap();
            let dense = dense_rotation(n, phi).unwrap();
            for basis in 0..(1usize << n) {
                let state = StateVector::basis(n, basis).unwrap();
                let via_gates = list.apply(&state).unwrap();
                let via_dense = dense.apply(&state).unwrap();
                let diff = via_gates
                    .amplitudes()
                    .iter()
                    .zip(via_dense.amplitudes())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(diff <= 1e-10, "n={n}, basis={basis}");
            }
        }
    }

    #[test]
    fn controlled_decomposition_equals_the_block_diagonal_operator() {
        let phi = 0.77;
        for n in 1..=3usize {
            let list = decompose_rotation(n, phi).unwrap();
            let controlled = list.controlled(&[Control::on_one(n)]).unwrap();
            let dense = controlled.to_dense().unwrap();
            let r = dense_rotation(n, phi).unwrap();
            let dim = 1usize << n;
            let mut expected = DenseOperator::identity(n + 1).unwrap();
            for row in 0..dim {
                for col in 0..dim {
                    expected.set(row + dim, col + dim, r.get(row, col));
                }
            }
            assert!(dense.max_abs_diff(&expected).unwrap() <= 1e-10, "n={n}");
        }
    }

    #[test]
    fn controlling_on_the_zero_branch_is_identity() {
        let single = GateList::new(1, vec![GateOp::new(GateKind::Ry(0.8), 0)]);
        let controlled = single.controlled(&[Control::on_one(1)]).unwrap();
        let zero_branch = StateVector::basis(2, 0b00).unwrap();
        let out = controlled.apply(&zero_branch).unwrap();
        assert_eq!(out.amplitudes(), zero_branch.amplitudes());
    }

    #[test]
    fn controlled_rotation_is_block_diagonal() {
        let phi = 1.1;
        let single = decompose_rotation(1, phi).unwrap();
        let controlled = single.controlled(&[Control::on_one(1)]).unwrap();
        let dense = controlled.to_dense().unwrap();
        let r = dense_rotation(1, phi).unwrap();
        let mut expected = DenseOperator::identity(2).unwrap();
        for row in 0..2 {
            for col in 0..2 {
                expected.set(row + 2, col + 2, r.get(row, col));
            }
        }
        assert!(dense.max_abs_diff(&expected).unwrap() <= 1e-14);
    }

    #[test]
    fn double_controlled_not_acts_as_a_toffoli() {
        let not = GateList::new(1, vec![GateOp::new(GateKind::Not, 0)]);
        let toffoli = not
            .controlled(&[Control::on_one(1), Control::on_one(2)])
            .unwrap();
        let input = StateVector::basis(3, 0b110).unwrap();
        let out = toffoli.apply(&input).unwrap();
        assert_eq!(
            out.amplitudes(),
            StateVector::basis(3, 0b111).unwrap().amplitudes()
        );
        // Control not satisfied: |010⟩ stays put.
        let idle = StateVector::basis(3, 0b010).unwrap();
        assert_eq!(
            toffoli.apply(&idle).unwrap().amplitudes(),
            idle.amplitudes()
        );
    }

    #[test]
    fn zero_polarity_controls_fire_on_the_zero_branch() {
        let not = GateList::new(1, vec![GateOp::new(GateKind::Not, 0)]);
        let anti = not.controlled(&[Control::on_zero(1)]).unwrap();
        // Control qubit 0: gate fires.
        let out = anti.apply(&StateVector::basis(2, 0b00).unwrap()).unwrap();
        assert_eq!(
            out.amplitudes(),
            StateVector::basis(2, 0b01).unwrap().amplitudes()
        );
        // Control qubit 1: gate idles.
        let idle = StateVector::basis(2, 0b10).unwrap();
        assert_eq!(anti.apply(&idle).unwrap().amplitudes(), idle.amplitudes());
    }

    #[test]
    fn controlled_rejects_overlapping_qubits() {
        let single = GateList::new(2, vec![GateOp::new(GateKind::Ry(0.4), 0)]);
        assert!(matches!(
            single.controlled(&[Control::on_one(1)]),
            Err(QaraError::ControlOverlap { .. })
        ));
    }

    #[test]
    fn gate_counts_follow_the_quadratic_closed_form() {
        // Snapshot after first derivation: n² + 3n − 3 gates.
        let expected_counts = [1, 7, 15, 25, 37, 51, 67, 85, 105, 127];
        let expected_parallel = [1, 7, 11, 15, 19, 23, 27, 31, 35, 39];
        for n in 1..=10 {
            let metrics = gate_metrics(n).unwrap();
            assert_eq!(metrics.gate_count, expected_counts[n - 1], "n={n}");
            assert_eq!(metrics.gate_count, n * n + 3 * n - 3, "n={n}");
            assert_eq!(metrics.serial_depth, metrics.gate_count);
            assert_eq!(metrics.parallel_depth, expected_parallel[n - 1], "n={n}");
        }
    }

    #[test]
    fn metric_ratios_stay_bounded() {
        for n in 2..=10 {
            let metrics = gate_metrics(n).unwrap();
            let quad_ratio = metrics.gate_count as f64 / (n * n) as f64;
            assert!((1.0..=2.0).contains(&quad_ratio), "n={n}: {quad_ratio}");
            let lin_ratio = metrics.parallel_depth as f64 / n as f64;
            assert!(lin_ratio <= 4.0, "n={n}: {lin_ratio}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn rotation_is_unitary(n in 1usize..=6, phi in 0.0..TAU) {
            let r = dense_rotation(n, phi).unwrap();
            let rt = r.transpose();
            let identity = DenseOperator::identity(n).unwrap();
            prop_assert!(r.mat_mul(&rt).unwrap().max_abs_diff(&identity).unwrap() <= 1e-12);
            prop_assert!(rt.mat_mul(&r).unwrap().max_abs_diff(&identity).unwrap() <= 1e-12);
        }

        #[test]
        fn decomposition_fidelity_holds_for_random_angles(n in 1usize..=4, phi in 0.0..TAU) {
            let circuit = decompose_rotation(n, phi).unwrap().to_dense().unwrap();
            let dense = dense_rotation(n, phi).unwrap();
            prop_assert!(circuit.max_abs_diff(&dense).unwrap() <= 1e-10);
        }
    }
}
