//! End-to-end execution of the amplitude redistribution algorithm on one
//! window of integers.
//!
//! The algorithm takes a window `A` of `M` n-bit values and an n-bit
//! reference `r`, puts a counter register of `m = log₂M` qubits into uniform
//! superposition, entangles each counter index with its array element in a
//! data register, and then applies paired rotations to the counter — one per
//! payload bit, controlled by the reference bit and by the data bit. The
//! branch entangled with value `d` accumulates the half-angle
//! `θ_d = π(r − d)/2^{n+1}`, so measuring the counter favors indices whose
//! values sit close to the reference.
//!
//! Three backends compute the index distribution:
//!
//! - [`simulate_statevector`]: brute-force gate-level simulation, the oracle;
//! - [`simulate_branches`]: per-branch structured simulation, `O(M²)`;
//! - [`analytic_distribution`]: the closed form
//!   `P(k) = (1/M)[cos²θ_k + (1/(M−1))·Σ_{j≠k} sin²θ_j]`, valid whenever the
//!   data words are pairwise distinct.
//!
//! Duplicated data words make counter branches interfere and the closed form
//! breaks down; *unique mode* appends the window index to each word's least
//! significant bits so all words are distinct. The appended qubits never
//! participate in rotations.

use crate::error::{QaraError, Result};
use crate::rotation::{dense_rotation, rotation_column};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Total-qubit cap for the brute-force statevector backend.
pub const MAX_STATEVECTOR_QUBITS: usize = 22;

/// Window and register sizing for one algorithm run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterGeometry {
    /// Window length `M`, a power of two.
    pub window_len: usize,
    /// Counter qubits, `m = log₂ M`.
    pub index_qubits: usize,
    /// Payload bit-width `n`.
    pub payload_bits: u32,
    /// Append the window index to each data word (low `m` bits).
    pub unique_mode: bool,
}

impl RegisterGeometry {
    pub fn new(window_len: usize, payload_bits: u32, unique_mode: bool) -> Result<Self> {
        if window_len < 2 || !window_len.is_power_of_two() {
            return Err(QaraError::InvalidWindowLength(window_len));
        }
        if payload_bits == 0 || payload_bits > 32 {
            return Err(QaraError::InvalidConfig(format!(
                "payload bit-width {payload_bits} outside 1..=32"
            )));
        }
        Ok(Self {
            window_len,
            index_qubits: window_len.trailing_zeros() as usize,
            payload_bits,
            unique_mode,
        })
    }

    /// Width of one data word in qubits.
    pub fn data_qubits(&self) -> usize {
        self.payload_bits as usize
            + if self.unique_mode {
                self.index_qubits
            } else {
                0
            }
    }

    /// Counter plus data qubits simulated by the statevector backend (the
    /// reference register is classical and costs nothing).
    pub fn total_qubits(&self) -> usize {
        self.index_qubits + self.data_qubits()
    }
}

/// A window of values with its reference, ready for the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedWindow {
    pub geometry: RegisterGeometry,
    pub values: Vec<u32>,
    pub reference: u32,
}

impl EncodedWindow {
    /// Data words as loaded into the register: `value·2^m + index` in unique
    /// mode, the plain value otherwise.
    pub fn data_words(&self) -> Vec<u64> {
        let m = self.geometry.index_qubits;
        self.values
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                if self.geometry.unique_mode {
                    (u64::from(value) << m) | index as u64
                } else {
                    u64::from(value)
                }
            })
            .collect()
    }

    /// True when the closed-form distribution applies: unique mode, or all
    /// raw values pairwise distinct.
    pub fn words_distinct(&self) -> bool {
        if self.geometry.unique_mode {
            return true;
        }
        let mut seen = self.values.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// Validate and package a window for the engine.
pub fn encode_window(
    values: &[u32],
    reference: u32,
    payload_bits: u32,
    unique_mode: bool,
) -> Result<EncodedWindow> {
    let geometry = RegisterGeometry::new(values.len(), payload_bits, unique_mode)?;
    let limit = 1u64 << payload_bits;
    for &value in values.iter().chain(std::iter::once(&reference)) {
        if u64::from(value) >= limit {
            return Err(QaraError::ValueOutOfRange {
                value: u64::from(value),
                bits: payload_bits,
            });
        }
    }
    Ok(EncodedWindow {
        geometry,
        values: values.to_vec(),
        reference,
    })
}

/// Per-branch rotation half-angles `θ_j = π(r − d_j)/2^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchAngleTable {
    pub thetas: Vec<f64>,
}

/// Compute each branch half-angle two ways — bitwise sum
/// `Σ_i π(r_i − d_i)/2^{n−i+1}` and closed form `π(r − d)/2^{n+1}` — and
/// insist they agree; the identity is exact because `r − d = Σ(r_i − d_i)2^i`.
pub fn branch_angles(window: &EncodedWindow) -> BranchAngleTable {
    let n = window.geometry.payload_bits;
    let denom = (1u64 << (n + 1)) as f64;
    let thetas = window
        .values
        .iter()
        .map(|&d| {
            let closed =
                std::f64::consts::PI * (f64::from(window.reference) - f64::from(d)) / denom;
            let bitwise: f64 = (0..n)
                .map(|i| {
                    let r_i = (window.reference >> i & 1) as i64;
                    let d_i = (d >> i & 1) as i64;
                    std::f64::consts::PI * (r_i - d_i) as f64 / (1u64 << (n - i + 1)) as f64
                })
                .sum();
            assert!(
                (closed - bitwise).abs() <= 1e-14,
                "half-angle routes disagree: {closed} vs {bitwise}"
            );
            debug_assert!(closed.abs() < std::f64::consts::FRAC_PI_2);
            closed
        })
        .collect();
    BranchAngleTable { thetas }
}

/// Probability vector over window indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validate range and normalization (sum to 1 within `1e−10`).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) || (sum - 1.0).abs() > 1e-10 {
            return Err(QaraError::InvalidConfig(format!(
                "not a probability vector (sum {sum})"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the largest probability; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (index, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = index;
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn require_distinct(window: &EncodedWindow) -> Result<()> {
    if window.words_distinct() {
        Ok(())
    } else {
        Err(QaraError::DuplicateValues)
    }
}

/// Closed-form index distribution
/// `P(k) = (1/M)[cos²θ_k + (1/(M−1))·Σ_{j≠k} sin²θ_j]`.
///
/// Requires pairwise-distinct data words (unique mode, or distinct values);
/// with duplicates the counter branches interfere and the formula is invalid.
pub fn analytic_distribution(window: &EncodedWindow) -> Result<Distribution> {
    require_distinct(window)?;
    Ok(analytic_distribution_unchecked(window))
}

/// The closed form evaluated regardless of the distinctness hypothesis.
/// Useful only to demonstrate how interference breaks it.
pub fn analytic_distribution_unchecked(window: &EncodedWindow) -> Distribution {
    let m = window.values.len() as f64;
    let angles = branch_angles(window);
    let sin_sq: Vec<f64> = angles.thetas.iter().map(|t| t.sin().powi(2)).collect();
    let sin_total: f64 = sin_sq.iter().sum();
    let probs = angles
        .thetas
        .iter()
        .zip(&sin_sq)
        .map(|(theta, s)| (theta.cos().powi(2) + (sin_total - s) / (m - 1.0)) / m)
        .collect();
    Distribution::new(probs).expect("closed form is normalized by construction")
}

/// Structured per-branch simulation, `O(M²)`.
///
/// Counter branches entangled with distinct data words never interfere, so
/// each branch evolves independently: branch `j` starts as the basis vector
/// `e_j` scaled by `1/√M` and receives the dense rotation with half-angle
/// `θ_j` — that is, column `j` of `R_m(2θ_j)`. Final probabilities sum the
/// squared amplitudes per counter index across branches.
pub fn simulate_branches(window: &EncodedWindow) -> Result<Distribution> {
    require_distinct(window)?;
    let m_qubits = window.geometry.index_qubits;
    let m = window.values.len();
    let angles = branch_angles(window);
    let mut probs = vec![0.0; m];
    for (branch, &theta) in angles.thetas.iter().enumerate() {
        let column = rotation_column(m_qubits, 2.0 * theta, branch);
        for (slot, amp) in column.iter().enumerate() {
            probs[slot] += amp * amp / m as f64;
        }
    }
    Distribution::new(probs)
}

/// Brute-force statevector simulation of the full algorithm.
///
/// Simulates the counter register plus the data register (plus index qubits
/// in unique mode) gate by gate: uniform superposition on the counter,
/// X-mark / controlled-load / X-unmark data loading, then per payload bit a
/// reference-conditioned rotation and a data-bit-controlled counter-rotation.
/// The reference register holds a known basis value and is treated
/// classically. Capped at [`MAX_STATEVECTOR_QUBITS`] simulated qubits.
pub fn simulate_statevector(window: &EncodedWindow) -> Result<Distribution> {
    let geometry = window.geometry;
    if geometry.total_qubits() > MAX_STATEVECTOR_QUBITS {
        return Err(QaraError::RegisterTooLarge {
            qubits: geometry.total_qubits(),
            max: MAX_STATEVECTOR_QUBITS,
        });
    }
    let mut sim = JointState::new(geometry);
    sim.load(&window.data_words());
    let n = geometry.payload_bits;
    for bit in 0..n {
        // Matrix parameter π·2^bit/2^n gives the branch half-angle
        // π·2^bit/2^{n+1}; the most significant bit rotates by half-angle π/4.
        let phi = std::f64::consts::PI * (1u64 << bit) as f64 / (1u64 << n) as f64;
        if window.reference >> bit & 1 == 1 {
            sim.rotate_counter(phi, None);
        }
        sim.rotate_counter(-phi, Some(sim.payload_qubit(bit)));
    }
    let probs = sim.counter_marginal();
    let total: f64 = probs.iter().sum();
    assert!(
        (total - 1.0).abs() <= 1e-10,
        "statevector lost normalization: {total}"
    );
    Distribution::new(probs)
}

/// Joint state of the counter and data registers.
///
/// Basis layout: `index = (data_word << m) | counter`, with counter qubits
/// `0..m` and data qubits `m..m+data_qubits`.
struct JointState {
    geometry: RegisterGeometry,
    amps: Vec<f64>,
}

impl JointState {
    fn new(geometry: RegisterGeometry) -> Self {
        let mut amps = vec![0.0; 1usize << geometry.total_qubits()];
        let scale = 1.0 / (geometry.window_len as f64).sqrt();
        amps[..geometry.window_len].fill(scale); // data register starts at |0⟩
        Self { geometry, amps }
    }

    /// Data qubit (state-space index) that carries payload bit `bit`.
    /// Index qubits occupy the low data positions in unique mode and never
    /// participate in rotations.
    fn payload_qubit(&self, bit: u32) -> usize {
        let offset = if self.geometry.unique_mode {
            self.geometry.index_qubits
        } else {
            0
        };
        self.geometry.index_qubits + offset + bit as usize
    }

    fn apply_x(&mut self, qubit: usize) {
        let bit = 1usize << qubit;
        for index in 0..self.amps.len() {
            if index & bit == 0 {
                self.amps.swap(index, index | bit);
            }
        }
    }

    /// X on `target` controlled by every counter qubit reading 1.
    fn apply_counter_controlled_x(&mut self, target: usize) {
        let counter_mask = self.geometry.window_len - 1;
        let bit = 1usize << target;
        for index in 0..self.amps.len() {
            if index & bit == 0 && index & counter_mask == counter_mask {
                self.amps.swap(index, index | bit);
            }
        }
    }

    /// Load word `words[j]` into the data register of the branch with
    /// counter index `j`: X-mark the counter so index `j` reads all ones,
    /// write the word's bits through counter-controlled X gates, unmark.
    fn load(&mut self, words: &[u64]) {
        let m = self.geometry.index_qubits;
        for (j, &word) in words.iter().enumerate() {
            let mark: Vec<usize> = (0..m).filter(|i| j >> i & 1 == 0).collect();
            for &qubit in &mark {
                self.apply_x(qubit);
            }
            for data_bit in 0..self.geometry.data_qubits() {
                if word >> data_bit & 1 == 1 {
                    self.apply_counter_controlled_x(m + data_bit);
                }
            }
            for &qubit in &mark {
                self.apply_x(qubit);
            }
        }
    }

    /// Apply `R_m(φ)` to the counter register, optionally controlled by one
    /// data qubit, by rotating the counter block of every data-word slice.
    fn rotate_counter(&mut self, phi: f64, control: Option<usize>) {
        let m = self.geometry.index_qubits;
        let window = self.geometry.window_len;
        let matrix = dense_rotation(m, phi).expect("counter register within dense bounds");
        let mut scratch = vec![0.0; window];
        for data in 0..(1usize << self.geometry.data_qubits()) {
            if let Some(qubit) = control {
                if data >> (qubit - m) & 1 == 0 {
                    continue;
                }
            }
            let base = data << m;
            let block = &mut self.amps[base..base + window];
            scratch.copy_from_slice(block);
            for (row, out) in block.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (col, amp) in scratch.iter().enumerate() {
                    acc += matrix.get(row, col) * amp;
                }
                *out = acc;
            }
        }
    }

    /// Probability of each counter index, summed over data configurations.
    fn counter_marginal(&self) -> Vec<f64> {
        let m = self.geometry.index_qubits;
        let window = self.geometry.window_len;
        let mut probs = vec![0.0; window];
        for data in 0..(1usize << self.geometry.data_qubits()) {
            let base = data << m;
            for (counter, prob) in probs.iter_mut().enumerate() {
                let amp = self.amps[base + counter];
                *prob += amp * amp;
            }
        }
        probs
    }
}

/// Multinomial measurement: draw `shots` indices from `dist`, returning
/// counts per index. Deterministic for a fixed seed.
pub fn sample_index(dist: &Distribution, shots: u64, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist.probs() {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let index = cdf.partition_point(|&c| c <= u).min(dist.len() - 1);
        counts[index] += 1;
    }
    counts
}

/// How one run of the algorithm turns a distribution into an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunMode {
    /// Draw one measurement shot with the given seed.
    Sampled { seed: u64 },
    /// Deterministic: highest probability, lowest index on ties.
    Argmax,
}

/// Run the algorithm once on a window and return `(index, original value)`.
///
/// Like a median filter, the result is always an element originally present
/// in the window.
pub fn run_qara(
    values: &[u32],
    reference: u32,
    payload_bits: u32,
    mode: RunMode,
    unique_mode: bool,
) -> Result<(usize, u32)> {
    let window = encode_window(values, reference, payload_bits, unique_mode)?;
    let dist = analytic_distribution(&window)?;
    let index = match mode {
        RunMode::Argmax => dist.argmax(),
        RunMode::Sampled { seed } => {
            let counts = sample_index(&dist, 1, seed);
            counts
                .iter()
                .position(|&c| c > 0)
                .expect("one shot lands somewhere")
        }
    };
    Ok((index, values[index]))
}

/// Probability of measuring the outlier index in the best filtering regime:
/// a single outlier differing from the reference in every bit while all
/// other elements equal the reference. Equals `(1/M)·cos²(π/2 − π/2^{n+1})`,
/// the smallest outlier probability over all inputs.
pub fn best_case_probability(window_len: usize, payload_bits: u32) -> f64 {
    assert!(window_len >= 2 && payload_bits >= 1);
    let eps = std::f64::consts::PI / (1u64 << (payload_bits + 1)) as f64;
    (std::f64::consts::FRAC_PI_2 - eps).cos().powi(2) / window_len as f64
}

/// Upper bound on the outlier-index probability when the single outlier
/// satisfies `d ≥ 2^l·r` and every other element stays within `r/2^p` of the
/// reference: `(1/M)·(cos²(π/4 − π/2^{l+2}) + sin²(π/2^{l+p+1}))`.
///
/// `payload_bits` identifies the instance family the bound applies to (the
/// outlier's top bit filling the register); the bound value itself depends
/// only on `l` and `p`.
pub fn outlier_bound(window_len: usize, payload_bits: u32, l: u32, p: u32) -> f64 {
    assert!(window_len >= 2 && payload_bits >= 1 && l >= 1);
    let quarter = std::f64::consts::FRAC_PI_4;
    let cos_term = (quarter - std::f64::consts::PI / (1u64 << (l + 2)) as f64)
        .cos()
        .powi(2);
    let sin_term = (std::f64::consts::PI / (1u64 << (l + p + 1)) as f64)
        .sin()
        .powi(2);
    (cos_term + sin_term) / window_len as f64
}

/// JSON-facing report for the CLI `distribution` command.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionReport {
    pub probs: Vec<f64>,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

impl DistributionReport {
    pub fn new(dist: &Distribution, shots: u64, seed: u64) -> Self {
        Self {
            probs: dist.probs().to_vec(),
            counts: sample_index(dist, shots, seed),
            shots,
            seed,
        }
    }
}
