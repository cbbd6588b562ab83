//! Named verification suites over the rotation operator and the simulation
//! backends. The CLI `verify` command runs them all and fails on any red
//! suite; the acceptance tests pin each suite to its tolerance.

use crate::engine::{
    analytic_distribution, best_case_probability, encode_window, outlier_bound, simulate_branches,
    simulate_statevector, EncodedWindow,
};
use crate::rotation::{decompose_rotation, dense_rotation, gate_metrics, hadamard_n};
use crate::tensor::DenseOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn from_deviation(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: deviation <= tolerance,
            detail: format!("max deviation {deviation:.3e} (tolerance {tolerance:.0e})"),
        }
    }
}

fn random_angles(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.gen::<f64>() * TAU).collect()
}

/// Random window with pairwise-distinct values below `2^bits`.
fn random_distinct_window(rng: &mut ChaCha8Rng, len: usize, bits: u32) -> (Vec<u32>, u32) {
    let top = 1u32 << bits;
    let mut values: Vec<u32> = Vec::with_capacity(len);
    while values.len() < len {
        let v = rng.gen_range(0..top);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    (values, rng.gen_range(0..top))
}

/// `R·Rᵀ = Rᵀ·R = I` within `1e−12`, n = 1..=8, 20 random angles each.
pub fn unitarity_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let identity = DenseOperator::identity(n).expect("in range");
        for phi in random_angles(&mut rng, 20) {
            let r = dense_rotation(n, phi).expect("in range");
            let rt = r.transpose();
            let left = r.mat_mul(&rt).unwrap().max_abs_diff(&identity).unwrap();
            let right = rt.mat_mul(&r).unwrap().max_abs_diff(&identity).unwrap();
            worst = worst.max(left).max(right);
        }
    }
    SuiteResult::from_deviation("unitarity", worst, 1e-12)
}

/// `H_n·R_n(φ)·H_n = R_n(φ)ᵀ` within `1e−11`, n = 1..=8, 20 angles each.
pub fn hadamard_conjugation_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let h = hadamard_n(n).expect("in range");
        for phi in random_angles(&mut rng, 20) {
            let r = dense_rotation(n, phi).expect("in range");
            let conjugated = h.mat_mul(&r).unwrap().mat_mul(&h).unwrap();
            worst = worst.max(conjugated.max_abs_diff(&r.transpose()).unwrap());
        }
    }
    SuiteResult::from_deviation("hadamard-conjugation", worst, 1e-11)
}

/// Circuit-evaluated operator equals the dense rotation within `1e−10`,
/// n = 1..=6, 10 random angles each.
pub fn decomposition_fidelity_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for phi in random_angles(&mut rng, 10) {
            let circuit = decompose_rotation(n, phi)
                .expect("in range")
                .to_dense()
                .unwrap();
            let dense = dense_rotation(n, phi).expect("in range");
            worst = worst.max(circuit.max_abs_diff(&dense).unwrap());
        }
    }
    SuiteResult::from_deviation("decomposition-fidelity", worst, 1e-10)
}

/// `R_n(a)·R_n(b) = R_n(a+b)` within `1e−11`, n = 1..=6.
pub fn composition_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for _ in 0..10 {
            let (a, b) = (rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU);
            let prod = dense_rotation(n, a)
                .unwrap()
                .mat_mul(&dense_rotation(n, b).unwrap())
                .unwrap();
            worst = worst.max(
                prod.max_abs_diff(&dense_rotation(n, a + b).unwrap())
                    .unwrap(),
            );
        }
    }
    SuiteResult::from_deviation("composition", worst, 1e-11)
}

/// Analytic, branch, and statevector distributions agree within `1e−10`
/// over 100 random distinct-valued windows, M ∈ {4, 8}, n ∈ {4, 6}.
pub fn backend_agreement_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let mut worst = 0.0f64;
    for &window_len in &[4usize, 8] {
        for &bits in &[4u32, 6] {
            for _ in 0..25 {
                let (values, reference) = random_distinct_window(&mut rng, window_len, bits);
                let window = encode_window(&values, reference, bits, true).unwrap();
                let analytic = analytic_distribution(&window).unwrap();
                let branches = simulate_branches(&window).unwrap();
                let statevector = simulate_statevector(&window).unwrap();
                worst = worst
                    .max(analytic.max_abs_diff(&branches))
                    .max(analytic.max_abs_diff(&statevector))
                    .max(branches.max_abs_diff(&statevector));
            }
        }
    }
    SuiteResult::from_deviation("backend-agreement", worst, 1e-10)
}

fn ordering_violations(window: &EncodedWindow) -> usize {
    let dist = analytic_distribution(window).unwrap();
    let reference = i64::from(window.reference);
    let mut violations = 0;
    for k in 0..window.values.len() {
        for l in 0..window.values.len() {
            let dk = (i64::from(window.values[k]) - reference).abs();
            let dl = (i64::from(window.values[l]) - reference).abs();
            if dk < dl && dist.probs()[k] <= dist.probs()[l] {
                violations += 1;
            }
        }
    }
    violations
}

/// Strictly smaller distance to the reference implies strictly larger
/// probability, on the two reference windows and 100 random ones.
pub fn monotone_ordering_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
    let mut violations = 0usize;
    let four_wide = encode_window(&[5, 0, 15, 10], 0, 4, true).unwrap();
    let eight_wide = encode_window(&[8, 3, 29, 63, 14, 2, 45, 10], 0, 6, true).unwrap();
    violations += ordering_violations(&four_wide);
    violations += ordering_violations(&eight_wide);
    for _ in 0..100 {
        let bits = *[4u32, 6, 8].get(rng.gen_range(0..3)).unwrap();
        let len = *[4usize, 8].get(rng.gen_range(0..2)).unwrap();
        let (values, reference) = random_distinct_window(&mut rng, len, bits);
        let window = encode_window(&values, reference, bits, true).unwrap();
        violations += ordering_violations(&window);
    }
    SuiteResult {
        name: "monotone-ordering",
        passed: violations == 0,
        detail: format!("{violations} ordering violations"),
    }
}

/// In the single-outlier construction the outlier probability equals the
/// closed form `(1/M)·cos²(π/2 − π/2^{n+1})` within `1e−12` (analytic) and
/// `1e−10` (statevector), for M ∈ {4, 8, 16}, n ∈ {2, 4, 8}.
pub fn best_case_suite() -> SuiteResult {
    let mut worst_analytic = 0.0f64;
    let mut worst_statevector = 0.0f64;
    for &window_len in &[4usize, 8, 16] {
        for &bits in &[2u32, 4, 8] {
            let mut values = vec![0u32; window_len];
            values[window_len / 2] = (1u32 << bits) - 1;
            let window = encode_window(&values, 0, bits, true).unwrap();
            let expected = best_case_probability(window_len, bits);
            let analytic = analytic_distribution(&window).unwrap();
            worst_analytic =
                worst_analytic.max((analytic.probs()[window_len / 2] - expected).abs());
            let statevector = simulate_statevector(&window).unwrap();
            worst_statevector =
                worst_statevector.max((statevector.probs()[window_len / 2] - expected).abs());
        }
    }
    let passed = worst_analytic <= 1e-12 && worst_statevector <= 1e-10;
    SuiteResult {
        name: "best-case-probability",
        passed,
        detail: format!(
            "analytic deviation {worst_analytic:.3e}, statevector deviation {worst_statevector:.3e}"
        ),
    }
}

/// 200 randomized instances satisfying the outlier-bound hypotheses
/// (single outlier `d ≥ 2^l·r` filling the register's top bit, all other
/// elements within `r/2^p` of the reference) produce zero bound violations.
pub fn outlier_bound_suite(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(6));
    let mut violations = 0usize;
    let mut checked = 0usize;
    while checked < 200 {
        let s = rng.gen_range(1..=4u32);
        let l = rng.gen_range(1..=3u32);
        let p = rng.gen_range(0..=s.min(3));
        let n = s + l + 1;
        if n > 8 {
            continue;
        }
        let r = 1u32 << s;
        let sigma = r >> p;
        let window_len = *[4usize, 8, 16].get(rng.gen_range(0..3)).unwrap();
        let outlier_pos = rng.gen_range(0..window_len);
        let outlier_floor = r << l;
        let top = (1u32 << n) - 1;
        let mut values = vec![0u32; window_len];
        for (i, slot) in values.iter_mut().enumerate() {
            if i == outlier_pos {
                *slot = rng.gen_range(outlier_floor..=top);
            } else {
                loop {
                    let v = rng.gen_range(r - sigma..=r + sigma);
                    if v < outlier_floor {
                        *slot = v;
                        break;
                    }
                }
            }
        }
        let window = encode_window(&values, r, n, true).unwrap();
        let dist = analytic_distribution(&window).unwrap();
        if dist.probs()[outlier_pos] > outlier_bound(window_len, n, l, p) + 1e-15 {
            violations += 1;
        }
        checked += 1;
    }
    SuiteResult {
        name: "outlier-bound",
        passed: violations == 0,
        detail: format!("{violations} violations in {checked} instances"),
    }
}

/// Gate count grows quadratically and packed depth linearly, n = 2..=10.
pub fn gate_scaling_suite() -> SuiteResult {
    let mut ok = true;
    let mut detail = String::new();
    for n in 2..=10usize {
        let metrics = gate_metrics(n).unwrap();
        let quad = metrics.gate_count as f64 / (n * n) as f64;
        let lin = metrics.parallel_depth as f64 / n as f64;
        if !(1.0..=2.0).contains(&quad) || lin > 4.0 {
            ok = false;
            detail = format!("n={n}: count/n²={quad:.3}, depth/n={lin:.3}");
        }
    }
    if ok {
        detail = "count/n² in [1,2], depth/n <= 4 for n=2..=10".to_string();
    }
    SuiteResult {
        name: "gate-scaling",
        passed: ok,
        detail,
    }
}

/// Run every suite with sub-seeds derived from `seed`.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    vec![
        unitarity_suite(seed),
        hadamard_conjugation_suite(seed),
        decomposition_fidelity_suite(seed),
        composition_suite(seed),
        gate_scaling_suite(),
        backend_agreement_suite(seed),
        monotone_ordering_suite(seed),
        best_case_suite(),
        outlier_bound_suite(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_a_fixed_seed() {
        for suite in run_all(7) {
            assert!(suite.passed, "{}: {}", suite.name, suite.detail);
        }
    }
}
