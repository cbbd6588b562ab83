//! Sliding-window outlier filtering: the amplitude-redistribution algorithm
//! as a feedback filter, a median-filter baseline with identical geometry,
//! per-window normalization, artifact injection, and quality metrics.
//!
//! Both filters slide a window across the signal and emit one member of each
//! window, so every output sample is a value originally present in the data.
//! The quantum filter picks the member the algorithm measures (argmax or one
//! sampled shot); its reference value for window `t+1` is the raw output of
//! window `t` (feedback), so no per-window averaging is needed after the
//! first window. Images are filtered row by row as 1-D signals.

use crate::engine::{run_qara, RunMode};
use crate::error::{QaraError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Default residual-outlier threshold for quality reports.
pub const DEFAULT_OUTLIER_THRESHOLD: u32 = 64;

/// Integer samples with a declared bit width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalBuffer {
    samples: Vec<u32>,
    bit_width: u32,
}

impl SignalBuffer {
    pub fn new(samples: Vec<u32>, bit_width: u32) -> Result<Self> {
        if bit_width == 0 || bit_width > 32 {
            return Err(QaraError::InvalidConfig(format!(
                "bit width {bit_width} outside 1..=32"
            )));
        }
        if bit_width < 32 {
            let limit = 1u64 << bit_width;
            for &s in &samples {
                if u64::from(s) >= limit {
                    return Err(QaraError::ValueOutOfRange {
                        value: u64::from(s),
                        bits: bit_width,
                    });
                }
            }
        }
        Ok(Self { samples, bit_width })
    }

    pub fn samples(&self) -> &[u32] {
        &self.samples
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest representable sample value.
    pub fn peak(&self) -> u32 {
        if self.bit_width >= 32 {
            u32::MAX
        } else {
            (1u32 << self.bit_width) - 1
        }
    }
}

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(QaraError::ShapeMismatch {
                left: width * height,
                right: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }
}

/// How a window turns into one output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Deterministic: the most probable index.
    Argmax,
    /// One measurement shot per window, streams derived from the seed.
    Sampled { seed: u64 },
}

/// Boundary handling; windows never read outside the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgePolicy {
    /// Clamp window indices to the signal ends.
    Replicate,
}

/// Where each window's reference comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePolicy {
    /// Reference for window t+1 is the raw output of window t; the first
    /// window falls back to its integer mean.
    Feedback,
    /// Every window uses its own integer mean.
    WindowMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterAlgorithm {
    Qara,
    Median,
}

/// Sliding-window filter configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Window length, a power of two in 2..=1024.
    pub window_m: usize,
    /// Payload bit-width the engine works at (8 for images).
    pub bit_width_n: u32,
    pub mode: FilterMode,
    /// Rescale each window to span the full bit range before encoding.
    pub normalize: bool,
    pub stride: usize,
    pub edge_policy: EdgePolicy,
    pub reference_policy: ReferencePolicy,
}

impl FilterConfig {
    /// Argmax defaults: 8-bit, normalized, stride 1, feedback reference.
    pub fn argmax(window_m: usize) -> Self {
        Self {
            window_m,
            bit_width_n: 8,
            mode: FilterMode::Argmax,
            normalize: true,
            stride: 1,
            edge_policy: EdgePolicy::Replicate,
            reference_policy: ReferencePolicy::Feedback,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_m < 2 || self.window_m > 1024 || !self.window_m.is_power_of_two() {
            return Err(QaraError::InvalidConfig(format!(
                "window {} must be a power of two in 2..=1024",
                self.window_m
            )));
        }
        if self.stride == 0 {
            return Err(QaraError::InvalidConfig("stride must be >= 1".into()));
        }
        if self.bit_width_n == 0 || self.bit_width_n > 16 {
            return Err(QaraError::InvalidConfig(format!(
                "bit width {} outside 1..=16",
                self.bit_width_n
            )));
        }
        Ok(())
    }
}

/// One row of the per-window trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowTrace {
    /// Global window ordinal (row-major across image rows).
    pub ordinal: u64,
    /// Raw (unnormalized) reference the window was filtered against.
    pub reference: u32,
    pub chosen_index: usize,
    pub chosen_value: u32,
}

/// Instrumented operation counters.
///
/// `rotation_ops` counts rotation-gate slots executed by the quantum filter
/// (two per payload bit per window — one reference-conditioned, one
/// data-controlled), independent of the window length. `comparisons` counts
/// merge-sort comparisons in the median filter and grows with `M·log₂M` per
/// window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CostCounters {
    pub windows: u64,
    pub rotation_ops: u64,
    pub comparisons: u64,
}

/// Output of a signal-filter run.
#[derive(Debug, Clone)]
pub struct FilterRun {
    pub output: SignalBuffer,
    /// Per-window trace; empty for the median filter.
    pub trace: Vec<WindowTrace>,
    pub cost: CostCounters,
}

/// Output of an image-filter run.
#[derive(Debug, Clone)]
pub struct ImageFilterRun {
    pub output: GrayImage,
    pub trace: Vec<WindowTrace>,
    pub cost: CostCounters,
}

/// Result of rescaling one window to the full bit range.
///
/// `lo`/`hi` and the degenerate flag describe the affine map; the original
/// window kept by the caller is the exact pre-image, so inverting the filter
/// output is just indexing into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedWindow {
    pub scaled: Vec<u32>,
    pub scaled_reference: u32,
    pub lo: u32,
    pub hi: u32,
    pub degenerate: bool,
}

/// Affine-rescale a window onto `[0, 2^n−1]`:
/// `v ↦ round((v − lo)·(2^n−1)/(hi − lo))` with `lo`/`hi` the window minimum
/// and maximum. The reference is mapped identically and clamped into range.
/// A constant window maps to all zeros (degenerate).
pub fn normalize_window(values: &[u32], reference: u32, bits: u32) -> NormalizedWindow {
    debug_assert!(bits >= 1 && !values.is_empty());
    let lo = *values.iter().min().expect("non-empty window");
    let hi = *values.iter().max().expect("non-empty window");
    let top = ((1u64 << bits) - 1) as f64;
    if hi == lo {
        return NormalizedWindow {
            scaled: vec![0; values.len()],
            scaled_reference: 0,
            lo,
            hi,
            degenerate: true,
        };
    }
    let scale = top / f64::from(hi - lo);
    let map = |v: u32| (f64::from(v) - f64::from(lo)) * scale;
    let scaled = values.iter().map(|&v| map(v).round() as u32).collect();
    let scaled_reference = map(reference).round().clamp(0.0, top) as u32;
    NormalizedWindow {
        scaled,
        scaled_reference,
        lo,
        hi,
        degenerate: false,
    }
}

/// Per-window measurement stream: mixes the global seed with the row and
/// window ordinal so parallel row processing reproduces serial results.
fn derive_stream_seed(global: u64, row: u64, ordinal: u64) -> u64 {
    let mut z = global
        ^ row.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ ordinal.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Window members for the window centered at `center`, replicate-clamped at
/// the ends. The window starts at `center − ⌊M/2⌋`, so odd lengths are
/// symmetric and even lengths lean one sample left.
fn window_at(samples: &[u32], center: usize, window: usize) -> Vec<u32> {
    let len = samples.len() as isize;
    let start = center as isize - (window / 2) as isize;
    (0..window as isize)
        .map(|i| samples[(start + i).clamp(0, len - 1) as usize])
        .collect()
}

fn integer_mean(values: &[u32]) -> u32 {
    (values.iter().map(|&v| u64::from(v)).sum::<u64>() / values.len() as u64) as u32
}

/// Filter one row of samples with the quantum feedback filter.
fn qara_filter_row(
    samples: &[u32],
    cfg: &FilterConfig,
    row: u64,
    ordinal_base: u64,
    trace: &mut Vec<WindowTrace>,
    cost: &mut CostCounters,
) -> Result<Vec<u32>> {
    let top = (1u64 << cfg.bit_width_n) as u32 - 1;
    let mut feedback: Option<u32> = None;
    let mut out = Vec::with_capacity(samples.len().div_ceil(cfg.stride));
    for (w_ord, center) in (0..samples.len()).step_by(cfg.stride).enumerate() {
        let window = window_at(samples, center, cfg.window_m);
        let raw_reference = match cfg.reference_policy {
            ReferencePolicy::WindowMean => integer_mean(&window),
            ReferencePolicy::Feedback => feedback.unwrap_or_else(|| integer_mean(&window)),
        };
        let (engine_values, engine_reference) = if cfg.normalize {
            let norm = normalize_window(&window, raw_reference, cfg.bit_width_n);
            (norm.scaled, norm.scaled_reference)
        } else {
            (window.clone(), raw_reference.min(top))
        };
        let mode = match cfg.mode {
            FilterMode::Argmax => RunMode::Argmax,
            FilterMode::Sampled { seed } => RunMode::Sampled {
                seed: derive_stream_seed(seed, row, w_ord as u64),
            },
        };
        let (index, _) = run_qara(
            &engine_values,
            engine_reference,
            cfg.bit_width_n,
            mode,
            true,
        )?;
        let chosen = window[index];
        trace.push(WindowTrace {
            ordinal: ordinal_base + w_ord as u64,
            reference: raw_reference,
            chosen_index: index,
            chosen_value: chosen,
        });
        cost.windows += 1;
        cost.rotation_ops += 2 * u64::from(cfg.bit_width_n);
        out.push(chosen);
        feedback = Some(chosen);
    }
    Ok(out)
}

/// Apply the quantum feedback filter to a signal.
///
/// Slides a window of `window_m` samples at the configured stride with
/// replicated edges (output length equals input length at stride 1). Each
/// window is optionally normalized, run through the engine in unique mode,
/// and the chosen original member is emitted; the raw output becomes the
/// next window's reference.
pub fn quantum_feedback_filter(signal: &SignalBuffer, cfg: &FilterConfig) -> Result<FilterRun> {
    cfg.validate()?;
    if signal.len() < cfg.window_m {
        return Err(QaraError::SignalTooShort {
            len: signal.len(),
            window: cfg.window_m,
        });
    }
    let mut trace = Vec::new();
    let mut cost = CostCounters::default();
    let out = qara_filter_row(signal.samples(), cfg, 0, 0, &mut trace, &mut cost)?;
    Ok(FilterRun {
        output: SignalBuffer::new(out, signal.bit_width())?,
        trace,
        cost,
    })
}

/// Merge sort with an explicit comparison counter.
fn merge_sort_counted(values: &mut Vec<u32>, comparisons: &mut u64) {
    let len = values.len();
    if len <= 1 {
        return;
    }
    let mut right = values.split_off(len / 2);
    merge_sort_counted(values, comparisons);
    merge_sort_counted(&mut right, comparisons);
    let left = std::mem::take(values);
    let mut merged = Vec::with_capacity(len);
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        *comparisons += 1;
        if left[i] <= right[j] {
            merged.push(left[i]);
            i += 1;
        } else {
            merged.push(right[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    *values = merged;
}

/// Window median with the lower-central convention for even windows
/// (keeps the output a member of the window).
fn window_median(window: &[u32], comparisons: &mut u64) -> u32 {
    let mut sorted = window.to_vec();
    merge_sort_counted(&mut sorted, comparisons);
    sorted[(sorted.len() - 1) / 2]
}

fn median_filter_row(
    samples: &[u32],
    window: usize,
    stride: usize,
    cost: &mut CostCounters,
) -> Vec<u32> {
    (0..samples.len())
        .step_by(stride)
        .map(|center| {
            cost.windows += 1;
            window_median(&window_at(samples, center, window), &mut cost.comparisons)
        })
        .collect()
}

/// Sliding-window median with the same geometry as the quantum filter.
/// Accepts any window length ≥ 2 (odd windows included).
pub fn median_filter(
    signal: &SignalBuffer,
    window: usize,
    stride: usize,
    _edge_policy: EdgePolicy,
) -> Result<FilterRun> {
    if window < 2 {
        return Err(QaraError::InvalidConfig(format!(
            "median window {window} must be >= 2"
        )));
    }
    if stride == 0 {
        return Err(QaraError::InvalidConfig("stride must be >= 1".into()));
    }
    if signal.len() < window {
        return Err(QaraError::SignalTooShort {
            len: signal.len(),
            window,
        });
    }
    let mut cost = CostCounters::default();
    let out = median_filter_row(signal.samples(), window, stride, &mut cost);
    Ok(FilterRun {
        output: SignalBuffer::new(out, signal.bit_width())?,
        trace: Vec::new(),
        cost,
    })
}

/// Filter an image row by row as independent 1-D signals.
///
/// Each row restarts the reference policy (feedback chains only within a
/// row); sampled mode derives per-row, per-window streams from the global
/// seed, so results are independent of row processing order.
pub fn filter_image(
    img: &GrayImage,
    cfg: &FilterConfig,
    algorithm: FilterAlgorithm,
) -> Result<ImageFilterRun> {
    cfg.validate()?;
    if img.width < cfg.window_m {
        return Err(QaraError::ImageTooNarrow {
            width: img.width,
            window: cfg.window_m,
        });
    }
    let windows_per_row = img.width.div_ceil(cfg.stride) as u64;
    let mut output = GrayImage::filled(img.width.div_ceil(cfg.stride), img.height, 0);
    let mut trace = Vec::new();
    let mut cost = CostCounters::default();
    for y in 0..img.height {
        let samples: Vec<u32> = img.row(y).iter().map(|&p| u32::from(p)).collect();
        let filtered = match algorithm {
            FilterAlgorithm::Qara => qara_filter_row(
                &samples,
                cfg,
                y as u64,
                y as u64 * windows_per_row,
                &mut trace,
                &mut cost,
            )?,
            FilterAlgorithm::Median => {
                median_filter_row(&samples, cfg.window_m, cfg.stride, &mut cost)
            }
        };
        for (x, &v) in filtered.iter().enumerate() {
            output.set(x, y, v as u8);
        }
    }
    Ok(ImageFilterRun {
        output,
        trace,
        cost,
    })
}

/// Quality metrics of a filtered result against a clean reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub mse: f64,
    /// Peak signal-to-noise ratio in dB; +inf when the inputs are identical
    /// (serialized as null in JSON).
    pub psnr_db: f64,
    pub max_abs_error: u32,
    /// Samples deviating from the clean reference by more than the threshold.
    pub residual_outlier_count: usize,
}

fn quality_from_iters<I>(pairs: I, len: usize, peak: f64, threshold: u32) -> QualityReport
where
    I: Iterator<Item = (u32, u32)>,
{
    let mut sq_sum = 0.0;
    let mut max_abs = 0u32;
    let mut residual = 0usize;
    for (a, b) in pairs {
        let diff = a.abs_diff(b);
        sq_sum += f64::from(diff) * f64::from(diff);
        max_abs = max_abs.max(diff);
        if diff > threshold {
            residual += 1;
        }
    }
    let mse = sq_sum / len as f64;
    let psnr_db = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    };
    QualityReport {
        mse,
        psnr_db,
        max_abs_error: max_abs,
        residual_outlier_count: residual,
    }
}

pub fn compute_quality_signal(
    clean: &SignalBuffer,
    filtered: &SignalBuffer,
    outlier_threshold: u32,
) -> Result<QualityReport> {
    if clean.len() != filtered.len() {
        return Err(QaraError::ShapeMismatch {
            left: clean.len(),
            right: filtered.len(),
        });
    }
    Ok(quality_from_iters(
        clean
            .samples()
            .iter()
            .copied()
            .zip(filtered.samples().iter().copied()),
        clean.len(),
        f64::from(clean.peak()),
        outlier_threshold,
    ))
}

pub fn compute_quality_image(
    clean: &GrayImage,
    filtered: &GrayImage,
    outlier_threshold: u32,
) -> Result<QualityReport> {
    if clean.width != filtered.width || clean.height != filtered.height {
        return Err(QaraError::ShapeMismatch {
            left: clean.pixels().len(),
            right: filtered.pixels().len(),
        });
    }
    Ok(quality_from_iters(
        clean
            .pixels()
            .iter()
            .map(|&p| u32::from(p))
            .zip(filtered.pixels().iter().map(|&p| u32::from(p))),
        clean.pixels().len(),
        255.0,
        outlier_threshold,
    ))
}

/// Artifact geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactShape {
    /// Single samples bumped by `magnitude` (clamped to the bit range).
    Impulse,
    /// Rectangular blocks of pixels set to `magnitude` (images only).
    Block { width: usize, height: usize },
}

/// Deterministic artifact-injection parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactSpec {
    pub count: usize,
    pub magnitude: u32,
    pub shape: ArtifactShape,
    pub seed: u64,
}

/// Corrupt a signal with `count` impulses at seeded distinct positions.
/// Returns the corrupted copy and the affected positions (the ground-truth
/// mask).
pub fn inject_signal_artifacts(
    clean: &SignalBuffer,
    spec: &ArtifactSpec,
) -> Result<(SignalBuffer, Vec<usize>)> {
    if !matches!(spec.shape, ArtifactShape::Impulse) {
        return Err(QaraError::InvalidConfig(
            "signals support impulse artifacts only".into(),
        ));
    }
    if spec.count > clean.len() {
        return Err(QaraError::InvalidConfig(format!(
            "cannot place {} impulses in {} samples",
            spec.count,
            clean.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut positions = BTreeSet::new();
    while positions.len() < spec.count {
        positions.insert(rng.gen_range(0..clean.len()));
    }
    let peak = clean.peak();
    let mut samples = clean.samples().to_vec();
    for &pos in &positions {
        samples[pos] = samples[pos].saturating_add(spec.magnitude).min(peak);
    }
    let mask: Vec<usize> = positions.into_iter().collect();
    Ok((SignalBuffer::new(samples, clean.bit_width())?, mask))
}

/// Corrupt an image; impulses bump pixels, blocks overwrite rectangles with
/// `magnitude`. Returns the corrupted copy and affected pixel indices
/// (row-major).
pub fn inject_image_artifacts(
    clean: &GrayImage,
    spec: &ArtifactSpec,
) -> Result<(GrayImage, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = clean.clone();
    let mut mask = BTreeSet::new();
    let value = spec.magnitude.min(255) as u8;
    match spec.shape {
        ArtifactShape::Impulse => {
            if spec.count > clean.pixels().len() {
                return Err(QaraError::InvalidConfig(format!(
                    "cannot place {} impulses in {} pixels",
                    spec.count,
                    clean.pixels().len()
                )));
            }
            while mask.len() < spec.count {
                let pos = rng.gen_range(0..clean.pixels().len());
                if mask.insert(pos) {
                    let bumped = u32::from(out.pixels[pos])
                        .saturating_add(spec.magnitude)
                        .min(255);
                    out.pixels[pos] = bumped as u8;
                }
            }
        }
        ArtifactShape::Block { width, height } => {
            if width == 0 || height == 0 || width > clean.width || height > clean.height {
                return Err(QaraError::InvalidConfig(format!(
                    "block {width}x{height} does not fit a {}x{} image",
                    clean.width, clean.height
                )));
            }
            for _ in 0..spec.count {
                let x0 = rng.gen_range(0..=clean.width - width);
                let y0 = rng.gen_range(0..=clean.height - height);
                for y in y0..y0 + height {
                    for x in x0..x0 + width {
                        out.set(x, y, value);
                        mask.insert(y * clean.width + x);
                    }
                }
            }
        }
    }
    Ok((out, mask.into_iter().collect()))
}
