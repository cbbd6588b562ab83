//! Classical simulation and filtering toolkit for the quantum amplitude
//! redistribution algorithm (QARA).
//!
//! QARA loads a window of integers into a superposition indexed by a counter
//! register and rotates index amplitudes away from elements far from a
//! reference value; measuring the counter then favors indices of elements
//! close to the reference. This crate provides:
//!
//! - [`tensor`]: a minimal dense real linear-algebra substrate for qubit
//!   registers (verification paths only).
//! - [`rotation`]: the redistribution operator `R_n(φ)` built three ways —
//!   entrywise closed form, block recursion, and an `O(n²)`-gate circuit —
//!   plus depth/count metrics.
//! - [`engine`]: the end-to-end algorithm on a window, with three agreeing
//!   backends (exact statevector, per-branch structured simulation, and the
//!   closed-form index distribution), measurement sampling, and probability
//!   bounds for outlier suppression.
//! - [`filter`]: QARA as a sliding-window feedback filter on signals and
//!   grayscale images, with a median-filter baseline and quality metrics.
//! - [`io`]: PGM and CSV formats, synthetic signal generation, and run
//!   manifests for bit-exact reproduction.
//! - [`verify`]: the named invariant suites behind the CLI `verify` command.

pub mod engine;
pub mod error;
pub mod filter;
pub mod io;
pub mod rotation;
pub mod tensor;
pub mod verify;

pub use engine::{
    analytic_distribution, best_case_probability, branch_angles, encode_window, outlier_bound,
    run_qara, sample_index, simulate_branches, simulate_statevector, BranchAngleTable,
    Distribution, DistributionReport, EncodedWindow, RegisterGeometry, RunMode,
};
pub use error::{QaraError, Result};
pub use filter::{
    compute_quality_image, compute_quality_signal, filter_image, inject_image_artifacts,
    inject_signal_artifacts, median_filter, quantum_feedback_filter, ArtifactShape, ArtifactSpec,
    CostCounters, EdgePolicy, FilterAlgorithm, FilterConfig, FilterMode, FilterRun, GrayImage,
    ImageFilterRun, QualityReport, ReferencePolicy, SignalBuffer, WindowTrace,
    DEFAULT_OUTLIER_THRESHOLD,
};
pub use io::{
    generate_signal, read_pgm, read_signal_csv, write_pgm, write_signal_csv, RunManifest,
    SignalKind,
};
pub use rotation::{
    decompose_rotation, dense_rotation, dense_rotation_recursive, gate_metrics, hadamard_n,
    rotation_column, verify_hadamard_conjugation, Control, GateKind, GateList, GateMetrics, GateOp,
    Polarity,
};
pub use tensor::{DenseOperator, StateVector};
