//! `qara` — command-line front end for the amplitude-redistribution
//! simulator and sliding-window filter.
//!
//! Exit codes: 0 success, 1 runtime failure (I/O, simulation), 2 usage or
//! configuration errors.

use clap::{Parser, Subcommand, ValueEnum};
use qara_core::{
    analytic_distribution, compute_quality_image, compute_quality_signal, encode_window,
    filter_image, gate_metrics, inject_image_artifacts, inject_signal_artifacts, median_filter,
    quantum_feedback_filter, read_pgm, read_signal_csv, verify, write_pgm, write_signal_csv,
    ArtifactShape, ArtifactSpec, DistributionReport, EdgePolicy, FilterAlgorithm, FilterConfig,
    FilterMode, GrayImage, QaraError, ReferencePolicy, RunManifest, SignalBuffer, SignalKind,
    WindowTrace, DEFAULT_OUTLIER_THRESHOLD,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qara",
    version,
    about = "Amplitude-redistribution simulator and outlier filter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Qara,
    Median,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Argmax,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Feedback,
    WindowMean,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Impulse,
    Block,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant suite; nonzero exit on any failure.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Optionally record a run manifest here.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Print the index distribution of one window (closed form) plus seeded
    /// measurement counts, as JSON.
    Distribution {
        /// Window values, comma separated (length must be a power of two).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u32>,
        #[arg(long)]
        reference: u32,
        /// Payload bit-width.
        #[arg(long)]
        bits: u32,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Optionally record a run manifest here.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Print gate count and depth metrics of the rotation decomposition as a
    /// JSON table keyed by the qubit count.
    Gatecount {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Optionally record a run manifest here.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Filter a CSV signal and write the result (plus report and manifest).
    FilterSignal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        filter: FilterArgs,
        /// Clean reference signal for the quality report.
        #[arg(long)]
        clean: Option<PathBuf>,
        /// Write the per-window trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Filter a binary PGM image row by row (plus report and manifest).
    FilterImage {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        clean: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Corrupt a signal or image deterministically and write the ground-truth
    /// mask next to it.
    InjectArtifact {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 255)]
        magnitude: u32,
        #[arg(long, value_enum, default_value_t = ShapeArg::Impulse)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 8)]
        block_width: usize,
        #[arg(long, default_value_t = 8)]
        block_height: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Bit width used when the input is a CSV signal.
        #[arg(long, default_value_t = 8)]
        bits: u32,
    },
    /// Generate a synthetic CSV signal.
    GenerateSignal {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "triangular")]
        kind: String,
        #[arg(long, default_value_t = 256)]
        length: usize,
        #[arg(long, default_value_t = 200)]
        amplitude: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Parser)]
struct FilterArgs {
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Qara)]
    algorithm: AlgorithmArg,
    /// Window length (power of two for the quantum filter).
    #[arg(long, default_value_t = 8)]
    window: usize,
    /// Payload bit-width the engine works at.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Argmax)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Disable per-window min/max normalization.
    #[arg(long, default_value_t = false)]
    no_normalize: bool,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Feedback)]
    reference_policy: ReferenceArg,
    /// Residual-outlier threshold for the quality report.
    #[arg(long, default_value_t = DEFAULT_OUTLIER_THRESHOLD)]
    threshold: u32,
}

impl FilterArgs {
    fn config(&self) -> FilterConfig {
        FilterConfig {
            window_m: self.window,
            bit_width_n: self.bits,
            mode: match self.mode {
                ModeArg::Argmax => FilterMode::Argmax,
                ModeArg::Sampled => FilterMode::Sampled { seed: self.seed },
            },
            normalize: !self.no_normalize,
            stride: self.stride,
            edge_policy: EdgePolicy::Replicate,
            reference_policy: match self.reference_policy {
                ReferenceArg::Feedback => ReferencePolicy::Feedback,
                ReferenceArg::WindowMean => ReferencePolicy::WindowMean,
            },
        }
    }
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<QaraError> for CliError {
    fn from(err: QaraError) -> Self {
        match err {
            QaraError::InvalidConfig(_)
            | QaraError::InvalidWindowLength(_)
            | QaraError::ValueOutOfRange { .. }
            | QaraError::QubitCountOutOfRange { .. } => CliError::Usage(err.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn argv() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn manifest_path(output: &Path) -> PathBuf {
    sibling(output, ".manifest.json")
}

fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    output.with_file_name(name)
}

fn write_trace_csv(trace: &[WindowTrace], path: &Path) -> Result<(), CliError> {
    let mut text = String::from("window_ordinal,reference,chosen_index,chosen_value\n");
    for entry in trace {
        text.push_str(&format!(
            "{},{},{},{}\n",
            entry.ordinal, entry.reference, entry.chosen_index, entry.chosen_value
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize infallibly")
}

fn write_json_pretty<T: serde::Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Manifest for a stdout-only subcommand, written when `--manifest` is given.
fn record_stdout_manifest(
    command: &str,
    seed: Option<u64>,
    config: serde_json::Value,
    path: Option<PathBuf>,
) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut manifest = RunManifest::new(command, argv());
        manifest.seed = seed;
        manifest.config = config;
        manifest.outputs.push("stdout".to_string());
        manifest.write(path)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Verify { seed, manifest } => {
            record_stdout_manifest("verify", Some(seed), serde_json::Value::Null, manifest)?;
            run_verify(seed)
        }
        Command::Distribution {
            values,
            reference,
            bits,
            shots,
            seed,
            manifest,
        } => {
            let window = encode_window(&values, reference, bits, true)?;
            let dist = analytic_distribution(&window)?;
            record_stdout_manifest(
                "distribution",
                Some(seed),
                serde_json::json!({"values": values, "reference": reference, "bits": bits, "shots": shots}),
                manifest,
            )?;
            println!("{}", to_json(&DistributionReport::new(&dist, shots, seed)));
            Ok(())
        }
        Command::Gatecount { max_n, manifest } => {
            if max_n == 0 {
                return Err(CliError::Usage("--max-n must be >= 1".into()));
            }
            let table: std::collections::BTreeMap<usize, _> = (1..=max_n)
                .map(|n| gate_metrics(n).map(|m| (n, m)))
                .collect::<Result<_, _>>()?;
            record_stdout_manifest(
                "gatecount",
                None,
                serde_json::json!({"max_n": max_n}),
                manifest,
            )?;
            println!("{}", to_json(&table));
            Ok(())
        }
        Command::FilterSignal {
            input,
            output,
            filter,
            clean,
            trace,
        } => run_filter_signal(input, output, filter, clean, trace),
        Command::FilterImage {
            input,
            output,
            filter,
            clean,
            trace,
        } => run_filter_image(input, output, filter, clean, trace),
        Command::InjectArtifact {
            input,
            output,
            count,
            magnitude,
            shape,
            block_width,
            block_height,
            seed,
            bits,
        } => run_inject(
            input,
            output,
            ArtifactSpec {
                count,
                magnitude,
                shape: match shape {
                    ShapeArg::Impulse => ArtifactShape::Impulse,
                    ShapeArg::Block => ArtifactShape::Block {
                        width: block_width,
                        height: block_height,
                    },
                },
                seed,
            },
            bits,
        ),
        Command::GenerateSignal {
            output,
            kind,
            length,
            amplitude,
            seed,
        } => {
            let kind: SignalKind = kind.parse()?;
            let signal = qara_core::generate_signal(kind, length, amplitude, seed)?;
            write_signal_csv(signal.samples(), &output)?;
            let mut manifest = RunManifest::new("generate-signal", argv());
            manifest.seed = Some(seed);
            manifest.outputs.push(path_str(&output));
            manifest.config = serde_json::json!({
                "kind": kind, "length": length, "amplitude": amplitude
            });
            manifest.write(manifest_path(&output))?;
            Ok(())
        }
    }
}

fn run_verify(seed: u64) -> Result<(), CliError> {
    let results = verify::run_all(seed);
    let mut failed = 0usize;
    for suite in &results {
        let verdict = if suite.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} — {}", suite.name, suite.detail);
        if !suite.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} suites passed", results.len());
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "{failed} of {} suites failed",
            results.len()
        )))
    }
}

/// Smallest bit width holding every sample, floored at `at_least`.
fn signal_bits(samples: &[u32], at_least: u32) -> u32 {
    let max = samples.iter().copied().max().unwrap_or(0);
    let needed = 32 - max.leading_zeros();
    needed.max(at_least).max(1)
}

fn run_filter_signal(
    input: PathBuf,
    output: PathBuf,
    filter: FilterArgs,
    clean: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> Result<(), CliError> {
    let samples = read_signal_csv(&input)?;
    if samples.is_empty() {
        eprintln!("warning: {} is empty", input.display());
    }
    let bits = signal_bits(&samples, filter.bits);
    let signal = SignalBuffer::new(samples, bits)?;
    let cfg = filter.config();
    let run = match filter.algorithm {
        AlgorithmArg::Qara => quantum_feedback_filter(&signal, &cfg)?,
        AlgorithmArg::Median => median_filter(&signal, cfg.window_m, cfg.stride, cfg.edge_policy)?,
    };
    write_signal_csv(run.output.samples(), &output)?;

    let mut manifest = RunManifest::new("filter-signal", argv());
    manifest.seed = Some(filter.seed);
    manifest.config = serde_json::json!({
        "filter": cfg,
        "algorithm": match filter.algorithm { AlgorithmArg::Qara => "qara", AlgorithmArg::Median => "median" },
        "cost": run.cost,
    });
    manifest.inputs.push(path_str(&input));
    manifest.outputs.push(path_str(&output));

    if let Some(clean_path) = clean {
        let clean_signal = SignalBuffer::new(read_signal_csv(&clean_path)?, bits)?;
        let report = compute_quality_signal(&clean_signal, &run.output, filter.threshold)?;
        let report_path = sibling(&output, ".report.json");
        write_json_pretty(&report, &report_path)?;
        manifest.inputs.push(path_str(&clean_path));
        manifest.outputs.push(path_str(&report_path));
        println!("{}", to_json(&report));
    }
    if let Some(trace_path) = trace {
        write_trace_csv(&run.trace, &trace_path)?;
        manifest.outputs.push(path_str(&trace_path));
    }
    manifest.write(manifest_path(&output))?;
    Ok(())
}

fn run_filter_image(
    input: PathBuf,
    output: PathBuf,
    filter: FilterArgs,
    clean: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> Result<(), CliError> {
    let image = read_pgm(&input)?;
    let cfg = filter.config();
    let run = filter_image(
        &image,
        &cfg,
        match filter.algorithm {
            AlgorithmArg::Qara => FilterAlgorithm::Qara,
            AlgorithmArg::Median => FilterAlgorithm::Median,
        },
    )?;
    write_pgm(&run.output, &output)?;

    let mut manifest = RunManifest::new("filter-image", argv());
    manifest.seed = Some(filter.seed);
    manifest.config = serde_json::json!({
        "filter": cfg,
        "algorithm": match filter.algorithm { AlgorithmArg::Qara => "qara", AlgorithmArg::Median => "median" },
        "cost": run.cost,
    });
    manifest.inputs.push(path_str(&input));
    manifest.outputs.push(path_str(&output));

    if let Some(clean_path) = clean {
        let clean_image = read_pgm(&clean_path)?;
        let report = compute_quality_image(&clean_image, &run.output, filter.threshold)?;
        let report_path = sibling(&output, ".report.json");
        write_json_pretty(&report, &report_path)?;
        manifest.inputs.push(path_str(&clean_path));
        manifest.outputs.push(path_str(&report_path));
        println!("{}", to_json(&report));
    }
    if let Some(trace_path) = trace {
        write_trace_csv(&run.trace, &trace_path)?;
        manifest.outputs.push(path_str(&trace_path));
    }
    manifest.write(manifest_path(&output))?;
    Ok(())
}

fn run_inject(
    input: PathBuf,
    output: PathBuf,
    spec: ArtifactSpec,
    bits: u32,
) -> Result<(), CliError> {
    let is_image = input
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"));
    let mask: Vec<usize> = if is_image {
        let image: GrayImage = read_pgm(&input)?;
        let (corrupted, positions) = inject_image_artifacts(&image, &spec)?;
        write_pgm(&corrupted, &output)?;
        positions
    } else {
        let samples = read_signal_csv(&input)?;
        let bits = signal_bits(&samples, bits);
        let signal = SignalBuffer::new(samples, bits)?;
        let (corrupted, positions) = inject_signal_artifacts(&signal, &spec)?;
        write_signal_csv(corrupted.samples(), &output)?;
        positions
    };
    let mask_path = sibling(&output, ".mask.json");
    write_json_pretty(&mask, &mask_path)?;

    let mut manifest = RunManifest::new("inject-artifact", argv());
    manifest.seed = Some(spec.seed);
    manifest.config = serde_json::to_value(spec).expect("spec serializes");
    manifest.inputs.push(path_str(&input));
    manifest.outputs.push(path_str(&output));
    manifest.outputs.push(path_str(&mask_path));
    manifest.write(manifest_path(&output))?;
    Ok(())
}
