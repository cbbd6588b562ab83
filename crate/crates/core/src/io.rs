//! File formats and synthetic inputs: binary PGM (P5, 8-bit) images,
//! one-integer-per-line CSV signals, deterministic waveform generation, and
//! run manifests for bit-exact reproduction.

use crate::error::{QaraError, Result};
use crate::filter::{GrayImage, SignalBuffer};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Read a binary PGM (magic `P5`, maxval 255).
///
/// The header is parsed as whitespace-delimited tokens with `#` comments
/// allowed; only 8-bit images are accepted.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_pgm(&bytes)
}

pub(crate) fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(QaraError::PgmMalformedHeader(
            "missing P5 magic".to_string(),
        ));
    }
    let mut pos = 2usize;
    let mut fields = [0u32; 3]; // width, height, maxval
    for field in &mut fields {
        // Skip whitespace and # comments between tokens.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => {
                    return Err(QaraError::PgmMalformedHeader(
                        "header ended before width/height/maxval".to_string(),
                    ))
                }
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            return Err(QaraError::PgmMalformedHeader(format!(
                "expected a digit at byte {pos}"
            )));
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = token
            .parse()
            .map_err(|_| QaraError::PgmMalformedHeader(format!("bad integer {token:?}")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(QaraError::PgmUnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(QaraError::PgmMalformedHeader(
                "missing whitespace after maxval".to_string(),
            ))
        }
    }
    let expected = width as usize * height as usize;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(QaraError::PgmTruncated {
            expected,
            found: payload.len(),
        });
    }
    GrayImage::new(
        width as usize,
        height as usize,
        payload[..expected].to_vec(),
    )
}

/// Write a canonical binary PGM: `P5\n<w> <h>\n255\n` followed by the pixel
/// rows. `read_pgm ∘ write_pgm` is the identity, byte for byte.
pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(encode_pgm(img).as_slice())?;
    Ok(())
}

pub(crate) fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Read a one-integer-per-line CSV into samples. A non-integer first line is
/// treated as a header, but only when data lines follow it; any other
/// non-integer token is an error carrying its line number. An empty file
/// yields an empty buffer (callers may warn).
pub fn read_signal_csv(path: impl AsRef<Path>) -> Result<Vec<u32>> {
    let text = std::fs::read_to_string(path)?;
    parse_signal_csv(&text)
}

pub(crate) fn parse_signal_csv(text: &str) -> Result<Vec<u32>> {
    let mut samples = Vec::new();
    let tokens: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(lineno, line)| (lineno + 1, line.trim()))
        .filter(|(_, token)| !token.is_empty())
        .collect();
    for (position, &(line, token)) in tokens.iter().enumerate() {
        match token.parse::<u32>() {
            Ok(v) => samples.push(v),
            Err(_) if position == 0 && tokens.len() > 1 => {} // header row
            Err(_) => {
                return Err(QaraError::CsvParse {
                    line,
                    token: token.to_string(),
                })
            }
        }
    }
    Ok(samples)
}

/// Write samples one per line.
pub fn write_signal_csv(samples: &[u32], path: impl AsRef<Path>) -> Result<()> {
    let mut text = String::new();
    for s in samples {
        text.push_str(&s.to_string());
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Deterministic synthetic waveforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// Symmetric rise and fall between 0 and the amplitude.
    Triangular,
    Constant,
    /// Linear 0..=amplitude.
    Ramp,
}

impl std::str::FromStr for SignalKind {
    type Err = QaraError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(Self::Triangular),
            "constant" => Ok(Self::Constant),
            "ramp" => Ok(Self::Ramp),
            other => Err(QaraError::InvalidConfig(format!(
                "unknown signal kind {other:?}"
            ))),
        }
    }
}

/// Generate a waveform of `length` samples peaking at `amplitude`.
///
/// The seed is threaded through for manifest reproducibility; the current
/// kinds are all deterministic and ignore it.
pub fn generate_signal(
    kind: SignalKind,
    length: usize,
    amplitude: u32,
    _seed: u64,
) -> Result<SignalBuffer> {
    if length < 2 {
        return Err(QaraError::InvalidConfig(format!(
            "signal length {length} must be >= 2"
        )));
    }
    let bits = 32 - amplitude.leading_zeros().min(31);
    let bit_width = bits.max(1);
    let span = (length - 1) as f64;
    let samples: Vec<u32> = (0..length)
        .map(|p| {
            let x = p as f64 / span;
            let level = match kind {
                SignalKind::Constant => 1.0,
                SignalKind::Ramp => x,
                SignalKind::Triangular => 1.0 - (2.0 * x - 1.0).abs(),
            };
            (f64::from(amplitude) * level).round() as u32
        })
        .collect();
    SignalBuffer::new(samples, bit_width)
}

/// Everything needed to reproduce a CLI run bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand name.
    pub command: String,
    /// Full argument vector as invoked (excluding the binary path).
    pub argv: Vec<String>,
    /// Effective configuration, serialized by the subcommand.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, argv: Vec<String>) -> Self {
        Self {
            command: command.into(),
            argv,
            config: serde_json::Value::Null,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| QaraError::InvalidConfig(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| QaraError::InvalidConfig(e.to_string()))
    }
}
