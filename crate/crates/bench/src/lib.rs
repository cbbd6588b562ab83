//! Shared fixtures for the benchmark suite.

use qara_core::{
    encode_window, inject_image_artifacts, ArtifactShape, ArtifactSpec, EncodedWindow, GrayImage,
    SignalBuffer,
};

/// Deterministic distinct-valued window of `len` values below `2^bits`.
pub fn demo_window(len: usize, bits: u32) -> EncodedWindow {
    let top = 1u32 << bits;
    // Multiplicative stride through the value range keeps values distinct
    // for the sizes benchmarked here.
    let values: Vec<u32> = (0..len as u32)
        .map(|i| i.wrapping_mul(2654435761) % top)
        .collect();
    encode_window(&values, top / 3, bits, true).expect("valid benchmark window")
}

/// Flat test image with a white block, like the filter experiments use.
pub fn demo_image(side: usize) -> GrayImage {
    let clean = GrayImage::filled(side, side, 120);
    let spec = ArtifactSpec {
        count: 1,
        magnitude: 255,
        shape: ArtifactShape::Block {
            width: 8,
            height: 8,
        },
        seed: 21,
    };
    inject_image_artifacts(&clean, &spec).expect("block fits").0
}

/// Ramp signal for 1-D filter benchmarks.
pub fn demo_signal(len: usize) -> SignalBuffer {
    SignalBuffer::new((0..len as u32).map(|i| i % 256).collect(), 8).expect("8-bit ramp")
}
