//! Fixed inputs shared by the benchmarks.

use ewcones_core::{EulerAngles, OrthogonalEmbedding, Parity, WitnessParams};

/// A generic proper rotation with no special symmetry.
pub fn sample_embedding() -> OrthogonalEmbedding {
    OrthogonalEmbedding::from_euler(EulerAngles::new(0.7, 1.3, -2.1), Parity::Proper)
}

/// A point on ellipse II with `b ≠ d`.
pub fn sample_params() -> WitnessParams {
    WitnessParams::new(1.0, 1.0, 1.0, 0.0).expect("valid parameters")
}
