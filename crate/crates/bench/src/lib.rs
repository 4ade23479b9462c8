//! Benchmark fixtures.

use twistlab_core::local_model::CotangentPoint;

/// Fixed off-zero-section point used by the flow benchmarks.
pub fn sample_point() -> CotangentPoint {
    CotangentPoint::new([0.6, 0.0, 0.8], [0.0, 1.0, 0.0], 1e-9).expect("valid point")
}
