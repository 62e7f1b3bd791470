//! Shared fixtures for the pipeline benchmarks.

use delayfield::model::{KernelTerm, ModelParams};
use delayfield::C64;

/// Bi-exponential reference parameter set at the Hopf point.
pub fn hopf_params() -> ModelParams {
    ModelParams::new(
        1.0,
        1.0,
        4.220214885988226,
        vec![
            KernelTerm { c_hat: C64::new(3.0, 0.0), mu: C64::new(0.5, 0.0) },
            KernelTerm { c_hat: C64::new(-5.5, 0.0), mu: C64::new(1.0, 0.0) },
        ],
    )
    .unwrap()
}
