//! Shared fixtures for the criterion benchmarks.

use catlike_core::states::cat_state;
use catlike_core::{
    AlgebraKind, DeformationParams, DensityMatrix, LadderCoefficients, Parity, Result,
};

/// Parameter set of the deformed figure curves.
pub fn figure_params() -> DeformationParams {
    DeformationParams::new(0.7, 0.2, 0.1)
}

/// Even catlike state of the deformed su(1,1) oscillator at a fixed cutoff,
/// with `z` large enough that the state fills most of the basis.
pub fn even_cat(cutoff: usize) -> Result<(LadderCoefficients, DensityMatrix)> {
    let coeffs = LadderCoefficients::build(AlgebraKind::GeneralizedSu11, figure_params(), cutoff)?;
    let z = amplitude_for(cutoff);
    let state = cat_state(z, Parity::Even, &coeffs)?;
    Ok((coeffs, DensityMatrix::from_pure(&state)))
}

/// Amplitude whose truncation tail fits comfortably below `cutoff`.
pub fn amplitude_for(cutoff: usize) -> f64 {
    match cutoff {
        0..=24 => 1.0,
        25..=64 => 3.0,
        _ => 6.0,
    }
}
