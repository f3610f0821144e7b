//! Entanglement and quantum discord of two-qubit Bell-diagonal states.
//!
//! * [`state`]: the correlation-vector parametrization, spectrum, geometry and 4×4 realization
//! * [`measures`]: closed-form mutual information, classical correlations, discord,
//!   concurrence and entanglement of formation
//! * [`oracle`]: direct numerical minimization of the measured conditional entropy, an
//!   independent check on the closed-form classical correlations
//! * [`decoherence`]: flip-channel trajectories and their transition events
//! * [`isosurface`]: level surfaces of the measures and convexity witnesses

pub mod decoherence;
pub mod error;
pub mod isosurface;
pub mod measures;
pub mod oracle;
pub mod state;

pub use error::{Error, Result};
pub use measures::{all_measures, CorrelationMeasures};
pub use state::{BellLabel, BellSpectrum, CorrelationVector, StateClass};

/// Formats `x` with 17 significant digits, enough to round-trip any `f64`. Negative zero
/// prints as zero.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
