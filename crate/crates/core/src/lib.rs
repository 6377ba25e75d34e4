//! Tight triple uncertainty relations for two-qubit systems.
//!
//! The crate builds the cross-product operator `J = S1 x S2` and the total spin
//! `K = S1 + S2` (with `S = sigma / 2`), evaluates the product and additive
//! triple uncertainty functionals with the tight constant `2/sqrt(3)`, maximizes
//! them over local unitaries, scans the symmetric state family for the infimum
//! of the constant, computes Wootters concurrence, and simulates the
//! tomography pipeline used to put error bars on measured values.
//!
//! Data-parallel loops (optimizer starts, Monte Carlo scans, resampling) run on
//! rayon when the default `parallel` feature is enabled and sequentially
//! otherwise; results are identical either way.

pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod optimizer;
mod par;
pub mod rng;
pub mod states;
pub mod tightness;
pub mod tomography;
pub mod uncertainty;

pub use error::{Error, Result};

/// The tight triple constant `2 / sqrt(3)`.
pub const LAMBDA: f64 = 1.154_700_538_379_251_5;

#[cfg(test)]
mod tests {
    #[test]
    fn lambda_value() {
        assert!((super::LAMBDA - 2.0 / 3f64.sqrt()).abs() < 4e-16);
        assert!((0.75 * super::LAMBDA * super::LAMBDA - 1.0).abs() < 1e-15);
    }
}
