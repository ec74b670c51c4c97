//! Simulation, optimization and robustness analysis of pulse sequences that
//! interconvert the three-qubit W and GHZ states in an all-to-all Ising
//! register driven by global transverse fields.
//!
//! The numerical core (`linalg`, `operators`, `symmetry`, `pulses`, and the
//! fidelity functions in `convert`) is generic over the real scalar type; the
//! aliases below fix it to `f64`, which is what the optimizer, the robustness
//! analysis and the command-line front end run on.

pub mod convert;
pub mod error;
pub mod linalg;
pub mod nelder_mead;
pub mod operators;
pub mod pulses;
pub mod robustness;
pub mod scalar;
pub mod suite;
pub mod symmetry;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision dense complex matrix.
pub type CMatrix = linalg::ComplexMatrix<f64>;
/// Single-precision dense complex matrix.
pub type CMatrix32 = linalg::ComplexMatrix<f32>;
/// Double-precision state vector.
pub type State = linalg::StateVector<f64>;
