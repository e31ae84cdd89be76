//! Numerical laboratory for weighted and cocycle-twisted ergodic averages.
//!
//! The crate evaluates Cesàro-type averages
//!
//! ```text
//! A_n f(x) = 1/|F_n| Σ_{g ∈ F_n} χ(g) f(g·x)
//! A_n f(x) = 1/|F_n| Σ_{g ∈ F_n} π(γ(g, x)) f(g·x)
//! ```
//!
//! over Følner boxes of ℕ and ℤ₊ᵈ, for torus rotations, the alternating
//! subshift, and skew products over compact groups. On top of the averaging
//! engine sit diagnostics that support or refute mean ergodicity, ergodicity
//! and unique ergodicity from finite data.
//!
//! Module map:
//!
//! - [`semigroup`]: semigroup elements, Følner boxes, characters.
//! - [`systems`]: state points and the catalog of dynamical systems.
//! - [`koopman`]: observables, Koopman operators, weighted averages, Wiener-Wintner scans.
//! - [`cocycle_rep`]: compact groups, unitary representations, cocycles, twisted averages.
//! - [`skew_ergodic`]: Haar averages, fixed-space probes, ergodicity verdicts.
//! - [`oracle`]: brute-force reference computations used by the tests.
//! - [`cli`]: experiment configs and the batch runner behind the `ergolab` binary.

pub mod cli;
pub mod cocycle_rep;
pub mod error;
pub mod koopman;
pub mod oracle;
pub mod output;
pub mod semigroup;
pub mod skew_ergodic;
pub mod summation;
pub mod systems;

pub use error::{ErgoError, Result};
pub use num_complex::Complex64;
