//! Exact and numeric q-Lagrange inversion.
//!
//! Given `φ(z) = Σ_{k≥1} φ_k z^k` and `f(z) = z(1 - φ(z))`, the engine
//! computes the right inverse `g` of `f` under the q-composition
//! `Σ f_n g(z) g(z/q) ... g(z/q^{n-1}) = z`, the normalized coefficients
//! `t_n = q^{C(n+1,2)} g_{n+1}`, and a range of checks and limits built on
//! them.

pub mod arith;
pub mod asymptotics;
pub mod error;
pub mod formal;
pub mod inversion;
pub mod phi;
pub mod qbig;
pub mod ring;
pub mod series;
pub mod tuples;

pub use arith::{QLaurent, Rational};
pub use error::{Error, Result};
pub use inversion::{right_inverse, Inversion, InversionResult, Mode};
pub use phi::PhiSpec;

/// Crate version, reported in CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
