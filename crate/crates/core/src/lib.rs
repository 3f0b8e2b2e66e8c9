//! Singular series for prime k-tuples and polynomial prime patterns.
//!
//! The crate evaluates Hardy–Littlewood singular series of integer tuples
//! (absolutely convergent, with a rigorous tail bound), Bateman–Horn
//! constants of polynomial families (partial products with a heuristic
//! convergence spread), the moment constants `mu_k(m)` of the singular
//! series over k-tuples, and the empirical experiments around them: finite
//! tuple sweeps, a Monte Carlo model of the limiting law, and Poisson
//! statistics of prime seeds in short windows.
//!
//! Module map:
//!
//! - [`numeric`]: sieve, 64-bit primality, exact combinatorics, roots mod p.
//! - [`tuples`]: k-tuples, `nu_p`, `Delta(h)` and sharded enumeration.
//! - [`polyfam`]: integer polynomials, primitive families, shifts, the
//!   degeneracy graph and resultants.
//! - [`singular`]: Euler product evaluation.
//! - [`moments`]: `mu_k(m)` from exact local factors and its property suite.
//! - [`empirical`]: tuple sweeps, Monte Carlo sampling, KS distance.
//! - [`patterns`]: prime seeds and the window/Poisson experiment.
//! - [`cli`]: the command-line surface and machine-readable outputs.

pub mod cli;
pub mod empirical;
pub mod error;
pub mod moments;
pub mod numeric;
pub mod output;
pub mod patterns;
pub mod polyfam;
pub mod singular;
pub mod tuples;

pub use error::{Error, ErrorKind, Result};

/// Version string embedded in every machine-readable output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
