//! Arithmetic primitives shared by every other module.

mod combinat;
mod primality;
mod roots;
mod sieve;
mod sum;

pub use combinat::{binomial, stirling2, surjections, SurjectionTable};
pub use primality::{is_prime_u64, prime_factors_u64, MR_WITNESSES};
pub use roots::{
    mod_inverse, poly_roots_mod_p, reduce_mod_p, RootCount, RootStrategy, EXHAUSTIVE_THRESHOLD,
};
pub(crate) use roots::{eval_mod, poly_mul_mod};
pub use sieve::{shared_primes, sieve_primes, PrimeTable, MAX_SIEVE_LIMIT};
pub use sum::NeumaierSum;
pub(crate) use sum::isqrt;
