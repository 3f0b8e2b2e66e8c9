//! Sampling the random singular series of the independent-residue model.
//!
//! Stream contract: the generator is ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Sample `i` reads stream `i` from word
//! position 0. Primes are visited in increasing order; for each prime the
//! residue count `rho` follows the birthday process of `k` uniform draws: the
//! first draw is always new, and each later draw takes one `u64` word `w`,
//! maps it to `r = floor(w p / 2^64)` and counts as new iff `r >= rho`. So
//! prime number `j` (0-based) consumes the `u64` words `j(k-1) .. (j+1)(k-1)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distribution::{merge_into, AtomMap, EmpiricalDistribution, Provenance};
use super::run_sharded;
use crate::error::{Error, Result};
use crate::numeric::shared_primes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub k: usize,
    pub cutoff: u64,
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > 64 {
            return Err(Error::Bounds(format!("k = {} outside [1, 64]", self.k)));
        }
        let min = (2 * self.k * self.k).max(2) as u64;
        if self.cutoff < min {
            return Err(Error::Config(format!("cutoff {} below 2k^2 = {min}", self.cutoff)));
        }
        if self.samples == 0 {
            return Err(Error::Config("sample count must be >= 1".into()));
        }
        Ok(())
    }
}

/// `n` draws of `prod_{p <= P} (1 - 1/p)^{-k} (1 - rho_p/p)`; exact zeros when
/// some `rho_p = p`. The result does not depend on `shards`.
pub fn sample_random_singular(cfg: &MonteCarloConfig, shards: usize) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let k = cfg.k;
    let primes = shared_primes(cfg.cutoff)?;
    let primes = primes.up_to(cfg.cutoff);
    // log factor for rho = 1..=min(k, p); NEG_INFINITY marks rho = p
    let table: Vec<Vec<f64>> = primes
        .iter()
        .map(|&p| {
            let pf = p as f64;
            let generic = k as f64 * (-1.0 / pf).ln_1p();
            (1..=(k as u64).min(p))
                .map(|rho| {
                    if rho == p {
                        f64::NEG_INFINITY
                    } else {
                        (-(rho as f64) / pf).ln_1p() - generic
                    }
                })
                .collect()
        })
        .collect();
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let parts = run_sharded(shards, cfg.samples as u128, |a, b| {
        let mut map = AtomMap::new();
        let mut rng = base.clone();
        for i in a..b {
            rng.set_stream(i as u64);
            rng.set_word_pos(0);
            let mut log = 0.0;
            let mut zero = false;
            for (j, &p) in primes.iter().enumerate() {
                let mut rho = 1u64;
                for _ in 1..k {
                    let w = rng.next_u64();
                    let r = ((w as u128 * p as u128) >> 64) as u64;
                    if r >= rho {
                        rho += 1;
                    }
                }
                let l = table[j][rho as usize - 1];
                if l == f64::NEG_INFINITY {
                    zero = true;
                    // keep consuming so the stream layout stays fixed
                    continue;
                }
                log += l;
            }
            let v = if zero { 0.0 } else { log.exp() };
            *map.entry(v.to_bits()).or_insert(0) += 1;
        }
        Ok(map)
    })?;
    let mut map = AtomMap::new();
    for m in parts {
        merge_into(&mut map, m);
    }
    EmpiricalDistribution::from_map(Provenance::MonteCarlo, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, cutoff: u64, samples: u64, seed: u64) -> MonteCarloConfig {
        MonteCarloConfig {
            k,
            cutoff,
            samples,
            seed,
        }
    }

    #[test]
    fn k_one_is_exactly_one() {
        let d = sample_random_singular(&cfg(1, 1000, 500, 9), 1).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.atoms()[0].value, 1.0);
    }

    #[test]
    fn deterministic_and_shard_free() {
        let c = cfg(3, 500, 3000, 42);
        let a = sample_random_singular(&c, 1).unwrap();
        let b = sample_random_singular(&c, 1).unwrap();
        let s = sample_random_singular(&c, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, s);
        let other = sample_random_singular(&cfg(3, 500, 3000, 43), 1).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn birthday_rho_distribution() {
        // rho at p = 5 for k = 3: P(rho=1) = 1/25, P(rho=3) = 12/25
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = 5u64;
        let n = 200_000;
        let mut counts = [0u32; 4];
        for _ in 0..n {
            let mut rho = 1u64;
            for _ in 1..3 {
                let r = ((rng.next_u64() as u128 * p as u128) >> 64) as u64;
                if r >= rho {
                    rho += 1;
                }
            }
            counts[rho as usize] += 1;
        }
        let f1 = counts[1] as f64 / n as f64;
        let f3 = counts[3] as f64 / n as f64;
        assert!((f1 - 0.04).abs() < 4.0 * (0.04f64 * 0.96 / n as f64).sqrt());
        assert!((f3 - 0.48).abs() < 4.0 * (0.48f64 * 0.52 / n as f64).sqrt());
    }

    #[test]
    fn zero_fraction_and_mean_k2() {
        let n = 40_000u64;
        let d = sample_random_singular(&cfg(2, 1000, n, 7), 1).unwrap();
        let se = (0.25 / n as f64).sqrt();
        assert!((d.zero_mass() - 0.5).abs() < 4.0 * se);
        let sd = d.variance().sqrt();
        assert!((d.mean() - 1.0).abs() < 4.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn config_errors() {
        assert!(sample_random_singular(&cfg(3, 10, 5, 0), 1).is_err());
        assert!(sample_random_singular(&cfg(2, 100, 0, 0), 1).is_err());
        assert!(sample_random_singular(&cfg(0, 100, 5, 0), 1).is_err());
    }
}
