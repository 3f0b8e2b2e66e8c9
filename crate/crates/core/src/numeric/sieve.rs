use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

/// Largest accepted sieve limit.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 40;

const SEGMENT_LEN: u64 = 1 << 18;

/// All primes up to an inclusive limit, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Membership by binary search. Values above `limit` are reported as absent.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// `pi(x)` for `x <= limit`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    /// The primes `<= x`.
    pub fn up_to(&self, x: u64) -> &[u64] {
        &self.primes[..self.count_up_to(x)]
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// Plain sieve of Eratosthenes for the base primes `<= n` (n is at most 2^20).
fn small_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Segmented sieve of Eratosthenes. Working memory is `O(sqrt(limit))` plus
/// the output.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
        return Err(Error::Bounds(format!(
            "sieve limit {limit} outside [2, 2^40]"
        )));
    }
    let root = crate::numeric::sum::isqrt(limit);
    let base = small_primes(root);
    let mut primes = Vec::with_capacity(estimate_pi(limit));
    let mut segment = vec![true; SEGMENT_LEN as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT_LEN - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        segment[..len].fill(true);
        for &p in &base {
            let sq = p * p;
            if sq > hi {
                break;
            }
            let mut start = if sq >= lo { sq } else { lo.div_ceil(p) * p };
            while start <= hi {
                segment[(start - lo) as usize] = false;
                start += p;
            }
        }
        primes.extend(
            segment[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

static SHARED: Mutex<Option<Arc<PrimeTable>>> = Mutex::new(None);

/// Process-wide prime table covering at least `limit`, grown on demand.
pub fn shared_primes(limit: u64) -> Result<Arc<PrimeTable>> {
    let mut guard = SHARED.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.as_ref() {
        if t.limit >= limit {
            return Ok(Arc::clone(t));
        }
    }
    let table = Arc::new(sieve_primes(limit.max(1 << 16))?);
    *guard = Some(Arc::clone(&table));
    Ok(table)
}

fn estimate_pi(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        return 8;
    }
    (1.26 * x / x.ln()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_limits() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn pi_spot_values() {
        let t = sieve_primes(1000).unwrap();
        assert_eq!(t.count_up_to(10), 4);
        assert_eq!(t.count_up_to(100), 25);
        assert_eq!(t.len(), 168);
        assert!(t.contains(997));
        assert!(!t.contains(999));
    }

    #[test]
    fn million_against_trial_division() {
        let t = sieve_primes(1_000_000).unwrap();
        assert_eq!(t.len(), 78498);
        let oracle = (2..=1_000_000u64).filter(|&n| trial_division(n)).count();
        assert_eq!(oracle, t.len());
    }

    #[test]
    fn crosses_segment_boundaries() {
        let limit = 3 * SEGMENT_LEN + 17;
        let t = sieve_primes(limit).unwrap();
        for w in t.primes().windows(2) {
            assert!(w[0] < w[1]);
        }
        for &p in t.primes().iter().rev().take(200) {
            assert!(trial_division(p));
        }
        let oracle = (2 * SEGMENT_LEN..=limit).filter(|&n| trial_division(n)).count();
        assert_eq!(t.count_up_to(limit) - t.count_up_to(2 * SEGMENT_LEN - 1), oracle);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(sieve_primes(1), Err(Error::Bounds(_))));
        assert!(matches!(sieve_primes(MAX_SIEVE_LIMIT + 1), Err(Error::Bounds(_))));
    }
}
