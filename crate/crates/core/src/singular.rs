//! Euler products for singular series.
//!
//! Tuple series `S(h) = prod_p (1 - nu_p(h)/p)(1 - 1/p)^{-k}` converge
//! absolutely: for `p > 2k^2` and `p` coprime to `Delta(h)` the factor is the
//! generic `(1 - k/p)(1 - 1/p)^{-k}`, whose logarithm is at most `2k^2/p^2` in
//! absolute value. Summing over `n > P` gives the rigorous tail bound
//! `2k^2/(P-1)` on the log of everything omitted beyond the cutoff.
//!
//! Family series `S(f)` are only conditionally convergent in general and are
//! reported as partial products with a heuristic spread
//! `|partial(P) - partial(P/2)|`.
//!
//! Products accumulate in log space with compensated summation. A factor that
//! vanishes (`nu_p = p`) makes the whole value an exact zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{prime_factors_u64, shared_primes, NeumaierSum};
use crate::polyfam::PolyFamily;
use crate::tuples::{nu_p, KTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `tail_log_bound` bounds `|log(true / computed)|`.
    Rigorous,
    /// `tail_log_bound` is a convergence spread, not a bound.
    Heuristic,
}

/// A truncated Euler product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProductValue {
    pub value: f64,
    pub cutoff: u64,
    pub tail_log_bound: f64,
    pub mode: Mode,
    /// Some local factor vanishes identically.
    pub exact_zero: bool,
}

impl EulerProductValue {
    fn zero(cutoff: u64) -> Self {
        Self {
            value: 0.0,
            cutoff,
            tail_log_bound: 0.0,
            mode: Mode::Rigorous,
            exact_zero: true,
        }
    }

    /// `value * (exp(tail_log_bound) - 1)`: the absolute slack implied by the bound.
    pub fn absolute_slack(&self) -> f64 {
        self.value * self.tail_log_bound.exp_m1()
    }
}

/// `(1 - nu/p)(1 - 1/p)^{-k}`.
pub fn local_factor(p: u64, nu: u64, k: u32) -> Result<f64> {
    if nu == 0 || nu > p {
        return Err(Error::Domain(format!("nu = {nu} outside [1, {p}]")));
    }
    if nu == p {
        return Ok(0.0);
    }
    let pf = p as f64;
    Ok(((p - nu) as f64 / pf) * (pf / (pf - 1.0)).powi(k as i32))
}

#[inline]
fn log_local(p: u64, nu: u64, k: u32) -> f64 {
    let pf = p as f64;
    (-(nu as f64) / pf).ln_1p() - k as f64 * (-1.0 / pf).ln_1p()
}

/// Rigorous tail bound `2k^2/(P-1)` for a tuple series truncated at `P >= 2k^2`.
pub fn tuple_tail_bound(k: usize, cutoff: u64) -> f64 {
    2.0 * (k * k) as f64 / (cutoff - 1) as f64
}

fn check_cutoff(k: usize, cutoff: u64) -> Result<()> {
    let min = (2 * k * k).max(2) as u64;
    if cutoff < min {
        return Err(Error::Config(format!(
            "cutoff {cutoff} below 2k^2 = {min} for k = {k}"
        )));
    }
    Ok(())
}

/// `prod_{k < p <= P} (1 - k/p)(1 - 1/p)^{-k}`, the product of the generic
/// factors shared by every k-tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseConstant {
    pub k: usize,
    pub cutoff: u64,
    pub log_value: f64,
    pub value: f64,
}

impl BaseConstant {
    pub fn new(k: usize, cutoff: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Bounds("k must be >= 1".into()));
        }
        check_cutoff(k, cutoff)?;
        let primes = shared_primes(cutoff)?;
        let sum: NeumaierSum = primes
            .up_to(cutoff)
            .iter()
            .filter(|&&p| p > k as u64)
            .map(|&p| log_local(p, k as u64, k as u32))
            .collect();
        let log_value = sum.total();
        Ok(Self {
            k,
            cutoff,
            log_value,
            value: log_value.exp(),
        })
    }
}

/// Shorthand for [`BaseConstant::new`].
pub fn base_constant(k: usize, cutoff: u64) -> Result<BaseConstant> {
    BaseConstant::new(k, cutoff)
}

/// Primes `p <= k` at which the tuple covers every residue.
fn vanishes(entries: &[u64], k: usize) -> bool {
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]
        .iter()
        .take_while(|&&p| p <= k as u64)
        .any(|&p| nu_p(entries, p) as u64 == p)
        || (k > 61 && {
            // rare; fall back to the shared table
            let primes = shared_primes(k as u64).expect("small table");
            primes.up_to(k as u64).iter().any(|&p| nu_p(entries, p) as u64 == p)
        })
}

/// Log-contribution of the non-generic primes: every `p <= k`, plus each
/// `p > k` in `special` (primes dividing some difference). Above the cutoff
/// the full local factor is included so that only generic factors are ever
/// omitted.
fn special_log_sum(entries: &[u64], k: usize, special: &[u64], cutoff: u64, acc: &mut NeumaierSum) {
    let kk = k as u32;
    for &p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]
        .iter()
        .take_while(|&&p| p <= k as u64 && p <= cutoff)
    {
        acc.add(log_local(p, nu_p(entries, p) as u64, kk));
    }
    if k > 61 {
        let primes = shared_primes(k as u64).expect("small table");
        for &p in primes.up_to(k as u64).iter().filter(|&&p| p > 61 && p <= cutoff) {
            acc.add(log_local(p, nu_p(entries, p) as u64, kk));
        }
    }
    for &p in special {
        let nu = nu_p(entries, p) as u64;
        if p <= cutoff {
            acc.add(log_local(p, nu, kk) - log_local(p, k as u64, kk));
        } else {
            acc.add(log_local(p, nu, kk));
        }
    }
}

fn special_primes(h: &KTuple) -> Vec<u64> {
    let k = h.k() as u64;
    let mut out: Vec<u64> = h
        .differences()
        .flat_map(prime_factors_u64)
        .filter(|&p| p > k)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `S(h)` truncated at `cutoff`, with the rigorous tail bound `2k^2/(P-1)`.
///
/// With `base` the generic factors come from the precomputed constant and
/// only primes `p <= k` and primes dividing `Delta(h)` are visited. Without
/// it every prime up to the cutoff is visited.
pub fn singular_series_tuple(
    h: &KTuple,
    cutoff: u64,
    base: Option<&BaseConstant>,
) -> Result<EulerProductValue> {
    if !h.is_distinct() {
        return Err(Error::Degenerate(format!("tuple {:?} has repeated entries", h.entries())));
    }
    let k = h.k();
    check_cutoff(k, cutoff)?;
    if let Some(b) = base {
        if b.k != k || b.cutoff != cutoff {
            return Err(Error::Config(format!(
                "base constant is for (k={}, P={}), expected (k={k}, P={cutoff})",
                b.k, b.cutoff
            )));
        }
    }
    let entries = h.entries();
    if vanishes(entries, k) {
        return Ok(EulerProductValue::zero(cutoff));
    }
    let special = special_primes(h);
    let mut acc = NeumaierSum::new();
    match base {
        Some(b) => {
            acc.add(b.log_value);
            special_log_sum(entries, k, &special, cutoff, &mut acc);
        }
        None => {
            let primes = shared_primes(cutoff)?;
            for &p in primes.up_to(cutoff) {
                acc.add(log_local(p, nu_p(entries, p) as u64, k as u32));
            }
            for &p in special.iter().filter(|&&p| p > cutoff) {
                acc.add(log_local(p, nu_p(entries, p) as u64, k as u32));
            }
        }
    }
    Ok(EulerProductValue {
        value: acc.total().exp(),
        cutoff,
        tail_log_bound: tuple_tail_bound(k, cutoff),
        mode: Mode::Rigorous,
        exact_zero: false,
    })
}

/// Fast per-tuple evaluation for sweeps over `[1, max_entry]^k`: differences
/// are factored through a smallest-prime-factor table.
#[derive(Debug, Clone)]
pub struct TupleEvaluator {
    k: usize,
    base: BaseConstant,
    spf: Vec<u32>,
}

impl TupleEvaluator {
    pub fn new(k: usize, cutoff: u64, max_entry: u64) -> Result<Self> {
        let base = BaseConstant::new(k, cutoff)?;
        let n = max_entry as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(Self { k, base, spf })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &BaseConstant {
        &self.base
    }

    /// `S(h)` for distinct entries in `[1, max_entry]`; exactly `0.0` when a
    /// local factor vanishes.
    pub fn eval(&self, entries: &[u64]) -> f64 {
        let k = self.k;
        if vanishes(entries, k) {
            return 0.0;
        }
        let mut special = [0u64; 64];
        let mut n = 0usize;
        let mut spill: Vec<u64> = Vec::new();
        for (i, &a) in entries.iter().enumerate() {
            for &b in &entries[i + 1..] {
                let mut d = a.abs_diff(b) as usize;
                while d > 1 {
                    let p = self.spf[d] as usize;
                    if p > k {
                        if n < special.len() {
                            special[n] = p as u64;
                            n += 1;
                        } else {
                            spill.push(p as u64);
                        }
                    }
                    while d % p == 0 {
                        d /= p;
                    }
                }
            }
        }
        let mut list: Vec<u64>;
        let special: &mut [u64] = if spill.is_empty() {
            &mut special[..n]
        } else {
            list = special[..n].to_vec();
            list.extend(spill);
            &mut list
        };
        special.sort_unstable();
        let mut m = 0;
        for i in 0..special.len() {
            if i == 0 || special[i] != special[i - 1] {
                special[m] = special[i];
                m += 1;
            }
        }
        let mut acc = NeumaierSum::new();
        acc.add(self.base.log_value);
        special_log_sum(entries, k, &special[..m], self.base.cutoff, &mut acc);
        acc.total().exp()
    }
}

/// Partial product of a polynomial family's singular series, with the
/// spread against the half cutoff. No primitivity check.
pub(crate) fn family_partial_product(f: &PolyFamily, cutoff: u64) -> Result<EulerProductValue> {
    if cutoff < 2 {
        return Err(Error::Config("cutoff must be >= 2".into()));
    }
    let primes = shared_primes(cutoff)?;
    let m = f.m() as f64;
    let half = cutoff / 2;
    let mut acc = NeumaierSum::new();
    let mut at_half = 0.0;
    for &p in primes.up_to(cutoff) {
        let nu = f.nu_p_prime(p)?;
        if nu.count == p {
            return Ok(EulerProductValue::zero(cutoff));
        }
        let pf = p as f64;
        acc.add((-(nu.count as f64) / pf).ln_1p() - m * (-1.0 / pf).ln_1p());
        if p <= half {
            at_half = acc.total();
        }
    }
    let value = acc.total().exp();
    let spread = (value - at_half.exp()).abs();
    Ok(EulerProductValue {
        value,
        cutoff,
        tail_log_bound: spread,
        mode: Mode::Heuristic,
        exact_zero: false,
    })
}

/// `S(f)` as the partial product over `p <= cutoff`. `tail_log_bound` holds
/// the heuristic spread `|partial(P) - partial(P/2)|`.
pub fn singular_series_family(f: &PolyFamily, cutoff: u64) -> Result<EulerProductValue> {
    f.require_primitive()?;
    family_partial_product(f, cutoff)
}
