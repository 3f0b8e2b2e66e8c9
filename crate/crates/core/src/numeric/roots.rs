//! Counting distinct roots of integer polynomials modulo a prime.

use crate::error::{Error, Result};
use crate::numeric::is_prime_u64;

/// Primes up to this bound are handled by exhaustive residue evaluation under
/// [`RootStrategy::Auto`].
pub const EXHAUSTIVE_THRESHOLD: u64 = 1024;

/// Largest prime the exhaustive strategy accepts.
pub const EXHAUSTIVE_MAX: u64 = 1_000_000;

const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootStrategy {
    /// Exhaustive evaluation for small `p`, `deg gcd(f, X^p - X)` above.
    #[default]
    Auto,
    /// Evaluate `f` at every residue; refuses `p > 10^6`.
    Exhaustive,
}

/// Number of distinct roots of `f` in `Z/pZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootCount {
    Roots(u64),
    /// `f` vanishes identically mod `p`: every residue is a root.
    Saturated,
}

impl RootCount {
    pub fn count(self, p: u64) -> u64 {
        match self {
            RootCount::Roots(n) => n,
            RootCount::Saturated => p,
        }
    }

    pub fn is_saturated(self) -> bool {
        matches!(self, RootCount::Saturated)
    }
}

/// Coefficients reduced into `[0, p)`, trailing zeros trimmed.
pub fn reduce_mod_p(coeffs: &[i128], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = coeffs
        .iter()
        .map(|&c| c.rem_euclid(p as i128) as u64)
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Inverse of `a` modulo prime `p`, `a` not divisible by `p`.
pub fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{a} not invertible mod {p}");
    t0.rem_euclid(p as i128) as u64
}

/// Distinct roots of the polynomial with ascending coefficients `coeffs`
/// modulo the prime `p`.
pub fn poly_roots_mod_p(coeffs: &[i128], p: u64, strategy: RootStrategy) -> Result<RootCount> {
    if coeffs.iter().all(|&c| c == 0) {
        return Err(Error::Domain("zero polynomial".into()));
    }
    if p > MAX_MODULUS || !is_prime_u64(p) {
        return Err(Error::Domain(format!("modulus {p} is not a prime <= 2^31")));
    }
    let f = reduce_mod_p(coeffs, p);
    match f.len() {
        0 => return Ok(RootCount::Saturated),
        1 => return Ok(RootCount::Roots(0)),
        2 => return Ok(RootCount::Roots(1)),
        _ => {}
    }
    match strategy {
        RootStrategy::Exhaustive if p > EXHAUSTIVE_MAX => Err(Error::Capability(format!(
            "exhaustive root counting refuses p = {p} > {EXHAUSTIVE_MAX}"
        ))),
        RootStrategy::Exhaustive => Ok(RootCount::Roots(exhaustive(&f, p))),
        RootStrategy::Auto if p <= EXHAUSTIVE_THRESHOLD => Ok(RootCount::Roots(exhaustive(&f, p))),
        RootStrategy::Auto => Ok(RootCount::Roots(gcd_with_frobenius(&f, p))),
    }
}

pub(crate) fn eval_mod(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p)
}

fn exhaustive(f: &[u64], p: u64) -> u64 {
    (0..p).filter(|&x| eval_mod(f, x, p) == 0).count() as u64
}

// ---- dense polynomial arithmetic over F_p (p < 2^31, so products fit in u64)

/// Plain product of two polynomials over `F_p`.
pub(crate) fn poly_mul_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    prod
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn make_monic(a: &mut [u64], p: u64) {
    let inv = mod_inverse(*a.last().expect("nonzero"), p);
    for c in a.iter_mut() {
        *c = *c * inv % p;
    }
}

/// `a mod m` for monic `m`.
fn rem_monic(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let off = a.len() - dm;
            for (i, &mc) in m[..dm].iter().enumerate() {
                let sub = lead * mc % p;
                a[off + i] = (a[off + i] + p - sub) % p;
            }
        }
    }
    trim(&mut a);
    a
}

fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    rem_monic(prod, m, p)
}

fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        make_monic(&mut b, p);
        let r = rem_monic(a, &b, p);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// `deg gcd(f, X^p - X)`, the number of distinct roots of `f` in `F_p`.
fn gcd_with_frobenius(f: &[u64], p: u64) -> u64 {
    let mut m = f.to_vec();
    make_monic(&mut m, p);
    // X^p mod m by square-and-multiply.
    let x = rem_monic(vec![0, 1], &m, p);
    let mut acc = vec![1u64];
    let mut base = x;
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_rem(&acc, &base, &m, p);
        }
        base = mul_rem(&base, &base, &m, p);
        e >>= 1;
    }
    // acc - X
    if acc.len() < 2 {
        acc.resize(2, 0);
    }
    acc[1] = (acc[1] + p - 1) % p;
    gcd_degree(m, acc, p) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roots(c: &[i128], p: u64) -> u64 {
        poly_roots_mod_p(c, p, RootStrategy::Auto).unwrap().count(p)
    }

    fn brute(c: &[i128], p: u64) -> u64 {
        (0..p as i128)
            .filter(|&x| {
                let v = c.iter().rev().fold(0i128, |acc, &a| (acc * x + a).rem_euclid(p as i128));
                v == 0
            })
            .count() as u64
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(roots(&[1, 0, 1], 5), 2);
        assert_eq!(roots(&[1, 0, 1], 3), 0);
        assert_eq!(roots(&[7, 0, 1], 11), 2);
        assert_eq!(brute(&[7, 0, 1], 11), 2);
    }

    #[test]
    fn saturation_is_flagged() {
        let r = poly_roots_mod_p(&[3, 6, 9], 3, RootStrategy::Auto).unwrap();
        assert!(r.is_saturated());
        assert_eq!(r.count(3), 3);
    }

    #[test]
    fn bad_inputs() {
        assert!(poly_roots_mod_p(&[0, 0], 5, RootStrategy::Auto).is_err());
        assert!(poly_roots_mod_p(&[1, 1], 9, RootStrategy::Auto).is_err());
        assert!(matches!(
            poly_roots_mod_p(&[1, 0, 1], 1_000_003, RootStrategy::Exhaustive),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn frobenius_gcd_matches_brute_force_above_threshold() {
        let polys: [&[i128]; 5] = [
            &[1, 0, 1],
            &[7, 0, 1],
            &[-2, 0, 0, 1],
            &[1, 1, 1, 1, 1],
            &[0, -1, 0, 0, 0, 1], // X^5 - X: repeated-root-free, many roots mod small p
        ];
        for p in [1031u64, 1033, 2003, 4001, 7919] {
            for f in polys {
                assert_eq!(
                    poly_roots_mod_p(f, p, RootStrategy::Auto).unwrap().count(p),
                    brute(f, p),
                    "{f:?} mod {p}"
                );
            }
        }
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (X-1)^2 (X+2) = X^3 - 3X + 2
        for p in [1031u64, 1049] {
            assert_eq!(roots(&[2, -3, 0, 1], p), 2);
        }
    }

    #[test]
    fn inverse() {
        for p in [2u64, 3, 5, 101, 1_000_003] {
            for a in 1..p.min(200) {
                assert_eq!(a * mod_inverse(a, p) % p, 1);
            }
        }
    }

    fn small_primes() -> Vec<u64> {
        crate::numeric::sieve_primes(101).unwrap().primes().to_vec()
    }

    proptest! {
        #[test]
        fn agrees_with_exhaustive_evaluation(
            coeffs in proptest::collection::vec(-50i128..50, 2..=6),
            pi in 0usize..26,
        ) {
            prop_assume!(coeffs.iter().any(|&c| c != 0));
            let p = small_primes()[pi];
            let r = poly_roots_mod_p(&coeffs, p, RootStrategy::Auto).unwrap().count(p);
            prop_assert_eq!(r, brute(&coeffs, p));
        }

        #[test]
        fn frobenius_agrees_on_mid_primes(
            coeffs in proptest::collection::vec(-1000i128..1000, 3..=6),
            pi in 0usize..40,
        ) {
            let p = crate::numeric::sieve_primes(3000).unwrap().primes()[200 + pi];
            prop_assume!(reduce_mod_p(&coeffs, p).len() >= 3);
            prop_assert_eq!(gcd_with_frobenius(&reduce_mod_p(&coeffs, p), p), brute(&coeffs, p));
        }
    }
}
