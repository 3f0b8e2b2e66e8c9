/// Miller–Rabin bases that give a deterministic answer for every `n < 2^64`.
///
/// This is the seven-base set found by Jim Sinclair (2011), listed on
/// <https://miller-rabin.appspot.com/>. Bases are reduced mod `n`; a base that
/// reduces to 0 is skipped.
pub const MR_WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact primality for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &MR_WITNESSES {
        let a = w % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Pollard–Brent rho; `n` odd composite.
fn rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..128.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            out.push(m);
            continue;
        }
        let d = rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::sieve_primes;
    use num_bigint::BigUint;

    #[test]
    fn units_and_small() {
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(1681));
        assert!(is_prime_u64(1693));
    }

    #[test]
    fn agrees_with_sieve_to_a_million() {
        let t = sieve_primes(1_000_000).unwrap();
        for n in 0..=1_000_000u64 {
            assert_eq!(is_prime_u64(n), t.contains(n), "{n}");
        }
    }

    // Lucas–Lehmer on big integers, independent of Miller–Rabin.
    fn lucas_lehmer(p: u32) -> bool {
        let m = (BigUint::from(1u8) << p) - 1u8;
        let mut s = BigUint::from(4u8);
        for _ in 0..p - 2 {
            s = (&s * &s + &m - 2u8) % &m;
        }
        s == BigUint::from(0u8)
    }

    #[test]
    fn mersenne_61() {
        assert!(lucas_lehmer(61));
        assert!(is_prime_u64((1u64 << 61) - 1));
        assert!(!lucas_lehmer(59));
        assert!(!is_prime_u64((1u64 << 59) - 1));
    }

    #[test]
    fn strong_pseudoprime_to_small_bases() {
        // 3825123056546413051 = 149491 * 747451 * 34233211, a strong
        // pseudoprime to bases 2..=23.
        let n = 3_825_123_056_546_413_051u64;
        assert_eq!(149_491u64 * 747_451 * 34_233_211, n);
        assert!(!is_prime_u64(n));
        assert!(!is_prime_u64(3_215_031_751)); // spsp(2,3,5,7)
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors_u64(1), Vec::<u64>::new());
        assert_eq!(prime_factors_u64(360), vec![2, 3, 5]);
        assert_eq!(
            prime_factors_u64(3_825_123_056_546_413_051),
            vec![149_491, 747_451, 34_233_211]
        );
        assert_eq!(prime_factors_u64(u64::MAX), vec![3, 5, 17, 257, 641, 65537, 6700417]);
        let p = 4_294_967_291u64; // largest prime below 2^32
        assert_eq!(prime_factors_u64(p * 65521), vec![65521, p]);
    }

    #[test]
    fn near_u64_max() {
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime_u64(u64::MAX));
    }
}
