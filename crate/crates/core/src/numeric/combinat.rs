use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_SURJECTION_K: u32 = 64;

/// Exact binomial coefficient `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> Result<BigUint> {
    if r > n {
        return Err(Error::Bounds(format!("binomial({n}, {r}) needs r <= n")));
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at each step.
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Number of surjections from a `k`-set onto a `v`-set,
/// `sum_{i=0}^{v} (-1)^i C(v,i) (v-i)^k`.
pub fn surjections(k: u32, v: u32) -> Result<BigUint> {
    if k == 0 || k > MAX_SURJECTION_K || v == 0 {
        return Err(Error::Bounds(format!(
            "surjections({k}, {v}) needs 1 <= k <= {MAX_SURJECTION_K} and v >= 1"
        )));
    }
    if v > k {
        return Ok(BigUint::zero());
    }
    let mut total = BigInt::zero();
    for i in 0..=v {
        let term = BigInt::from(binomial(v as u64, i as u64)?) * BigInt::from(v - i).pow(k);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    debug_assert!(!total.is_negative());
    total
        .to_biguint()
        .ok_or_else(|| Error::Arithmetic("negative surjection count".into()))
}

/// Stirling number of the second kind `S(k, v) = sigma(k, v) / v!`.
pub fn stirling2(k: u32, v: u32) -> Result<BigUint> {
    let sigma = surjections(k, v)?;
    let fact: BigUint = (1..=v as u64).product();
    Ok(sigma / fact)
}

/// Exact surjection counts `sigma(k, v)` for `1 <= v <= k <= max_k`, built by
/// the recurrence `sigma(k, v) = v (sigma(k-1, v-1) + sigma(k-1, v))`.
#[derive(Debug, Clone)]
pub struct SurjectionTable {
    max_k: u32,
    // rows[k - 1][v - 1]
    rows: Vec<Vec<BigUint>>,
}

impl SurjectionTable {
    pub fn new(max_k: u32) -> Result<Self> {
        if max_k == 0 || max_k > MAX_SURJECTION_K {
            return Err(Error::Bounds(format!(
                "surjection table size {max_k} outside [1, {MAX_SURJECTION_K}]"
            )));
        }
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for k in 2..=max_k as usize {
            let prev = &rows[k - 2];
            let row = (1..=k)
                .map(|v| {
                    let left = if v >= 2 { prev[v - 2].clone() } else { BigUint::zero() };
                    let right = prev.get(v - 1).cloned().unwrap_or_default();
                    (left + right) * v
                })
                .collect();
            rows.push(row);
        }
        Ok(Self { max_k, rows })
    }

    pub fn max_k(&self) -> u32 {
        self.max_k
    }

    /// `sigma(k, v)`; zero for `v > k`.
    pub fn get(&self, k: u32, v: u32) -> BigUint {
        assert!(
            (1..=self.max_k).contains(&k) && v >= 1,
            "sigma({k}, {v}) outside table"
        );
        self.rows[k as usize - 1]
            .get(v as usize - 1)
            .cloned()
            .unwrap_or_default()
    }

    /// `S(k, v) = sigma(k, v) / v!` as a float, for local-factor assembly.
    pub fn stirling2_f64(&self, k: u32, v: u32) -> f64 {
        let fact: BigUint = (1..=v as u64).product();
        let s = self.get(k, v) / fact;
        s.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn count_surjective_maps(k: u32, v: u32) -> u64 {
        // enumerate all v^k maps
        let total = (v as u64).pow(k);
        (0..total)
            .filter(|&code| {
                let mut seen = 0u64;
                let mut c = code;
                for _ in 0..k {
                    seen |= 1 << (c % v as u64);
                    c /= v as u64;
                }
                seen.count_ones() == v
            })
            .count() as u64
    }

    #[test]
    fn surjection_examples() {
        assert_eq!(surjections(2, 2).unwrap(), 2u8.into());
        assert_eq!(surjections(3, 2).unwrap(), 6u8.into());
        assert_eq!(count_surjective_maps(3, 2), 6);
        for k in 1..=10 {
            assert_eq!(surjections(k, 1).unwrap(), 1u8.into());
        }
        assert_eq!(surjections(3, 5).unwrap(), BigUint::zero());
    }

    #[test]
    fn surjections_match_brute_force() {
        for k in 1..=7 {
            for v in 1..=5 {
                assert_eq!(
                    surjections(k, v).unwrap(),
                    BigUint::from(count_surjective_maps(k, v)),
                    "({k},{v})"
                );
            }
        }
    }

    #[test]
    fn table_matches_formula() {
        let t = SurjectionTable::new(20).unwrap();
        for k in 1..=20 {
            for v in 1..=k + 2 {
                assert_eq!(t.get(k, v), surjections(k, v).unwrap());
            }
            let kfact: BigUint = (1..=k as u64).product();
            assert_eq!(t.get(k, k), kfact);
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2).unwrap(), 10u8.into());
        assert_eq!(binomial(97, 0).unwrap(), BigUint::one());
        let fact = |n: u64| -> BigUint { (1..=n).product() };
        assert_eq!(
            binomial(100, 50).unwrap(),
            fact(100) / (fact(50) * fact(50))
        );
        assert!(binomial(3, 4).is_err());
    }

    #[test]
    fn out_of_range() {
        assert!(surjections(0, 1).is_err());
        assert!(surjections(65, 1).is_err());
        assert!(surjections(3, 0).is_err());
    }

    #[test]
    fn stirling_second_kind() {
        assert_eq!(stirling2(4, 2).unwrap(), 7u8.into());
        assert_eq!(stirling2(5, 3).unwrap(), 25u8.into());
    }

    #[test]
    fn surjection_identities() {
        // sum_v C(p,v) sigma(k,v) = p^k and sum_v v C(p,v) sigma(k,v) = p^{k+1} - p (p-1)^k
        let t = SurjectionTable::new(8).unwrap();
        let primes = crate::numeric::sieve_primes(101).unwrap();
        for k in 1..=8u32 {
            for p in primes.iter().filter(|&p| p >= k as u64) {
                let mut first = BigUint::zero();
                let mut second = BigUint::zero();
                for v in 1..=k {
                    let term = binomial(p, v as u64).unwrap() * t.get(k, v);
                    second += &term * v;
                    first += term;
                }
                let pk = BigUint::from(p).pow(k);
                assert_eq!(first, pk, "p={p} k={k}");
                let rhs = BigUint::from(p).pow(k + 1) - BigUint::from(p) * BigUint::from(p - 1).pow(k);
                assert_eq!(second, rhs, "p={p} k={k}");
            }
        }
    }

    proptest! {
        #[test]
        fn pascal_rule(n in 1u64..200, r in 1u64..200) {
            prop_assume!(r < n);
            let lhs = binomial(n, r).unwrap();
            let rhs = binomial(n - 1, r - 1).unwrap() + binomial(n - 1, r).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
