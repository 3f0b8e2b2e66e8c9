//! k-tuples of positive integers, their reductions mod p and bulk enumeration.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered k-tuple of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct KTuple {
    entries: Vec<u64>,
    distinct: bool,
}

impl TryFrom<Vec<u64>> for KTuple {
    type Error = Error;

    fn try_from(entries: Vec<u64>) -> Result<Self> {
        KTuple::new(entries)
    }
}

impl From<KTuple> for Vec<u64> {
    fn from(t: KTuple) -> Self {
        t.entries
    }
}

impl KTuple {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Degenerate("tuple must have at least one entry".into()));
        }
        if entries.contains(&0) {
            return Err(Error::Bounds("tuple entries must be >= 1".into()));
        }
        let mut sorted = entries.clone();
        sorted.sort_unstable();
        let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
        Ok(Self { entries, distinct })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn is_distinct(&self) -> bool {
        self.distinct
    }

    /// `|h| = max h_i`.
    pub fn height(&self) -> u64 {
        *self.entries.iter().max().expect("nonempty")
    }

    /// The tuple translated by `t`.
    pub fn shifted(&self, t: u64) -> Self {
        Self {
            entries: self.entries.iter().map(|&e| e + t).collect(),
            distinct: self.distinct,
        }
    }

    /// Number of distinct residues of the entries modulo `p`.
    pub fn nu_p(&self, p: u64) -> u32 {
        nu_p(&self.entries, p)
    }

    /// `Delta(h) = |prod_{i<j} (h_i - h_j)|`.
    pub fn discriminant(&self) -> Result<BigUint> {
        if !self.distinct {
            return Err(Error::Degenerate(format!(
                "tuple {:?} has repeated entries",
                self.entries
            )));
        }
        let mut acc = BigUint::one();
        for (i, &a) in self.entries.iter().enumerate() {
            for &b in &self.entries[i + 1..] {
                acc *= a.abs_diff(b);
            }
        }
        Ok(acc)
    }

    /// Pairwise absolute differences `|h_i - h_j|`, `i < j`.
    pub fn differences(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries
            .iter()
            .enumerate()
            .flat_map(move |(i, &a)| self.entries[i + 1..].iter().map(move |&b| a.abs_diff(b)))
    }
}

/// Distinct residues of `entries` mod `p`.
pub fn nu_p(entries: &[u64], p: u64) -> u32 {
    if p <= 64 {
        let mut mask = 0u64;
        for &e in entries {
            mask |= 1 << (e % p);
        }
        mask.count_ones()
    } else {
        let mut buf: smallbuf::Residues = smallbuf::Residues::new();
        for &e in entries {
            buf.push(e % p);
        }
        let r = buf.as_mut_slice();
        r.sort_unstable();
        1 + r.windows(2).filter(|w| w[0] != w[1]).count() as u32
    }
}

mod smallbuf {
    /// Residue scratch space that stays on the stack for k <= 16.
    pub enum Residues {
        Inline([u64; 16], usize),
        Heap(Vec<u64>),
    }

    impl Residues {
        pub fn new() -> Self {
            Residues::Inline([0; 16], 0)
        }

        pub fn push(&mut self, x: u64) {
            match self {
                Residues::Inline(buf, n) if *n < 16 => {
                    buf[*n] = x;
                    *n += 1;
                }
                Residues::Inline(buf, n) => {
                    let mut v = buf[..*n].to_vec();
                    v.push(x);
                    *self = Residues::Heap(v);
                }
                Residues::Heap(v) => v.push(x),
            }
        }

        pub fn as_mut_slice(&mut self) -> &mut [u64] {
            match self {
                Residues::Inline(buf, n) => &mut buf[..*n],
                Residues::Heap(v) => v,
            }
        }
    }
}

/// Number of ordered k-tuples of distinct entries in `[1, h]`,
/// `h (h-1) ... (h-k+1)`.
pub fn distinct_tuple_count(k: usize, h: u64) -> Result<u128> {
    if k == 0 {
        return Err(Error::Bounds("k must be >= 1".into()));
    }
    if h < k as u64 {
        return Err(Error::EmptyDomain(format!("no {k}-tuples of distinct entries <= {h}")));
    }
    (0..k as u64).try_fold(1u128, |acc, i| {
        acc.checked_mul((h - i) as u128)
            .ok_or_else(|| Error::Arithmetic(format!("h*_k overflows for k={k}, h={h}")))
    })
}

/// Lexicographic enumeration of ordered k-tuples with distinct entries in
/// `[1, h]`, addressable by index so that ranges can be handed to workers.
#[derive(Debug, Clone)]
pub struct DistinctTuples {
    k: usize,
    h: u64,
    total: u128,
}

/// Enumerate all ordered k-tuples of distinct entries in `[1, h]`.
pub fn enumerate_distinct(k: usize, h: u64) -> Result<DistinctTuples> {
    let total = distinct_tuple_count(k, h)?;
    Ok(DistinctTuples { k, h, total })
}

impl DistinctTuples {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// Cursor over the index range `[start, end)`, clamped to `total`.
    pub fn cursor(&self, start: u128, end: u128) -> TupleCursor {
        let end = end.min(self.total);
        let mut cursor = TupleCursor {
            h: self.h,
            current: vec![0; self.k],
            used: vec![false; self.h as usize + 1],
            remaining: end.saturating_sub(start),
            fresh: true,
        };
        if cursor.remaining > 0 {
            cursor.unrank(start);
        }
        cursor
    }

    /// Owning iterator over the index range `[start, end)`.
    pub fn range(&self, start: u128, end: u128) -> impl Iterator<Item = KTuple> {
        let mut c = self.cursor(start, end);
        std::iter::from_fn(move || {
            c.advance().map(|t| KTuple {
                entries: t.to_vec(),
                distinct: true,
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = KTuple> {
        self.range(0, self.total)
    }
}

/// Borrowing cursor; avoids one allocation per tuple in hot sweeps.
#[derive(Debug, Clone)]
pub struct TupleCursor {
    h: u64,
    current: Vec<u64>,
    used: Vec<bool>,
    remaining: u128,
    fresh: bool,
}

impl TupleCursor {
    fn unrank(&mut self, mut index: u128) {
        let k = self.current.len();
        let h = self.h;
        let mut digits = vec![0u64; k];
        for i in (0..k).rev() {
            let radix = (h - i as u64) as u128;
            digits[i] = (index % radix) as u64;
            index /= radix;
        }
        for (i, &d) in digits.iter().enumerate() {
            let mut seen = 0;
            let v = (1..=h)
                .find(|&v| {
                    if self.used[v as usize] {
                        return false;
                    }
                    if seen == d {
                        return true;
                    }
                    seen += 1;
                    false
                })
                .expect("digit within radix");
            self.used[v as usize] = true;
            self.current[i] = v;
        }
    }

    fn step(&mut self) {
        let k = self.current.len();
        for i in (0..k).rev() {
            let old = self.current[i];
            self.used[old as usize] = false;
            if let Some(v) = (old + 1..=self.h).find(|&v| !self.used[v as usize]) {
                self.used[v as usize] = true;
                self.current[i] = v;
                let mut next = 1u64;
                for j in i + 1..k {
                    while self.used[next as usize] {
                        next += 1;
                    }
                    self.used[next as usize] = true;
                    self.current[j] = next;
                }
                return;
            }
        }
        unreachable!("stepped past the last tuple");
    }

    pub fn advance(&mut self) -> Option<&[u64]> {
        if self.remaining == 0 {
            return None;
        }
        if self.fresh {
            self.fresh = false;
        } else {
            self.step();
        }
        self.remaining -= 1;
        Some(&self.current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(v: &[u64]) -> KTuple {
        KTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn nu_p_examples() {
        assert_eq!(t(&[1, 3]).nu_p(2), 1);
        assert_eq!(t(&[1, 2, 3]).nu_p(3), 3);
        assert_eq!(t(&[1, 3, 7]).nu_p(5), 3);
        assert_eq!(t(&[1, 68, 135]).nu_p(67), 1);
        assert_eq!(t(&[1, 68, 136]).nu_p(67), 2);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(t(&[1, 3]).discriminant().unwrap(), 2u8.into());
        assert_eq!(t(&[1, 3, 5]).discriminant().unwrap(), 16u8.into());
        // (1,5,11,17): 4*10*16*6*12*6
        let direct: u64 = 4 * 10 * 16 * 6 * 12 * 6;
        assert_eq!(t(&[1, 5, 11, 17]).discriminant().unwrap(), direct.into());
        assert!(matches!(t(&[2, 2]).discriminant(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn discriminant_bound() {
        let h = t(&[1, 5, 11, 17]);
        let bound = BigUint::from(2 * h.height()).pow((h.k() * h.k()) as u32);
        assert!(h.discriminant().unwrap() <= bound);
    }

    #[test]
    fn construction_errors() {
        assert!(KTuple::new(vec![]).is_err());
        assert!(KTuple::new(vec![0, 1]).is_err());
        assert!(!t(&[4, 4]).is_distinct());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_distinct(2, 3).unwrap().iter().count(), 6);
        assert_eq!(enumerate_distinct(1, 5).unwrap().iter().count(), 5);
        assert_eq!(enumerate_distinct(3, 10).unwrap().iter().count(), 720);
        assert!(matches!(enumerate_distinct(3, 2), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all: Vec<Vec<u64>> = enumerate_distinct(3, 6)
            .unwrap()
            .iter()
            .map(Vec::from)
            .collect();
        let mut brute = Vec::new();
        for a in 1..=6u64 {
            for b in 1..=6 {
                for c in 1..=6 {
                    if a != b && b != c && a != c {
                        brute.push(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(all, brute);
    }

    #[test]
    fn nu_p_is_k_iff_p_coprime_to_delta() {
        let primes = crate::numeric::sieve_primes(29).unwrap();
        for k in 1..=4 {
            for h in enumerate_distinct(k, 12).unwrap().iter() {
                let delta = h.discriminant().unwrap();
                for p in primes.iter() {
                    let divides = (&delta % p) == BigUint::from(0u8);
                    assert_eq!(h.nu_p(p) as usize == k, !divides, "{h:?} p={p}");
                }
            }
        }
    }

    #[test]
    fn nu_p_full_grid_to_thirty() {
        // |h| <= 30 for k = 2: checked exhaustively
        let primes = crate::numeric::sieve_primes(29).unwrap();
        for h in enumerate_distinct(2, 30).unwrap().iter() {
            let delta = h.discriminant().unwrap();
            for p in primes.iter() {
                let divides = (&delta % p) == BigUint::from(0u8);
                assert_eq!(h.nu_p(p) == 2, !divides);
            }
        }
    }

    proptest! {
        #[test]
        fn sharded_enumeration_matches_unsharded(
            k in 1usize..=3,
            h in 3u64..=9,
            cuts in proptest::collection::vec(0u32..1000, 0..5),
        ) {
            let e = enumerate_distinct(k, h).unwrap();
            let total = e.total();
            let mut bounds: Vec<u128> = cuts.iter().map(|&c| c as u128 * total / 1000).collect();
            bounds.push(0);
            bounds.push(total);
            bounds.sort_unstable();
            let sharded: Vec<KTuple> = bounds
                .windows(2)
                .flat_map(|w| e.range(w[0], w[1]).collect::<Vec<_>>())
                .collect();
            let whole: Vec<KTuple> = e.iter().collect();
            prop_assert_eq!(sharded, whole);
        }

        #[test]
        fn bitset_and_sort_paths_agree(entries in proptest::collection::vec(1u64..10_000, 1..8), p in 2u64..200) {
            prop_assume!(crate::numeric::is_prime_u64(p));
            let mut r: Vec<u64> = entries.iter().map(|e| e % p).collect();
            r.sort_unstable();
            r.dedup();
            prop_assert_eq!(nu_p(&entries, p) as usize, r.len());
        }
    }
}
