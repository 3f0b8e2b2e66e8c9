use serde::{Deserialize, Serialize};

use super::distribution::{merge_into, AtomMap, EmpiricalDistribution, Provenance};
use super::run_sharded;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::polyfam::PolyFamily;
use crate::singular::{family_partial_product, TupleEvaluator};
use crate::tuples::{distinct_tuple_count, enumerate_distinct, KTuple};

/// Default cap on the number of tuple evaluations in one sweep.
pub const DEFAULT_BUDGET: u128 = 1 << 31;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// One representative per translation and permutation class.
    #[default]
    Classes,
    /// Every ordered tuple.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub shards: usize,
    pub budget: u128,
    pub mode: SweepMode,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            shards: 1,
            budget: DEFAULT_BUDGET,
            mode: SweepMode::Classes,
        }
    }
}

/// Sorted tuples `1 = a_1 < a_2 < ... < a_k <= h`, one per class of ordered
/// distinct k-tuples in `[1, h]` under translation and permutation. The class
/// of `a` has `k! (h - (a_k - 1))` members.
#[derive(Debug, Clone, Copy)]
pub struct TranslationClasses {
    k: usize,
    h: u64,
}

impl TranslationClasses {
    pub fn new(k: usize, h: u64) -> Result<Self> {
        distinct_tuple_count(k, h)?;
        Ok(Self { k, h })
    }

    /// `C(h-1, k-1)`, saturating.
    pub fn count(&self) -> u128 {
        let n = (self.h - 1) as u128;
        let r = (self.k - 1) as u128;
        let mut c: u128 = 1;
        for i in 0..r {
            c = match c.checked_mul(n - i) {
                Some(x) => x / (i + 1),
                None => return u128::MAX,
            };
        }
        c
    }

    /// `k! (h - span)` for a representative.
    pub fn weight(&self, rep: &[u64]) -> u128 {
        let fact: u128 = (1..=self.k as u128).product();
        fact * (self.h - (rep[self.k - 1] - 1)) as u128
    }

    /// Representatives with index in `[start, end)`, in lexicographic order.
    pub fn for_each_in(&self, start: u128, end: u128, mut f: impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
        let k = self.k;
        let h = self.h;
        let mut cur: Vec<u64> = (1..=k as u64).collect();
        let mut idx: u128 = 0;
        loop {
            if idx >= end {
                return Ok(());
            }
            if idx >= start {
                f(&cur)?;
            }
            idx += 1;
            // next combination of positions 1..k within [2, h]
            let mut i = k;
            loop {
                if i <= 1 {
                    return Ok(());
                }
                i -= 1;
                let limit = h - (k - 1 - i) as u64;
                if cur[i] < limit {
                    cur[i] += 1;
                    for j in i + 1..k {
                        cur[j] = cur[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

fn check_budget(work: u128, budget: u128) -> Result<()> {
    if work > budget {
        return Err(Error::Budget(format!(
            "sweep needs {work} evaluations, budget is {budget}"
        )));
    }
    Ok(())
}

/// Weighted atoms of `eval` over all distinct k-tuples in `[1, h]`, plus the
/// weight of tuples for which `eval` returned `None`.
fn sweep_atoms<F>(k: usize, h: u64, opts: &SweepOptions, eval: F) -> Result<(AtomMap, u64)>
where
    F: Fn(&[u64]) -> Result<Option<f64>> + Sync,
{
    let total = distinct_tuple_count(k, h)?;
    if total > u64::MAX as u128 {
        return Err(Error::Budget(format!("{total} tuples overflow the sample counter")));
    }
    let record = |map: &mut AtomMap, excluded: &mut u64, v: Option<f64>, w: u64| {
        match v {
            Some(x) => *map.entry((x + 0.0).to_bits()).or_insert(0) += w,
            None => *excluded += w,
        }
    };
    let parts = match opts.mode {
        SweepMode::Classes => {
            let classes = TranslationClasses::new(k, h)?;
            let n = classes.count();
            check_budget(n, opts.budget)?;
            run_sharded(opts.shards, n, |a, b| {
                let mut map = AtomMap::new();
                let mut excluded = 0u64;
                classes.for_each_in(a, b, |rep| {
                    let w = classes.weight(rep) as u64;
                    record(&mut map, &mut excluded, eval(rep)?, w);
                    Ok(())
                })?;
                Ok((map, excluded))
            })?
        }
        SweepMode::Exhaustive => {
            check_budget(total, opts.budget)?;
            let tuples = enumerate_distinct(k, h)?;
            run_sharded(opts.shards, total, |a, b| {
                let mut map = AtomMap::new();
                let mut excluded = 0u64;
                let mut cursor = tuples.cursor(a, b);
                while let Some(t) = cursor.advance() {
                    record(&mut map, &mut excluded, eval(t)?, 1);
                }
                Ok((map, excluded))
            })?
        }
    };
    let mut map = AtomMap::new();
    let mut excluded = 0u64;
    for (m, e) in parts {
        merge_into(&mut map, m);
        excluded += e;
    }
    Ok((map, excluded))
}

/// Values of `S(h)` over all `h*_k = h(h-1)...(h-k+1)` ordered distinct
/// tuples in `[1, h]`, truncated at `cutoff`. Vanishing tuples form the atom at 0.
pub fn empirical_distribution(
    k: usize,
    h: u64,
    cutoff: u64,
    opts: &SweepOptions,
) -> Result<EmpiricalDistribution> {
    distinct_tuple_count(k, h)?;
    let ev = TupleEvaluator::new(k, cutoff, h)?;
    let (map, _) = sweep_atoms(k, h, opts, |t| Ok(Some(ev.eval(t))))?;
    EmpiricalDistribution::from_map(Provenance::TupleSweep, map)
}

/// `(1/h*_k) sum S(h)^m` over distinct tuples in `[1, h]`.
pub fn empirical_moment(k: usize, m: u32, h: u64, cutoff: u64, opts: &SweepOptions) -> Result<f64> {
    Ok(empirical_distribution(k, h, cutoff, opts)?.moment(m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedAverage {
    pub k: usize,
    pub h: u64,
    pub cutoff: u64,
    /// `(1/h^k) sum S(f o h)` over tuples with a primitive composition.
    pub value: f64,
    pub primitive_tuples: u64,
    pub imprimitive_tuples: u64,
    /// Largest heuristic spread among the evaluated composed families.
    pub max_spread: f64,
}

/// Average of the family series of `f o h` over distinct tuples in `[1, h]`,
/// normalized by `h^k`. Tuples whose composition repeats a member are
/// excluded from the sum and counted separately.
pub fn empirical_composed_average(
    f: &PolyFamily,
    k: usize,
    h: u64,
    cutoff: u64,
    opts: &SweepOptions,
) -> Result<ComposedAverage> {
    f.require_primitive()?;
    if family_partial_product(f, cutoff)?.exact_zero {
        return Err(Error::Domain(format!("the singular series of {f} vanishes")));
    }
    let spreads = std::sync::Mutex::new(0.0f64);
    let (map, excluded) = sweep_atoms(k, h, opts, |t| {
        let tuple = KTuple::new(t.to_vec())?;
        let composed = f.compose(&tuple)?;
        if composed.distinct_member_count() != composed.m() {
            return Ok(None);
        }
        let v = family_partial_product(&composed, cutoff)?;
        if !v.exact_zero {
            let mut s = spreads.lock().expect("spread lock");
            *s = s.max(v.tail_log_bound);
        }
        Ok(Some(v.value))
    })?;
    let mut sum = NeumaierSum::new();
    let mut counted = 0u64;
    for (bits, c) in &map {
        sum.add(f64::from_bits(*bits) * *c as f64);
        counted += c;
    }
    let denom = (h as f64).powi(k as i32);
    Ok(ComposedAverage {
        k,
        h,
        cutoff,
        value: sum.total() / denom,
        primitive_tuples: counted,
        imprimitive_tuples: excluded,
        max_spread: spreads.into_inner().expect("spread lock"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_and_weights() {
        for k in 1..=4usize {
            for h in k as u64..=12 {
                let c = TranslationClasses::new(k, h).unwrap();
                let mut n = 0u128;
                let mut mass = 0u128;
                c.for_each_in(0, u128::MAX, |rep| {
                    assert_eq!(rep[0], 1);
                    assert!(rep.windows(2).all(|w| w[0] < w[1]));
                    n += 1;
                    mass += c.weight(rep);
                    Ok(())
                })
                .unwrap();
                assert_eq!(n, c.count());
                assert_eq!(mass, distinct_tuple_count(k, h).unwrap());
            }
        }
    }

    #[test]
    fn classes_match_exhaustive_bitwise() {
        for (k, h) in [(1usize, 20u64), (2, 40), (3, 25), (4, 13)] {
            let classes = empirical_distribution(k, h, 1000, &SweepOptions::default()).unwrap();
            let full = empirical_distribution(
                k,
                h,
                1000,
                &SweepOptions {
                    mode: SweepMode::Exhaustive,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(classes, full, "k={k} h={h}");
        }
    }

    #[test]
    fn shards_do_not_change_results() {
        let one = empirical_distribution(3, 60, 2000, &SweepOptions::default()).unwrap();
        for shards in [2, 3, 7] {
            let many = empirical_distribution(
                3,
                60,
                2000,
                &SweepOptions {
                    shards,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(one, many);
        }
    }

    #[test]
    fn k_one_is_point_mass() {
        let d = empirical_distribution(1, 500, 100, &SweepOptions::default()).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.atoms()[0].value, 1.0);
        assert_eq!(d.total(), 500);
        for m in 1..5 {
            assert_eq!(empirical_moment(1, m, 77, 100, &SweepOptions::default()).unwrap(), 1.0);
        }
    }

    #[test]
    fn budget_and_domain_errors() {
        let tight = SweepOptions {
            budget: 10,
            ..Default::default()
        };
        assert!(matches!(empirical_distribution(2, 100, 100, &tight), Err(Error::Budget(_))));
        assert!(matches!(
            empirical_distribution(3, 2, 100, &SweepOptions::default()),
            Err(Error::EmptyDomain(_))
        ));
    }

    #[test]
    fn zero_atom_k2_is_parity() {
        // odd differences vanish at p = 2: 2 * ceil(h/2) * floor(h/2) ordered pairs
        let h = 101u64;
        let d = empirical_distribution(2, h, 100, &SweepOptions::default()).unwrap();
        assert_eq!(d.zero_count(), 2 * 51 * 50);
        assert_eq!(d.total(), 101 * 100);
    }

    #[test]
    fn composed_average_small() {
        let x: PolyFamily = "x".parse().unwrap();
        let twin: PolyFamily = "x,x+2".parse().unwrap();
        // k = 1: every composition is a translate of F
        let a = empirical_composed_average(&twin, 1, 30, 2000, &SweepOptions::default()).unwrap();
        let s = family_partial_product(&twin, 2000).unwrap().value;
        assert!((a.value - s).abs() < 1e-12);
        assert_eq!(a.imprimitive_tuples, 0);
        // F = (X), k = 2: the tuple average with 1/h^2 normalization
        let g = empirical_composed_average(&x, 2, 40, 1000, &SweepOptions::default()).unwrap();
        let d = empirical_distribution(2, 40, 1000, &SweepOptions::default()).unwrap();
        assert!((g.value - d.mean() * (40.0 * 39.0) / 1600.0).abs() < 1e-12);
        // twins, k = 2: the imprimitive count is 2(h - 2)
        let t = empirical_composed_average(&twin, 2, 50, 1000, &SweepOptions::default()).unwrap();
        assert_eq!(t.imprimitive_tuples, 2 * 48);
        assert_eq!(t.primitive_tuples + t.imprimitive_tuples, 50 * 49);
        let bad: PolyFamily = "x,x+1".parse().unwrap();
        assert!(matches!(
            empirical_composed_average(&bad, 2, 10, 100, &SweepOptions::default()),
            Err(Error::Domain(_))
        ));
    }
}
