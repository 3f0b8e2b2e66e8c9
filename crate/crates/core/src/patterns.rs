//! Prime seeds of polynomial families and window-count statistics.
//!
//! `n >= 1` is a seed of `F = (f_1, ..., f_m)` when every `f_j(n)` is a
//! positive prime. Windows have the fixed length
//! `L = round(lambda * delta(N, F))` with `delta(N, F) = peg(F) / S(F) * (log N)^m`,
//! computed once at the range end `N`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{is_prime_u64, mod_inverse, shared_primes, NeumaierSum};
use crate::polyfam::PolyFamily;
use crate::singular::singular_series_family;

const SEGMENT: u64 = 1 << 18;

/// Whether every member of `f` takes a positive prime value at `n`.
pub fn is_prime_seed(f: &PolyFamily, n: u64) -> Result<bool> {
    let mut all = true;
    for g in f.members() {
        let v = g.eval(n as i128)?;
        if v >= 1i128 << 64 {
            return Err(Error::Capability(format!("{g} at {n} exceeds 2^64")));
        }
        if all && (v < 2 || !is_prime_u64(v as u64)) {
            all = false;
        }
    }
    Ok(all)
}

/// Endpoint check against 2^64; interior values are checked per `n`.
fn check_range(f: &PolyFamily, n: u64) -> Result<()> {
    for g in f.members() {
        // leading coefficient may be negative for non-primitive input; test both ends
        for x in [1u64, n] {
            let v = g.eval(x as i128)?;
            if v >= 1i128 << 64 {
                return Err(Error::Capability(format!("{g} at {x} exceeds 2^64")));
            }
        }
    }
    Ok(())
}

fn linear_params(f: &PolyFamily) -> Option<Vec<(i128, i128)>> {
    f.members()
        .iter()
        .map(|g| {
            let c = g.coeffs();
            (c.len() == 2 && c[1] > 0).then_some((c[1], c[0]))
        })
        .collect()
}

/// Calls `on_seed(n)` for every seed `n <= limit`, in increasing order.
pub fn scan_seeds(f: &PolyFamily, limit: u64, mut on_seed: impl FnMut(u64)) -> Result<()> {
    if limit == 0 {
        return Ok(());
    }
    match linear_params(f) {
        Some(params) => {
            let maxv = params
                .iter()
                .map(|&(a, b)| a.checked_mul(limit as i128).and_then(|x| x.checked_add(b)))
                .try_fold(2i128, |m, v| v.map(|v| m.max(v)))
                .ok_or_else(|| Error::Capability("seed values overflow".into()))?;
            if maxv >= 1i128 << 64 {
                return Err(Error::Capability(format!("seed values reach {maxv} >= 2^64")));
            }
            let root = crate::numeric::isqrt(maxv as u64) + 1;
            let small = shared_primes(root.max(2))?;
            let small = small.up_to(root);
            let mut alive = vec![true; SEGMENT as usize];
            let mut lo = 1u64;
            while lo <= limit {
                let hi = (lo + SEGMENT - 1).min(limit);
                let len = (hi - lo + 1) as usize;
                alive[..len].fill(true);
                for &(a, b) in &params {
                    sieve_member(&mut alive[..len], lo, a, b, small);
                }
                for (i, &ok) in alive[..len].iter().enumerate() {
                    if ok {
                        on_seed(lo + i as u64);
                    }
                }
                lo = hi + 1;
            }
        }
        None => {
            check_range(f, limit)?;
            for n in 1..=limit {
                if is_prime_seed(f, n)? {
                    on_seed(n);
                }
            }
        }
    }
    Ok(())
}

// Clears `alive[i]` unless `a (lo + i) + b` is prime; `small` holds every
// prime up to the square root of the largest value.
fn sieve_member(alive: &mut [bool], lo: u64, a: i128, b: i128, small: &[u64]) {
    let len = alive.len() as u64;
    let value = |n: u64| a * n as i128 + b;
    // values below 2
    let mut n = lo;
    while n < lo + len && value(n) < 2 {
        alive[(n - lo) as usize] = false;
        n += 1;
    }
    let top = value(lo + len - 1);
    for &q in small {
        let qi = q as i128;
        if qi * qi > top {
            break;
        }
        let am = a.rem_euclid(qi) as u64;
        let bm = b.rem_euclid(qi) as u64;
        let first = if am == 0 {
            if bm != 0 {
                continue;
            }
            // every value divisible by q
            for i in 0..len {
                if value(lo + i) != qi {
                    alive[i as usize] = false;
                }
            }
            continue;
        } else {
            let r = ((q - bm) % q) * mod_inverse(am, q) % q;
            (r + q - lo % q) % q
        };
        let mut i = first;
        while i < len {
            if value(lo + i) != qi {
                alive[i as usize] = false;
            }
            i += q;
        }
    }
}

/// `pi(N; F)`: the number of seeds `n <= N`.
pub fn count_prime_seeds(f: &PolyFamily, limit: u64) -> Result<u64> {
    let mut c = 0u64;
    scan_seeds(f, limit, |_| c += 1)?;
    Ok(c)
}

/// All seeds `n <= N`.
pub fn seed_positions(f: &PolyFamily, limit: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    scan_seeds(f, limit, |n| out.push(n))?;
    Ok(out)
}

/// `delta(N, F) = peg(F) / S(F) * (log N)^m` with `S(F)` truncated at `cutoff`.
pub fn delta_length(f: &PolyFamily, limit: u64, cutoff: u64) -> Result<f64> {
    let s = singular_series_family(f, cutoff)?;
    if s.exact_zero || s.value < 1e-12 {
        return Err(Error::Domain(format!("singular series of {f} vanishes")));
    }
    Ok(delta_from(f, limit, s.value))
}

fn delta_from(f: &PolyFamily, limit: u64, singular: f64) -> f64 {
    f.peg() as f64 / singular * (limit as f64).ln().powi(f.m() as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    /// `(jL, (j+1)L]` for `0 <= j < floor(N/L)`.
    Disjoint,
    /// `(n, n+L]` for `1 <= n <= N - L`; neighbouring counts are correlated.
    Sliding,
}

impl std::str::FromStr for WindowMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint" => Ok(WindowMode::Disjoint),
            "sliding" => Ok(WindowMode::Sliding),
            _ => Err(Error::Parse(format!("unknown window mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub family: String,
    pub n: u64,
    pub lambda: f64,
    pub cutoff: u64,
    pub singular: f64,
    pub delta: f64,
    pub window_length: u64,
    pub mode: WindowMode,
    /// `histogram[r]` windows contain exactly `r` seeds.
    pub histogram: Vec<u64>,
    pub windows: u64,
    /// Seeds in `[1, N]`.
    pub seeds_total: u64,
    /// Seeds below the first window start (always 0 for disjoint windows from 0).
    pub seeds_before: u64,
    /// Seeds up to the end of the last disjoint window.
    pub seeds_through_last: u64,
}

impl WindowStats {
    /// Mean of `count^k` over windows.
    pub fn moment(&self, k: u32) -> f64 {
        let s: NeumaierSum = self
            .histogram
            .iter()
            .enumerate()
            .map(|(r, &c)| c as f64 * (r as f64).powi(k as i32))
            .collect();
        s.total() / self.windows as f64
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    /// CSV with columns `bin_lo,bin_hi,count`, one row per count `r` as `[r, r+1)`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bin_lo", "bin_hi", "count"])?;
        for (r, c) in self.histogram.iter().enumerate() {
            out.write_record([r.to_string(), (r + 1).to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Histogram of seed counts in windows of length `round(lambda * delta(N, F))`.
pub fn window_counts(
    f: &PolyFamily,
    limit: u64,
    lambda: f64,
    mode: WindowMode,
    cutoff: u64,
) -> Result<WindowStats> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Bounds(format!("lambda = {lambda} must be positive")));
    }
    let s = singular_series_family(f, cutoff)?;
    if s.exact_zero || s.value < 1e-12 {
        return Err(Error::Domain(format!("singular series of {f} vanishes")));
    }
    let delta = delta_from(f, limit, s.value);
    let l = (lambda * delta).round();
    if !(l >= 1.0) || l > limit as f64 {
        return Err(Error::Config(format!(
            "window length {l} outside [1, N = {limit}]"
        )));
    }
    let l = l as u64;
    let seeds = seed_positions(f, limit)?;
    let mut histogram: Vec<u64> = Vec::new();
    let mut bump = |r: usize| {
        if histogram.len() <= r {
            histogram.resize(r + 1, 0);
        }
        histogram[r] += 1;
    };
    let (windows, seeds_before, seeds_through_last) = match mode {
        WindowMode::Disjoint => {
            let count = limit / l;
            let end = count * l;
            let mut i = 0;
            for j in 0..count {
                let hi = (j + 1) * l;
                let mut r = 0;
                while i < seeds.len() && seeds[i] <= hi {
                    r += 1;
                    i += 1;
                }
                bump(r);
            }
            (count, 0, seeds.partition_point(|&x| x <= end) as u64)
        }
        WindowMode::Sliding => {
            // count of seeds in (n, n + L] via two pointers
            let count = limit - l;
            let (mut lo, mut hi) = (0usize, 0usize);
            for n in 1..=count {
                while lo < seeds.len() && seeds[lo] <= n {
                    lo += 1;
                }
                while hi < seeds.len() && seeds[hi] <= n + l {
                    hi += 1;
                }
                bump(hi - lo);
            }
            (count, seeds.partition_point(|&x| x <= 1) as u64, seeds.len() as u64)
        }
    };
    if windows == 0 {
        return Err(Error::Config("no complete window fits in [1, N]".into()));
    }
    Ok(WindowStats {
        family: f.to_string(),
        n: limit,
        lambda,
        cutoff,
        singular: s.value,
        delta,
        window_length: l,
        mode,
        histogram,
        windows,
        seeds_total: seeds.len() as u64,
        seeds_before,
        seeds_through_last,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonFit {
    pub lambda_target: f64,
    pub mean: f64,
    pub variance: f64,
    pub total_variation: f64,
    pub chi_square: f64,
    /// Pooled bins minus one.
    pub degrees_of_freedom: usize,
    /// `(first r, last r or None for the open tail, observed, expected)`.
    pub bins: Vec<PooledBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledBin {
    pub r_lo: usize,
    pub r_hi: Option<usize>,
    pub observed: u64,
    pub expected: f64,
}

fn poisson_pmf(lambda: f64, upto: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut p = (-lambda).exp();
    for r in 0..=upto {
        if r > 0 {
            p *= lambda / r as f64;
        }
        out.push(p);
    }
    out
}

/// Compare a window histogram with Poisson(lambda).
pub fn poisson_fit(w: &WindowStats) -> Result<PoissonFit> {
    poisson_fit_histogram(&w.histogram, w.lambda)
}

/// Total variation `1/2 sum_r |emp(r) - pmf(r)|` (the Poisson tail beyond the
/// largest observed count included) and a chi-square statistic over bins
/// pooled left to right until each expects at least 5 windows.
pub fn poisson_fit_histogram(histogram: &[u64], lambda: f64) -> Result<PoissonFit> {
    let windows: u64 = histogram.iter().sum();
    if windows == 0 {
        return Err(Error::EmptyDomain("empty window histogram".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Bounds(format!("lambda = {lambda} must be positive")));
    }
    let wf = windows as f64;
    let rmax = histogram.len().saturating_sub(1);
    let horizon = rmax.max((lambda + 20.0 * lambda.sqrt() + 20.0) as usize);
    let pmf = poisson_pmf(lambda, horizon);
    let emp = |r: usize| histogram.get(r).copied().unwrap_or(0);

    let mut tv = NeumaierSum::new();
    let mut covered = NeumaierSum::new();
    for r in 0..=rmax {
        tv.add((emp(r) as f64 / wf - pmf[r]).abs());
        covered.add(pmf[r]);
    }
    tv.add((1.0 - covered.total()).max(0.0));
    let total_variation = (0.5 * tv.total()).clamp(0.0, 1.0);

    let mut bins: Vec<PooledBin> = Vec::new();
    let mut cdf = 0.0;
    let mut start = 0;
    let mut obs = 0u64;
    let mut exp = 0.0;
    for r in 0..=horizon {
        obs += emp(r);
        exp += wf * pmf[r];
        cdf += pmf[r];
        let tail_exp = wf * (1.0 - cdf).max(0.0);
        if exp >= 5.0 && tail_exp >= 5.0 {
            bins.push(PooledBin {
                r_lo: start,
                r_hi: Some(r),
                observed: obs,
                expected: exp,
            });
            start = r + 1;
            obs = 0;
            exp = 0.0;
        } else if tail_exp < 5.0 {
            // close with the open tail
            let tail_obs: u64 = histogram.iter().skip(r + 1).sum();
            bins.push(PooledBin {
                r_lo: start,
                r_hi: None,
                observed: obs + tail_obs,
                expected: exp + tail_exp,
            });
            break;
        }
    }
    let chi_square: f64 = bins
        .iter()
        .map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected)
        .sum();
    let mean: f64 = (0..=rmax).map(|r| r as f64 * emp(r) as f64).sum::<f64>() / wf;
    let second: f64 = (0..=rmax).map(|r| (r * r) as f64 * emp(r) as f64).sum::<f64>() / wf;
    Ok(PoissonFit {
        lambda_target: lambda,
        mean,
        variance: second - mean * mean,
        total_variation,
        chi_square,
        degrees_of_freedom: bins.len().saturating_sub(1),
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::sieve_primes;

    fn fam(s: &str) -> PolyFamily {
        s.parse().unwrap()
    }

    #[test]
    fn seed_examples() {
        assert!(is_prime_seed(&fam("x,x+2"), 3).unwrap());
        assert!(is_prime_seed(&fam("x^2+1"), 4).unwrap());
        assert!(is_prime_seed(&fam("x,2*x+1"), 5).unwrap());
        assert!(!is_prime_seed(&fam("x,x+2"), 1).unwrap());
        assert!(!is_prime_seed(&fam("x-5"), 3).unwrap());
        let big = fam("x^3");
        assert!(matches!(is_prime_seed(&big, 1 << 22), Err(Error::Capability(_))));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_prime_seeds(&fam("x"), 100).unwrap(), 25);
        assert_eq!(
            seed_positions(&fam("x,x+2"), 100).unwrap(),
            vec![3, 5, 11, 17, 29, 41, 59, 71]
        );
        assert_eq!(seed_positions(&fam("x^2+1"), 10).unwrap(), vec![1, 2, 4, 6, 10]);
        assert_eq!(count_prime_seeds(&fam("x"), 0).unwrap(), 0);
    }

    // sieve path against per-n primality
    #[test]
    fn linear_sieve_matches_direct() {
        for text in ["x", "x,x+2", "x,2*x+1", "2*x+1", "6*x+1,6*x+5", "x-7,x+4", "3*x+3", "x,x+2,x+6"] {
            let f = fam(text);
            for limit in [1u64, 2, 50, 3000, 300_000] {
                let fast = seed_positions(&f, limit).unwrap();
                let slow: Vec<u64> = (1..=limit).filter(|&n| is_prime_seed(&f, n).unwrap()).collect();
                assert_eq!(fast, slow, "{text} {limit}");
            }
        }
    }

    #[test]
    fn pi_values() {
        assert_eq!(count_prime_seeds(&fam("x"), 1_000_000).unwrap(), 78_498);
        let t = sieve_primes(1_000_002).unwrap();
        let twins = t.iter().filter(|&p| p <= 1_000_000 && t.contains(p + 2)).count() as u64;
        assert_eq!(count_prime_seeds(&fam("x,x+2"), 1_000_000).unwrap(), twins);
    }

    // (n, n+2, n+4) all prime only at n = 3
    #[test]
    fn prime_triplet_coincidence() {
        assert_eq!(seed_positions(&fam("x,x+2,x+4"), 2_000_000).unwrap(), vec![3]);
    }

    #[test]
    fn delta_examples() {
        // e^10 is not an integer; use N = 22026
        let d = delta_length(&fam("x"), 22026, 1000).unwrap();
        assert!((d - (22026f64).ln()).abs() < 1e-12);
        let s = singular_series_family(&fam("x,x+2"), 100_000).unwrap().value;
        let d2 = delta_length(&fam("x,x+2"), 10_000_000, 100_000).unwrap();
        assert!((d2 - (1e7f64).ln().powi(2) / s).abs() < 1e-9);
        let s3 = singular_series_family(&fam("x^2+1"), 100_000).unwrap().value;
        let d3 = delta_length(&fam("x^2+1"), 1_000_000, 100_000).unwrap();
        assert!((d3 - 2.0 * (1e6f64).ln() / s3).abs() < 1e-9);
        assert!(matches!(delta_length(&fam("x,x+1"), 1000, 100), Err(Error::Domain(_))));
    }

    #[test]
    fn window_bookkeeping() {
        let f = fam("x");
        let w = window_counts(&f, 100_000, 1.0, WindowMode::Disjoint, 100).unwrap();
        assert_eq!(w.window_length, 12);
        assert_eq!(w.histogram.iter().sum::<u64>(), w.windows);
        let weighted: u64 = w.histogram.iter().enumerate().map(|(r, &c)| r as u64 * c).sum();
        let end = w.windows * w.window_length;
        assert_eq!(weighted, count_prime_seeds(&f, end).unwrap() - w.seeds_before);
        assert_eq!(weighted, w.seeds_through_last);

        let s = window_counts(&f, 5000, 1.0, WindowMode::Sliding, 100).unwrap();
        assert_eq!(s.windows, 5000 - s.window_length);
        // brute-force sliding counts
        let seeds = seed_positions(&f, 5000).unwrap();
        let mut hist = vec![0u64; s.histogram.len()];
        for n in 1..=5000 - s.window_length {
            let c = seeds.iter().filter(|&&x| x > n && x <= n + s.window_length).count();
            hist[c] += 1;
        }
        assert_eq!(hist, s.histogram);

        assert!(matches!(
            window_counts(&f, 1000, 1e6, WindowMode::Disjoint, 100),
            Err(Error::Config(_))
        ));
        assert!(window_counts(&f, 1000, 0.0, WindowMode::Disjoint, 100).is_err());
    }

    #[test]
    fn fit_exact_poisson() {
        let lambda = 2.0;
        let pmf = poisson_pmf(lambda, 30);
        let hist: Vec<u64> = pmf.iter().map(|p| (p * 1e9).round() as u64).collect();
        let fit = poisson_fit_histogram(&hist, lambda).unwrap();
        assert!(fit.total_variation < 1e-8);
        assert!((fit.mean - 2.0).abs() < 1e-6);
        assert!((fit.variance - 2.0).abs() < 1e-6);
        assert!(fit.bins.iter().all(|b| b.expected >= 5.0));
        let n: u64 = fit.bins.iter().map(|b| b.observed).sum();
        assert_eq!(n, hist.iter().sum::<u64>());
    }

    #[test]
    fn fit_all_zero() {
        let fit = poisson_fit_histogram(&[1000], 1.0).unwrap();
        assert!((fit.total_variation - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(fit.mean, 0.0);
        assert!(poisson_fit_histogram(&[], 1.0).is_err());
    }
}
