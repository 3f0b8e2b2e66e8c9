//! Moment constants `mu_k(m)` of singular series over k-tuples.
//!
//! `mu_k(m)` is the Euler product of local averages
//! `(1 - 1/p)^{-km} E[(1 - rho_p/p)^m]`, where `rho_p` is the number of
//! distinct residues of a uniform element of `(Z/pZ)^k`. Grouping tuples by
//! their residue count gives
//!
//! ```text
//! E[(1 - rho_p/p)^m] = p^{-k} sum_nu C(p, nu) sigma(k, nu) (1 - nu/p)^m
//!                    = sum_nu S(k, nu) prod_{i<nu}(1 - i/p) p^{nu-k} (1 - nu/p)^m
//! ```
//!
//! and the second form never builds a large power of `p`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{shared_primes, NeumaierSum, SurjectionTable};

/// Largest `k` accepted by the moment routines.
pub const MAX_K: u32 = 64;

fn check_k(k: u32) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::Bounds(format!("k = {k} outside [1, {MAX_K}]")));
    }
    Ok(())
}

/// Local factor of `mu_k(m)` at the prime `p`.
///
/// Real `m >= 0` is accepted. At `m = 0` the factor is `P(rho_p < p)`: the
/// `nu = p` term is dropped, matching `0^m = 0`.
pub fn local_moment_factor(p: u64, k: u32, m: f64) -> Result<f64> {
    let table = SurjectionTable::new(k.max(1))?;
    local_moment_factor_with(&table, p, k, m)
}

pub(crate) fn local_moment_factor_with(table: &SurjectionTable, p: u64, k: u32, m: f64) -> Result<f64> {
    Ok(log_local_moment(table, p, k, m)?.exp())
}

fn log_local_moment(table: &SurjectionTable, p: u64, k: u32, m: f64) -> Result<f64> {
    check_k(k)?;
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Bounds(format!("exponent m = {m} must be finite and >= 0")));
    }
    if p < 2 {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let pf = p as f64;
    let top = (k as u64).min(p) as u32;
    let mut sum = NeumaierSum::new();
    let mut falling = 1.0;
    for nu in 1..=top {
        if nu > 1 {
            falling *= 1.0 - (nu - 1) as f64 / pf;
        }
        if nu as u64 == p {
            continue;
        }
        let base = 1.0 - nu as f64 / pf;
        let t = table.stirling2_f64(k, nu) * falling * pf.powi(nu as i32 - k as i32) * base.powf(m);
        sum.add(t);
    }
    Ok(sum.total().ln() - k as f64 * m * (-1.0 / pf).ln_1p())
}

/// Tail bound `8 k^2 m^2 / (P - 1)` on the log of the omitted factors.
pub fn moment_tail_bound(k: u32, m: f64, cutoff: u64) -> f64 {
    8.0 * (k as f64 * m).powi(2) / (cutoff - 1) as f64
}

/// Smallest admissible cutoff `max(4 k^2 m^2, 100)`.
pub fn min_moment_cutoff(k: u32, m: u32) -> u64 {
    (4 * (k as u64 * m as u64).pow(2)).max(100)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub k: u32,
    pub m: u32,
    pub cutoff: u64,
    pub value: f64,
    pub log_value: f64,
    pub tail_log_bound: f64,
    /// `(p, factor)` for `p <= min(P, 100)`.
    pub local_factors: Vec<(u64, f64)>,
}

impl MomentResult {
    pub fn absolute_slack(&self) -> f64 {
        self.value * self.tail_log_bound.exp_m1()
    }
}

/// `mu_k(m)` truncated at `cutoff`.
pub fn mu(k: u32, m: u32, cutoff: u64) -> Result<MomentResult> {
    check_k(k)?;
    if m == 0 {
        return Err(Error::Bounds("m must be >= 1".into()));
    }
    let min = min_moment_cutoff(k, m);
    if cutoff < min {
        return Err(Error::Config(format!(
            "cutoff {cutoff} below max(4k^2m^2, 100) = {min}"
        )));
    }
    let table = SurjectionTable::new(k)?;
    let primes = shared_primes(cutoff)?;
    let mut acc = NeumaierSum::new();
    let mut local_factors = Vec::new();
    for &p in primes.up_to(cutoff) {
        let l = log_local_moment(&table, p, k, m as f64)?;
        if p <= 100 {
            local_factors.push((p, l.exp()));
        }
        acc.add(l);
    }
    let log_value = acc.total();
    Ok(MomentResult {
        k,
        m,
        cutoff,
        value: log_value.exp(),
        log_value,
        tail_log_bound: moment_tail_bound(k, m as f64, cutoff),
        local_factors,
    })
}

/// `prod_{p <= k} (1 - sigma(k, p) / p^k)`: the probability that the random
/// singular series of a k-tuple does not vanish.
pub fn nonvanishing_probability(k: u32) -> Result<BigRational> {
    check_k(k)?;
    let table = SurjectionTable::new(k)?;
    let mut out = BigRational::one();
    for p in (2..=k).filter(|&p| crate::numeric::is_prime_u64(p as u64)) {
        let full = BigUint::from(p).pow(k);
        let covered = table.get(k, p);
        out *= BigRational::new((full.clone() - covered).into(), full.into());
    }
    Ok(out)
}

/// `sum_{r=1}^{k} S(k, r) lambda^r`, the k-th moment of Poisson(lambda).
pub fn poisson_moment(k: u32, lambda: f64) -> Result<f64> {
    check_k(k)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Bounds(format!("lambda = {lambda} must be positive")));
    }
    let table = SurjectionTable::new(k)?;
    let mut acc = NeumaierSum::new();
    for r in 1..=k {
        acc.add(table.stirling2_f64(k, r) * lambda.powi(r as i32));
    }
    Ok(acc.total())
}

/// `prod_{p <= m} (1 + 1/(p-1))^{(k-1)m} p^{-(k-1)}`, an explicit lower bound
/// for `mu_k(m)` obtained from the `rho_p = 1` term alone at primes `p <= m`.
/// Equals 1 when `k = 1` or `m = 1`.
pub fn growth_lower_bound(k: u32, m: u32) -> Result<f64> {
    check_k(k)?;
    if m == 0 {
        return Err(Error::Bounds("m must be >= 1".into()));
    }
    let mut log = NeumaierSum::new();
    let e = (k as f64 - 1.0) * m as f64;
    for p in (2..=m as u64).filter(|&p| crate::numeric::is_prime_u64(p)) {
        let pf = p as f64;
        log.add(e * (1.0 / (pf - 1.0)).ln_1p() - (k as f64 - 1.0) * pf.ln());
    }
    Ok(log.total().exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HankelVerdict {
    PositiveDefinite,
    /// Some leading minor is zero within tolerance, none is negative.
    Semidefinite,
    /// Non-finite minors or tolerances.
    Indeterminate,
    NotPositive,
}

impl HankelVerdict {
    fn combine(self, other: Self) -> Self {
        use HankelVerdict::*;
        match (self, other) {
            (NotPositive, _) | (_, NotPositive) => NotPositive,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Semidefinite, _) | (_, Semidefinite) => Semidefinite,
            _ => PositiveDefinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingMinor {
    pub order: usize,
    pub det: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelReport {
    pub m: u32,
    pub n: usize,
    pub cutoff: u64,
    /// `mu_0(m), ..., mu_{2N+1}(m)` with `mu_0 = 1`.
    pub moments: Vec<f64>,
    pub plain: Vec<LeadingMinor>,
    pub shifted: Vec<LeadingMinor>,
    pub verdict: HankelVerdict,
}

impl HankelReport {
    /// `Some(true)` for (semi)definite, `Some(false)` for a negative minor,
    /// `None` when indeterminate.
    pub fn passes(&self) -> Option<bool> {
        match self.verdict {
            HankelVerdict::PositiveDefinite | HankelVerdict::Semidefinite => Some(true),
            HankelVerdict::NotPositive => Some(false),
            HankelVerdict::Indeterminate => None,
        }
    }
}

/// Largest `N` accepted by [`hankel_positivity`].
pub const MAX_HANKEL_N: usize = 5;

/// Leading-minor test of `[mu_{i+j}(m)]` and `[mu_{i+j+1}(m)]`, `0 <= i,j <= N`.
///
/// Each minor carries a first-order tolerance: the sum over entries of
/// `|cofactor| * |entry| * (relative uncertainty)`, where the uncertainty is
/// the entry's tail bound plus a rounding allowance.
pub fn hankel_positivity(m: u32, n: usize, cutoff: u64) -> Result<HankelReport> {
    if m == 0 {
        return Err(Error::Bounds("m must be >= 1".into()));
    }
    if n > MAX_HANKEL_N {
        return Err(Error::Bounds(format!("N = {n} above {MAX_HANKEL_N}")));
    }
    let top = 2 * n as u32 + 1;
    let mut moments = vec![1.0];
    let mut rel = vec![0.0];
    for k in 1..=top {
        let r = mu(k, m, cutoff)?;
        moments.push(r.value);
        rel.push(r.tail_log_bound.exp_m1() + 1e-12);
    }
    let minors = |shift: usize| -> Vec<LeadingMinor> {
        (1..=n + 1)
            .map(|order| {
                let a: Vec<Vec<f64>> = (0..order)
                    .map(|i| (0..order).map(|j| moments[i + j + shift]).collect())
                    .collect();
                let det = determinant(&a);
                let mut tol = 0.0;
                let mut scale = 0.0;
                for i in 0..order {
                    for j in 0..order {
                        let c = cofactor(&a, i, j).abs() * a[i][j].abs();
                        tol += c * rel[i + j + shift];
                        scale += c;
                    }
                }
                LeadingMinor {
                    order,
                    det,
                    tolerance: tol + 1e-13 * scale,
                }
            })
            .collect()
    };
    let plain = minors(0);
    let shifted = minors(1);
    let verdict = verdict_of(&plain).combine(verdict_of(&shifted));
    Ok(HankelReport {
        m,
        n,
        cutoff,
        moments,
        plain,
        shifted,
        verdict,
    })
}

fn verdict_of(minors: &[LeadingMinor]) -> HankelVerdict {
    let mut v = HankelVerdict::PositiveDefinite;
    for mi in minors {
        let here = if !mi.det.is_finite() || !mi.tolerance.is_finite() {
            HankelVerdict::Indeterminate
        } else if mi.det < -mi.tolerance {
            HankelVerdict::NotPositive
        } else if mi.det <= mi.tolerance {
            HankelVerdict::Semidefinite
        } else {
            HankelVerdict::PositiveDefinite
        };
        v = v.combine(here);
    }
    v
}

fn determinant(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    let mut a = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
            .unwrap_or(c);
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    det
}

fn cofactor(a: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let sub: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != j)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect();
    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
    sign * determinant(&sub)
}

/// Exact rational local factor by enumerating `(Z/pZ)^k`; small cases only.
pub fn local_moment_factor_exact(p: u64, k: u32, m: u32) -> Result<BigRational> {
    check_k(k)?;
    let cells = (p as u128).checked_pow(k).filter(|&c| c <= 1 << 24);
    let Some(cells) = cells else {
        return Err(Error::Budget(format!("(Z/{p}Z)^{k} too large to enumerate")));
    };
    let mut by_rho = vec![0u64; k as usize + 1];
    let mut digits = vec![0u64; k as usize];
    for _ in 0..cells {
        let mut seen = digits.clone();
        seen.sort_unstable();
        seen.dedup();
        by_rho[seen.len()] += 1;
        for d in digits.iter_mut() {
            *d += 1;
            if *d < p {
                break;
            }
            *d = 0;
        }
    }
    let pb = BigRational::from_integer(p.into());
    let mut e = BigRational::from_integer(0.into());
    for (rho, &count) in by_rho.iter().enumerate().skip(1) {
        if count == 0 {
            continue;
        }
        let base = (pb.clone() - BigRational::from_integer(rho.into())) / pb.clone();
        e += BigRational::from_integer(count.into()) * num_traits::pow(base, m as usize);
    }
    e /= BigRational::from_integer(BigUint::from(p).pow(k).into());
    let q = (pb.clone() - BigRational::one()) / pb;
    Ok(e / num_traits::pow(q, (k * m) as usize))
}

/// Float value of a rational, for comparisons.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
