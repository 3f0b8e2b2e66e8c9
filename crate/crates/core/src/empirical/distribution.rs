use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    TupleSweep,
    MonteCarlo,
    WindowCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub count: u64,
}

/// A finite weighted sample of nonnegative reals, stored as sorted atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    provenance: Provenance,
    atoms: Vec<Atom>,
    total: u64,
}

/// Accumulates atoms keyed by the bit pattern of the value. For nonnegative
/// floats the bit order is the numeric order.
pub(crate) type AtomMap = BTreeMap<u64, u64>;

pub(crate) fn merge_into(acc: &mut AtomMap, other: AtomMap) {
    for (k, v) in other {
        *acc.entry(k).or_insert(0) += v;
    }
}

impl EmpiricalDistribution {
    pub(crate) fn from_map(provenance: Provenance, map: AtomMap) -> Result<Self> {
        let atoms: Vec<Atom> = map
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(bits, count)| Atom {
                value: f64::from_bits(bits),
                count,
            })
            .collect();
        let total = atoms
            .iter()
            .try_fold(0u64, |s, a| s.checked_add(a.count))
            .ok_or_else(|| Error::Arithmetic("sample count overflows u64".into()))?;
        if total == 0 {
            return Err(Error::EmptyDomain("empty distribution".into()));
        }
        Ok(Self {
            provenance,
            atoms,
            total,
        })
    }

    /// From raw samples; each must be finite and nonnegative.
    pub fn from_samples(provenance: Provenance, samples: &[f64]) -> Result<Self> {
        Self::from_weighted(provenance, samples.iter().map(|&x| (x, 1)))
    }

    /// From `(value, count)` pairs; repeated values are merged.
    pub fn from_weighted(
        provenance: Provenance,
        pairs: impl IntoIterator<Item = (f64, u64)>,
    ) -> Result<Self> {
        let mut map = AtomMap::new();
        for (x, c) in pairs {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::Domain(format!("sample {x} is not a finite nonnegative real")));
            }
            // fold -0.0 into 0.0
            *map.entry((x + 0.0).to_bits()).or_insert(0) += c;
        }
        Self::from_map(provenance, map)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Mass of the exact zero atom.
    pub fn zero_count(&self) -> u64 {
        self.atoms
            .first()
            .filter(|a| a.value == 0.0)
            .map_or(0, |a| a.count)
    }

    pub fn zero_mass(&self) -> f64 {
        self.zero_count() as f64 / self.total as f64
    }

    /// `E[X^m]`, summed over atoms in increasing order.
    pub fn moment(&self, m: u32) -> f64 {
        let s: NeumaierSum = self
            .atoms
            .iter()
            .map(|a| a.count as f64 * a.value.powi(m as i32))
            .collect();
        s.total() / self.total as f64
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let s: NeumaierSum = self
            .atoms
            .iter()
            .map(|a| a.count as f64 * (a.value - mu).powi(2))
            .collect();
        s.total() / self.total as f64
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.atoms.partition_point(|a| a.value <= x);
        let below: u64 = self.atoms[..n].iter().map(|a| a.count).sum();
        below as f64 / self.total as f64
    }

    pub fn min(&self) -> f64 {
        self.atoms[0].value
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].value
    }

    /// Histogram of the nonzero mass over `edges`; the zero atom is counted
    /// separately.
    pub fn histogram(&self, edges: &[f64]) -> Result<Histogram> {
        Histogram::new(self, edges)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|` with
/// right-continuous CDFs.
pub fn ks_distance(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (na, nb) = (a.total as f64, b.total as f64);
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (0u64, 0u64);
    let mut d: f64 = 0.0;
    while i < a.atoms.len() || j < b.atoms.len() {
        let x = match (a.atoms.get(i), b.atoms.get(j)) {
            (Some(p), Some(q)) => p.value.min(q.value),
            (Some(p), None) => p.value,
            (None, Some(q)) => q.value,
            (None, None) => unreachable!(),
        };
        while i < a.atoms.len() && a.atoms[i].value == x {
            ca += a.atoms[i].count;
            i += 1;
        }
        while j < b.atoms.len() && b.atoms[j].value == x {
            cb += b.atoms[j].count;
            j += 1;
        }
        d = d.max((ca as f64 / na - cb as f64 / nb).abs());
    }
    d
}

/// Binned view: bins `[e_i, e_{i+1})`, the last one closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub zero_atom: u64,
    /// Nonzero mass below the first edge.
    pub underflow: u64,
    /// Mass above the last edge.
    pub overflow: u64,
    pub total: u64,
}

impl Histogram {
    fn new(d: &EmpiricalDistribution, edges: &[f64]) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("histogram edges must be strictly increasing, at least two".into()));
        }
        let nb = edges.len() - 1;
        let mut h = Histogram {
            edges: edges.to_vec(),
            counts: vec![0; nb],
            zero_atom: 0,
            underflow: 0,
            overflow: 0,
            total: d.total,
        };
        for a in &d.atoms {
            let x = a.value;
            if x == 0.0 {
                h.zero_atom += a.count;
            } else if x < edges[0] {
                h.underflow += a.count;
            } else if x > edges[nb] {
                h.overflow += a.count;
            } else {
                let i = edges.partition_point(|&e| e <= x).min(nb) - 1;
                h.counts[i] += a.count;
            }
        }
        Ok(h)
    }

    /// `n` equal bins spanning `[lo, hi]`.
    pub fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    /// CSV with columns `bin_lo,bin_hi,count`. The zero atom is the row
    /// `0,0,count`; under- and overflow use infinite bounds.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bin_lo", "bin_hi", "count"])?;
        out.write_record(["0", "0", &self.zero_atom.to_string()])?;
        let nb = self.counts.len();
        if self.underflow > 0 {
            out.write_record(["-inf", &fmt_float(self.edges[0]), &self.underflow.to_string()])?;
        }
        for i in 0..nb {
            out.write_record([
                fmt_float(self.edges[i]),
                fmt_float(self.edges[i + 1]),
                self.counts[i].to_string(),
            ])?;
        }
        if self.overflow > 0 {
            out.write_record([&fmt_float(self.edges[nb]), "inf", &self.overflow.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt_float(x: f64) -> String {
    crate::output::sig15(x)
}
