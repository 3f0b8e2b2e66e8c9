use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{mod_inverse, reduce_mod_p, RootCount, EXHAUSTIVE_THRESHOLD};
use crate::polyfam::IntPolynomial;
use crate::tuples::KTuple;

/// An ordered family of integer polynomials `(f_1, ..., f_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyFamily {
    members: Vec<IntPolynomial>,
    /// Irreducibility of degree >= 4 members is taken on trust when set.
    #[serde(default)]
    assume_irreducible: bool,
}

/// First violated primitivity condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ConstantMember { index: usize },
    RepeatedMember { first: usize, second: usize },
    NonPositiveLeading { index: usize },
    Content { index: usize, content: u128 },
    Reducible { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConstantMember { index } => write!(f, "member {index} is constant"),
            Violation::RepeatedMember { first, second } => {
                write!(f, "members {first} and {second} coincide")
            }
            Violation::NonPositiveLeading { index } => {
                write!(f, "member {index} has a non-positive leading coefficient")
            }
            Violation::Content { index, content } => {
                write!(f, "member {index} has content {content}")
            }
            Violation::Reducible { index } => write!(f, "member {index} is reducible"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitivity {
    Primitive,
    NotPrimitive(Violation),
}

impl Primitivity {
    pub fn is_primitive(&self) -> bool {
        matches!(self, Primitivity::Primitive)
    }
}

/// `nu_p(F)`: size of the union of the root sets of the members mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyNu {
    pub count: u64,
    /// Some member vanishes identically mod `p`; `count == p`.
    pub saturated: bool,
}

impl PolyFamily {
    pub fn new(members: Vec<IntPolynomial>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Degenerate("a family needs at least one member".into()));
        }
        Ok(Self {
            members,
            assume_irreducible: false,
        })
    }

    /// Linear family `(X + h_1, ..., X + h_k)` of a tuple.
    pub fn from_tuple(h: &KTuple) -> Self {
        let members = h
            .entries()
            .iter()
            .map(|&e| IntPolynomial::linear(1, e as i128).expect("monic"))
            .collect();
        Self {
            members,
            assume_irreducible: false,
        }
    }

    pub fn assuming_irreducible(mut self, yes: bool) -> Self {
        self.assume_irreducible = yes;
        self
    }

    pub fn assumes_irreducible(&self) -> bool {
        self.assume_irreducible
    }

    pub fn members(&self) -> &[IntPolynomial] {
        &self.members
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn is_linear(&self) -> bool {
        self.members.iter().all(|f| f.degree() == 1)
    }

    /// `peg(F) = prod deg f_j`.
    pub fn peg(&self) -> u64 {
        self.members.iter().map(|f| f.degree() as u64).product()
    }

    /// `c(F) = sum H(f_j)`.
    pub fn height_sum(&self) -> u128 {
        self.members.iter().map(IntPolynomial::height).sum()
    }

    /// Checks the primitivity conditions in the order: nonconstant members,
    /// distinct, positive leading coefficient, content 1, irreducible.
    pub fn primitivity(&self) -> Result<Primitivity> {
        use Primitivity::NotPrimitive;
        if let Some(index) = self.members.iter().position(|f| f.degree() == 0) {
            return Ok(NotPrimitive(Violation::ConstantMember { index }));
        }
        for (i, f) in self.members.iter().enumerate() {
            if let Some(j) = self.members[i + 1..].iter().position(|g| g == f) {
                return Ok(NotPrimitive(Violation::RepeatedMember {
                    first: i,
                    second: i + 1 + j,
                }));
            }
        }
        if let Some(index) = self.members.iter().position(|f| f.leading() <= 0) {
            return Ok(NotPrimitive(Violation::NonPositiveLeading { index }));
        }
        for (index, f) in self.members.iter().enumerate() {
            let content = f.content();
            if content != 1 {
                return Ok(NotPrimitive(Violation::Content { index, content }));
            }
        }
        for (index, f) in self.members.iter().enumerate() {
            let irreducible = match f.is_irreducible() {
                Err(Error::Capability(_)) if self.assume_irreducible => true,
                other => other?,
            };
            if !irreducible {
                return Ok(NotPrimitive(Violation::Reducible { index }));
            }
        }
        Ok(Primitivity::Primitive)
    }

    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.primitivity()?.is_primitive())
    }

    pub(crate) fn require_primitive(&self) -> Result<()> {
        match self.primitivity()? {
            Primitivity::Primitive => Ok(()),
            Primitivity::NotPrimitive(v) => {
                Err(Error::Domain(format!("family {self} is not primitive: {v}")))
            }
        }
    }

    /// Number of distinct polynomials among the members.
    pub fn distinct_member_count(&self) -> usize {
        self.members.iter().collect::<BTreeSet<_>>().len()
    }

    /// The composed family `(f_j(X + h_i))`, ordered by tuple index first:
    /// `f_1(X+h_1), ..., f_m(X+h_1), f_1(X+h_2), ...`.
    pub fn compose(&self, h: &KTuple) -> Result<PolyFamily> {
        let mut members = Vec::with_capacity(self.m() * h.k());
        for &hi in h.entries() {
            for f in &self.members {
                members.push(f.shift(hi as i128)?);
            }
        }
        Ok(PolyFamily {
            members,
            assume_irreducible: self.assume_irreducible,
        })
    }

    /// `nu_p(F)`.
    pub fn nu_p(&self, p: u64) -> Result<FamilyNu> {
        if !crate::numeric::is_prime_u64(p) || p > 1 << 31 {
            return Err(Error::Domain(format!("modulus {p} is not a prime <= 2^31")));
        }
        self.nu_p_prime(p)
    }

    /// `nu_p(F)` for a caller-guaranteed prime `p <= 2^31`.
    pub(crate) fn nu_p_prime(&self, p: u64) -> Result<FamilyNu> {
        if self.is_linear() && self.m() <= 32 {
            return Ok(self.nu_p_linear(p));
        }
        let mut linear_roots: Vec<u64> = Vec::with_capacity(self.m());
        let mut higher: Vec<Vec<u64>> = Vec::new();
        for f in &self.members {
            let r = reduce_mod_p(f.coeffs(), p);
            match r.len() {
                0 => {
                    return Ok(FamilyNu {
                        count: p,
                        saturated: true,
                    })
                }
                1 => {}
                2 => {
                    let root = if r[1] == 1 {
                        (p - r[0]) % p
                    } else {
                        (p - r[0]) % p * mod_inverse(r[1], p) % p
                    };
                    linear_roots.push(root);
                }
                _ => higher.push(r),
            }
        }
        let count = if higher.is_empty() {
            linear_roots.sort_unstable();
            linear_roots.dedup();
            linear_roots.len() as u64
        } else if p <= EXHAUSTIVE_THRESHOLD {
            (0..p)
                .filter(|&x| {
                    linear_roots.contains(&x)
                        || higher.iter().any(|g| crate::numeric::eval_mod(g, x, p) == 0)
                })
                .count() as u64
        } else {
            // Distinct roots of the product of all members.
            let mut prod: Vec<u64> = vec![1];
            for g in &higher {
                prod = crate::numeric::poly_mul_mod(&prod, g, p);
            }
            for &r in &linear_roots {
                prod = crate::numeric::poly_mul_mod(&prod, &[(p - r) % p, 1], p);
            }
            let coeffs: Vec<i128> = prod.iter().map(|&c| c as i128).collect();
            match crate::numeric::poly_roots_mod_p(&coeffs, p, crate::numeric::RootStrategy::Auto)? {
                RootCount::Roots(n) => n,
                RootCount::Saturated => unreachable!("product of nonzero polynomials over a field"),
            }
        };
        Ok(FamilyNu {
            count,
            saturated: false,
        })
    }
}

impl PolyFamily {
    fn nu_p_linear(&self, p: u64) -> FamilyNu {
        let mut roots = [0u64; 32];
        let mut n = 0;
        for f in &self.members {
            let c = f.coeffs();
            let a = c[1].rem_euclid(p as i128) as u64;
            let b = c[0].rem_euclid(p as i128) as u64;
            if a == 0 {
                if b == 0 {
                    return FamilyNu {
                        count: p,
                        saturated: true,
                    };
                }
                continue;
            }
            let neg_b = (p - b) % p;
            roots[n] = if a == 1 {
                neg_b
            } else {
                neg_b * mod_inverse(a, p) % p
            };
            n += 1;
        }
        let r = &mut roots[..n];
        r.sort_unstable();
        let distinct = if n == 0 {
            0
        } else {
            1 + r.windows(2).filter(|w| w[0] != w[1]).count() as u64
        };
        FamilyNu {
            count: distinct,
            saturated: false,
        }
    }
}

impl fmt::Display for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for PolyFamily {
    type Err = Error;

    /// Comma-separated polynomial expressions, e.g. `x, 2*x+1`. A member given
    /// as a coefficient list must be bracketed: `[7,0,1], x+1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut members = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => depth -= 1,
                ',' | ';' if depth == 0 => {
                    members.push(s[start..i].parse::<IntPolynomial>()?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(Error::Parse(format!("unbalanced brackets in family {s:?}")));
        }
        members.push(s[start..].parse::<IntPolynomial>()?);
        PolyFamily::new(members)
    }
}
