use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{poly_roots_mod_p, RootCount, RootStrategy};

/// Dense integer polynomial, coefficients in ascending degree order with a
/// nonzero leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

fn overflow(what: &str) -> Error {
    Error::Arithmetic(format!("coefficient overflow in {what}"))
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Domain("the zero polynomial is not allowed".into()));
        }
        Ok(Self { coeffs })
    }

    /// `a*X + b`
    pub fn linear(a: i128, b: i128) -> Result<Self> {
        Self::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i128 {
        *self.coeffs.last().unwrap()
    }

    /// `H(f) = max |a_i|`.
    pub fn height(&self) -> u128 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap()
    }

    /// gcd of the coefficients.
    pub fn content(&self) -> u128 {
        self.coeffs
            .iter()
            .fold(0u128, |g, c| g.gcd(&c.unsigned_abs()))
    }

    pub fn eval(&self, x: i128) -> Result<i128> {
        self.coeffs.iter().rev().try_fold(0i128, |acc, &c| {
            acc.checked_mul(x)
                .and_then(|v| v.checked_add(c))
                .ok_or_else(|| overflow("evaluation"))
        })
    }

    /// `f(X + t)` by Horner's scheme.
    pub fn shift(&self, t: i128) -> Result<Self> {
        let mut out: Vec<i128> = Vec::with_capacity(self.coeffs.len());
        for &c in self.coeffs.iter().rev() {
            // out <- out * (X + t) + c
            let mut next = vec![0i128; out.len() + 1];
            for (i, &a) in out.iter().enumerate() {
                next[i + 1] = next[i + 1].checked_add(a).ok_or_else(|| overflow("shift"))?;
                let at = a.checked_mul(t).ok_or_else(|| overflow("shift"))?;
                next[i] = next[i].checked_add(at).ok_or_else(|| overflow("shift"))?;
            }
            next[0] = next[0].checked_add(c).ok_or_else(|| overflow("shift"))?;
            out = next;
        }
        Self::new(out)
    }

    /// Distinct roots modulo a prime.
    pub fn roots_mod_p(&self, p: u64) -> Result<RootCount> {
        poly_roots_mod_p(&self.coeffs, p, RootStrategy::Auto)
    }

    /// Irreducibility over the rationals for degree <= 3, assuming content 1.
    /// Higher degree is a capability error.
    pub fn is_irreducible(&self) -> Result<bool> {
        match self.degree() {
            0 => Ok(false),
            1 => Ok(true),
            2 => {
                let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
                let disc = b
                    .checked_mul(b)
                    .and_then(|bb| a.checked_mul(c).and_then(|ac| ac.checked_mul(4)).and_then(|ac4| bb.checked_sub(ac4)))
                    .ok_or_else(|| overflow("discriminant"))?;
                if disc < 0 {
                    return Ok(true);
                }
                let r = disc.sqrt();
                Ok(r * r != disc)
            }
            3 => Ok(!self.has_rational_root()?),
            d => Err(Error::Capability(format!(
                "irreducibility test for degree {d} is not implemented; assert it explicitly"
            ))),
        }
    }

    fn has_rational_root(&self) -> Result<bool> {
        let a0 = self.coeffs[0];
        if a0 == 0 {
            return Ok(true);
        }
        let lead = self.leading();
        let nums = divisors(a0.unsigned_abs())?;
        let dens = divisors(lead.unsigned_abs())?;
        for &q in &dens {
            for &p in &nums {
                for sign in [1i128, -1] {
                    // q^d f(p/q) = sum a_i p^i q^(d-i)
                    let (p, q) = (sign * p as i128, q as i128);
                    let d = self.degree() as u32;
                    let mut total = 0i128;
                    let mut ok = true;
                    for (i, &a) in self.coeffs.iter().enumerate() {
                        let term = p
                            .checked_pow(i as u32)
                            .and_then(|pi| q.checked_pow(d - i as u32).and_then(|qd| pi.checked_mul(qd)))
                            .and_then(|t| t.checked_mul(a))
                            .and_then(|t| total.checked_add(t));
                        match term {
                            Some(t) => total = t,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        return Err(overflow("rational root test"));
                    }
                    if total == 0 {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

fn divisors(n: u128) -> Result<Vec<u128>> {
    const LIMIT: u128 = 1_000_000_000_000;
    if n > LIMIT {
        return Err(Error::Capability(format!(
            "rational root test needs divisors of {n} > {LIMIT}"
        )));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let body = match (e, mag) {
                (0, m) => m.to_string(),
                (1, 1) => "x".to_string(),
                (1, m) => format!("{m}*x"),
                (e, 1) => format!("x^{e}"),
                (e, m) => format!("{m}*x^{e}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl From<IntPolynomial> for String {
    fn from(p: IntPolynomial) -> Self {
        p.to_string()
    }
}

impl TryFrom<String> for IntPolynomial {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Accepts either a coefficient list `a0,a1,...,ad` (optionally in
    /// brackets) or an expression such as `3*x^2 - x + 7`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let inner = compact
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .unwrap_or(&compact);
        if inner.contains(',') || compact.starts_with('[') {
            let coeffs = inner
                .split(',')
                .map(|t| {
                    t.parse::<i128>()
                        .map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::new(coeffs);
        }
        parse_expression(&compact)
    }
}

fn parse_expression(s: &str) -> Result<IntPolynomial> {
    let bad = |msg: &str| Error::Parse(format!("{msg} in polynomial {s:?}"));
    let mut coeffs: Vec<i128> = Vec::new();
    let bytes = s.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let mut sign = 1i128;
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                sign = -1;
                pos += 1
            }
            _ if pos > 0 => return Err(bad("expected + or -")),
            _ => {}
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
            pos += 1;
        }
        let term = &s[start..pos];
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (coef, exp) = parse_term(term).ok_or_else(|| bad(&format!("malformed term {term:?}")))?;
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        let c = coef.checked_mul(sign).ok_or_else(|| overflow("parse"))?;
        coeffs[exp] = coeffs[exp].checked_add(c).ok_or_else(|| overflow("parse"))?;
    }
    IntPolynomial::new(coeffs)
}

fn parse_term(term: &str) -> Option<(i128, usize)> {
    let lower = term.to_ascii_lowercase();
    let Some(xpos) = lower.find('x') else {
        return lower.parse().ok().map(|c| (c, 0));
    };
    let head = lower[..xpos].strip_suffix('*').unwrap_or(&lower[..xpos]);
    let coef = if head.is_empty() { 1 } else { head.parse().ok()? };
    let tail = &lower[xpos + 1..];
    let exp = if tail.is_empty() {
        1
    } else {
        tail.strip_prefix('^')?.parse().ok()?
    };
    Some((coef, exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn both_syntaxes_agree() {
        assert_eq!(p("x^2+7"), p("7,0,1"));
        assert_eq!(p("[7,0,1]"), p("X^2 + 7"));
        assert_eq!(p("3*x^2 - x + 7").coeffs(), &[7, -1, 3]);
        assert_eq!(p("-x+2x^3").coeffs(), &[0, -1, 0, 2]);
        assert_eq!(p("x").coeffs(), &[0, 1]);
        assert_eq!(p("5").coeffs(), &[5]);
    }

    #[test]
    fn parse_errors() {
        for s in ["", "x^", "2**x", "x+", "x^2+-", "y", "1,,2", "0", "x-x"] {
            assert!(s.parse::<IntPolynomial>().is_err(), "{s:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["x^2+4*x+5", "2*x+1", "-3*x^3+x-1", "x", "7"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn shift_expands() {
        assert_eq!(p("x^2+1").shift(2).unwrap(), p("x^2+4*x+5"));
        assert_eq!(p("2*x+1").shift(4).unwrap(), p("2*x+9"));
        assert!(IntPolynomial::new(vec![1, i128::MAX / 2]).unwrap().shift(4).is_err());
    }

    #[test]
    fn height_and_content() {
        assert_eq!(p("2*x+4").content(), 2);
        assert_eq!(p("-7*x^2+3").height(), 7);
    }

    #[test]
    fn irreducibility() {
        assert!(p("x^2+1").is_irreducible().unwrap());
        assert!(!p("x^2-1").is_irreducible().unwrap());
        assert!(!p("4*x^2+4*x+1").is_irreducible().unwrap());
        assert!(p("x^3-2").is_irreducible().unwrap());
        assert!(!p("2*x^3-x^2-2*x+1").is_irreducible().unwrap()); // (2x-1)(x-1)(x+1)
        assert!(!p("x^3+x").is_irreducible().unwrap());
        assert!(matches!(p("x^4+1").is_irreducible(), Err(Error::Capability(_))));
    }

    proptest! {
        #[test]
        fn shift_agrees_with_evaluation(
            c in proptest::collection::vec(-20i128..20, 1..5),
            t in -30i128..30,
            x in -30i128..30,
        ) {
            prop_assume!(c.iter().any(|&v| v != 0));
            let f = IntPolynomial::new(c).unwrap();
            prop_assert_eq!(f.shift(t).unwrap().eval(x).unwrap(), f.eval(x + t).unwrap());
        }

        #[test]
        fn text_round_trip(c in proptest::collection::vec(-1000i128..1000, 1..6)) {
            prop_assume!(c.iter().any(|&v| v != 0));
            let f = IntPolynomial::new(c).unwrap();
            prop_assert_eq!(f.to_string().parse::<IntPolynomial>().unwrap(), f);
        }
    }
}
