use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polyfam::{IntPolynomial, PolyFamily};
use crate::tuples::KTuple;

fn sylvester(f: &IntPolynomial, g: &IntPolynomial) -> Vec<Vec<BigInt>> {
    let (m, n) = (f.degree(), g.degree());
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (i, &c) in f.coeffs().iter().rev().enumerate() {
            row[shift + i] = BigInt::from(c);
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (i, &c) in g.coeffs().iter().rev().enumerate() {
            row[shift + i] = BigInt::from(c);
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free (Bareiss) determinant.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Resultant `res(f, g)`, the determinant of the Sylvester matrix.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> BigInt {
    bareiss_determinant(sylvester(f, g))
}

/// `D_1(h) = |prod res(f_j(X + h_i), f_j'(X + h_i'))|` over ordered pairs of
/// distinct positions of the composed family. Zero exactly when two
/// composed members share a complex root.
pub fn composed_resultant_product(f: &PolyFamily, h: &KTuple) -> Result<BigInt> {
    if !h.is_distinct() {
        return Err(Error::Degenerate(format!("tuple {:?} has repeated entries", h.entries())));
    }
    let composed = f.compose(h)?;
    let members = composed.members();
    let mut acc = BigInt::from(1);
    for (a, fa) in members.iter().enumerate() {
        for (b, fb) in members.iter().enumerate() {
            if a == b {
                continue;
            }
            let r = resultant(fa, fb);
            if r.is_zero() {
                return Ok(BigInt::zero());
            }
            acc *= r;
        }
    }
    Ok(acc.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    // Leibniz expansion over all permutations, independent of elimination.
    fn leibniz(a: &[Vec<BigInt>]) -> BigInt {
        fn rec(a: &[Vec<BigInt>], row: usize, used: &mut Vec<bool>, sign: i32) -> BigInt {
            let n = a.len();
            if row == n {
                return BigInt::from(sign);
            }
            let mut total = BigInt::zero();
            let mut inversions_before = 0;
            for col in 0..n {
                if used[col] {
                    continue;
                }
                if !a[row][col].is_zero() {
                    used[col] = true;
                    let s = if inversions_before % 2 == 0 { sign } else { -sign };
                    total += &a[row][col] * rec(a, row + 1, used, s);
                    used[col] = false;
                }
                inversions_before += 1;
            }
            total
        }
        rec(a, 0, &mut vec![false; a.len()], 1)
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p("x+1"), &p("x+3")), BigInt::from(2));
        assert_eq!(resultant(&p("x^2+1"), &p("x^2+1")), BigInt::zero());
        let (f, g) = (p("x^2+7"), p("x^2+4*x+11"));
        assert_eq!(resultant(&f, &g), leibniz(&sylvester(&f, &g)));
        // closed form for two quadratics: (a2 b0 - a0 b2)^2 - (a2 b1 - a1 b2)(a1 b0 - a0 b1)
        assert_eq!(resultant(&f, &g), BigInt::from(128));
    }

    #[test]
    fn bareiss_matches_leibniz() {
        let polys = ["x^3-2*x+5", "3*x^2+x-4", "x+7", "2*x^3+x^2-x+1", "x^2+1"];
        for a in polys {
            for b in polys {
                let (f, g) = (p(a), p(b));
                assert_eq!(resultant(&f, &g), leibniz(&sylvester(&f, &g)), "{a} / {b}");
            }
        }
    }

    #[test]
    fn d1_zero_iff_imprimitive() {
        use crate::polyfam::composed_is_primitive;
        use crate::tuples::enumerate_distinct;
        for fam in ["x,x+2", "x^2+7,x^2+4*x+11"] {
            let f: PolyFamily = fam.parse().unwrap();
            for h in enumerate_distinct(2, 20).unwrap().iter() {
                let d1 = composed_resultant_product(&f, &h).unwrap();
                assert_eq!(d1.is_zero(), !composed_is_primitive(&f, &h).unwrap(), "{fam} {h:?}");
            }
        }
    }
}
