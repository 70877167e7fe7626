//! Monomials in at most seven variables packed into one `u64`.
//!
//! Byte `k` holds the exponent of `x_k` and byte 7 the total degree. Every
//! byte stays below 128, which makes divisibility a single borrow test.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 7;
pub const MAX_DEGREE: u32 = 127;

const HIGH_BITS: u64 = 0x8080_8080_8080_8080;
const EXPONENT_MASK: u64 = 0x00ff_ffff_ffff_ffff;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(k: usize) -> Monomial {
        assert!(k < MAX_VARS);
        Monomial((1u64 << (8 * k)) | (1u64 << 56))
    }

    pub fn from_exponents(e: &[u32]) -> Result<Monomial> {
        if e.len() > MAX_VARS {
            return Err(Error::Unsupported(format!("at most {MAX_VARS} variables")));
        }
        let deg: u32 = e.iter().sum();
        if deg > MAX_DEGREE {
            return Err(Error::Unsupported(format!("monomial degree above {MAX_DEGREE}")));
        }
        let mut v = (deg as u64) << 56;
        for (k, &x) in e.iter().enumerate() {
            v |= (x as u64) << (8 * k);
        }
        Ok(Monomial(v))
    }

    #[inline]
    pub fn exponent(self, k: usize) -> u32 {
        ((self.0 >> (8 * k)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> 56) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|k| self.exponent(k)).collect()
    }

    #[inline]
    pub fn mul(self, o: Monomial) -> Monomial {
        debug_assert!(self.degree() + o.degree() <= MAX_DEGREE);
        Monomial(self.0 + o.0)
    }

    /// `self` divides `o`.
    #[inline]
    pub fn divides(self, o: Monomial) -> bool {
        ((o.0 | HIGH_BITS) - self.0) & HIGH_BITS == HIGH_BITS
    }

    /// `o / self`, assuming `self` divides `o`.
    #[inline]
    pub fn quotient_of(self, o: Monomial) -> Monomial {
        debug_assert!(self.divides(o));
        Monomial(o.0 - self.0)
    }

    pub fn lcm(self, o: Monomial) -> Monomial {
        let mut v = 0u64;
        let mut deg = 0u64;
        for k in 0..MAX_VARS {
            let e = self.exponent(k).max(o.exponent(k)) as u64;
            deg += e;
            v |= e << (8 * k);
        }
        Monomial(v | (deg << 56))
    }

    pub fn is_coprime(self, o: Monomial) -> bool {
        (0..MAX_VARS).all(|k| self.exponent(k) == 0 || o.exponent(k) == 0)
    }

    /// Decrements the exponent of `x_k`, or `None` if it is zero.
    pub fn without_var(self, k: usize) -> Option<Monomial> {
        (self.exponent(k) > 0).then(|| Monomial(self.0 - Monomial::var(k).0))
    }

    pub fn fmt_vars(self, nvars: usize) -> String {
        let parts: Vec<String> = (0..nvars)
            .filter(|&k| self.exponent(k) > 0)
            .map(|k| match self.exponent(k) {
                1 => format!("x{k}"),
                e => format!("x{k}^{e}"),
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Degree reverse lexicographic order with `x_0 > x_1 > ...`.
impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| (o.0 & EXPONENT_MASK).cmp(&(self.0 & EXPONENT_MASK)))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_vars(MAX_VARS))
    }
}

/// All monomials of degree `deg` in `nvars` variables, ascending.
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if k + 1 == nvars {
            cur[k] = left;
            out.push(Monomial::from_exponents(cur).expect("bounded degree"));
            return;
        }
        for e in 0..=left {
            cur[k] = e;
            rec(nvars, k + 1, left - e, cur, out);
        }
    }
    if nvars == 0 {
        return if deg == 0 { vec![Monomial::ONE] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(nvars, 0, deg, &mut vec![0; nvars], &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e).unwrap()
    }

    #[test]
    fn degrevlex_examples() {
        assert!(m(&[2, 0, 0]) > m(&[1, 1, 0]));
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 1]));
        assert!(m(&[1, 1, 0]) > m(&[0, 2, 0]));
        assert!(m(&[0, 0, 3]) > m(&[1, 1, 0]));
        assert!(m(&[0, 0, 0]) < m(&[0, 0, 1]));
    }

    #[test]
    fn divisibility_and_lcm() {
        let a = m(&[1, 2, 0, 0]);
        let b = m(&[2, 2, 1, 0]);
        assert!(a.divides(b));
        assert!(!b.divides(a));
        assert_eq!(a.quotient_of(b), m(&[1, 0, 1, 0]));
        assert_eq!(a.lcm(m(&[0, 3, 0, 1])), m(&[1, 3, 0, 1]));
        assert!(m(&[1, 0, 0]).is_coprime(m(&[0, 4, 1])));
        assert!(Monomial::ONE.divides(a));
        assert!(!m(&[0, 0, 0, 1]).divides(a));
    }

    #[test]
    fn graded_piece_sizes() {
        assert_eq!(monomials_of_degree(7, 3).len(), 84);
        assert_eq!(monomials_of_degree(4, 12).len(), 455);
        assert_eq!(monomials_of_degree(3, 0), vec![Monomial::ONE]);
    }
}
