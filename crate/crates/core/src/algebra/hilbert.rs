//! Hilbert series of monomial ideals, and the dimension and degree of the
//! projective scheme cut out by a homogeneous ideal.

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::groebner::GroebnerBasis;
use super::monomial::{Monomial, MAX_VARS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertData {
    /// Projective dimension; `-1` for the empty scheme.
    pub dimension: i64,
    /// Leading coefficient of the Hilbert polynomial times `dimension!`;
    /// `0` for the empty scheme.
    pub degree: u64,
}

/// Polynomial in `t` with integer coefficients, lowest degree first.
pub type SeriesNumerator = Vec<i128>;

fn trim(mut p: SeriesNumerator) -> SeriesNumerator {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[i128], b: &[i128]) -> SeriesNumerator {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_add(a: &[i128], b: &[i128]) -> SeriesNumerator {
    let mut out = vec![0i128; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(out)
}

/// `1 - t^d`.
fn one_minus_power(d: u32) -> SeriesNumerator {
    if d == 0 {
        return Vec::new();
    }
    let mut p = vec![0i128; d as usize + 1];
    p[0] = 1;
    p[d as usize] = -1;
    p
}

fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort();
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::with_capacity(gens.len());
    // Ascending order: a divisor always precedes its multiples.
    for g in gens {
        if !out.iter().any(|m| m.divides(g)) {
            out.push(g);
        }
    }
    out
}

/// Numerator `N(t)` of the Hilbert series `N(t) / (1 - t)^n` of the
/// quotient by the monomial ideal generated by `gens`.
pub fn hilbert_numerator(gens: &[Monomial]) -> SeriesNumerator {
    numerator(minimalize(gens.to_vec()))
}

fn numerator(gens: Vec<Monomial>) -> SeriesNumerator {
    if gens.is_empty() {
        return vec![1];
    }
    if gens[0] == Monomial::ONE {
        return Vec::new();
    }
    // Generators coprime to all others split off as factors.
    let (isolated, rest): (Vec<Monomial>, Vec<Monomial>) = gens
        .iter()
        .partition(|g| gens.iter().all(|h| h == *g || g.is_coprime(*h)));
    let mut factor: SeriesNumerator = vec![1];
    for g in &isolated {
        factor = poly_mul(&factor, &one_minus_power(g.degree()));
    }
    if rest.is_empty() {
        return factor;
    }

    // Pivot on the variable occurring in the most remaining generators.
    let pivot = (0..MAX_VARS)
        .max_by_key(|&k| (rest.iter().filter(|g| g.exponent(k) > 0).count(), std::cmp::Reverse(k)))
        .expect("at least one variable");
    // N(M) = N(M + (x)) + t * N(M : x)
    let mut plus: Vec<Monomial> = rest.iter().copied().filter(|g| g.exponent(pivot) == 0).collect();
    plus.push(Monomial::var(pivot));
    let colon: Vec<Monomial> = rest.iter().map(|g| g.without_var(pivot).unwrap_or(*g)).collect();
    let shifted = {
        let mut c = numerator(minimalize(colon));
        c.insert(0, 0);
        trim(c)
    };
    poly_mul(&factor, &poly_add(&numerator(minimalize(plus)), &shifted))
}

/// Dimension and degree from a Hilbert series numerator in `nvars`
/// variables.
pub fn dim_deg_from_numerator(numerator: &[i128], nvars: usize) -> HilbertData {
    let empty = HilbertData { dimension: -1, degree: 0 };
    let mut p = trim(numerator.to_vec());
    if p.is_empty() {
        return empty;
    }
    let mut krull = nvars;
    while krull > 0 && p.iter().sum::<i128>() == 0 {
        // Divide by (1 - t): coefficients of the quotient are prefix sums.
        let mut q = Vec::with_capacity(p.len() - 1);
        let mut s = 0i128;
        for c in &p[..p.len() - 1] {
            s += c;
            q.push(s);
        }
        p = trim(q);
        krull -= 1;
    }
    if krull == 0 {
        return empty;
    }
    HilbertData { dimension: krull as i64 - 1, degree: p.iter().sum::<i128>() as u64 }
}

/// Value of the Hilbert function at `t`, read off the series.
pub fn hilbert_function(numerator: &[i128], nvars: usize, t: u32) -> i128 {
    // Coefficient of s^t in N(s) / (1 - s)^n is sum_i N_i * C(t - i + n - 1, n - 1).
    numerator
        .iter()
        .enumerate()
        .filter(|(i, _)| *i as u32 <= t)
        .map(|(i, c)| {
            let m = (t as usize - i) + nvars - 1;
            c * binomial_i128(m, nvars.saturating_sub(1))
        })
        .sum()
}

fn binomial_i128(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i as i128 + 1))
}

pub fn hilbert_dim_deg<F: Field>(gb: &GroebnerBasis<F>) -> Result<HilbertData> {
    if !gb.is_homogeneous() {
        return Err(Error::NonHomogeneous);
    }
    Ok(dim_deg_from_numerator(&hilbert_numerator(&gb.leading_monomials()), gb.nvars()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::RationalField;
    use crate::algebra::groebner::groebner_basis;
    use crate::algebra::poly::Polynomial;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e).unwrap()
    }

    fn x(n: usize, k: usize) -> Polynomial<RationalField> {
        Polynomial::variable(RationalField, n, k)
    }

    #[test]
    fn coordinate_subspace() {
        let gb = groebner_basis(&[x(7, 0), x(7, 1)]).unwrap();
        assert_eq!(hilbert_dim_deg(&gb).unwrap(), HilbertData { dimension: 4, degree: 1 });
    }

    #[test]
    fn double_hyperplane() {
        let gb = groebner_basis(&[x(7, 0).pow(2)]).unwrap();
        assert_eq!(hilbert_dim_deg(&gb).unwrap(), HilbertData { dimension: 5, degree: 2 });
    }

    #[test]
    fn unit_and_irrelevant_ideals_are_empty() {
        let one = Polynomial::constant(RationalField, 3, RationalField.one());
        let gb = groebner_basis(&[one]).unwrap();
        assert_eq!(hilbert_dim_deg(&gb).unwrap().dimension, -1);
        let gb = groebner_basis(&[x(3, 0).pow(2), x(3, 1).pow(2), x(3, 2).pow(2)]).unwrap();
        assert_eq!(hilbert_dim_deg(&gb).unwrap(), HilbertData { dimension: -1, degree: 0 });
    }

    #[test]
    fn twisted_cubic_degree() {
        let v: Vec<_> = (0..4).map(|k| x(4, k)).collect();
        let gens = vec![
            v[0].mul(&v[2]).sub(&v[1].mul(&v[1])),
            v[1].mul(&v[3]).sub(&v[2].mul(&v[2])),
            v[0].mul(&v[3]).sub(&v[1].mul(&v[2])),
        ];
        let gb = groebner_basis(&gens).unwrap();
        assert_eq!(hilbert_dim_deg(&gb).unwrap(), HilbertData { dimension: 1, degree: 3 });
    }

    #[test]
    fn non_homogeneous_rejected() {
        let one = Polynomial::constant(RationalField, 2, RationalField.one());
        let gb = groebner_basis(&[x(2, 0).mul(&x(2, 1)).sub(&x(2, 1)), x(2, 1).pow(2).sub(&one)]).unwrap();
        if !gb.is_unit() {
            assert_eq!(hilbert_dim_deg(&gb).unwrap_err(), Error::NonHomogeneous);
        }
    }

    #[test]
    fn numerator_matches_counting() {
        let gens = [m(&[2, 1, 0]), m(&[0, 3, 1]), m(&[1, 0, 2]), m(&[0, 0, 4])];
        let n = hilbert_numerator(&gens);
        for t in 0..10 {
            let count = crate::algebra::monomial::monomials_of_degree(3, t)
                .into_iter()
                .filter(|mono| !gens.iter().any(|g| g.divides(*mono)))
                .count() as i128;
            assert_eq!(hilbert_function(&n, 3, t), count, "degree {t}");
        }
    }
}
