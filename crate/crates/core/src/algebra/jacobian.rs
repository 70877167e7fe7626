//! Singular loci of generic members of a monomial family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::groebner::{groebner_basis_with, GroebnerLimits};
use super::hilbert::{hilbert_dim_deg, HilbertData};
use super::monomial::Monomial;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::lattice::{SimplexContext, SupportSet};

/// A member of the family with one seeded random nonzero coefficient per
/// support monomial.
pub fn generic_member<F: Field>(ctx: &SimplexContext, s: &SupportSet, field: &F, seed: u64) -> Result<Polynomial<F>> {
    ctx.check_support(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = s
        .iter()
        .map(|i| Ok((Monomial::from_exponents(&ctx.monomial(i).0)?, field.random_nonzero(&mut rng))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Polynomial::from_terms(field.clone(), ctx.nvars(), terms))
}

/// The partial derivatives; `f` itself is redundant by Euler's identity.
pub fn jacobian_ideal<F: Field>(f: &Polynomial<F>) -> Vec<Polynomial<F>> {
    (0..f.nvars()).map(|k| f.derivative(k)).collect()
}

/// `sum_k x_k * df/dx_k`.
pub fn euler_sum<F: Field>(f: &Polynomial<F>) -> Polynomial<F> {
    let n = f.nvars();
    (0..n).fold(Polynomial::zero(f.field().clone(), n), |acc, k| {
        acc.add(&f.derivative(k).mul_term(Monomial::var(k), &f.field().one()))
    })
}

pub fn singular_locus<F: Field>(f: &Polynomial<F>) -> Result<HilbertData> {
    singular_locus_with(f, GroebnerLimits::default())
}

pub fn singular_locus_with<F: Field>(f: &Polynomial<F>, limits: GroebnerLimits) -> Result<HilbertData> {
    if !f.is_homogeneous() {
        return Err(Error::NonHomogeneous);
    }
    let partials: Vec<Polynomial<F>> = jacobian_ideal(f).into_iter().filter(|p| !p.is_zero()).collect();
    if partials.is_empty() {
        // Zero or constant form: the whole space.
        return Ok(HilbertData { dimension: f.nvars() as i64 - 1, degree: 1 });
    }
    hilbert_dim_deg(&groebner_basis_with(&partials, limits)?)
}

/// Dimension and degree of the singular scheme of the seeded generic member.
pub fn jacobian_scheme<F: Field>(ctx: &SimplexContext, s: &SupportSet, field: &F, seed: u64) -> Result<HilbertData> {
    singular_locus(&generic_member(ctx, s, field, seed)?)
}

pub fn jacobian_scheme_with<F: Field>(
    ctx: &SimplexContext,
    s: &SupportSet,
    field: &F,
    seed: u64,
    limits: GroebnerLimits,
) -> Result<HilbertData> {
    singular_locus_with(&generic_member(ctx, s, field, seed)?, limits)
}

/// Quadric read back from a form: the cofactor of `x_cofactor`, keeping only
/// terms in `vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofactorQuadric {
    pub cofactor: usize,
    pub vars: Vec<usize>,
}

/// `x_0 = ... = x_{vanishing-1} = 0` plus quadrics taken from the member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusSpec {
    pub vanishing: usize,
    #[serde(default)]
    pub quadrics: Vec<CofactorQuadric>,
}

impl CofactorQuadric {
    pub fn read_back<F: Field>(&self, f: &Polynomial<F>) -> Result<Polynomial<F>> {
        let n = f.nvars();
        if self.cofactor >= n || self.vars.iter().any(|&v| v >= n) {
            return Err(Error::Unsupported(format!("quadric variables out of range for {n} variables")));
        }
        let allowed = |m: Monomial| (0..n).all(|k| m.exponent(k) == 0 || self.vars.contains(&k));
        let terms = f.terms().iter().filter_map(|(m, c)| {
            let q = m.without_var(self.cofactor)?;
            allowed(q).then(|| (q, c.clone()))
        });
        Ok(Polynomial::from_terms(f.field().clone(), n, terms.collect::<Vec<_>>()))
    }
}

impl LocusSpec {
    pub fn generators<F: Field>(&self, f: &Polynomial<F>) -> Result<Vec<Polynomial<F>>> {
        let n = f.nvars();
        if self.vanishing > n {
            return Err(Error::LengthMismatch { expected: n, got: self.vanishing });
        }
        let mut gens: Vec<Polynomial<F>> =
            (0..self.vanishing).map(|k| Polynomial::variable(f.field().clone(), n, k)).collect();
        for q in &self.quadrics {
            gens.push(q.read_back(f)?);
        }
        Ok(gens)
    }
}

/// Every partial derivative of `f` lies in the ideal generated by `locus`.
pub fn jacobian_in_locus<F: Field>(f: &Polynomial<F>, locus: &[Polynomial<F>]) -> Result<bool> {
    jacobian_in_locus_with(f, locus, GroebnerLimits::default())
}

pub fn jacobian_in_locus_with<F: Field>(
    f: &Polynomial<F>,
    locus: &[Polynomial<F>],
    limits: GroebnerLimits,
) -> Result<bool> {
    for g in locus {
        f.check_compatible(g)?;
    }
    let nonzero: Vec<Polynomial<F>> = locus.iter().filter(|g| !g.is_zero()).cloned().collect();
    let partials = jacobian_ideal(f);
    if nonzero.is_empty() {
        return Ok(partials.iter().all(|p| p.is_zero()));
    }
    let gb = groebner_basis_with(&nonzero, limits)?;
    for p in &partials {
        if !gb.contains(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certifies the claimed singular locus: the Jacobian ideal of the seeded
/// member is contained in the locus ideal.
pub fn verify_locus_equations<F: Field>(
    ctx: &SimplexContext,
    s: &SupportSet,
    locus: &LocusSpec,
    field: &F,
    seed: u64,
    limits: GroebnerLimits,
) -> Result<bool> {
    let f = generic_member(ctx, s, field, seed)?;
    jacobian_in_locus_with(&f, &locus.generators(&f)?, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{PrimeField, RationalField};
    use crate::lattice::build_simplex;

    fn fermat(ctx: &SimplexContext) -> SupportSet {
        let items: Vec<String> = (0..ctx.nvars()).map(|k| format!("x{k}^3")).collect();
        ctx.support_from_strs(&items).unwrap()
    }

    #[test]
    fn fermat_is_smooth() {
        let ctx = build_simplex(6, 3).unwrap();
        let h = jacobian_scheme(&ctx, &fermat(&ctx), &PrimeField::default(), 1).unwrap();
        assert_eq!(h.dimension, -1);
    }

    #[test]
    fn fermat_fails_locus_check() {
        let ctx = build_simplex(6, 3).unwrap();
        let spec = LocusSpec { vanishing: 6, quadrics: vec![] };
        assert!(!verify_locus_equations(&ctx, &fermat(&ctx), &spec, &PrimeField::default(), 1, GroebnerLimits::default()).unwrap());
    }

    #[test]
    fn euler_identity_small() {
        let ctx = build_simplex(3, 3).unwrap();
        let f = generic_member(&ctx, &ctx.full_support(), &RationalField, 9).unwrap();
        assert_eq!(euler_sum(&f), f.scale(&RationalField.from_i64(3)));
    }

    #[test]
    fn nodal_cubic_curve() {
        // x0*x1*x2 + x0^3 + x1^3: a nodal plane cubic, one ordinary node.
        let ctx = build_simplex(2, 3).unwrap();
        let s = ctx.support_from_strs(&["x0*x1*x2", "x0^3", "x1^3"]).unwrap();
        let h = jacobian_scheme(&ctx, &s, &RationalField, 3).unwrap();
        assert_eq!(h, HilbertData { dimension: 0, degree: 1 });
    }

    #[test]
    fn cofactor_read_back() {
        let ctx = build_simplex(2, 3).unwrap();
        let s = ctx.support_from_strs(&["x0*x1^2", "x0*x1*x2", "x0^2*x2", "x1^3"]).unwrap();
        let f = generic_member(&ctx, &s, &RationalField, 5).unwrap();
        let q = CofactorQuadric { cofactor: 0, vars: vec![1, 2] }.read_back(&f).unwrap();
        assert_eq!(q.len(), 2);
        assert!(q.terms().iter().all(|(m, _)| m.exponent(0) == 0 && m.degree() == 2));
    }
}

#[cfg(test)]
mod limit_tests {
    use super::*;
    use crate::algebra::field::RationalField;
    use crate::lattice::build_simplex;

    #[test]
    fn pair_budget_exhausts() {
        let ctx = build_simplex(3, 3).unwrap();
        let limits = GroebnerLimits { max_pairs: Some(2), max_coefficient_bits: None };
        let err = jacobian_scheme_with(&ctx, &ctx.full_support(), &RationalField, 1, limits).unwrap_err();
        assert!(matches!(err, Error::ResourceExhausted(_)));
    }

    #[test]
    fn coefficient_budget_exhausts() {
        let ctx = build_simplex(3, 3).unwrap();
        let limits = GroebnerLimits { max_pairs: None, max_coefficient_bits: Some(16) };
        let err = jacobian_scheme_with(&ctx, &ctx.full_support(), &RationalField, 1, limits).unwrap_err();
        assert_eq!(err.code(), "resource-exhausted");
    }
}
