//! Linear coordinate changes acting on supports, and inclusion checks
//! between families.

pub mod chain;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::field::{format_rational, parse_rational, Field, RationalField};
use crate::algebra::monomial::Monomial;
use crate::algebra::poly::Polynomial;
use crate::enumerate::MaximalFamily;
use crate::error::{Error, Result};
use crate::lattice::{permutations_by_displacement, SimplexContext, SupportSet};
use crate::linalg::rank;

/// Invertible substitution `x_k -> sum_j matrix[k][j] * x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    matrix: Vec<Vec<BigRational>>,
    pub description: String,
}

fn integer_rows(m: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

impl Substitution {
    pub fn new(matrix: Vec<Vec<BigRational>>, description: impl Into<String>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedChain("substitution matrix must be square and nonempty".into()));
        }
        if rank(&integer_rows(&matrix), n) != n {
            return Err(Error::SingularSubstitution);
        }
        Ok(Substitution { matrix, description: description.into() })
    }

    pub fn from_strings(rows: &[Vec<String>], description: impl Into<String>) -> Result<Self> {
        let m = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, description)
    }

    pub fn identity(nvars: usize) -> Self {
        let m = (0..nvars)
            .map(|i| (0..nvars).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        Substitution { matrix: m, description: "identity".into() }
    }

    /// `x_k -> x_{perm[k]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for (k, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::MalformedChain(format!("permutation entry {p} out of range")));
            }
            m[k][p] = BigRational::one();
        }
        Self::new(m, format!("permutation {perm:?}"))
    }

    /// `x_var -> x_var + s * x_along`.
    pub fn shear(nvars: usize, var: usize, along: usize, s: BigRational) -> Result<Self> {
        if var >= nvars || along >= nvars || var == along {
            return Err(Error::MalformedChain(format!("bad shear x{var} -> x{var} + s*x{along}")));
        }
        let mut sub = Self::identity(nvars);
        sub.description = format!("x{var} -> x{var} + ({})*x{along}", format_rational(&s));
        sub.matrix[var][along] = s;
        Ok(sub)
    }

    pub fn nvars(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<BigRational>] {
        &self.matrix
    }

    pub fn matrix_strings(&self) -> Vec<Vec<String>> {
        self.matrix.iter().map(|r| r.iter().map(format_rational).collect()).collect()
    }

    /// Applying `self` and then `next` to a form.
    pub fn then(&self, next: &Substitution) -> Substitution {
        // f(M_self x) then x -> M_next x gives f(M_self M_next x).
        let n = self.nvars();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &self.matrix[i][k] * &next.matrix[k][j]))
                    .collect()
            })
            .collect();
        Substitution { matrix: m, description: format!("{}; {}", self.description, next.description) }
    }

    pub fn images<F: Field>(&self, field: &F) -> Result<Vec<Polynomial<F>>> {
        let n = self.nvars();
        self.matrix
            .iter()
            .map(|row| {
                let terms = row
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| Ok((Monomial::var(j), field.from_rational(c)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Polynomial::from_terms(field.clone(), n, terms))
            })
            .collect()
    }

    pub fn apply<F: Field>(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        if p.nvars() != self.nvars() {
            return Err(Error::VariableCountMismatch(p.nvars(), self.nvars()));
        }
        p.compose(&self.images(p.field())?)
    }
}

/// Support of a polynomial as a subset of the simplex.
pub fn support_of<F: Field>(ctx: &SimplexContext, p: &Polynomial<F>) -> Result<SupportSet> {
    if p.nvars() != ctx.nvars() {
        return Err(Error::VariableCountMismatch(p.nvars(), ctx.nvars()));
    }
    let mut s = ctx.empty_support();
    for (m, _) in p.terms() {
        s.insert(ctx.index_of_checked(&m.exponents(ctx.nvars()))?);
    }
    Ok(s)
}

/// Union of the supports of the transformed monomials of `j`.
pub fn support_image(ctx: &SimplexContext, j: &SupportSet, sigma: &Substitution) -> Result<SupportSet> {
    ctx.check_support(j)?;
    if sigma.nvars() != ctx.nvars() {
        return Err(Error::VariableCountMismatch(sigma.nvars(), ctx.nvars()));
    }
    let images = sigma.images(&RationalField)?;
    let mut out = ctx.empty_support();
    for i in j.iter() {
        let m = Monomial::from_exponents(&ctx.monomial(i).0)?;
        let mono = Polynomial::from_terms(RationalField, ctx.nvars(), [(m, BigRational::one())]);
        out = out.union(&support_of(ctx, &mono.compose(&images)?)?);
    }
    Ok(out)
}

/// Index maps of every coordinate permutation, fewest moved points first.
pub struct PermutationTable {
    perms: Vec<Vec<usize>>,
    actions: Vec<Vec<usize>>,
}

impl PermutationTable {
    pub fn new(ctx: &SimplexContext) -> Self {
        let perms = permutations_by_displacement(ctx.nvars());
        let actions = perms.par_iter().map(|p| ctx.permutation_action(p)).collect();
        PermutationTable { perms, actions }
    }

    fn image(&self, k: usize, s: &SupportSet) -> SupportSet {
        let mut out = SupportSet::empty(s.universe());
        for i in s.iter() {
            out.insert(self.actions[k][i]);
        }
        out
    }

    /// First permutation, in table order, mapping `a` into `b`.
    pub fn search(&self, a: &SupportSet, b: &SupportSet) -> Option<Vec<usize>> {
        if a.len() > b.len() {
            return None;
        }
        (0..self.perms.len()).find(|&k| self.image(k, a).is_subset(b)).map(|k| self.perms[k].clone())
    }
}

/// A coordinate permutation carrying `jk` into `jl`, if one exists. `None`
/// does not rule out inclusion under general linear substitutions.
pub fn permutation_inclusion_search(
    ctx: &SimplexContext,
    jk: &SupportSet,
    jl: &SupportSet,
) -> Result<Option<Vec<usize>>> {
    ctx.check_support(jk)?;
    ctx.check_support(jl)?;
    Ok(PermutationTable::new(ctx).search(jk, jl))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScreenHit {
    pub from: usize,
    pub to: usize,
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScreenReport {
    pub families: Vec<usize>,
    pub pairs_checked: usize,
    pub hits: Vec<ScreenHit>,
}

/// Permutation-level inclusions among the families `keep` (1-based ids into
/// `atlas`).
pub fn antichain_screen(ctx: &SimplexContext, atlas: &[MaximalFamily], keep: &[usize]) -> Result<ScreenReport> {
    for &id in keep {
        if id == 0 || id > atlas.len() {
            return Err(Error::UnknownFamily(id));
        }
        ctx.check_support(&atlas[id - 1].support)?;
    }
    let table = PermutationTable::new(ctx);
    let pairs: Vec<(usize, usize)> =
        keep.iter().flat_map(|&a| keep.iter().filter(move |&&b| b != a).map(move |&b| (a, b))).collect();
    let hits: Vec<ScreenHit> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            table
                .search(&atlas[a - 1].support, &atlas[b - 1].support)
                .map(|permutation| ScreenHit { from: a, to: b, permutation })
        })
        .collect();
    Ok(ScreenReport { families: keep.to_vec(), pairs_checked: pairs.len(), hits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_simplex;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn identity_fixes_support() {
        let ctx = build_simplex(6, 3).unwrap();
        let j = ctx.support_from_strs(&["x0^3", "x1*x2*x6", "x5^2*x4"]).unwrap();
        assert_eq!(support_image(&ctx, &j, &Substitution::identity(7)).unwrap(), j);
    }

    #[test]
    fn shear_expands_binomially() {
        let ctx = build_simplex(6, 3).unwrap();
        let j = ctx.support_from_strs(&["x0*x5^2"]).unwrap();
        let s = Substitution::shear(7, 5, 6, q(1)).unwrap();
        let want = ctx.support_from_strs(&["x0*x5^2", "x0*x5*x6", "x0*x6^2"]).unwrap();
        assert_eq!(support_image(&ctx, &j, &s).unwrap(), want);
    }

    #[test]
    fn transposition_moves_monomial() {
        let ctx = build_simplex(6, 3).unwrap();
        let j = ctx.support_from_strs(&["x0^3"]).unwrap();
        let s = Substitution::permutation(&[6, 1, 2, 3, 4, 5, 0]).unwrap();
        assert_eq!(support_image(&ctx, &j, &s).unwrap(), ctx.support_from_strs(&["x6^3"]).unwrap());
        let found = permutation_inclusion_search(&ctx, &j, &ctx.support_from_strs(&["x6^3"]).unwrap()).unwrap();
        assert_eq!(found, Some(vec![6, 1, 2, 3, 4, 5, 0]));
    }

    #[test]
    fn cancellation_inside_one_monomial_is_exact() {
        // (x0 + x1)(x0 - x1) has no x0*x1 term.
        let ctx = build_simplex(2, 2).unwrap();
        let j = ctx.support_from_strs(&["x0*x1"]).unwrap();
        let m = vec![vec![q(1), q(1), q(0)], vec![q(1), q(-1), q(0)], vec![q(0), q(0), q(1)]];
        let s = Substitution::new(m, "test").unwrap();
        assert_eq!(support_image(&ctx, &j, &s).unwrap(), ctx.support_from_strs(&["x0^2", "x1^2"]).unwrap());
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(Substitution::new(m, "bad").unwrap_err(), Error::SingularSubstitution);
    }

    #[test]
    fn then_matches_sequential_application() {
        let ctx = build_simplex(2, 3).unwrap();
        let a = Substitution::shear(3, 0, 1, q(2)).unwrap();
        let b = Substitution::permutation(&[1, 2, 0]).unwrap();
        let j = ctx.support_from_strs(&["x0^2*x2", "x1^3"]).unwrap();
        let two_steps = support_image(&ctx, &support_image(&ctx, &j, &a).unwrap(), &b).unwrap();
        assert_eq!(support_image(&ctx, &j, &a.then(&b)).unwrap(), two_steps);
    }
}
