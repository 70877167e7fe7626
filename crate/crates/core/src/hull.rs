//! Position of the barycenter relative to the convex hull of a support, and
//! destabilizing weight vectors.
//!
//! [`hull_locate`] works in the space of convex-combination coefficients;
//! [`cone_witness`] works in the space of weight vectors. The two are dual to
//! each other and are computed by separate linear programs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{SimplexContext, SupportSet, WeightVector};
use crate::linalg::{kernel_basis, rank};
use crate::lp::{LinearProgram, LpOutcome, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullVerdict {
    Outside,
    Boundary,
    RelativeInterior,
}

/// Verdict plus exact certificates.
///
/// * `Outside`: `separating` pairs strictly positively with every member.
/// * `Boundary`: `combination` writes the barycenter as a convex combination
///   and `separating` pairs nonnegatively with every member.
/// * `RelativeInterior`: `combination` uses every member with a positive
///   coefficient and the members span the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct HullLocation {
    pub verdict: HullVerdict,
    pub separating: Option<WeightVector>,
    pub combination: Option<Vec<(usize, BigRational)>>,
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn point_rows(ctx: &SimplexContext, s: &SupportSet) -> Vec<Vec<BigInt>> {
    s.iter().map(|i| ctx.monomial(i).0.iter().map(|&e| BigInt::from(e)).collect()).collect()
}

/// Clears denominators of a rational vector and divides by the gcd, keeping
/// the direction (and so the sign of every pairing).
fn integral_direction(v: &[BigRational]) -> Result<WeightVector> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<i64> = v
        .iter()
        .map(|x| {
            (x.numer() * (&l / x.denom()))
                .to_i64()
                .ok_or_else(|| Error::Internal("weight vector does not fit in i64".into()))
        })
        .collect::<Result<_>>()?;
    let g = ints.iter().fold(0i64, |g, &w| g.gcd(&w));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    WeightVector::new(ints.iter().map(|w| w / g).collect())
}

fn check_nonempty(ctx: &SimplexContext, s: &SupportSet) -> Result<()> {
    ctx.check_support(s)?;
    if s.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(())
}

pub fn hull_locate(ctx: &SimplexContext, s: &SupportSet) -> Result<HullLocation> {
    check_nonempty(ctx, s)?;
    let members: Vec<usize> = s.iter().collect();
    let nv = ctx.nvars();
    let scale = big(nv as i64);
    let d = big(ctx.d() as i64);

    // sum_i lambda_i * (n+1) * i = d * 1, lambda >= 0.
    let mut member_lp = LinearProgram::new(members.len());
    for k in 0..nv {
        let coeffs = members.iter().map(|&i| &scale * ctx.monomial(i).0[k]).collect();
        member_lp.push(coeffs, Relation::Eq, d.clone());
    }
    let lambda = match member_lp.solve() {
        LpOutcome::Infeasible { farkas } => {
            // z . i >= 0 on the support and wt(z) < 0; shifting by the mean
            // gives a weight-0 vector pairing strictly positively.
            let wt: BigRational = farkas.iter().sum();
            let r: Vec<BigRational> = farkas
                .iter()
                .map(|z| z * BigRational::from_integer(scale.clone()) - &wt)
                .collect();
            let r = integral_direction(&r)?;
            return Ok(HullLocation { verdict: HullVerdict::Outside, separating: Some(r), combination: None });
        }
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Unbounded => return Err(Error::Internal("feasibility LP unbounded".into())),
    };

    // Maximize eps with lambda_i = mu_i + eps, mu >= 0.
    let full_rank = rank(&point_rows(ctx, s), nv) == nv;
    let m = members.len();
    let mut eps_lp = LinearProgram::new(m + 1);
    eps_lp.objective[m] = big(1);
    for k in 0..nv {
        let mut coeffs: Vec<BigInt> = members.iter().map(|&i| &scale * ctx.monomial(i).0[k]).collect();
        let col_sum: u32 = members.iter().map(|&i| ctx.monomial(i).0[k]).sum();
        coeffs.push(&scale * col_sum);
        eps_lp.push(coeffs, Relation::Eq, d.clone());
    }
    let LpOutcome::Optimal { x: mu, value: eps } = eps_lp.solve() else {
        return Err(Error::Internal("interior LP not optimal".into()));
    };
    if full_rank && eps.is_positive() {
        let combination = members.iter().zip(&mu).map(|(&i, v)| (i, v + &eps)).collect();
        return Ok(HullLocation {
            verdict: HullVerdict::RelativeInterior,
            separating: None,
            combination: Some(combination),
        });
    }

    let separating = if !full_rank {
        let mut rows = point_rows(ctx, s);
        rows.push(vec![BigInt::one(); nv]);
        let kernel = kernel_basis(&rows, nv);
        let v = kernel.first().ok_or_else(|| Error::Internal("expected a nontrivial kernel".into()))?;
        let v: Vec<BigRational> = v.iter().cloned().map(BigRational::from_integer).collect();
        integral_direction(&v)?
    } else {
        cone_witness(ctx, s, false)?
            .ok_or_else(|| Error::Internal("boundary point without supporting hyperplane".into()))?
    };
    let combination = members.into_iter().zip(lambda).filter(|(_, v)| !v.is_zero()).collect();
    Ok(HullLocation { verdict: HullVerdict::Boundary, separating: Some(separating), combination: Some(combination) })
}

/// A nonzero weight-0 vector pairing nonnegatively (positively when
/// `strict`) with every member of `s`.
pub fn cone_witness(ctx: &SimplexContext, s: &SupportSet, strict: bool) -> Result<Option<WeightVector>> {
    check_nonempty(ctx, s)?;
    let nv = ctx.nvars();
    let d = ctx.d() as i64;
    // Variables u_k = r_k + 1 in [0, 2], then (strict only) v = t + d.
    let nvars = if strict { nv + 1 } else { nv };
    let mut lp = LinearProgram::new(nvars);
    for i in s.iter() {
        let mut coeffs: Vec<BigInt> = ctx.monomial(i).0.iter().map(|&e| BigInt::from(e)).collect();
        if strict {
            // r . i >= t  <=>  sum_k i_k u_k - v >= 0
            coeffs.push(big(-1));
            lp.push(coeffs, Relation::Ge, big(0));
        } else {
            // r . i >= 0  <=>  sum_k i_k u_k >= d
            lp.push(coeffs, Relation::Ge, big(d));
        }
    }
    let mut weight_row = vec![big(1); nv];
    if strict {
        weight_row.push(big(0));
    }
    lp.push(weight_row, Relation::Eq, big(nv as i64));
    for k in 0..nv {
        let mut row = vec![big(0); nvars];
        row[k] = big(1);
        lp.push(row, Relation::Le, big(2));
    }
    if strict {
        lp.objective[nv] = big(1);
    } else {
        for i in s.iter() {
            for (k, &e) in ctx.monomial(i).0.iter().enumerate() {
                lp.objective[k] += e;
            }
        }
    }
    let LpOutcome::Optimal { x, value } = lp.solve() else {
        return Err(Error::Internal("cone LP not optimal".into()));
    };
    let threshold = if strict { d } else { d * s.len() as i64 };
    if value > BigRational::from_integer(big(threshold)) {
        let r: Vec<BigRational> = x[..nv].iter().map(|u| u - BigRational::one()).collect();
        return integral_direction(&r).map(Some);
    }
    if strict {
        return Ok(None);
    }
    // Every feasible r pairs to zero with the support; a nonzero one exists
    // iff the support and the all-ones vector do not span.
    let mut rows = point_rows(ctx, s);
    rows.push(vec![BigInt::one(); nv]);
    match kernel_basis(&rows, nv).first() {
        None => Ok(None),
        Some(v) => {
            let v: Vec<BigRational> = v.iter().cloned().map(BigRational::from_integer).collect();
            integral_direction(&v).map(Some)
        }
    }
}

/// Re-checks a witness by raw pairings.
pub fn witness_holds(ctx: &SimplexContext, s: &SupportSet, r: &WeightVector, strict: bool) -> bool {
    r.len() == ctx.nvars()
        && s.iter().all(|i| {
            let p = ctx.monomial(i).pairing(r.weights());
            if strict {
                p > 0
            } else {
                p >= 0
            }
        })
}

impl HullLocation {
    /// Re-verifies all certificates by exact arithmetic.
    pub fn verify(&self, ctx: &SimplexContext, s: &SupportSet) -> bool {
        let combination_ok = |strictly_positive: bool| -> bool {
            let Some(comb) = &self.combination else {
                return false;
            };
            let mut total = BigRational::zero();
            let mut point = vec![BigRational::zero(); ctx.nvars()];
            for (i, l) in comb {
                if !s.contains(*i) || l.is_negative() || (strictly_positive && !l.is_positive()) {
                    return false;
                }
                total += l;
                for (k, &e) in ctx.monomial(*i).0.iter().enumerate() {
                    point[k] += l * BigRational::from_integer(BigInt::from(e));
                }
            }
            total.is_one() && point == ctx.barycenter()
        };
        match self.verdict {
            HullVerdict::Outside => self.separating.as_ref().is_some_and(|r| witness_holds(ctx, s, r, true)),
            HullVerdict::Boundary => {
                combination_ok(false) && self.separating.as_ref().is_some_and(|r| witness_holds(ctx, s, r, false))
            }
            HullVerdict::RelativeInterior => {
                let covers = self.combination.as_ref().is_some_and(|c| c.len() == s.len());
                covers && combination_ok(true) && rank(&point_rows(ctx, s), ctx.nvars()) == ctx.nvars()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_simplex, halfspace_support};

    fn support(ctx: &SimplexContext, items: &[&str]) -> SupportSet {
        ctx.support_from_strs(items).unwrap()
    }

    #[test]
    fn full_simplex_is_interior() {
        let ctx = build_simplex(6, 3).unwrap();
        let s = ctx.full_support();
        let h = hull_locate(&ctx, &s).unwrap();
        assert_eq!(h.verdict, HullVerdict::RelativeInterior);
        assert!(h.verify(&ctx, &s));
        assert!(cone_witness(&ctx, &s, false).unwrap().is_none());
    }

    #[test]
    fn fermat_support() {
        let ctx = build_simplex(6, 3).unwrap();
        let s = support(&ctx, &["x0^3", "x1^3", "x2^3", "x3^3", "x4^3", "x5^3", "x6^3"]);
        assert!(cone_witness(&ctx, &s, false).unwrap().is_none());
        assert!(cone_witness(&ctx, &s, true).unwrap().is_none());
        let h = hull_locate(&ctx, &s).unwrap();
        assert_eq!(h.verdict, HullVerdict::RelativeInterior);
        assert!(h.verify(&ctx, &s));
    }

    #[test]
    fn two_monomials_strict_witness() {
        let ctx = build_simplex(6, 3).unwrap();
        let s = support(&ctx, &["x0^3", "x0^2 x1"]);
        let r = cone_witness(&ctx, &s, true).unwrap().unwrap();
        assert!(witness_holds(&ctx, &s, &r, true));
        let example = WeightVector::new(vec![2, 1, 0, 0, 0, -1, -2]).unwrap();
        assert!(witness_holds(&ctx, &s, &example, true));
        let h = hull_locate(&ctx, &s).unwrap();
        assert_eq!(h.verdict, HullVerdict::Outside);
        assert!(h.verify(&ctx, &s));
    }

    #[test]
    fn halfspace_of_r1_is_boundary() {
        let ctx = build_simplex(6, 3).unwrap();
        let r1 = WeightVector::new(vec![8, 3, 2, -1, -2, -4, -6]).unwrap();
        let s = halfspace_support(&ctx, &r1, false).unwrap();
        let h = hull_locate(&ctx, &s).unwrap();
        assert_eq!(h.verdict, HullVerdict::Boundary);
        assert!(h.verify(&ctx, &s));
        assert!(cone_witness(&ctx, &s, true).unwrap().is_none());
        assert!(cone_witness(&ctx, &s, false).unwrap().is_some());
    }

    #[test]
    fn halfspace_of_r23_is_outside() {
        let ctx = build_simplex(6, 3).unwrap();
        let r = WeightVector::new(vec![8, 5, 3, 2, -4, -4, -10]).unwrap();
        let s = halfspace_support(&ctx, &r, false).unwrap();
        let h = hull_locate(&ctx, &s).unwrap();
        assert_eq!(h.verdict, HullVerdict::Outside);
        assert!(h.verify(&ctx, &s));
    }

    #[test]
    fn rank_deficient_support_is_boundary() {
        let ctx = build_simplex(2, 3).unwrap();
        let s = support(&ctx, &["x0 x1 x2"]);
        let h = hull_locate(&ctx, &s).unwrap();
        assert_eq!(h.verdict, HullVerdict::Boundary);
        assert!(h.verify(&ctx, &s));
    }

    #[test]
    fn empty_support_rejected() {
        let ctx = build_simplex(2, 3).unwrap();
        assert_eq!(hull_locate(&ctx, &ctx.empty_support()).unwrap_err(), Error::EmptySupport);
        assert_eq!(cone_witness(&ctx, &ctx.empty_support(), true).unwrap_err(), Error::EmptySupport);
    }

    #[test]
    fn singleton_witnesses_keep_their_sign() {
        let ctx = build_simplex(2, 3).unwrap();
        for i in 0..ctx.len() {
            let s = SupportSet::from_indices(ctx.len(), [i]).unwrap();
            let h = hull_locate(&ctx, &s).unwrap();
            assert!(h.verify(&ctx, &s), "{}", ctx.monomial(i));
            if let Some(r) = cone_witness(&ctx, &s, true).unwrap() {
                assert!(witness_holds(&ctx, &s, &r, true), "{}", ctx.monomial(i));
            }
        }
    }
}
