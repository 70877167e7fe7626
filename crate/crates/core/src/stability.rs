//! Stability of a support with respect to the diagonal torus.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::MaximalFamily;
use crate::error::{Error, Result};
use crate::hull::{cone_witness, witness_holds};
use crate::lattice::{permutations_by_displacement, SimplexContext, SupportSet, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityClass {
    Stable,
    /// Semi-stable but not stable.
    StrictlyNotStable,
    Unstable,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::Stable => "stable",
            StabilityClass::StrictlyNotStable => "strictly-not-stable",
            StabilityClass::Unstable => "unstable",
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub class: StabilityClass,
    /// Pairs positively (unstable) or nonnegatively (strictly not stable)
    /// with every member of the support.
    pub witness: Option<WeightVector>,
}

impl StabilityVerdict {
    pub fn verify(&self, ctx: &SimplexContext, s: &SupportSet) -> bool {
        match (self.class, &self.witness) {
            (StabilityClass::Stable, None) => true,
            (StabilityClass::Unstable, Some(r)) => witness_holds(ctx, s, r, true),
            (StabilityClass::StrictlyNotStable, Some(r)) => witness_holds(ctx, s, r, false),
            _ => false,
        }
    }
}

pub fn classify_wrt_torus(ctx: &SimplexContext, s: &SupportSet) -> Result<StabilityVerdict> {
    if let Some(r) = cone_witness(ctx, s, true)? {
        return Ok(StabilityVerdict { class: StabilityClass::Unstable, witness: Some(r) });
    }
    if let Some(r) = cone_witness(ctx, s, false)? {
        return Ok(StabilityVerdict { class: StabilityClass::StrictlyNotStable, witness: Some(r) });
    }
    Ok(StabilityVerdict { class: StabilityClass::Stable, witness: None })
}

/// An atlas family containing a support after a coordinate permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Containment {
    /// Position in the atlas slice.
    pub index: usize,
    /// `perm[k]` is the atlas coordinate receiving variable `k`. Among all
    /// such permutations, one moving the fewest coordinates, then the
    /// lexicographically first.
    pub permutation: Vec<usize>,
}

/// Atlas families that contain `s` up to a permutation of the variables.
///
/// The atlas holds one monotone representative per permutation class, so an
/// empty result means `s` lies in no halfspace support at all, i.e. it is
/// stable.
pub fn containing_families(
    ctx: &SimplexContext,
    s: &SupportSet,
    atlas: &[MaximalFamily],
) -> Result<Vec<Containment>> {
    ctx.check_support(s)?;
    for f in atlas {
        if f.support.universe() != s.universe() {
            return Err(Error::ContextMismatch);
        }
    }
    let images: Vec<(Vec<usize>, SupportSet)> = permutations_by_displacement(ctx.nvars())
        .into_par_iter()
        .map(|p| {
            let img = ctx.permute_support(s, &p);
            (p, img)
        })
        .collect();
    Ok(atlas
        .iter()
        .enumerate()
        .filter_map(|(index, f)| {
            images
                .iter()
                .find(|(_, img)| img.is_subset(&f.support))
                .map(|(p, _)| Containment { index, permutation: p.clone() })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_simplex, halfspace_support};

    fn fermat(ctx: &SimplexContext) -> SupportSet {
        let items: Vec<String> = (0..ctx.nvars()).map(|k| format!("x{k}^3")).collect();
        ctx.support_from_strs(&items).unwrap()
    }

    #[test]
    fn fermat_is_stable() {
        let ctx = build_simplex(6, 3).unwrap();
        let v = classify_wrt_torus(&ctx, &fermat(&ctx)).unwrap();
        assert_eq!(v.class, StabilityClass::Stable);
        assert!(v.verify(&ctx, &fermat(&ctx)));
    }

    #[test]
    fn halfspace_of_r1_is_strictly_not_stable() {
        let ctx = build_simplex(6, 3).unwrap();
        let r = WeightVector::new(vec![8, 3, 2, -1, -2, -4, -6]).unwrap();
        let s = halfspace_support(&ctx, &r, false).unwrap();
        let v = classify_wrt_torus(&ctx, &s).unwrap();
        assert_eq!(v.class, StabilityClass::StrictlyNotStable);
        assert!(v.verify(&ctx, &s));
    }

    #[test]
    fn unstable_halfspace() {
        let ctx = build_simplex(6, 3).unwrap();
        let r = WeightVector::new(vec![8, 5, 3, 2, -4, -4, -10]).unwrap();
        let s = halfspace_support(&ctx, &r, false).unwrap();
        let v = classify_wrt_torus(&ctx, &s).unwrap();
        assert_eq!(v.class, StabilityClass::Unstable);
        assert!(v.verify(&ctx, &s));
    }

    #[test]
    fn containment_finds_permuted_copy() {
        let ctx = build_simplex(2, 3).unwrap();
        let r = WeightVector::new(vec![1, 0, -1]).unwrap();
        let f = MaximalFamily {
            vector: r.clone(),
            alternates: vec![r.clone()],
            support: halfspace_support(&ctx, &r, false).unwrap(),
            hull: None,
        };
        let s = ctx.support_from_strs(&["x2^3"]).unwrap();
        let hits = containing_families(&ctx, &s, std::slice::from_ref(&f)).unwrap();
        assert_eq!(hits.len(), 1);
        assert!(ctx.permute_support(&s, &hits[0].permutation).is_subset(&f.support));
        assert!(containing_families(&ctx, &fermat(&ctx), &[f]).unwrap().is_empty());
    }

    #[test]
    fn mismatched_context_rejected() {
        let a = build_simplex(2, 3).unwrap();
        let b = build_simplex(3, 3).unwrap();
        let r = WeightVector::new(vec![1, 0, 0, -1]).unwrap();
        let f = MaximalFamily {
            vector: r.clone(),
            alternates: vec![r.clone()],
            support: halfspace_support(&b, &r, false).unwrap(),
            hull: None,
        };
        assert_eq!(containing_families(&a, &fermat(&a), &[f]).unwrap_err(), Error::ContextMismatch);
    }
}
