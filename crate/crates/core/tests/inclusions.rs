use cubicgit_core::algebra::groebner::groebner_basis;
use cubicgit_core::algebra::hilbert::hilbert_dim_deg;
use cubicgit_core::algebra::jacobian::{generic_member, jacobian_ideal};
use cubicgit_core::algebra::{Field, Monomial, Polynomial, PrimeField};
use cubicgit_core::enumerate::MaximalFamily;
use cubicgit_core::lattice::{build_simplex, SimplexContext};
use cubicgit_core::orbit::chain::{verify_chain_with, ChainOptions, ChainSpec, InclusionChain, StepSpec};
use cubicgit_core::orbit::{antichain_screen, permutation_inclusion_search};
use cubicgit_core::tables::ExpectedTables;
use cubicgit_core::Error;

fn setup() -> (SimplexContext, ExpectedTables, Vec<MaximalFamily>) {
    let ctx = build_simplex(6, 3).unwrap();
    let t = ExpectedTables::bundled().unwrap();
    let atlas = t.atlas(&ctx).unwrap();
    (ctx, t, atlas)
}

fn chain(ctx: &SimplexContext, t: &ExpectedTables, atlas: &[MaximalFamily], id: usize) -> InclusionChain {
    let spec = t.chains.iter().find(|c| c.id == id).unwrap();
    InclusionChain::resolve(ctx, spec, atlas).unwrap()
}

#[test]
fn chains_one_two_four_reach_target() {
    let (ctx, t, atlas) = setup();
    for id in [1, 2, 4] {
        let r = verify_chain_with(&ctx, &chain(&ctx, &t, &atlas, id), ChainOptions::default()).unwrap();
        assert!(r.verified && r.end_to_end, "chain {id}: {r:?}");
        assert_eq!(r.final_containment, Some(true));
    }
}

#[test]
fn chain_three_rank_drop_only() {
    let (ctx, t, atlas) = setup();
    let c = chain(&ctx, &t, &atlas, 3);
    assert!(c.ends_asserted());
    let r = verify_chain_with(&ctx, &c, ChainOptions::default()).unwrap();
    assert!(r.verified);
    assert!(!r.end_to_end);
    assert!(r.steps.iter().any(|s| s.kind == "rank-drop" && s.ok));
}

#[test]
fn chains_are_deterministic() {
    let (ctx, t, atlas) = setup();
    for id in 1..=4 {
        let c = chain(&ctx, &t, &atlas, id);
        let a = verify_chain_with(&ctx, &c, ChainOptions::default()).unwrap();
        let b = verify_chain_with(&ctx, &c, ChainOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn retargeted_chain_fails() {
    let (ctx, t, atlas) = setup();
    let c = chain(&ctx, &t, &atlas, 1).retarget(&atlas, 5).unwrap();
    let opts = ChainOptions { seed: 1, max_attempts: 16 };
    let r = verify_chain_with(&ctx, &c, opts).unwrap();
    assert!(!r.verified);
    assert_eq!(r.final_containment, Some(false));
}

#[test]
fn malformed_chains_rejected() {
    let (ctx, _, atlas) = setup();
    let mut zero = vec![vec!["0".to_string(); 7]; 7];
    for (i, row) in zero.iter_mut().enumerate().skip(1) {
        row[i] = "1".into();
    }
    let spec = ChainSpec {
        id: 9,
        source: 22,
        target: 21,
        via: vec![],
        steps: vec![StepSpec::Substitution { matrix: zero, description: "singular".into(), expect: None }],
    };
    assert_eq!(InclusionChain::resolve(&ctx, &spec, &atlas).unwrap_err(), Error::SingularSubstitution);
    let spec = ChainSpec { id: 9, source: 24, target: 21, via: vec![], steps: vec![] };
    assert_eq!(InclusionChain::resolve(&ctx, &spec, &atlas).unwrap_err(), Error::UnknownFamily(24));
    let spec = ChainSpec { id: 9, source: 0, target: 21, via: vec![], steps: vec![] };
    assert_eq!(InclusionChain::resolve(&ctx, &spec, &atlas).unwrap_err(), Error::UnknownFamily(0));
}

#[test]
fn screen_of_retained_families_is_empty() {
    let (ctx, t, atlas) = setup();
    let keep = t.final_19.ids();
    let report = antichain_screen(&ctx, &atlas, &keep).unwrap();
    assert_eq!(report.pairs_checked, 19 * 18);
    assert!(report.hits.is_empty(), "{:?}", report.hits);
}

#[test]
fn screen_singleton_and_bad_id() {
    let (ctx, _, atlas) = setup();
    assert!(antichain_screen(&ctx, &atlas, &[7]).unwrap().hits.is_empty());
    assert_eq!(antichain_screen(&ctx, &atlas, &[7, 30]).unwrap_err(), Error::UnknownFamily(30));
}

#[test]
fn fifth_family_not_a_permutation_of_a_subset_of_seventh() {
    let (ctx, _, atlas) = setup();
    assert_eq!(permutation_inclusion_search(&ctx, &atlas[4].support, &atlas[6].support).unwrap(), None);
    let id = permutation_inclusion_search(&ctx, &atlas[4].support, &atlas[4].support).unwrap();
    assert_eq!(id, Some((0..7).collect()));
}

fn gram_det_mod_p(f: &Polynomial<PrimeField>, vars: &[usize], at: usize) -> u64 {
    // Hessian of f at e_at restricted to `vars`, up to the factor 2.
    let fld = *f.field();
    let entry = |a: usize, b: usize| {
        let m = Monomial::var(vars[a]).mul(Monomial::var(vars[b])).mul(Monomial::var(at));
        let c = f.coefficient(m);
        if a == b { fld.mul(&c, &fld.from_i64(2)) } else { c }
    };
    let m: Vec<Vec<u64>> = (0..3).map(|a| (0..3).map(|b| entry(a, b)).collect()).collect();
    let t = |a: u64, b: u64| fld.mul(&a, &b);
    let d1 = fld.sub(&t(m[1][1], m[2][2]), &t(m[1][2], m[2][1]));
    let d2 = fld.sub(&t(m[1][0], m[2][2]), &t(m[1][2], m[2][0]));
    let d3 = fld.sub(&t(m[1][0], m[2][1]), &t(m[1][1], m[2][0]));
    fld.add(&fld.sub(&t(m[0][0], d1), &t(m[0][1], d2)), &t(m[0][2], d3))
}

// Members of the target family of the third chain are singular at e6 with a
// Hessian of rank at most 2 there. A sampled source member has e6 as its only
// singular point, with a Hessian of rank 3, so the sample is not equivalent
// to any target member. The third chain therefore stops at its rank-drop
// witness.
#[test]
fn third_chain_hessian_obstruction() {
    let (ctx, _, atlas) = setup();
    let fld = PrimeField::default();
    let f = generic_member(&ctx, &atlas[13].support, &fld, 1).unwrap();
    let partials = jacobian_ideal(&f);

    let mut at_infinity = partials.clone();
    at_infinity.push(Polynomial::variable(fld, 7, 6));
    assert_eq!(hilbert_dim_deg(&groebner_basis(&at_infinity).unwrap()).unwrap().dimension, -1);

    let mut images: Vec<Polynomial<PrimeField>> = (0..7).map(|k| Polynomial::variable(fld, 7, k)).collect();
    images[6] = Polynomial::constant(fld, 7, fld.one());
    let chart: Vec<_> = partials.iter().map(|p| p.compose(&images).unwrap()).filter(|p| !p.is_zero()).collect();
    let gb = groebner_basis(&chart).unwrap();
    for k in 0..6 {
        assert!(gb.contains(&Polynomial::variable(fld, 7, k).pow(16)).unwrap(), "x{k} not nilpotent");
    }
    // f has no x_k x6^2 terms, so e6 is singular; its Hessian lives on x0, x1, x2.
    assert!(partials.iter().all(|p| p.coefficient(Monomial::var(6).mul(Monomial::var(6))) == 0));
    assert_ne!(gram_det_mod_p(&f, &[0, 1, 2], 6), 0);

    // Target members: no monomial x_i x_j x6 with i or j outside {x0, x1}.
    let target = &atlas[20].support;
    for i in target.iter() {
        let e = &ctx.monomial(i).0;
        if e[6] == 1 {
            assert!(e[2..6].iter().all(|&v| v == 0));
        }
        assert!(e[6] <= 1);
    }
}
