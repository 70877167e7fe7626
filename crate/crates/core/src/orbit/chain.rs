//! Inclusion chains between families, checked on seeded members of the
//! source family.
//!
//! A chain is a list of steps applied to one sample `f`. Fixed substitutions
//! are also checked formally on supports. Steps whose substitution depends on
//! the coefficients of `f` (killing a coefficient, absorbing a cofactor) are
//! solved exactly over the rationals; when the sample has no rational
//! solution the next seed is tried.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{support_image, support_of, Substitution};
use crate::algebra::field::{format_rational, RationalField};
use crate::algebra::jacobian::{generic_member, CofactorQuadric};
use crate::algebra::monomial::Monomial;
use crate::algebra::poly::Polynomial;
use crate::enumerate::MaximalFamily;
use crate::error::{Error, Result};
use crate::lattice::{SimplexContext, SupportSet};
use crate::linalg::{kernel_basis, rank};

type Poly = Polynomial<RationalField>;

/// Expected support: an atlas family or an explicit monomial list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SupportSpec {
    Family { family: usize },
    Monomials { monomials: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepSpec {
    /// Fixed matrix of rational strings.
    Substitution {
        matrix: Vec<Vec<String>>,
        description: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<SupportSpec>,
    },
    /// `x_var -> x_var + s * x_along` with `s` chosen so that the
    /// coefficient of `monomial` vanishes.
    VanishCoefficient { monomial: String, var: usize, along: usize },
    /// Linear change of `x_into` turning the cofactor of the quadratic
    /// `monomial` into `x_into`.
    AbsorbCofactor { monomial: String, into: usize },
    Checkpoint { expect: SupportSpec },
    /// Splits off `Q2 * x_shift + Q3 * x_onto` with `Q2`, `Q3` quadrics in
    /// `vars`, and checks that `x_shift -> x_shift + t * x_onto` followed by
    /// a change of `vars` puts the `x_onto` part into `target_rank`
    /// variables.
    RankDrop { shift: usize, onto: usize, vars: Vec<usize>, target_rank: usize },
    /// A step that is not machine-checked; ends the chain.
    Asserted { claim: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    #[serde(default)]
    pub via: Vec<usize>,
    pub steps: Vec<StepSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub chains: Vec<ChainSpec>,
}

#[derive(Debug, Clone)]
enum Step {
    Fixed { sigma: Substitution, expect: Option<SupportSet> },
    Vanish { monomial: Monomial, var: usize, along: usize },
    Absorb { monomial: Monomial, into: usize },
    Checkpoint { expect: SupportSet },
    RankDrop { shift: usize, onto: usize, vars: Vec<usize>, target_rank: usize },
    Asserted { claim: String },
}

impl Step {
    fn kind(&self) -> &'static str {
        match self {
            Step::Fixed { .. } => "substitution",
            Step::Vanish { .. } => "vanish-coefficient",
            Step::Absorb { .. } => "absorb-cofactor",
            Step::Checkpoint { .. } => "checkpoint",
            Step::RankDrop { .. } => "rank-drop",
            Step::Asserted { .. } => "asserted",
        }
    }
}

/// A chain with every reference resolved against an atlas.
#[derive(Debug, Clone)]
pub struct InclusionChain {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    source_support: SupportSet,
    target_support: SupportSet,
    steps: Vec<Step>,
}

fn family_support(atlas: &[MaximalFamily], id: usize) -> Result<SupportSet> {
    if id == 0 || id > atlas.len() {
        return Err(Error::UnknownFamily(id));
    }
    Ok(atlas[id - 1].support.clone())
}

fn resolve_support(ctx: &SimplexContext, atlas: &[MaximalFamily], s: &SupportSpec) -> Result<SupportSet> {
    match s {
        SupportSpec::Family { family } => family_support(atlas, *family),
        SupportSpec::Monomials { monomials } => ctx.support_from_strs(monomials),
    }
}

fn parse_monomial(ctx: &SimplexContext, text: &str, degree: u32) -> Result<Monomial> {
    let e = crate::lattice::ExponentVector::parse(text, ctx.nvars())?;
    if e.weight() != degree {
        return Err(Error::MalformedChain(format!("`{text}` should have degree {degree}")));
    }
    Monomial::from_exponents(&e.0)
}

impl InclusionChain {
    pub fn resolve(ctx: &SimplexContext, spec: &ChainSpec, atlas: &[MaximalFamily]) -> Result<Self> {
        let n = ctx.nvars();
        let var = |k: usize| {
            if k < n {
                Ok(k)
            } else {
                Err(Error::MalformedChain(format!("variable x{k} out of range")))
            }
        };
        let mut steps = Vec::with_capacity(spec.steps.len());
        for (i, s) in spec.steps.iter().enumerate() {
            if matches!(steps.last(), Some(Step::Asserted { .. })) {
                return Err(Error::MalformedChain(format!("step {i} follows an asserted step")));
            }
            steps.push(match s {
                StepSpec::Substitution { matrix, description, expect } => {
                    let sigma = Substitution::from_strings(matrix, description.clone())?;
                    if sigma.nvars() != n {
                        return Err(Error::MalformedChain(format!("step {i}: matrix size {}", sigma.nvars())));
                    }
                    let expect = expect.as_ref().map(|e| resolve_support(ctx, atlas, e)).transpose()?;
                    Step::Fixed { sigma, expect }
                }
                StepSpec::VanishCoefficient { monomial, var: u, along } => {
                    if u == along {
                        return Err(Error::MalformedChain(format!("step {i}: shear of x{u} along itself")));
                    }
                    Step::Vanish { monomial: parse_monomial(ctx, monomial, ctx.d())?, var: var(*u)?, along: var(*along)? }
                }
                StepSpec::AbsorbCofactor { monomial, into } => {
                    Step::Absorb { monomial: parse_monomial(ctx, monomial, ctx.d() - 1)?, into: var(*into)? }
                }
                StepSpec::Checkpoint { expect } => Step::Checkpoint { expect: resolve_support(ctx, atlas, expect)? },
                StepSpec::RankDrop { shift, onto, vars, target_rank } => {
                    for &v in vars {
                        var(v)?;
                    }
                    if vars.len() != 3 || *target_rank >= vars.len() || shift == onto {
                        return Err(Error::MalformedChain(format!("step {i}: unsupported rank-drop shape")));
                    }
                    Step::RankDrop { shift: var(*shift)?, onto: var(*onto)?, vars: vars.clone(), target_rank: *target_rank }
                }
                StepSpec::Asserted { claim } => Step::Asserted { claim: claim.clone() },
            });
        }
        Ok(InclusionChain {
            id: spec.id,
            source: spec.source,
            target: spec.target,
            source_support: family_support(atlas, spec.source)?,
            target_support: family_support(atlas, spec.target)?,
            steps,
        })
    }

    /// Same chain aimed at a different family.
    pub fn retarget(&self, atlas: &[MaximalFamily], target: usize) -> Result<Self> {
        let mut c = self.clone();
        c.target_support = family_support(atlas, target)?;
        c.target = target;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Whether the last step is an unchecked assertion.
    pub fn ends_asserted(&self) -> bool {
        matches!(self.steps.last(), Some(Step::Asserted { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub kind: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    /// Every checked step passed, and so did the final containment when the
    /// chain reaches it.
    pub verified: bool,
    /// The sample was carried all the way into the target family.
    pub end_to_end: bool,
    pub seed: Option<u64>,
    pub attempts: usize,
    pub steps: Vec<StepReport>,
    pub final_containment: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainOptions {
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { seed: 1, max_attempts: 256 }
    }
}

enum Outcome {
    Pass(String),
    Fail(String),
    /// This sample has no rational solution; another seed may.
    Reject(String),
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Coefficients (constant first) of the polynomial of degree `< points`
/// taking `values[k]` at `k`.
fn interpolate(values: &[BigRational]) -> Vec<BigRational> {
    let m = values.len();
    // Newton divided differences at 0, 1, ..., m-1.
    let mut dd = values.to_vec();
    for level in 1..m {
        for k in (level..m).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / q(level as i64);
        }
    }
    let mut coeffs = vec![BigRational::zero(); m];
    for k in (0..m).rev() {
        // coeffs = coeffs * (s - k) + dd[k]
        let mut next = vec![BigRational::zero(); m];
        for i in 0..m {
            if i + 1 < m {
                next[i + 1] = &next[i + 1] + &coeffs[i];
            }
            next[i] = &next[i] - &coeffs[i] * q(k as i64);
        }
        next[0] = &next[0] + &dd[k];
        coeffs = next;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    coeffs
}

fn evaluate(coeffs: &[BigRational], s: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * s + c)
}

const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64().filter(|&v| v <= DIVISOR_LIMIT)?;
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            if k * k != n {
                out.push(n / k);
            }
        }
        k += 1;
    }
    out.sort_unstable();
    Some(out)
}

/// Rational roots of a nonzero polynomial, smallest absolute value first.
/// `None` when the coefficients are too large to factor by trial division.
fn rational_roots(coeffs: &[BigRational]) -> Option<Vec<BigRational>> {
    let l = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    while ints.last().is_some_and(|c| c.is_zero()) {
        ints.pop();
    }
    if ints.len() <= 1 {
        return Some(Vec::new());
    }
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(BigRational::zero());
        let k = ints.iter().take_while(|c| c.is_zero()).count();
        ints.drain(..k);
        if ints.len() == 1 {
            return Some(roots);
        }
    }
    let ps = divisors(&ints[0])?;
    let qs = divisors(ints.last().expect("nonempty"))?;
    let poly: Vec<BigRational> = ints.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut cands: Vec<BigRational> = Vec::new();
    for p in &ps {
        for d in &qs {
            for sign in [1i64, -1] {
                let c = BigRational::new(BigInt::from(*p as i128 * sign as i128), BigInt::from(*d));
                if !cands.contains(&c) && evaluate(&poly, &c).is_zero() {
                    cands.push(c);
                }
            }
        }
    }
    roots.extend(cands);
    roots.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
    Some(roots)
}

fn shear(n: usize, var: usize, along: usize, s: BigRational) -> Substitution {
    Substitution::shear(n, var, along, s).expect("validated at resolve time")
}

fn fmt_mono(m: Monomial, n: usize) -> String {
    m.fmt_vars(n)
}

fn vanish(f: &mut Poly, monomial: Monomial, var: usize, along: usize) -> Result<Outcome> {
    let n = f.nvars();
    let deg = monomial.degree() as i64 + 1;
    let values = (0..deg)
        .map(|k| Ok(shear(n, var, along, q(k)).apply(f)?.coefficient(monomial)))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = interpolate(&values);
    if coeffs.iter().all(|c| c.is_zero()) {
        return Ok(Outcome::Pass(format!("coefficient of {} already vanishes", fmt_mono(monomial, n))));
    }
    let Some(roots) = rational_roots(&coeffs) else {
        return Ok(Outcome::Reject("coefficients too large for the rational root test".into()));
    };
    let Some(s) = roots.first() else {
        return Ok(Outcome::Reject(format!("no rational s kills {}", fmt_mono(monomial, n))));
    };
    let g = shear(n, var, along, s.clone()).apply(f)?;
    if !g.coefficient(monomial).is_zero() {
        return Err(Error::Internal("interpolated root does not kill the coefficient".into()));
    }
    *f = g;
    Ok(Outcome::Pass(format!("x{var} -> x{var} + ({})*x{along}", format_rational(s))))
}

fn absorb(f: &mut Poly, monomial: Monomial, into: usize) -> Result<Outcome> {
    let n = f.nvars();
    let a: Vec<BigRational> = (0..n).map(|j| f.coefficient(monomial.mul(Monomial::var(j)))).collect();
    if a[into].is_zero() {
        return Ok(Outcome::Reject(format!("cofactor of {} has no x{into} term", fmt_mono(monomial, n))));
    }
    let mut m: Vec<Vec<BigRational>> = Substitution::identity(n).matrix().to_vec();
    for (j, aj) in a.iter().enumerate() {
        m[into][j] = if j == into { aj.recip() } else { -aj / &a[into] };
    }
    let sigma = Substitution::new(m, "absorb cofactor")?;
    let g = sigma.apply(f)?;
    *f = g;
    Ok(Outcome::Pass(format!("x{into} absorbs the cofactor of {} (pivot {})", fmt_mono(monomial, n), format_rational(&a[into]))))
}

/// Symmetric matrix of a quadric in `vars` (off-diagonal entries halved).
fn gram(p: &Poly, vars: &[usize]) -> Vec<Vec<BigRational>> {
    let k = vars.len();
    let mut m = vec![vec![BigRational::zero(); k]; k];
    for a in 0..k {
        for b in 0..k {
            let mono = Monomial::var(vars[a]).mul(Monomial::var(vars[b]));
            let c = p.coefficient(mono);
            m[a][b] = if a == b { c } else { c / q(2) };
        }
    }
    m
}

fn det3(m: &[Vec<BigRational>]) -> BigRational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

fn integer_rows(m: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

fn combine(a: &[Vec<BigRational>], ta: &BigRational, b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * ta + y).collect()).collect()
}

fn rank_drop(f: &Poly, shift: usize, onto: usize, vars: &[usize], target_rank: usize) -> Result<Outcome> {
    let n = f.nvars();
    let field = *f.field();
    let q2 = CofactorQuadric { cofactor: shift, vars: vars.to_vec() }.read_back(f)?;
    let q3 = CofactorQuadric { cofactor: onto, vars: vars.to_vec() }.read_back(f)?;
    let (m2, m3) = (gram(&q2, vars), gram(&q3, vars));

    // (b) a rational t with rank(t*M2 + M3) == target_rank.
    let values: Vec<BigRational> = (0..4).map(|k| det3(&combine(&m2, &q(k), &m3))).collect();
    let det = interpolate(&values);
    if det.iter().all(|c| c.is_zero()) {
        return Ok(Outcome::Reject("pencil is degenerate for this sample".into()));
    }
    let Some(roots) = rational_roots(&det) else {
        return Ok(Outcome::Reject("determinant coefficients too large".into()));
    };
    let Some(t) = roots
        .into_iter()
        .find(|t| rank(&integer_rows(&combine(&m2, t, &m3)), vars.len()) == target_rank)
    else {
        return Ok(Outcome::Reject("no rational rank-drop parameter for this sample".into()));
    };

    // (a) on the piece Q2*x_shift + Q3*x_onto.
    let xs = Poly::variable(field, n, shift);
    let xo = Poly::variable(field, n, onto);
    let piece = q2.mul(&xs).add(&q3.mul(&xo));
    let moved = shear(n, shift, onto, t.clone()).apply(&piece)?;
    let pencil = q2.scale(&t).add(&q3);
    if moved != q2.mul(&xs).add(&pencil.mul(&xo)) {
        return Ok(Outcome::Fail("shift does not act as Q2*x_shift + (t*Q2 + Q3)*x_onto".into()));
    }

    // Kernel vector of the pencil member, moved to the last of `vars`.
    let kern = kernel_basis(&integer_rows(&combine(&m2, &t, &m3)), vars.len());
    let k = kern.first().ok_or_else(|| Error::Internal("rank drop without kernel".into()))?;
    let p = (0..vars.len()).rev().find(|&i| !k[i].is_zero()).expect("nonzero kernel vector");
    let others: Vec<usize> = (0..vars.len()).filter(|&i| i != p).collect();
    let mut m: Vec<Vec<BigRational>> = Substitution::identity(n).matrix().to_vec();
    for (a, &va) in vars.iter().enumerate() {
        for (col, &vb) in vars.iter().enumerate() {
            m[va][vb] = if col + 1 == vars.len() {
                BigRational::from_integer(k[a].clone())
            } else if a == others[col] {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
    }
    let change = Substitution::new(m, "move kernel")?;
    let reduced = change.apply(&pencil)?;
    let keep = &vars[..target_rank];
    let confined = reduced.terms().iter().all(|(mono, _)| (0..n).all(|v| mono.exponent(v) == 0 || keep.contains(&v)));
    if !confined {
        return Ok(Outcome::Fail("pencil member does not reduce to fewer variables".into()));
    }
    Ok(Outcome::Pass(format!(
        "t = {}: x{shift} -> x{shift} + t*x{onto} splits the piece, and t*Q2 + Q3 has rank {target_rank} ({})",
        format_rational(&t),
        reduced
    )))
}

fn run_once(ctx: &SimplexContext, chain: &InclusionChain, seed: u64) -> Result<(Vec<StepReport>, Option<bool>, bool)> {
    let mut f = generic_member(ctx, &chain.source_support, &RationalField, seed)?;
    let mut formal = chain.source_support.clone();
    let mut reports = Vec::new();
    let mut rejected = false;
    for step in &chain.steps {
        let outcome = match step {
            Step::Fixed { sigma, expect } => {
                f = sigma.apply(&f)?;
                formal = support_image(ctx, &formal, sigma)?;
                let actual = support_of(ctx, &f)?;
                match expect {
                    None => Outcome::Pass(sigma.description.clone()),
                    Some(e) if formal.is_subset(e) => Outcome::Pass(format!("{}: image inside expected", sigma.description)),
                    Some(e) if actual.is_subset(e) => {
                        Outcome::Fail(format!("{}: only the sample lands inside expected", sigma.description))
                    }
                    Some(_) => Outcome::Fail(format!("{}: image leaves expected support", sigma.description)),
                }
            }
            Step::Vanish { monomial, var, along } => vanish(&mut f, *monomial, *var, *along)?,
            Step::Absorb { monomial, into } => absorb(&mut f, *monomial, *into)?,
            Step::Checkpoint { expect } => {
                let actual = support_of(ctx, &f)?;
                if actual.is_subset(expect) {
                    Outcome::Pass(format!("{} terms inside expected", actual.len()))
                } else {
                    let extra: Vec<String> =
                        actual.difference(expect).iter().map(|i| ctx.monomial(i).to_string()).collect();
                    Outcome::Fail(format!("outside expected: {}", extra.join(", ")))
                }
            }
            Step::RankDrop { shift, onto, vars, target_rank } => rank_drop(&f, *shift, *onto, vars, *target_rank)?,
            Step::Asserted { claim } => {
                reports.push(StepReport { kind: step.kind().into(), ok: true, detail: format!("not checked: {claim}") });
                return Ok((reports, None, false));
            }
        };
        let (ok, detail) = match outcome {
            Outcome::Pass(d) => (true, d),
            Outcome::Fail(d) => (false, d),
            Outcome::Reject(d) => {
                rejected = true;
                (false, d)
            }
        };
        reports.push(StepReport { kind: step.kind().into(), ok, detail });
        if !ok {
            return Ok((reports, None, rejected));
        }
    }
    let inside = support_of(ctx, &f)?.is_subset(&chain.target_support);
    Ok((reports, Some(inside), false))
}

/// Runs the chain on successive seeds until one sample passes every step or
/// a step fails for a reason other than a missing rational solution.
pub fn verify_chain_with(ctx: &SimplexContext, chain: &InclusionChain, opts: ChainOptions) -> Result<ChainReport> {
    let mut last = None;
    for attempt in 0..opts.max_attempts.max(1) {
        let seed = opts.seed.wrapping_add(attempt as u64);
        let (steps, fin, rejected) = run_once(ctx, chain, seed)?;
        let steps_ok = steps.iter().all(|s| s.ok);
        let verified = steps_ok && fin.unwrap_or(chain.ends_asserted());
        let report = ChainReport {
            id: chain.id,
            source: chain.source,
            target: chain.target,
            verified,
            end_to_end: verified && fin == Some(true),
            seed: Some(seed),
            attempts: attempt + 1,
            steps,
            final_containment: fin,
        };
        if verified {
            return Ok(report);
        }
        last = Some(report);
        if !rejected && fin.is_none() && !steps_ok {
            // A structural failure does not depend on the sample.
            break;
        }
    }
    Ok(last.expect("at least one attempt"))
}

pub fn verify_chain(ctx: &SimplexContext, chain: &InclusionChain) -> Result<bool> {
    Ok(verify_chain_with(ctx, chain, ChainOptions::default())?.verified)
}
