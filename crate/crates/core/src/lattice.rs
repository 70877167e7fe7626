//! Exponent lattice of degree-`d` forms in `n + 1` variables.
//!
//! The simplex is the set of exponent vectors of total weight `d`. Its
//! members are kept in descending lexicographic order, so `x0^3` has index 0
//! and the last variable's pure power comes last. Supports are bit sets of
//! indices into that list.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// A monomial `x0^i0 ... xn^in`, stored as its exponent tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairing(&self, r: &[i64]) -> i64 {
        self.0.iter().zip(r).map(|(&e, &w)| e as i64 * w).sum()
    }

    /// Parses `x0^2 x1`, `x0^2*x1` or `1`-free products of `x<k>` factors.
    pub fn parse(text: &str, nvars: usize) -> Result<Self> {
        let mut exps = vec![0u32; nvars];
        let bad = || Error::Unsupported(format!("cannot parse monomial {text:?}"));
        for factor in text.split(|c: char| c == '*' || c.is_whitespace()) {
            if factor.is_empty() {
                continue;
            }
            let rest = factor.strip_prefix('x').ok_or_else(bad)?;
            let (var, pow) = match rest.split_once('^') {
                Some((v, p)) => (v, p.parse::<u32>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            let var: usize = var.parse().map_err(|_| bad())?;
            if var >= nvars {
                return Err(bad());
            }
            exps[var] += pow;
        }
        Ok(ExponentVector(exps))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{k}")?;
            } else {
                write!(f, "x{k}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// An integer one-parameter subgroup of the diagonal torus: nonzero, total
/// weight zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector(Vec<i64>);

impl WeightVector {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.iter().all(|&w| w == 0) {
            return Err(Error::ZeroVector);
        }
        let total: i64 = weights.iter().sum();
        if total != 0 {
            return Err(Error::NonZeroWeight(total));
        }
        Ok(WeightVector(weights))
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.iter().fold(0i64, |g, &w| g.gcd(&w)) == 1
    }

    pub fn is_descending(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_ascending(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn negated(&self) -> WeightVector {
        WeightVector(self.0.iter().map(|w| -w).collect())
    }

    /// Returns the vector permuted so that coordinate `k` moves to `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> WeightVector {
        let mut out = vec![0; self.0.len()];
        for (k, &w) in self.0.iter().enumerate() {
            out[perm[k]] = w;
        }
        WeightVector(out)
    }

    /// Entries sorted in descending order.
    pub fn sorted_descending(&self) -> WeightVector {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        WeightVector(v)
    }

    /// Orientation used by the family enumerator: an ascending vector is
    /// negated so that the result is descending. Non-monotone vectors are
    /// returned unchanged.
    pub fn oriented_descending(&self) -> WeightVector {
        if !self.is_descending() && self.is_ascending() {
            self.negated()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, w) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

/// Divides by the gcd of the absolute entries and makes the first nonzero
/// entry positive.
pub fn reduce_vector(r: &[i64]) -> Result<WeightVector> {
    let v = WeightVector::new(r.to_vec())?;
    let g = v.0.iter().fold(0i64, |g, &w| g.gcd(&w));
    let sign = if v.0.iter().find(|&&w| w != 0).copied().unwrap_or(0) < 0 { -1 } else { 1 };
    Ok(WeightVector(v.0.iter().map(|w| sign * w / g).collect()))
}

/// A set of monomial indices of one simplex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    blocks: Vec<u64>,
    universe: usize,
}

impl SupportSet {
    pub fn empty(universe: usize) -> Self {
        SupportSet { blocks: vec![0; universe.div_ceil(64)], universe }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(universe);
        for i in indices {
            if i >= universe {
                return Err(Error::Unsupported(format!("monomial index {i} out of range {universe}")));
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.blocks[i / 64] |= 1u64 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.blocks[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.universe == other.universe
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &SupportSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a | b).collect();
        SupportSet { blocks, universe: self.universe }
    }

    pub fn intersection(&self, other: &SupportSet) -> SupportSet {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a & b).collect();
        SupportSet { blocks, universe: self.universe }
    }

    pub fn difference(&self, other: &SupportSet) -> SupportSet {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a & !b).collect();
        SupportSet { blocks, universe: self.universe }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &b)| {
            let mut rest = b;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * 64 + tz)
            })
        })
    }
}

/// The degree-`d` simplex in `n + 1` variables together with its barycenter.
#[derive(Debug, Clone)]
pub struct SimplexContext {
    n: usize,
    d: u32,
    monomials: Vec<ExponentVector>,
    index: HashMap<Vec<u32>, usize>,
}

impl PartialEq for SimplexContext {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d
    }
}

impl Eq for SimplexContext {}

pub fn build_simplex(n: usize, d: u32) -> Result<SimplexContext> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    if d == 0 {
        return Err(Error::InvalidDegree(d));
    }
    let mut monomials = Vec::new();
    let mut current = vec![0u32; n + 1];
    fill(&mut monomials, &mut current, 0, d);
    let index = monomials.iter().enumerate().map(|(i, m)| (m.0.clone(), i)).collect();
    Ok(SimplexContext { n, d, monomials, index })
}

// Emits compositions of `remaining` into positions `pos..` in descending
// lexicographic order.
fn fill(out: &mut Vec<ExponentVector>, current: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(ExponentVector(current.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

impl SimplexContext {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[ExponentVector] {
        &self.monomials
    }

    pub fn monomial(&self, i: usize) -> &ExponentVector {
        &self.monomials[i]
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn index_of_checked(&self, exps: &[u32]) -> Result<usize> {
        if exps.len() != self.nvars() {
            return Err(Error::LengthMismatch { expected: self.nvars(), got: exps.len() });
        }
        self.index_of(exps).ok_or_else(|| Error::NotInSimplex(exps.to_vec()))
    }

    /// `eta = (d/(n+1), ..., d/(n+1))`.
    pub fn barycenter(&self) -> Vec<BigRational> {
        let q = BigRational::new(BigInt::from(self.d), BigInt::from(self.n + 1));
        vec![q; self.n + 1]
    }

    pub fn empty_support(&self) -> SupportSet {
        SupportSet::empty(self.len())
    }

    pub fn full_support(&self) -> SupportSet {
        SupportSet::full(self.len())
    }

    pub fn support_from_monomials<'a>(
        &self,
        exps: impl IntoIterator<Item = &'a ExponentVector>,
    ) -> Result<SupportSet> {
        let mut s = self.empty_support();
        for e in exps {
            s.insert(self.index_of_checked(&e.0)?);
        }
        Ok(s)
    }

    /// Parses a list of monomial strings such as `"x0^2 x1"`.
    pub fn support_from_strs<S: AsRef<str>>(&self, items: &[S]) -> Result<SupportSet> {
        let mut s = self.empty_support();
        for item in items {
            let e = ExponentVector::parse(item.as_ref(), self.nvars())?;
            s.insert(self.index_of_checked(&e.0)?);
        }
        Ok(s)
    }

    pub fn support_monomials(&self, s: &SupportSet) -> Vec<&ExponentVector> {
        s.iter().map(|i| &self.monomials[i]).collect()
    }

    pub fn check_support(&self, s: &SupportSet) -> Result<()> {
        if s.universe() != self.len() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// Index map of a coordinate permutation: variable `k` becomes `perm[k]`.
    pub fn permutation_action(&self, perm: &[usize]) -> Vec<usize> {
        self.monomials
            .iter()
            .map(|m| {
                let mut e = vec![0u32; self.nvars()];
                for (k, &x) in m.0.iter().enumerate() {
                    e[perm[k]] = x;
                }
                self.index[&e]
            })
            .collect()
    }

    pub fn permute_support(&self, s: &SupportSet, perm: &[usize]) -> SupportSet {
        let action = self.permutation_action(perm);
        let mut out = self.empty_support();
        for i in s.iter() {
            out.insert(action[i]);
        }
        out
    }
}

/// `{ i : r . i >= 0 }`, or `> 0` when `strict`.
pub fn halfspace_support(ctx: &SimplexContext, r: &WeightVector, strict: bool) -> Result<SupportSet> {
    if r.len() != ctx.nvars() {
        return Err(Error::LengthMismatch { expected: ctx.nvars(), got: r.len() });
    }
    Ok(halfspace_support_raw(ctx, r.weights(), strict))
}

pub(crate) fn halfspace_support_raw(ctx: &SimplexContext, r: &[i64], strict: bool) -> SupportSet {
    let mut s = ctx.empty_support();
    for (i, m) in ctx.monomials.iter().enumerate() {
        let p = m.pairing(r);
        if p > 0 || (!strict && p == 0) {
            s.insert(i);
        }
    }
    s
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("p[i] qualifies");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// All permutations of `0..n`, those moving fewer points first, then
/// lexicographic.
pub fn permutations_by_displacement(n: usize) -> Vec<Vec<usize>> {
    let mut ps = permutations(n);
    ps.sort_by_key(|p| p.iter().enumerate().filter(|(i, &x)| *i != x).count());
    ps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displacement_order() {
        let ps = permutations_by_displacement(3);
        assert_eq!(ps[0], vec![0, 1, 2]);
        assert_eq!(ps[1], vec![0, 2, 1]);
        assert_eq!(ps[3], vec![2, 1, 0]);
        assert_eq!(ps.len(), 6);
    }

    #[test]
    fn permutation_count() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(permutations(7).len(), 5040);
        assert_eq!(binomial(9, 3), 84);
    }

    #[test]
    fn simplex_sizes() {
        assert_eq!(build_simplex(6, 3).unwrap().len(), 84);
        assert_eq!(build_simplex(3, 3).unwrap().len(), 20);
        assert_eq!(build_simplex(2, 3).unwrap().len(), 10);
        for n in 1..6 {
            for d in 1..5 {
                assert_eq!(build_simplex(n, d).unwrap().len(), binomial(n + d as usize, d as usize));
            }
        }
    }

    #[test]
    fn simplex_rejects_degenerate_input() {
        assert_eq!(build_simplex(0, 3).unwrap_err(), Error::InvalidDimension(0));
        assert_eq!(build_simplex(3, 0).unwrap_err(), Error::InvalidDegree(0));
    }

    #[test]
    fn monomials_strictly_descending() {
        let ctx = build_simplex(6, 3).unwrap();
        for w in ctx.monomials().windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(ctx.monomials().iter().all(|m| m.weight() == 3));
        assert_eq!(ctx.monomial(0).0, vec![3, 0, 0, 0, 0, 0, 0]);
        assert_eq!(ctx.monomial(83).0, vec![0, 0, 0, 0, 0, 0, 3]);
    }

    #[test]
    fn reduce_examples() {
        let r = reduce_vector(&[4, 4, 0, -2, -2, -2, -2]).unwrap();
        assert_eq!(r.weights(), &[2, 2, 0, -1, -1, -1, -1]);
        let r1 = [8, 3, 2, -1, -2, -4, -6];
        assert_eq!(reduce_vector(&r1).unwrap().weights(), &r1);
        assert_eq!(reduce_vector(&[0; 7]).unwrap_err(), Error::ZeroVector);
        assert_eq!(reduce_vector(&[1, 1, 0]).unwrap_err(), Error::NonZeroWeight(2));
        assert_eq!(reduce_vector(&[-2, 0, 2]).unwrap().weights(), &[1, 0, -1]);
    }

    #[test]
    fn pairing_zero_members() {
        let ctx = build_simplex(6, 3).unwrap();
        let r1 = WeightVector::new(vec![8, 3, 2, -1, -2, -4, -6]).unwrap();
        let ge = halfspace_support(&ctx, &r1, false).unwrap();
        let gt = halfspace_support(&ctx, &r1, true).unwrap();
        let x2x3sq = ctx.index_of(&[0, 0, 1, 2, 0, 0, 0]).unwrap();
        assert!(ge.contains(x2x3sq));
        assert!(!gt.contains(x2x3sq));
        assert!(gt.is_strict_subset(&ge));
        let r4 = WeightVector::new(vec![2, 2, 0, -1, -1, -1, -1]).unwrap();
        let s4 = halfspace_support(&ctx, &r4, false).unwrap();
        assert!(s4.contains(ctx.index_of(&[0, 0, 3, 0, 0, 0, 0]).unwrap()));
    }

    #[test]
    fn monomial_parse_and_display() {
        let e = ExponentVector::parse("x0^2 x5", 7).unwrap();
        assert_eq!(e.0, vec![2, 0, 0, 0, 0, 1, 0]);
        assert_eq!(e.to_string(), "x0^2 x5");
        assert_eq!(ExponentVector::parse("x1*x2*x2", 3).unwrap().0, vec![0, 1, 2]);
        assert!(ExponentVector::parse("y1", 3).is_err());
        assert!(ExponentVector::parse("x3", 3).is_err());
    }

    #[test]
    fn support_bit_ops() {
        let a = SupportSet::from_indices(100, [1, 64, 99]).unwrap();
        let b = SupportSet::from_indices(100, [1, 2, 64, 99]).unwrap();
        assert!(a.is_strict_subset(&b));
        assert_eq!(b.difference(&a).iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 64, 99]);
        assert_eq!(a.union(&b), b);
        assert!(SupportSet::from_indices(10, [10]).is_err());
    }
}
