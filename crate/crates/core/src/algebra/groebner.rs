//! Buchberger's algorithm under degrevlex with the Gebauer-Moeller pair
//! criteria and sugar-degree selection.

use std::collections::{BinaryHeap, HashMap};
use std::hash::{BuildHasherDefault, Hasher};

use super::field::Field;
use super::monomial::Monomial;
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Multiplicative hash for packed monomials.
#[derive(Default)]
struct MonomialHasher(u64);

impl Hasher for MonomialHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }
    fn write_u64(&mut self, v: u64) {
        self.0 = (v ^ (v >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type MonoMap<V> = HashMap<Monomial, V, BuildHasherDefault<MonomialHasher>>;

/// Sparse accumulator: coefficients by monomial plus a max-heap of the
/// monomials that may still be present.
struct Accumulator<F: Field> {
    coeffs: MonoMap<F::Elem>,
    heap: BinaryHeap<Monomial>,
}

impl<F: Field> Accumulator<F> {
    fn new() -> Self {
        Accumulator { coeffs: MonoMap::default(), heap: BinaryHeap::new() }
    }

    /// Adds `c * m * p`.
    fn add_scaled(&mut self, field: &F, p: &[(Monomial, F::Elem)], m: Monomial, c: &F::Elem) {
        for (t, a) in p {
            let key = t.mul(m);
            let prod = field.mul(a, c);
            match self.coeffs.get_mut(&key) {
                Some(v) => *v = field.add(v, &prod),
                None => {
                    self.coeffs.insert(key, prod);
                    self.heap.push(key);
                }
            }
        }
    }

    /// Largest monomial with a nonzero coefficient, removed from the
    /// accumulator.
    fn pop(&mut self, field: &F) -> Option<(Monomial, F::Elem)> {
        while let Some(m) = self.heap.pop() {
            if let Some(c) = self.coeffs.remove(&m) {
                if !field.is_zero(&c) {
                    return Some((m, c));
                }
            }
        }
        None
    }
}

/// Full normal form of `p` with respect to monic `reducers`.
fn reduce_with<F: Field>(
    field: &F,
    nvars: usize,
    mut acc: Accumulator<F>,
    reducers: &[&Polynomial<F>],
    lms: &[Monomial],
) -> Polynomial<F> {
    let mut out = Vec::new();
    while let Some((m, c)) = acc.pop(field) {
        match lms.iter().position(|lm| lm.divides(m)) {
            Some(i) => {
                let g = reducers[i];
                let q = lms[i].quotient_of(m);
                acc.add_scaled(field, &g.terms()[1..], q, &field.neg(&c));
            }
            None => out.push((m, c)),
        }
    }
    Polynomial::from_sorted(field.clone(), nvars, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

impl Pair {
    fn key(&self) -> (u32, Monomial, usize, usize) {
        (self.sugar, self.lcm, self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroebnerStats {
    pub pairs_reduced: usize,
    pub zero_reductions: usize,
    pub pairs_skipped: usize,
}

struct Builder<F: Field> {
    field: F,
    nvars: usize,
    polys: Vec<Polynomial<F>>,
    lms: Vec<Monomial>,
    sugar: Vec<u32>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    stats: GroebnerStats,
}

impl<F: Field> Builder<F> {
    fn active_reducers(&self) -> (Vec<&Polynomial<F>>, Vec<Monomial>) {
        let idx: Vec<usize> = (0..self.polys.len()).filter(|&i| self.active[i]).collect();
        (idx.iter().map(|&i| &self.polys[i]).collect(), idx.iter().map(|&i| self.lms[i]).collect())
    }

    fn pair(&self, i: usize, j: usize) -> Pair {
        let lcm = self.lms[i].lcm(self.lms[j]);
        let si = self.sugar[i] + lcm.degree() - self.lms[i].degree();
        let sj = self.sugar[j] + lcm.degree() - self.lms[j].degree();
        Pair { i: i.min(j), j: i.max(j), lcm, sugar: si.max(sj) }
    }

    /// Inserts a monic, fully reduced polynomial and updates the pair set.
    fn insert(&mut self, h: Polynomial<F>, sugar: u32) {
        let hi = self.polys.len();
        let lm_h = h.leading_monomial().expect("nonzero");
        self.polys.push(h);
        self.lms.push(lm_h);
        self.sugar.push(sugar);
        self.active.push(true);

        let mut cands: Vec<Pair> =
            (0..hi).filter(|&g| self.active[g]).map(|g| self.pair(g, hi)).collect();
        let mut kept: Vec<Pair> = Vec::new();
        let mut k = 0;
        while k < cands.len() {
            let p = cands[k];
            let other = if p.i == hi { p.j } else { p.i };
            let coprime = lm_h.is_coprime(self.lms[other]);
            let dominated = cands[k + 1..].iter().chain(kept.iter()).any(|q| q.lcm.divides(p.lcm));
            if coprime || !dominated {
                kept.push(p);
            } else {
                self.stats.pairs_skipped += 1;
            }
            k += 1;
        }
        cands.clear();
        let before = kept.len();
        kept.retain(|p| {
            let other = if p.i == hi { p.j } else { p.i };
            !lm_h.is_coprime(self.lms[other])
        });
        self.stats.pairs_skipped += before - kept.len();

        let lms = &self.lms;
        let before = self.pairs.len();
        self.pairs.retain(|p| {
            !lm_h.divides(p.lcm) || lms[p.i].lcm(lm_h) == p.lcm || lm_h.lcm(lms[p.j]) == p.lcm
        });
        self.stats.pairs_skipped += before - self.pairs.len();
        self.pairs.extend(kept);

        for g in 0..hi {
            if self.active[g] && lm_h.divides(self.lms[g]) {
                self.active[g] = false;
            }
        }
    }

    fn next_pair(&mut self) -> Option<Pair> {
        let (pos, _) = self.pairs.iter().enumerate().min_by_key(|(_, p)| p.key())?;
        Some(self.pairs.swap_remove(pos))
    }

    fn s_polynomial(&self, p: &Pair) -> Accumulator<F> {
        let mut acc = Accumulator::new();
        let one = self.field.one();
        let minus = self.field.neg(&one);
        let (a, b) = (&self.polys[p.i], &self.polys[p.j]);
        acc.add_scaled(&self.field, &a.terms()[1..], self.lms[p.i].quotient_of(p.lcm), &one);
        acc.add_scaled(&self.field, &b.terms()[1..], self.lms[p.j].quotient_of(p.lcm), &minus);
        acc
    }

    fn reduce_poly(&self, p: &Polynomial<F>) -> Polynomial<F> {
        let (reducers, lms) = self.active_reducers();
        let mut acc = Accumulator::new();
        acc.add_scaled(&self.field, p.terms(), Monomial::ONE, &self.field.one());
        reduce_with(&self.field, self.nvars, acc, &reducers, &lms)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis<F: Field> {
    field: F,
    nvars: usize,
    /// Reduced basis, sorted by increasing leading monomial.
    generators: Vec<Polynomial<F>>,
    pub stats: GroebnerStats,
}

fn check_generators<F: Field>(gens: &[Polynomial<F>]) -> Result<()> {
    let first = gens.first().ok_or(Error::NoGenerators)?;
    for g in gens {
        first.check_compatible(g)?;
    }
    Ok(())
}

/// Caps on the work of one basis computation; exceeding either one gives
/// [`Error::ResourceExhausted`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_pairs: Option<usize>,
    /// Largest numerator plus denominator size of a basis coefficient.
    pub max_coefficient_bits: Option<u64>,
}

pub fn groebner_basis<F: Field>(generators: &[Polynomial<F>]) -> Result<GroebnerBasis<F>> {
    groebner_basis_with(generators, GroebnerLimits::default())
}

pub fn groebner_basis_with<F: Field>(generators: &[Polynomial<F>], limits: GroebnerLimits) -> Result<GroebnerBasis<F>> {
    check_generators(generators)?;
    let field = generators[0].field().clone();
    let nvars = generators[0].nvars();
    let mut b = Builder {
        field: field.clone(),
        nvars,
        polys: Vec::new(),
        lms: Vec::new(),
        sugar: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        stats: GroebnerStats::default(),
    };
    let mut input: Vec<&Polynomial<F>> = generators.iter().filter(|g| !g.is_zero()).collect();
    input.sort_by_key(|g| g.leading_monomial());
    for g in input {
        let r = b.reduce_poly(g);
        if let Some(lm) = r.leading_monomial() {
            let sugar = g.degree().expect("nonzero");
            if lm == Monomial::ONE {
                return Ok(unit_basis(field, nvars, b.stats));
            }
            b.insert(r.monic(), sugar);
        }
    }
    while let Some(p) = b.next_pair() {
        b.stats.pairs_reduced += 1;
        if limits.max_pairs.is_some_and(|m| b.stats.pairs_reduced > m) {
            return Err(Error::ResourceExhausted(format!("more than {} S-pair reductions", b.stats.pairs_reduced - 1)));
        }
        let (reducers, lms) = b.active_reducers();
        let r = reduce_with(&b.field, nvars, b.s_polynomial(&p), &reducers, &lms);
        match r.leading_monomial() {
            None => b.stats.zero_reductions += 1,
            Some(lm) if lm == Monomial::ONE => return Ok(unit_basis(field, nvars, b.stats)),
            Some(_) => {
                let r = r.monic();
                if let Some(max) = limits.max_coefficient_bits {
                    let bits = r.terms().iter().map(|(_, c)| field.height_bits(c)).max().unwrap_or(0);
                    if bits > max {
                        return Err(Error::ResourceExhausted(format!("coefficient of {bits} bits exceeds {max}")));
                    }
                }
                b.insert(r, p.sugar)
            }
        }
    }

    // Leading monomials of the active set are already minimal; reduce tails.
    let active: Vec<usize> = (0..b.polys.len()).filter(|&i| b.active[i]).collect();
    let mut out: Vec<Polynomial<F>> = Vec::with_capacity(active.len());
    for &i in &active {
        let others: Vec<usize> = active.iter().copied().filter(|&j| j != i).collect();
        let reducers: Vec<&Polynomial<F>> = others.iter().map(|&j| &b.polys[j]).collect();
        let lms: Vec<Monomial> = others.iter().map(|&j| b.lms[j]).collect();
        let g = &b.polys[i];
        let mut acc = Accumulator::new();
        acc.add_scaled(&field, &g.terms()[1..], Monomial::ONE, &field.one());
        let tail = reduce_with(&field, nvars, acc, &reducers, &lms);
        let mut terms = vec![g.terms()[0].clone()];
        terms.extend(tail.terms().iter().cloned());
        out.push(Polynomial::from_sorted(field.clone(), nvars, terms));
    }
    out.sort_by_key(|g| g.leading_monomial());
    Ok(GroebnerBasis { field, nvars, generators: out, stats: b.stats })
}

fn unit_basis<F: Field>(field: F, nvars: usize, stats: GroebnerStats) -> GroebnerBasis<F> {
    let one = field.one();
    GroebnerBasis { generators: vec![Polynomial::constant(field.clone(), nvars, one)], field, nvars, stats }
}

impl<F: Field> GroebnerBasis<F> {
    pub fn generators(&self) -> &[Polynomial<F>] {
        &self.generators
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators.iter().filter_map(|g| g.leading_monomial()).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.leading_monomials() == [Monomial::ONE]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.generators.iter().all(|g| g.is_homogeneous())
    }

    pub fn normal_form(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        if p.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if p.nvars() != self.nvars {
            return Err(Error::VariableCountMismatch(p.nvars(), self.nvars));
        }
        let reducers: Vec<&Polynomial<F>> = self.generators.iter().collect();
        let lms = self.leading_monomials();
        let mut acc = Accumulator::new();
        acc.add_scaled(&self.field, p.terms(), Monomial::ONE, &self.field.one());
        Ok(reduce_with(&self.field, self.nvars, acc, &reducers, &lms))
    }

    pub fn contains(&self, p: &Polynomial<F>) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Every S-polynomial reduces to zero and leading monomials are pairwise
    /// non-divisible.
    pub fn is_reduced_groebner(&self) -> bool {
        let lms = self.leading_monomials();
        let minimal = lms
            .iter()
            .enumerate()
            .all(|(i, a)| lms.iter().enumerate().all(|(j, b)| i == j || !a.divides(*b)));
        let monic = self.generators.iter().all(|g| g.leading().is_some_and(|(_, c)| *c == self.field.one()));
        let tails_reduced = self.generators.iter().all(|g| {
            g.terms()[1..].iter().all(|(m, _)| !lms.iter().any(|lm| lm.divides(*m)))
        });
        minimal && monic && tails_reduced && self.s_pairs_reduce_to_zero()
    }

    fn s_pairs_reduce_to_zero(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| {
            (i + 1..g.len()).all(|j| {
                let (a, b) = (&g[i], &g[j]);
                let (la, lb) = (a.terms()[0].0, b.terms()[0].0);
                let l = la.lcm(lb);
                let one = self.field.one();
                let s = a.mul_term(la.quotient_of(l), &one).sub(&b.mul_term(lb.quotient_of(l), &one));
                self.normal_form(&s).is_ok_and(|r| r.is_zero())
            })
        })
    }
}
