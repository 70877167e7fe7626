//! Sparse polynomials with terms sorted by decreasing degrevlex order.

use std::collections::BTreeMap;
use std::fmt;

use super::field::Field;
use super::monomial::{Monomial, MAX_VARS};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Polynomial<F: Field> {
    field: F,
    nvars: usize,
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> Polynomial<F> {
    pub fn zero(field: F, nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Polynomial { field, nvars, terms: Vec::new() }
    }

    pub fn constant(field: F, nvars: usize, c: F::Elem) -> Self {
        Self::from_terms(field, nvars, [(Monomial::ONE, c)])
    }

    pub fn variable(field: F, nvars: usize, k: usize) -> Self {
        assert!(k < nvars);
        let one = field.one();
        Self::from_terms(field, nvars, [(Monomial::var(k), one)])
    }

    /// Combines repeated monomials and drops zero coefficients.
    pub fn from_terms(field: F, nvars: usize, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut map: BTreeMap<Monomial, F::Elem> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert!((nvars..MAX_VARS).all(|k| m.exponent(k) == 0));
            match map.get_mut(&m) {
                Some(v) => *v = field.add(v, &c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        let terms = map.into_iter().rev().filter(|(_, c)| !field.is_zero(c)).collect();
        Polynomial { field, nvars, terms }
    }

    pub fn from_exponent_terms(
        field: F,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, F::Elem)>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::LengthMismatch { expected: nvars, got: e.len() });
            }
            out.push((Monomial::from_exponents(&e)?, c));
        }
        Ok(Self::from_terms(field, nvars, out))
    }

    /// Trusted constructor: terms already strictly decreasing and nonzero.
    pub(crate) fn from_sorted(field: F, nvars: usize, terms: Vec<(Monomial, F::Elem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !field.is_zero(c)));
        Polynomial { field, nvars, terms }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, F::Elem)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.terms.first().map(|t| t.0)
    }

    pub fn coefficient(&self, m: Monomial) -> F::Elem {
        self.terms
            .binary_search_by(|t| m.cmp(&t.0))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| self.field.zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.degree() == w[1].0.degree())
    }

    pub fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != o.nvars {
            return Err(Error::VariableCountMismatch(self.nvars, o.nvars));
        }
        Ok(())
    }

    fn merge(&self, o: &Self, mut combine: impl FnMut(&F::Elem) -> F::Elem) -> Self {
        let f = &self.field;
        let mut out = Vec::with_capacity(self.len() + o.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < o.len() {
            if j == o.len() || (i < self.len() && self.terms[i].0 > o.terms[j].0) {
                out.push(self.terms[i].clone());
                i += 1;
            } else if i == self.len() || o.terms[j].0 > self.terms[i].0 {
                out.push((o.terms[j].0, combine(&o.terms[j].1)));
                j += 1;
            } else {
                let c = f.add(&self.terms[i].1, &combine(&o.terms[j].1));
                if !f.is_zero(&c) {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Polynomial { field: self.field.clone(), nvars: self.nvars, terms: out }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.merge(o, |c| c.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.merge(o, |c| self.field.neg(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(self.field.clone(), self.nvars);
        }
        let terms = self.terms.iter().map(|(m, a)| (*m, self.field.mul(a, c))).collect();
        Polynomial { field: self.field.clone(), nvars: self.nvars, terms }
    }

    pub fn mul_term(&self, m: Monomial, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(self.field.clone(), self.nvars);
        }
        let terms = self.terms.iter().map(|(t, a)| (t.mul(m), self.field.mul(a, c))).collect();
        Polynomial { field: self.field.clone(), nvars: self.nvars, terms }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = &self.field;
        let mut terms = Vec::with_capacity(self.len() * o.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                terms.push((a.mul(*b), f.mul(ca, cb)));
            }
        }
        Self::from_terms(self.field.clone(), self.nvars, terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.field.clone(), self.nvars, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, k: usize) -> Self {
        let f = &self.field;
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exponent(k);
                let q = m.without_var(k)?;
                Some((q, f.mul(c, &f.from_i64(e as i64))))
            })
            .collect::<Vec<_>>();
        // Removing one factor of x_k preserves the relative order of the
        // surviving terms, but a coefficient may vanish in characteristic p.
        let terms = terms.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
        Polynomial::from_sorted(self.field.clone(), self.nvars, terms)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&self.field.inv(c)),
        }
    }

    /// Substitutes `x_k -> images[k]` for every variable.
    pub fn compose(&self, images: &[Polynomial<F>]) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: images.len() });
        }
        let target = images.first().map_or(self.nvars, |p| p.nvars);
        for p in images {
            if p.nvars != target || p.field != self.field {
                return Err(Error::FieldMismatch);
            }
        }
        // Powers of each image are shared between terms.
        let mut powers: Vec<Vec<Polynomial<F>>> = images
            .iter()
            .map(|p| vec![Polynomial::constant(self.field.clone(), target, self.field.one()), p.clone()])
            .collect();
        let mut acc = Polynomial::zero(self.field.clone(), target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(self.field.clone(), target, c.clone());
            for (k, pk) in powers.iter_mut().enumerate() {
                let e = m.exponent(k) as usize;
                while pk.len() <= e {
                    let next = pk.last().expect("nonempty").mul(&images[k]);
                    pk.push(next);
                }
                if e > 0 {
                    t = t.mul(&pk[e]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let c = self.field.format(c);
                if *m == Monomial::ONE {
                    c
                } else if c == "1" {
                    m.fmt_vars(self.nvars)
                } else {
                    format!("{c}*{}", m.fmt_vars(self.nvars))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
