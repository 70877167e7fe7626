//! JSON documents holding one form: exponent tuples with exact coefficients.
//!
//! Canonical layout, which [`PolynomialDocument::emit`] writes and which
//! parses back byte for byte:
//!
//! ```text
//! {
//!   "n": 2,
//!   "d": 3,
//!   "terms": [
//!     {"exp": [3, 0, 0], "coeff": "1"},
//!     {"exp": [0, 1, 2], "coeff": "-3/7"}
//!   ],
//!   "metadata": {"name":"example"}
//! }
//! ```
//!
//! Terms are sorted by decreasing exponent tuple. `"field"` (`"rational"` or
//! `"prime:<p>"`) and `"metadata"` are optional.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;
use serde_json::Value;

use crate::algebra::field::{format_rational, parse_rational, Field, FieldSpec};
use crate::algebra::monomial::Monomial;
use crate::algebra::poly::Polynomial;
use crate::error::{Error, Result};
use crate::lattice::{SimplexContext, SupportSet};

pub const POLYNOMIAL_SCHEMA_JSON: &str = include_str!("../data/polynomial_document.schema.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub exp: Vec<u32>,
    /// Reduced representative in `[0, p)` for prime fields.
    pub coeff: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialDocument {
    pub n: usize,
    pub d: u32,
    pub field: Option<FieldSpec>,
    pub terms: Vec<Term>,
    pub metadata: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exp: Vec<Value>,
    coeff: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    n: usize,
    d: u32,
    #[serde(default)]
    field: Option<String>,
    terms: Vec<RawTerm>,
    #[serde(default)]
    metadata: Value,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDocument(msg.into())
}

fn parse_coeff(v: &Value, field: Option<FieldSpec>) -> Result<BigRational> {
    let q = match v {
        Value::String(s) => parse_rational(s)?,
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string())?,
        other => return Err(Error::MalformedRational(other.to_string())),
    };
    match field {
        Some(FieldSpec::Prime(p)) => {
            if !q.is_integer() {
                return Err(Error::MalformedRational(format!("{} is not an integer mod {p}", format_rational(&q))));
            }
            let p = BigInt::from(p);
            let r = ((q.to_integer() % &p) + &p) % &p;
            Ok(BigRational::from_integer(r))
        }
        _ => Ok(q),
    }
}

impl PolynomialDocument {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let raw: RawDocument = serde_json::from_slice(bytes).map_err(|e| malformed(e.to_string()))?;
        if raw.n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if raw.d == 0 {
            return Err(Error::InvalidDegree(0));
        }
        let field = raw.field.as_deref().map(str::parse::<FieldSpec>).transpose()?;
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in &raw.terms {
            let exp = t
                .exp
                .iter()
                .map(|v| v.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| malformed(format!("bad exponent {v}"))))
                .collect::<Result<Vec<u32>>>()?;
            if exp.len() != raw.n + 1 {
                return Err(Error::ArityMismatch { exponent: exp.clone(), expected: raw.n + 1, got: exp.len() });
            }
            let w: u32 = exp.iter().sum();
            if w != raw.d {
                return Err(Error::WeightMismatch { exponent: exp, expected: raw.d, got: w });
            }
            let coeff = parse_coeff(&t.coeff, field)?;
            if coeff.is_zero() {
                return Err(Error::ZeroCoefficient(exp));
            }
            if !seen.insert(exp.clone()) {
                return Err(Error::DuplicateExponent(exp));
            }
            terms.push(Term { exp, coeff });
        }
        terms.sort_by(|a, b| b.exp.cmp(&a.exp));
        Ok(PolynomialDocument { n: raw.n, d: raw.d, field, terms, metadata: raw.metadata })
    }

    pub fn emit(&self) -> String {
        let mut out = format!("{{\n  \"n\": {},\n  \"d\": {},\n", self.n, self.d);
        if let Some(f) = self.field {
            out.push_str(&format!("  \"field\": \"{f}\",\n"));
        }
        if self.terms.is_empty() {
            out.push_str("  \"terms\": []");
        } else {
            out.push_str("  \"terms\": [\n");
            let lines: Vec<String> = self
                .terms
                .iter()
                .map(|t| {
                    let exp: Vec<String> = t.exp.iter().map(u32::to_string).collect();
                    format!("    {{\"exp\": [{}], \"coeff\": \"{}\"}}", exp.join(", "), format_rational(&t.coeff))
                })
                .collect();
            out.push_str(&lines.join(",\n"));
            out.push_str("\n  ]");
        }
        if !self.metadata.is_null() {
            out.push_str(&format!(",\n  \"metadata\": {}", self.metadata));
        }
        out.push_str("\n}\n");
        out
    }

    /// Document with coefficient 1 on every monomial of `s`.
    pub fn from_support(ctx: &SimplexContext, s: &SupportSet, metadata: Value) -> Result<Self> {
        ctx.check_support(s)?;
        let terms = s.iter().map(|i| Term { exp: ctx.monomial(i).0.clone(), coeff: BigRational::from_integer(1.into()) }).collect();
        Ok(PolynomialDocument { n: ctx.n(), d: ctx.d(), field: None, terms, metadata })
    }

    pub fn from_polynomial<F: Field>(ctx: &SimplexContext, p: &Polynomial<F>, metadata: Value) -> Result<Self> {
        let field = p.field();
        let spec = field.spec();
        let mut terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let exp = m.exponents(ctx.nvars());
                ctx.index_of_checked(&exp)?;
                Ok(Term { exp, coeff: parse_rational(&field.format(c))? })
            })
            .collect::<Result<Vec<_>>>()?;
        terms.sort_by(|a, b| b.exp.cmp(&a.exp));
        let field = (spec != FieldSpec::Rational).then_some(spec);
        Ok(PolynomialDocument { n: ctx.n(), d: ctx.d(), field, terms, metadata })
    }

    pub fn check_context(&self, ctx: &SimplexContext) -> Result<()> {
        if self.n != ctx.n() || self.d != ctx.d() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn support(&self, ctx: &SimplexContext) -> Result<SupportSet> {
        self.check_context(ctx)?;
        let mut s = ctx.empty_support();
        for t in &self.terms {
            s.insert(ctx.index_of_checked(&t.exp)?);
        }
        Ok(s)
    }

    pub fn to_polynomial<F: Field>(&self, field: &F) -> Result<Polynomial<F>> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let c = field.from_rational(&t.coeff)?;
                if field.is_zero(&c) {
                    return Err(Error::ZeroCoefficient(t.exp.clone()));
                }
                Ok((Monomial::from_exponents(&t.exp)?, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::from_terms(field.clone(), self.n + 1, terms))
    }

    /// Whether some coefficient is negative (never the case for prime fields).
    pub fn has_negative(&self) -> bool {
        self.terms.iter().any(|t| t.coeff.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::RationalField;
    use crate::lattice::build_simplex;

    fn fermat_text() -> String {
        let mut s = String::from("{\n  \"n\": 2,\n  \"d\": 3,\n  \"terms\": [\n");
        s.push_str("    {\"exp\": [3, 0, 0], \"coeff\": \"1\"},\n");
        s.push_str("    {\"exp\": [0, 3, 0], \"coeff\": \"1\"},\n");
        s.push_str("    {\"exp\": [0, 0, 3], \"coeff\": \"1\"}\n  ]\n}\n");
        s
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = fermat_text();
        let doc = PolynomialDocument::parse(text.as_bytes()).unwrap();
        assert_eq!(doc.emit(), text);
    }

    #[test]
    fn out_of_order_terms_are_sorted() {
        let text = r#"{"n": 1, "d": 2, "terms": [{"exp": [0, 2], "coeff": "2/4"}, {"exp": [2, 0], "coeff": -1}]}"#;
        let doc = PolynomialDocument::parse(text.as_bytes()).unwrap();
        assert_eq!(doc.terms[0].exp, vec![2, 0]);
        assert_eq!(format_rational(&doc.terms[1].coeff), "1/2");
        let again = PolynomialDocument::parse(doc.emit().as_bytes()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn error_codes_are_distinct() {
        let cases = [
            (r#"{"n":1,"d":2,"terms":[{"exp":[1,1],"coeff":"1"},{"exp":[1,1],"coeff":"2"}]}"#, "duplicate-exponent"),
            (r#"{"n":1,"d":3,"terms":[{"exp":[1,1],"coeff":"1"}]}"#, "weight-mismatch"),
            (r#"{"n":1,"d":2,"terms":[{"exp":[2,0],"coeff":"0/5"}]}"#, "zero-coefficient"),
            (r#"{"n":1,"d":2,"terms":[{"exp":[2,0],"coeff":"1.5"}]}"#, "malformed-rational"),
            (r#"{"n":1,"d":2,"terms":[{"exp":[2,0,0],"coeff":"1"}]}"#, "arity-mismatch"),
            (r#"{"n":1,"d":2,"terms":[{"exp":[2,0],"coeff":"1"}],"extra":1}"#, "malformed-document"),
            (r#"{"n":1,"d":2,"field":"prime:2","terms":[{"exp":[2,0],"coeff":"4"}]}"#, "zero-coefficient"),
        ];
        for (text, code) in cases {
            assert_eq!(PolynomialDocument::parse(text.as_bytes()).unwrap_err().code(), code, "{text}");
        }
    }

    #[test]
    fn prime_coefficients_reduce() {
        let text = r#"{"n":1,"d":2,"field":"prime:7","terms":[{"exp":[2,0],"coeff":"-1"}]}"#;
        let doc = PolynomialDocument::parse(text.as_bytes()).unwrap();
        assert_eq!(format_rational(&doc.terms[0].coeff), "6");
        assert!(doc.emit().contains("\"field\": \"prime:7\""));
    }

    #[test]
    fn polynomial_conversion() {
        let ctx = build_simplex(2, 3).unwrap();
        let doc = PolynomialDocument::parse(fermat_text().as_bytes()).unwrap();
        assert_eq!(doc.support(&ctx).unwrap().len(), 3);
        let p = doc.to_polynomial(&RationalField).unwrap();
        let back = PolynomialDocument::from_polynomial(&ctx, &p, Value::Null).unwrap();
        assert_eq!(back, doc);
    }
}
