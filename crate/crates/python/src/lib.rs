//! Python module `cubicgit`.

use cubicgit_core::algebra::jacobian::{jacobian_scheme_with, singular_locus_with};
use cubicgit_core::algebra::{Field, FieldSpec, GroebnerLimits, HilbertData, PrimeField, RationalField};
use cubicgit_core::document::PolynomialDocument;
use cubicgit_core::enumerate::{enumerate_maximal_with, EnumerateOptions};
use cubicgit_core::lattice::build_simplex;
use cubicgit_core::reproduce::{reproduce as run_reproduce, ReproduceOptions, Scope};
use cubicgit_core::stability::{classify_wrt_torus, containing_families};
use cubicgit_core::tables::ExpectedTables;
use cubicgit_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(cubicgit, ResourceExhausted, PyException, "A computation exceeded its resource budget.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ResourceExhausted(m) => ResourceExhausted::new_err(m),
        other => PyValueError::new_err(format!("[{}] {other}", other.code())),
    }
}

fn field_spec(field: &str) -> PyResult<FieldSpec> {
    field.parse().map_err(py_err)
}

fn limits(max_pairs: Option<usize>, max_coefficient_bits: Option<u64>) -> GroebnerLimits {
    GroebnerLimits { max_pairs, max_coefficient_bits }
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).expect("value serializes");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Monomials of degree `d` in `n + 1` variables, in index order.
#[pyfunction]
#[pyo3(signature = (n, d=3))]
fn simplex(n: usize, d: u32) -> PyResult<Vec<String>> {
    let ctx = build_simplex(n, d).map_err(py_err)?;
    Ok(ctx.monomials().iter().map(|m| m.to_string().replace(' ', "*")).collect())
}

/// Maximal families as dicts with `vector`, `alternates` and `support`.
#[pyfunction]
#[pyo3(signature = (n, d=3, workers=0))]
fn enumerate(py: Python<'_>, n: usize, d: u32, workers: usize) -> PyResult<Py<PyAny>> {
    let ctx = build_simplex(n, d).map_err(py_err)?;
    let families = py
        .detach(|| enumerate_maximal_with(&ctx, &EnumerateOptions { workers, progress: None }))
        .map_err(py_err)?
        .0;
    let rows: Vec<serde_json::Value> = families
        .iter()
        .map(|f| {
            serde_json::json!({
                "vector": f.vector.weights(),
                "alternates": f.alternates.iter().map(|a| a.weights().to_vec()).collect::<Vec<_>>(),
                "support": f.support.iter().map(|i| ctx.monomial(i).to_string().replace(' ', "*")).collect::<Vec<_>>(),
            })
        })
        .collect();
    json_to_py(py, &serde_json::Value::Array(rows))
}

/// Canonical text of a polynomial document.
#[pyfunction]
fn canonical_document(text: &str) -> PyResult<String> {
    Ok(PolynomialDocument::parse(text.as_bytes()).map_err(py_err)?.emit())
}

/// Torus stability class, witness and containing bundled families of a
/// polynomial document (bundled atlas only for `n = 6, d = 3`).
#[pyfunction]
fn classify<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let doc = PolynomialDocument::parse(text.as_bytes()).map_err(py_err)?;
    let ctx = build_simplex(doc.n, doc.d).map_err(py_err)?;
    let s = doc.support(&ctx).map_err(py_err)?;
    let verdict = classify_wrt_torus(&ctx, &s).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("class", verdict.class.as_str())?;
    out.set_item("witness", verdict.witness.map(|w| w.into_inner()))?;
    let tables = ExpectedTables::bundled().map_err(py_err)?;
    if (tables.n, tables.d) == (doc.n, doc.d) {
        let atlas = tables.atlas(&ctx).map_err(py_err)?;
        let hits = containing_families(&ctx, &s, &atlas).map_err(py_err)?;
        out.set_item("containing", hits.iter().map(|h| h.index + 1).collect::<Vec<_>>())?;
    } else {
        out.set_item("containing", py.None())?;
    }
    Ok(out)
}

fn scheme_for<F: Field>(family: usize, field: &F, seed: u64, limits: GroebnerLimits) -> Result<HilbertData, Error> {
    let tables = ExpectedTables::bundled()?;
    let ctx = build_simplex(tables.n, tables.d)?;
    let atlas = tables.atlas(&ctx)?;
    let f = atlas.get(family.wrapping_sub(1)).ok_or(Error::UnknownFamily(family))?;
    jacobian_scheme_with(&ctx, &f.support, field, seed, limits)
}

/// `(dimension, degree)` of the singular locus of a seeded generic member of
/// bundled family `family`.
#[pyfunction]
#[pyo3(signature = (family, field="prime:2147483647", seed=1, max_pairs=None, max_coefficient_bits=None))]
fn singular(
    py: Python<'_>,
    family: usize,
    field: &str,
    seed: u64,
    max_pairs: Option<usize>,
    max_coefficient_bits: Option<u64>,
) -> PyResult<(i64, u64)> {
    let spec = field_spec(field)?;
    let lim = limits(max_pairs, max_coefficient_bits);
    let h = py
        .detach(|| match spec {
            FieldSpec::Rational => scheme_for(family, &RationalField, seed, lim),
            FieldSpec::Prime(p) => scheme_for(family, &PrimeField::new(p)?, seed, lim),
        })
        .map_err(py_err)?;
    Ok((h.dimension, h.degree))
}

/// `(dimension, degree)` of the singular locus of the form in a document.
#[pyfunction]
#[pyo3(signature = (text, field=None, max_pairs=None, max_coefficient_bits=None))]
fn singular_locus(
    py: Python<'_>,
    text: &str,
    field: Option<&str>,
    max_pairs: Option<usize>,
    max_coefficient_bits: Option<u64>,
) -> PyResult<(i64, u64)> {
    let doc = PolynomialDocument::parse(text.as_bytes()).map_err(py_err)?;
    let spec = match field {
        Some(f) => field_spec(f)?,
        None => doc.field.unwrap_or_default(),
    };
    let lim = limits(max_pairs, max_coefficient_bits);
    let h = py
        .detach(|| match spec {
            FieldSpec::Rational => singular_locus_with(&doc.to_polynomial(&RationalField)?, lim),
            FieldSpec::Prime(p) => singular_locus_with(&doc.to_polynomial(&PrimeField::new(p)?)?, lim),
        })
        .map_err(py_err)?;
    Ok((h.dimension, h.degree))
}

/// Recomputes the bundled tables; returns the report as a dict whose
/// `diffs` list is empty on success.
#[pyfunction]
#[pyo3(signature = (scope="all", seeds=3, workers=0, field="prime:2147483647"))]
fn reproduce(py: Python<'_>, scope: &str, seeds: usize, workers: usize, field: &str) -> PyResult<Py<PyAny>> {
    let scope: Scope = scope.parse().map_err(py_err)?;
    let opts = ReproduceOptions { seeds, workers, field: field_spec(field)?, ..Default::default() };
    let report = py.detach(|| run_reproduce(scope, &opts)).map_err(py_err)?;
    json_to_py(py, &serde_json::to_value(&report).expect("report serializes"))
}

#[pymodule]
fn cubicgit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ResourceExhausted", m.py().get_type::<ResourceExhausted>())?;
    m.add_function(wrap_pyfunction!(simplex, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_document, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(singular, m)?)?;
    m.add_function(wrap_pyfunction!(singular_locus, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
