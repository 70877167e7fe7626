use cubicgit_core::document::{PolynomialDocument, POLYNOMIAL_SCHEMA_JSON};
use cubicgit_core::lattice::build_simplex;
use cubicgit_core::tables::ExpectedTables;
use serde_json::Value;

const F1: &str = include_str!("../data/documents/f1_support.json");
const FERMAT: &str = include_str!("../data/documents/fermat.json");
const R23: &str = include_str!("../data/documents/r23_support.json");

#[test]
fn bundled_documents_round_trip_byte_for_byte() {
    for text in [F1, FERMAT, R23] {
        let doc = PolynomialDocument::parse(text.as_bytes()).unwrap();
        assert_eq!(doc.emit(), text);
    }
}

#[test]
fn bundled_documents_match_the_schema() {
    let schema: Value = serde_json::from_str(POLYNOMIAL_SCHEMA_JSON).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    for text in [F1, FERMAT, R23] {
        assert!(v.is_valid(&serde_json::from_str(text).unwrap()));
    }
    let bad: Value = serde_json::from_str(r#"{"n": 1, "d": 2, "terms": [{"exp": [2, 0], "coeff": "1.5"}]}"#).unwrap();
    assert!(!v.is_valid(&bad));
}

#[test]
fn fermat_document_has_seven_terms() {
    let ctx = build_simplex(6, 3).unwrap();
    let doc = PolynomialDocument::parse(FERMAT.as_bytes()).unwrap();
    assert_eq!(doc.support(&ctx).unwrap().len(), 7);
}

#[test]
fn f1_document_is_the_first_family() {
    let ctx = build_simplex(6, 3).unwrap();
    let atlas = ExpectedTables::bundled().unwrap().atlas(&ctx).unwrap();
    let doc = PolynomialDocument::parse(F1.as_bytes()).unwrap();
    assert_eq!(doc.support(&ctx).unwrap(), atlas[0].support);
    let r23 = PolynomialDocument::parse(R23.as_bytes()).unwrap();
    assert_eq!(r23.support(&ctx).unwrap(), atlas[22].support);
}

#[test]
fn unsorted_input_is_resorted() {
    let text = r#"{"n": 2, "d": 3, "terms": [{"exp": [0, 0, 3], "coeff": 2}, {"exp": [3, 0, 0], "coeff": "-4/6"}]}"#;
    let doc = PolynomialDocument::parse(text.as_bytes()).unwrap();
    let emitted = doc.emit();
    assert!(emitted.contains("{\"exp\": [3, 0, 0], \"coeff\": \"-2/3\"},\n    {\"exp\": [0, 0, 3], \"coeff\": \"2\"}"));
    assert_eq!(PolynomialDocument::parse(emitted.as_bytes()).unwrap().emit(), emitted);
}
