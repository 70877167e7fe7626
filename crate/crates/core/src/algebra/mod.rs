//! Polynomial arithmetic, Groebner bases and Hilbert series.

pub mod field;
pub mod groebner;
pub mod hilbert;
pub mod jacobian;
pub mod monomial;
pub mod poly;

pub use field::{Field, FieldSpec, PrimeField, RationalField};
pub use groebner::{groebner_basis, groebner_basis_with, GroebnerBasis, GroebnerLimits};
pub use hilbert::{hilbert_dim_deg, HilbertData};
pub use monomial::Monomial;
pub use poly::Polynomial;
