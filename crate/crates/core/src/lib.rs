pub mod algebra;
pub mod document;
pub mod enumerate;
pub mod error;
pub mod hull;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod orbit;
pub mod reproduce;
pub mod stability;
pub mod tables;

pub use error::{Error, Result};
