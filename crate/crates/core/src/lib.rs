pub mod bott;
pub mod classes;
pub mod clifford;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod homotopy;
pub mod json;
pub mod linalg;
pub mod maps;
pub mod module;
pub mod monomial;
pub mod quasi;
pub mod report;
pub mod spectral;
pub mod suites;
pub mod unit;

pub use error::{Error, Result};
