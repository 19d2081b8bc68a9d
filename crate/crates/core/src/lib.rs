//! Correct test sequences, Kakeya sets and polynomial identity testing over
//! prime fields.

pub mod bounds;
pub mod circuit;
pub mod cts;
pub mod error;
pub mod field;
pub mod kakeya;
pub mod linalg;
pub mod nullsatz;
pub mod poly;
pub mod secante;
pub mod variety;

#[cfg(test)]
mod testutil;

pub use circuit::{Circuit, Evaluable, Node};
pub use cts::{CtsVerdict, Discriminant, PolyFamily};
pub use error::{Error, Result};
pub use field::{Point, PrimeField, Rng};
pub use linalg::Matrix;
pub use poly::{DegreeProfile, Monomial, MultiPoly};
