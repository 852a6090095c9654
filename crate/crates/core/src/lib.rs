//! Exact arithmetic for real quadratic fields: continued fractions, ideal
//! factorization, indecomposable totally positive elements, zeta values at
//! negative integers, and the rank bounds for universal quadratic lattices
//! built from them.

pub mod bounds;
pub mod cfrac;
pub mod enumerate;
pub mod error;
pub mod ideals;
pub mod indec;
pub mod intmath;
pub mod interval;
pub mod qfield;
pub mod suite;
pub mod zeta;

pub use error::{Error, Result};
pub use qfield::{FieldElement, QuadraticField};
