//! Exact evaluation of Baernstein-type norms over compact hereditary
//! families, their renormings and duals, and the probes built on them.

pub mod dual;
pub mod error;
pub mod exact;
pub mod family;
pub mod ordinal;
pub mod par;
pub mod primal;
pub mod probes;
pub mod renorm;
pub mod sampling;
pub mod vector;

pub use error::{Error, Result};
pub use exact::{Interval, Rational};
pub use family::{FamilySpec, Point, Space};
pub use ordinal::Ordinal;
pub use primal::{norm_sq, norm_sq_bruteforce, NormResult};
pub use vector::SparseVector;
