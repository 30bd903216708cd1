//! Numerical toolkit for holomorphic vector fields on the unit ball of C^n
//! with a boundary regular null point at `e_1`.

pub mod cauchy;
pub mod cert;
pub mod corpus;
pub mod cvec;
pub mod error;
pub mod extrapolate;
pub mod field;
pub mod flow;
pub mod geometry;
pub mod jet;
pub mod jet_criteria;
pub mod poly;
pub mod probe;
pub mod report;
pub mod scalar;
pub mod slice;
pub mod field_file;

pub use cvec::CxVec;
pub use error::{Error, Result};
pub use field::{EvalDomain, RationalField};
pub use num_complex::Complex64;
