//! Finite-field toolkit for MDS codes, extensions of Reed–Solomon codes and
//! the subspace conditions equivalent to the existence of long MDS codes.

pub mod codes;
pub mod combinat;
pub mod equivalence;
pub mod field;
pub mod format;
pub mod linalg;
pub mod polyspace;
pub mod searchb;
pub mod suite;

pub use codes::{CodeError, CodeMatrix};
pub use field::{FieldCtx, FieldError, Gf};
pub use linalg::{LinalgError, Matrix, Subspace};
pub use polyspace::{PolyError, PolyFn};
