pub mod address;
pub mod error;
pub mod tree;
pub mod embedding;
pub mod classify;
pub mod oracle;
pub mod monoid;
pub mod gallery;

pub use address::{addr, Address};
pub use error::{Error, Result};
pub use tree::{Cone, EndApprox, FiniteTree, RaySpec, Tree, TreeTerm};
pub use embedding::{CubicTranslation, Embedding, PeriodicEnd, ValidityReport, Word};
