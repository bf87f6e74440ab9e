//! Floquet engineering of blockade-constrained Rydberg chains.

pub mod basis;
pub mod bethe;
pub mod coherence;
pub mod config;
pub mod domainwall;
pub mod drive;
pub mod effective;
pub mod error;
pub mod hardware;
pub mod linalg;
pub mod observables;
pub mod operators;
pub mod scenarios;

pub use basis::{Boundary, ConstrainedBasis};
pub use error::{Error, Result};
pub use operators::SparseOperator;
