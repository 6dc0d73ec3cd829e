//! Exact computations in the `n`-th order chromatic algebra.

pub mod algebra;
pub mod diagram;
pub mod error;
pub mod genset;
pub mod ncpartition;
pub mod qscalar;
pub mod rewrite;
pub mod sampling;

pub use algebra::{AlgebraElement, ProductCache, StructureTable};
pub use diagram::{Diagram, Endpoint};
pub use error::{Error, Result};
pub use genset::{GeneratorExpression, GeneratorSymbol};
pub use ncpartition::{BlockKind, BoundaryIndex, Partition, Side};
pub use qscalar::{Polynomial, RationalFunction};
