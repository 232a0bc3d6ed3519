//! Directed minors, elimination orderings and Kelly-width for small digraphs,
//! with a constructive test for the three forbidden minors of partial 1-DAGs.
//!
//! Exhaustive routines are bounded by [`Limits`] and fail with
//! [`Error::Capacity`] on inputs beyond desk scale.

pub mod catalog;
pub mod decomp;
pub mod digraph;
pub mod elimination;
pub mod error;
pub mod extractor;
pub mod game;
pub mod genlab;
pub mod limits;
pub mod minor_ops;
pub mod oracle;

pub use catalog::{Obstruction, ObstructionCatalog};
pub use digraph::{Digraph, Vertex, VertexSet};
pub use error::{Error, Result};
pub use limits::Limits;
pub use minor_ops::{MinorOperation, WitnessScript};
