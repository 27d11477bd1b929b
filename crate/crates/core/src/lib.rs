//! Growth rates of handlebody automorphisms.
//!
//! The crate works with the finite combinatorial shadow of a handlebody
//! automorphism: a graph map on the dual graph of a handle decomposition, the
//! nonnegative incidence matrix it induces, and the Perron–Frobenius growth
//! rate of that matrix. On top of that it provides
//!
//! - [`tightening`]: row moves on incidence matrices with negative weighted
//!   gain and the resulting drop in growth,
//! - [`freegroup`]: free-group endomorphisms induced on `π₁`, with
//!   abelianization and a Stallings-folding surjectivity test,
//! - [`penner`]: Penner pairs of curve systems, twist-product matrices and
//!   boundary dilatations, and the boundary pair built from a dual arc.
//!
//! All operations are pure functions over immutable values.

pub mod freegroup;
pub mod graph;
pub mod matrix;
pub mod penner;
pub mod schema;
pub mod spectral;
pub mod tightening;

pub use graph::{EdgePath, Graph, GraphMap, Token};
pub use matrix::NonNegMatrix;
pub use spectral::{PfOptions, PfResult, SccReport};
