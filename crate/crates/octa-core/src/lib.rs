//! Exact evaluation of the octahedron recurrence over arbitrary initial
//! surfaces, the crosses-and-wrenches graphs attached to them, and the
//! machinery relating the two: matching enumeration, graph rewrites,
//! condensation identities, exponent recovery, heights, and exact sampling.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod laurent;
pub mod matching;
pub mod recurrence;
pub mod render;
pub mod sampler;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
