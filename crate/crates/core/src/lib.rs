//! qclab: desk-scale geometry of flip graph manifolds.
//!
//! The library builds an exact combinatorial model of the universal cover of
//! a flip graph manifold (tree-of-pieces with flip-glued walls), the special
//! path system on it, contracting-projection tests, Morse-element
//! classification through the dual-tree action, and an exact analyzer for
//! abelian-by-cyclic groups Z^k x| Z.

pub mod abc;
pub mod contract;
pub mod error;
pub mod flip;
pub mod num;
pub mod oracle;
pub mod paths;
pub mod report;
pub mod sampling;
pub mod spine;
pub mod words;

pub use error::{Error, Result};
