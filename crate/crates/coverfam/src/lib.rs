//! Exact combinatorics of t-intersecting k-uniform set families and their
//! t-covering numbers: bitmask ground sets, big-integer size formulas,
//! builders for the three candidate extremal families, an exact
//! branch-and-bound search for maximum families with large covering number,
//! and a property-check suite that exercises the structural facts the rest
//! of the crate relies on.

pub mod checkpoint;
pub mod combinat;
pub mod constructions;
pub mod document;
pub mod error;
pub mod family;
pub mod formulas;
pub mod ground;
pub mod search;
pub mod verifier;

pub use error::{Error, Result};
pub use family::{CoverFamily, Family, IteratedTau};
pub use formulas::Label;
pub use ground::{KSet, Params};
pub use search::{Budget, SearchResult, SearchStatus};
