//! Self-similar groups: wreath recursions, contraction and nuclei,
//! rewriting, nucleus covers, coset enumeration, kernel chains and
//! convergence in the space of marked groups.

pub mod catalog;
pub mod contraction;
pub mod cosets;
pub mod covers;
pub mod error;
pub mod gomega;
pub mod grig;
pub mod growth;
pub mod kernel;
pub mod markedgroups;
pub mod metabelian;
pub mod rewriting;

pub use error::{Error, Result};
pub use kernel::{parse_recursion, parse_word, Letter, Permutation, Vertex, Word, WreathRecursion};
