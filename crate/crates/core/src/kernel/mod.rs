//! Words, permutations and wreath recursions acting on the rooted tree.

mod parse;
mod perm;
mod recursion;
mod word;

pub use parse::{parse_word, parse_word_list};
pub use perm::Permutation;
pub use recursion::{parse_recursion, Generator, Vertex, WreathRecursion, DEFAULT_LEVEL_CAP};
pub use word::{Letter, Word, WordDisplay};
