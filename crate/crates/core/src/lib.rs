//! Key establishment over braid groups based on the decomposition problem.
//!
//! Each party picks a private braid together with a few elements that
//! commute with it, publishes those elements, and then sends `N(x·w·y)` for
//! a public base braid `w`, where `x` is its private braid and `y` is drawn
//! from the subgroup the peer published. Both sides end up with the same
//! braid in Garside normal form.
//!
//! Modules:
//! - [`braid`]: words, permutations, and the left canonical form.
//! - [`keygen`]: commuting pairs and subgroup sampling.
//! - [`protocol`]: the two party state machines and the in-process handshake.
//! - [`wire`]: the binary frame and transcript format.
//! - [`cryptanalysis`]: brute-force and length-based attacks and the
//!   cycle-type distinguisher.
//! - [`cli`]: argument parsing and command dispatch for the `braidkex` binary.

pub mod braid;
pub mod cli;
pub mod cryptanalysis;
pub mod keygen;
pub mod protocol;
pub mod wire;

pub use braid::{BraidError, BraidWord, CanonicalForm, Permutation};
