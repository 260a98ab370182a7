//! Braid-group arithmetic for `Bₙ`: words, the projection to `Sₙ`, the
//! half twist `Δ`, and the Garside left canonical form.

mod canonical;
mod perm;
mod word;

use thiserror::Error;

pub use canonical::{
    canonical_invert, canonical_multiply, canonical_to_word, commutes, equals, is_left_weighted,
    is_pure, permutation_of, to_canonical, CanonicalForm, PermutationBraidFactor,
};
pub use perm::{cycle_type, Permutation};
pub use word::{delta, parse_word, BraidParams, BraidWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("braid groups need at least two strands, got {0}")]
    TooFewStrands(usize),
    #[error("invalid generator token {0:?}")]
    Syntax(String),
    #[error("generator index {index} out of range 1..{} for n={n}", n - 1)]
    IndexOutOfRange { index: i64, n: usize },
    #[error("strand-count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },
    #[error("permutation table is not a bijection")]
    NotBijection,
    #[error("factor {0} is the identity or the half twist")]
    TrivialFactor(usize),
    #[error("factor pair at index {0} is not left-weighted")]
    NotLeftWeighted(usize),
}
