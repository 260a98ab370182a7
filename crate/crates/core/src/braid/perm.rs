//! Permutations of strand positions.
//!
//! A table `p` of length `n` is read as an arrangement: `p[j]` is the
//! starting position of the strand that ends at position `j`. Products
//! compose as functions, `(p ∘ q)[j] = p[q[j]]`, which makes the braid
//! projection a homomorphism in word order: `π(uv) = π(u) ∘ π(v)`.

use std::fmt;

use super::BraidError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self, BraidError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(BraidError::NotBijection);
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    /// Transposition of positions `k` and `k + 1` (0-indexed).
    pub fn adjacent_transposition(n: usize, k: usize) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(k, k + 1);
        Permutation { image }
    }

    /// The order-reversing permutation `j ↦ n − 1 − j`.
    pub fn reversal(n: usize) -> Self {
        Permutation { image: (0..n).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, j: usize) -> usize {
        self.image[j]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_reversal(&self) -> bool {
        let n = self.image.len();
        self.image.iter().enumerate().all(|(i, &v)| v == n - 1 - i)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "permutation size mismatch");
        Permutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// Conjugation by the reversal, `j ↦ n − 1 − p[n − 1 − j]`.
    pub fn flip(&self) -> Permutation {
        let n = self.image.len();
        Permutation {
            image: (0..n).map(|j| n - 1 - self.image[n - 1 - j]).collect(),
        }
    }

    pub(crate) fn swap_entries(&mut self, k: usize) {
        self.image.swap(k, k + 1);
    }

    /// Cycle lengths including fixed points, sorted ascending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.image.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.image[j];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        lengths
    }

    pub fn order(&self) -> u128 {
        fn gcd(a: u128, b: u128) -> u128 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        self.cycle_type()
            .into_iter()
            .fold(1u128, |acc, c| acc / gcd(acc, c as u128) * c as u128)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.image)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Sorted cycle lengths of `p`.
pub fn cycle_type(p: &Permutation) -> Vec<usize> {
    p.cycle_type()
}
