use std::fmt;

use super::{BraidError, Permutation};

/// Strand count of a braid group `Bₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BraidParams {
    n: usize,
}

impl BraidParams {
    pub fn new(n: usize) -> Result<Self, BraidError> {
        if n < 2 {
            return Err(BraidError::TooFewStrands(n));
        }
        Ok(BraidParams { n })
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    /// Number of Artin generators, `n − 1`.
    pub fn generator_count(&self) -> usize {
        self.n - 1
    }
}

/// A freely reduced word over the Artin generators of `Bₙ`.
///
/// Letter `i > 0` is `x_i`, letter `-i` is `x_i⁻¹`, with `1 ≤ i ≤ n − 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    n: usize,
    letters: Vec<i32>,
}

fn push_reduced(out: &mut Vec<i32>, letter: i32) {
    if out.last() == Some(&-letter) {
        out.pop();
    } else {
        out.push(letter);
    }
}

impl BraidWord {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "braid groups need at least two strands");
        BraidWord { n, letters: Vec::new() }
    }

    pub fn new(n: usize, letters: impl IntoIterator<Item = i32>) -> Result<Self, BraidError> {
        BraidParams::new(n)?;
        let mut out = Vec::new();
        for letter in letters {
            check_letter(letter, n)?;
            push_reduced(&mut out, letter);
        }
        Ok(BraidWord { n, letters: out })
    }

    /// Builds a word from letters already known to be in range.
    pub(crate) fn from_letters_unchecked(n: usize, letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out = Vec::new();
        for letter in letters {
            debug_assert!(check_letter(letter, n).is_ok());
            push_reduced(&mut out, letter);
        }
        BraidWord { n, letters: out }
    }

    pub fn generator(n: usize, letter: i32) -> Result<Self, BraidError> {
        BraidWord::new(n, [letter])
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|&l| l > 0)
    }

    pub fn multiply(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        check_same(self.n, other.n)?;
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Ok(BraidWord { n: self.n, letters: out })
    }

    /// Product of several words on the same strand count.
    pub fn product<'a>(n: usize, words: impl IntoIterator<Item = &'a BraidWord>) -> Result<BraidWord, BraidError> {
        let mut out = Vec::new();
        for w in words {
            check_same(n, w.n)?;
            for &l in &w.letters {
                push_reduced(&mut out, l);
            }
        }
        Ok(BraidWord { n, letters: out })
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// Image under the projection `Bₙ → Sₙ`.
    pub fn permutation(&self) -> Permutation {
        let mut p = Permutation::identity(self.n);
        for &l in &self.letters {
            p.swap_entries(l.unsigned_abs() as usize - 1);
        }
        p
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().is_identity()
    }

    /// Conjugate `z · self · z⁻¹`.
    pub fn conjugate_by(&self, z: &BraidWord) -> Result<BraidWord, BraidError> {
        BraidWord::product(self.n, [z, self, &z.inverse()])
    }
}

fn check_letter(letter: i32, n: usize) -> Result<(), BraidError> {
    let idx = letter.unsigned_abs() as usize;
    if letter == 0 || idx >= n {
        return Err(BraidError::IndexOutOfRange { index: letter as i64, n });
    }
    Ok(())
}

pub(crate) fn check_same(a: usize, b: usize) -> Result<(), BraidError> {
    if a != b {
        return Err(BraidError::StrandMismatch { left: a, right: b });
    }
    Ok(())
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BraidWord(n={}, {:?})", self.n, self.letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated signed generator indices, e.g. `"1 -2 1"`.
pub fn parse_word(text: &str, n: usize) -> Result<BraidWord, BraidError> {
    BraidParams::new(n)?;
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        let digits = token.strip_prefix('-').unwrap_or(token);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(BraidError::Syntax(token.to_string()));
        }
        let magnitude: i64 = digits
            .parse()
            .map_err(|_| BraidError::Syntax(token.to_string()))?;
        let value = if token.starts_with('-') { -magnitude } else { magnitude };
        if value == 0 || magnitude as u64 >= n as u64 {
            return Err(BraidError::IndexOutOfRange { index: value, n });
        }
        letters.push(value as i32);
    }
    BraidWord::new(n, letters)
}

/// The positive half twist `(x₁⋯x_{n−1})(x₁⋯x_{n−2})⋯(x₁)`.
pub fn delta(n: usize) -> BraidWord {
    assert!(n >= 2, "braid groups need at least two strands");
    let mut letters = Vec::with_capacity(n * (n - 1) / 2);
    for top in (1..n).rev() {
        letters.extend(1..=top as i32);
    }
    BraidWord { n, letters }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_word("1 2 1", 3).unwrap().letters(), &[1, 2, 1]);
        assert!(parse_word("1 -1", 3).unwrap().is_empty());
        assert!(parse_word("", 3).unwrap().is_empty());
        assert!(matches!(parse_word("5", 4), Err(BraidError::IndexOutOfRange { index: 5, n: 4 })));
        assert!(matches!(parse_word("0", 4), Err(BraidError::IndexOutOfRange { .. })));
        assert!(matches!(parse_word("-3", 3), Err(BraidError::IndexOutOfRange { index: -3, .. })));
        assert!(matches!(parse_word("1 x", 3), Err(BraidError::Syntax(_))));
        assert!(matches!(parse_word("--1", 3), Err(BraidError::Syntax(_))));
        assert!(matches!(parse_word("+1", 3), Err(BraidError::Syntax(_))));
        assert!(matches!(parse_word("99999999999999999999", 3), Err(BraidError::Syntax(_))));
        assert!(matches!(parse_word("1", 1), Err(BraidError::TooFewStrands(1))));
    }

    #[test]
    fn multiply_examples() {
        let w = |l: &[i32]| BraidWord::new(3, l.iter().copied()).unwrap();
        assert!(w(&[1]).multiply(&w(&[-1])).unwrap().is_empty());
        assert_eq!(w(&[1]).multiply(&w(&[2])).unwrap().letters(), &[1, 2]);
        assert!(w(&[1, 2]).multiply(&w(&[-2, -1])).unwrap().is_empty());
        let other = BraidWord::identity(4);
        assert!(matches!(w(&[1]).multiply(&other), Err(BraidError::StrandMismatch { left: 3, right: 4 })));
    }

    #[test]
    fn construction_reduces_cascading_cancellations() {
        let w = BraidWord::new(4, [1, 2, 3, -3, -2, -1, 2]).unwrap();
        assert_eq!(w.letters(), &[2]);
    }

    #[test]
    fn invert_examples() {
        let w = BraidWord::new(3, [1, 2]).unwrap();
        assert_eq!(w.inverse().letters(), &[-2, -1]);
        assert!(BraidWord::identity(3).inverse().is_empty());
        let w = BraidWord::new(3, [1, -2, 1]).unwrap();
        assert_eq!(w.inverse().letters(), &[-1, 2, -1]);
    }

    #[test]
    fn permutation_examples() {
        let x1 = BraidWord::new(3, [1]).unwrap();
        assert_eq!(x1.permutation().image(), &[1, 0, 2]);
        assert!(BraidWord::identity(3).permutation().is_identity());
        // x₁x₂: the 3-cycle 0 → 1 → 2 → 0
        let x1x2 = BraidWord::new(3, [1, 2]).unwrap();
        assert_eq!(x1x2.permutation().image(), &[1, 2, 0]);
        let t1 = Permutation::adjacent_transposition(3, 0);
        let t2 = Permutation::adjacent_transposition(3, 1);
        assert_eq!(x1x2.permutation(), t1.compose(&t2));
    }

    #[test]
    fn delta_words() {
        assert_eq!(delta(2).letters(), &[1]);
        assert_eq!(delta(3).letters(), &[1, 2, 1]);
        let d4 = delta(4);
        assert_eq!(d4.len(), 6);
        assert!(d4.permutation().is_reversal());
        for n in 2..10 {
            assert!(delta(n).permutation().is_reversal(), "n={n}");
            assert_eq!(delta(n).len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn purity() {
        assert!(BraidWord::new(3, [1, 1]).unwrap().is_pure());
        assert!(!BraidWord::new(3, [1]).unwrap().is_pure());
        for n in 2..9 {
            let d = delta(n);
            assert!(d.multiply(&d).unwrap().is_pure());
        }
    }
}
