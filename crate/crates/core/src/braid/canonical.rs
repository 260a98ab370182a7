//! Garside left canonical form `Δᵖ · A₁ ⋯ A_k`.
//!
//! Each factor is a permutation braid stored as its arrangement table (see
//! [`Permutation`]). A factor is never the identity or `Δ`, and every
//! adjacent pair is left-weighted.

use std::fmt;

use super::word::{check_same, delta};
use super::{BraidError, BraidWord, Permutation};

/// A positive braid in which each pair of strands crosses at most once.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PermutationBraidFactor {
    perm: Permutation,
}

impl PermutationBraidFactor {
    pub fn new(perm: Permutation) -> Self {
        PermutationBraidFactor { perm }
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn strands(&self) -> usize {
        self.perm.len()
    }

    /// Generators `x_{k+1}` (returned 0-indexed as `k`) with which the factor can begin.
    pub fn starting_set(&self) -> Vec<usize> {
        let tracking = self.perm.inverse();
        let t = tracking.image();
        (0..t.len().saturating_sub(1)).filter(|&k| t[k] > t[k + 1]).collect()
    }

    /// Generators with which the factor can end, 0-indexed.
    pub fn finishing_set(&self) -> Vec<usize> {
        let r = self.perm.image();
        (0..r.len().saturating_sub(1)).filter(|&k| r[k] > r[k + 1]).collect()
    }

    /// A positive word realizing the factor (one letter per crossing).
    pub fn to_word(&self) -> BraidWord {
        let mut r = self.perm.clone();
        let mut tail = Vec::new();
        // Peel finishing generators off the right end until nothing is left.
        'outer: loop {
            for k in 0..r.len().saturating_sub(1) {
                if r.image()[k] > r.image()[k + 1] {
                    r.swap_entries(k);
                    tail.push(k as i32 + 1);
                    continue 'outer;
                }
            }
            break;
        }
        tail.reverse();
        BraidWord::from_letters_unchecked(self.perm.len(), tail)
    }
}

impl fmt::Debug for PermutationBraidFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Factor{:?}", self.perm.image())
    }
}

/// Does `finishing(a) ⊇ starting(b)` hold?
pub fn is_left_weighted(a: &Permutation, b: &Permutation) -> bool {
    let ra = a.image();
    let tb = b.inverse();
    let tb = tb.image();
    (0..ra.len().saturating_sub(1)).all(|k| !(tb[k] > tb[k + 1]) || ra[k] > ra[k + 1])
}

/// Moves generators from the front of `b` to the back of `a` until the pair
/// is left-weighted. `b_track` is the inverse table of `b`. Returns whether
/// anything moved.
fn left_weight_pair(a: &mut Permutation, b_track: &mut Permutation) -> bool {
    let n = a.len();
    let mut moved = false;
    // Positions below `k` are settled; a move at `k` can only unsettle k − 1.
    let mut k = 0;
    while k + 1 < n {
        let starts_b = b_track.image()[k] > b_track.image()[k + 1];
        let finishes_a = a.image()[k] > a.image()[k + 1];
        if starts_b && !finishes_a {
            a.swap_entries(k);
            b_track.swap_entries(k);
            moved = true;
            if k > 0 {
                k -= 1;
                continue;
            }
        }
        k += 1;
    }
    moved
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    n: usize,
    delta_power: i32,
    factors: Vec<PermutationBraidFactor>,
}

impl CanonicalForm {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "braid groups need at least two strands");
        CanonicalForm { n, delta_power: 0, factors: Vec::new() }
    }

    /// Validates every canonical-form invariant.
    pub fn from_parts(n: usize, delta_power: i32, factors: Vec<Permutation>) -> Result<Self, BraidError> {
        if n < 2 {
            return Err(BraidError::TooFewStrands(n));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.len() != n {
                return Err(BraidError::StrandMismatch { left: n, right: f.len() });
            }
            if f.is_identity() || f.is_reversal() {
                return Err(BraidError::TrivialFactor(i));
            }
        }
        for (i, pair) in factors.windows(2).enumerate() {
            if !is_left_weighted(&pair[0], &pair[1]) {
                return Err(BraidError::NotLeftWeighted(i));
            }
        }
        Ok(CanonicalForm {
            n,
            delta_power,
            factors: factors.into_iter().map(PermutationBraidFactor::new).collect(),
        })
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn delta_power(&self) -> i32 {
        self.delta_power
    }

    pub fn factors(&self) -> &[PermutationBraidFactor] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.delta_power == 0 && self.factors.is_empty()
    }

    /// `|p|·(n − 1) + k`.
    pub fn canonical_length(&self) -> u64 {
        self.delta_power.unsigned_abs() as u64 * (self.n as u64 - 1) + self.factors.len() as u64
    }

    pub fn is_left_weighted(&self) -> bool {
        self.factors
            .windows(2)
            .all(|p| is_left_weighted(&p[0].perm, &p[1].perm))
    }

    pub fn permutation(&self) -> Permutation {
        let mut p = if self.delta_power % 2 == 0 {
            Permutation::identity(self.n)
        } else {
            Permutation::reversal(self.n)
        };
        for f in &self.factors {
            p = p.compose(&f.perm);
        }
        p
    }

    pub fn to_word(&self) -> BraidWord {
        let d = delta(self.n);
        let d_part = if self.delta_power >= 0 { d } else { d.inverse() };
        let mut letters = Vec::new();
        for _ in 0..self.delta_power.unsigned_abs() {
            letters.extend_from_slice(d_part.letters());
        }
        for f in &self.factors {
            letters.extend_from_slice(f.to_word().letters());
        }
        BraidWord::from_letters_unchecked(self.n, letters)
    }

    pub fn multiply(&self, other: &CanonicalForm) -> Result<CanonicalForm, BraidError> {
        check_same(self.n, other.n)?;
        let q = other.delta_power;
        let mut norm = Normalizer {
            n: self.n,
            delta_power: self.delta_power + q,
            factors: self
                .factors
                .iter()
                .map(|f| if q % 2 == 0 { f.perm.clone() } else { f.perm.flip() })
                .collect(),
        };
        for f in &other.factors {
            norm.push(f.perm.clone());
        }
        Ok(norm.finish())
    }

    pub fn inverse(&self) -> CanonicalForm {
        // (Δᵖ A₁⋯A_k)⁻¹ = Δ⁻¹C_k ⋯ Δ⁻¹C₁ · Δ⁻ᵖ with C_j = Δ·A_j⁻¹.
        let rev = Permutation::reversal(self.n);
        let mut stream = FactorStream::new(self.n);
        for f in self.factors.iter().rev() {
            stream.push_delta_inverse_then(rev.compose(&f.perm.inverse()));
        }
        stream.push_delta_power(-self.delta_power);
        stream.finish()
    }

    pub fn power(&self, exponent: i32) -> CanonicalForm {
        let base = if exponent >= 0 { self.clone() } else { self.inverse() };
        let mut acc = CanonicalForm::identity(self.n);
        for _ in 0..exponent.unsigned_abs() {
            acc = acc.multiply(&base).expect("same strand count");
        }
        acc
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm(n={}, p={}, {:?})", self.n, self.delta_power, self.factors)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delta_power={}", self.delta_power)?;
        write!(f, "factor_count={}", self.factors.len())?;
        for (i, fac) in self.factors.iter().enumerate() {
            write!(f, "\nfactor[{i}]={}", fac.perm)?;
        }
        Ok(())
    }
}

/// Incremental left-weighting of `Δᵖ · F₁ ⋯ F_k`.
///
/// Invariant: the stored factors are left-weighted, contain no identity and
/// no `Δ`.
struct Normalizer {
    n: usize,
    delta_power: i32,
    factors: Vec<Permutation>,
}

impl Normalizer {
    fn new(n: usize, delta_power: i32) -> Self {
        Normalizer { n, delta_power, factors: Vec::new() }
    }

    /// Right-multiplies by an arbitrary permutation braid.
    fn push(&mut self, x: Permutation) {
        if x.is_identity() {
            return;
        }
        if x.is_reversal() {
            // F₁⋯F_k·Δ = Δ·τ(F₁)⋯τ(F_k)
            for f in &mut self.factors {
                *f = f.flip();
            }
            self.delta_power += 1;
            return;
        }
        self.factors.push(x);
        // One right-to-left sweep restores left-weightedness; once a pair
        // is left untouched everything to its left already is.
        let mut j = self.factors.len() - 1;
        while j > 0 {
            let (head, tail) = self.factors.split_at_mut(j);
            let left = &mut head[j - 1];
            let right = &mut tail[0];
            let mut right_track = right.inverse();
            if !left_weight_pair(left, &mut right_track) {
                break;
            }
            *right = right_track.inverse();
            j -= 1;
        }
        self.cleanup();
    }

    fn cleanup(&mut self) {
        let leading = self.factors.iter().take_while(|f| f.is_reversal()).count();
        if leading > 0 {
            self.factors.drain(..leading);
            self.delta_power += leading as i32;
        }
        // identities can only collect at the tail of a left-weighted sequence
        while self.factors.last().is_some_and(|f| f.is_identity()) {
            self.factors.pop();
        }
    }

    fn finish(mut self) -> CanonicalForm {
        self.cleanup();
        debug_assert!(self.factors.iter().all(|f| !f.is_identity() && !f.is_reversal()));
        debug_assert!(self.factors.windows(2).all(|p| is_left_weighted(&p[0], &p[1])));
        CanonicalForm {
            n: self.n,
            delta_power: self.delta_power,
            factors: self.factors.into_iter().map(PermutationBraidFactor::new).collect(),
        }
    }
}

/// Accumulates `Δᵖ · τᵐ(S₁ ⋯ S_k)` while reading a product left to right,
/// so each `Δ⁻¹` only flips a parity bit instead of every earlier factor.
struct FactorStream {
    n: usize,
    delta_power: i32,
    flipped: bool,
    stored: Vec<Permutation>,
}

impl FactorStream {
    fn new(n: usize) -> Self {
        FactorStream { n, delta_power: 0, flipped: false, stored: Vec::new() }
    }

    fn store(&mut self, x: Permutation) {
        let x = if self.flipped { x.flip() } else { x };
        self.stored.push(x);
    }

    /// Right-multiplies by the permutation braid `x`.
    fn push_simple(&mut self, x: Permutation) {
        self.store(x);
    }

    /// Right-multiplies by `Δ⁻¹ · c` for a permutation braid `c`.
    fn push_delta_inverse_then(&mut self, c: Permutation) {
        self.delta_power -= 1;
        self.flipped = !self.flipped;
        self.store(c);
    }

    /// Right-multiplies by `Δ^q`.
    fn push_delta_power(&mut self, q: i32) {
        self.delta_power += q;
        if q % 2 != 0 {
            self.flipped = !self.flipped;
        }
    }

    fn finish(self) -> CanonicalForm {
        let mut norm = Normalizer::new(self.n, self.delta_power);
        for s in self.stored {
            norm.push(if self.flipped { s.flip() } else { s });
        }
        norm.finish()
    }
}

/// Words longer than this are split in half and the halves' forms multiplied.
const DIRECT_NORMALIZE_LIMIT: usize = 16;

/// Left canonical form of the element represented by `word`.
pub fn to_canonical(word: &BraidWord) -> CanonicalForm {
    normalize_letters(word.strands(), word.letters())
}

fn normalize_letters(n: usize, letters: &[i32]) -> CanonicalForm {
    if letters.len() > DIRECT_NORMALIZE_LIMIT {
        let (left, right) = letters.split_at(letters.len() / 2);
        return normalize_letters(n, left)
            .multiply(&normalize_letters(n, right))
            .expect("same strand count");
    }
    let rev = Permutation::reversal(n);
    let mut stream = FactorStream::new(n);
    for &letter in letters {
        let k = letter.unsigned_abs() as usize - 1;
        let t = Permutation::adjacent_transposition(n, k);
        if letter > 0 {
            stream.push_simple(t);
        } else {
            // x_i⁻¹ = Δ⁻¹ · (Δ x_i⁻¹)
            stream.push_delta_inverse_then(rev.compose(&t));
        }
    }
    stream.finish()
}

pub fn canonical_to_word(form: &CanonicalForm) -> BraidWord {
    form.to_word()
}

pub fn canonical_multiply(f: &CanonicalForm, g: &CanonicalForm) -> Result<CanonicalForm, BraidError> {
    f.multiply(g)
}

pub fn canonical_invert(f: &CanonicalForm) -> CanonicalForm {
    f.inverse()
}

/// Word problem: do `u` and `v` represent the same braid?
pub fn equals(u: &BraidWord, v: &BraidWord) -> Result<bool, BraidError> {
    check_same(u.strands(), v.strands())?;
    Ok(to_canonical(u) == to_canonical(v))
}

/// Does `u·v = v·u` hold in the group?
pub fn commutes(u: &BraidWord, v: &BraidWord) -> Result<bool, BraidError> {
    equals(&u.multiply(v)?, &v.multiply(u)?)
}

pub fn is_pure(u: &BraidWord) -> bool {
    u.is_pure()
}

pub fn permutation_of(u: &BraidWord) -> Permutation {
    u.permutation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_word;

    fn w(n: usize, text: &str) -> BraidWord {
        parse_word(text, n).unwrap()
    }

    fn perm(image: &[usize]) -> Permutation {
        Permutation::from_image(image.to_vec()).unwrap()
    }

    #[test]
    fn single_generator() {
        let f = to_canonical(&w(3, "1"));
        assert_eq!(f.delta_power(), 0);
        assert_eq!(f.factors().len(), 1);
        assert_eq!(f.factors()[0].permutation(), &perm(&[1, 0, 2]));
    }

    #[test]
    fn half_twist_is_pure_delta() {
        let f = to_canonical(&w(3, "1 2 1"));
        assert_eq!(f.delta_power(), 1);
        assert!(f.factors().is_empty());
        assert_eq!(to_canonical(&w(3, "2 1 2")), f);
    }

    #[test]
    fn inverse_generator() {
        // Δ·x₁⁻¹ = x₁x₂, so x₁⁻¹ = Δ⁻¹·x₁x₂.
        let f = to_canonical(&w(3, "-1"));
        assert_eq!(f.delta_power(), -1);
        assert_eq!(f.factors().len(), 1);
        assert_eq!(f.factors()[0].permutation(), &w(3, "1 2").permutation());
        assert_eq!(f, to_canonical(&w(3, "1")).inverse());
    }

    #[test]
    fn starting_and_finishing_sets() {
        let f = PermutationBraidFactor::new(w(4, "1 2").permutation());
        assert_eq!(f.starting_set(), vec![0]);
        assert_eq!(f.finishing_set(), vec![1]);
        let d = PermutationBraidFactor::new(Permutation::reversal(4));
        assert_eq!(d.starting_set(), vec![0, 1, 2]);
        assert_eq!(d.finishing_set(), vec![0, 1, 2]);
    }

    #[test]
    fn factor_word_realizes_permutation() {
        let p = perm(&[3, 0, 4, 1, 2]);
        let word = PermutationBraidFactor::new(p.clone()).to_word();
        assert!(word.is_positive());
        assert_eq!(word.permutation(), p);
        // one letter per inversion
        let inversions = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .filter(|&(i, j)| p.image()[i] > p.image()[j])
            .count();
        assert_eq!(word.len(), inversions);
    }

    #[test]
    fn word_round_trips() {
        assert!(canonical_to_word(&CanonicalForm::identity(3)).is_empty());
        let d = CanonicalForm::from_parts(3, 1, vec![]).unwrap();
        assert_eq!(canonical_to_word(&d).letters(), &[1, 2, 1]);
        let f = to_canonical(&w(5, "1 -3 2 4 -1 -2 3 3 -4 1"));
        assert_eq!(to_canonical(&f.to_word()), f);
    }

    #[test]
    fn multiply_and_invert() {
        let f = to_canonical(&w(4, "1 2 -3 1 -2"));
        let id = CanonicalForm::identity(4);
        assert_eq!(f.multiply(&id).unwrap(), f);
        assert_eq!(id.multiply(&f).unwrap(), f);
        assert!(f.multiply(&f.inverse()).unwrap().is_identity());
        assert!(f.inverse().multiply(&f).unwrap().is_identity());
        assert_eq!(f.inverse().inverse(), f);
        assert!(id.inverse().is_identity());
        let g = to_canonical(&w(4, "3 -1 -1 2"));
        let concat = to_canonical(&f.to_word().multiply(&g.to_word()).unwrap());
        assert_eq!(f.multiply(&g).unwrap(), concat);
        let other = CanonicalForm::identity(5);
        assert!(f.multiply(&other).is_err());
    }

    #[test]
    fn braid_relations() {
        assert!(equals(&w(3, "1 2 1"), &w(3, "2 1 2")).unwrap());
        assert!(equals(&w(5, "1 3"), &w(5, "3 1")).unwrap());
        assert!(!equals(&w(3, "1"), &w(3, "2")).unwrap());
        assert!(!equals(&w(4, "1 2"), &w(4, "2 1")).unwrap());
        assert!(equals(&w(3, "1"), &w(4, "1")).is_err());
    }

    #[test]
    fn two_strands_are_cyclic() {
        let f = to_canonical(&w(2, "1 1 -1 1 1"));
        assert_eq!(f.delta_power(), 3);
        assert!(f.factors().is_empty());
        let g = to_canonical(&w(2, "-1 -1"));
        assert_eq!(g.delta_power(), -2);
        assert!(f.multiply(&g).unwrap().factors().is_empty());
        assert_eq!(f.multiply(&g).unwrap().delta_power(), 1);
    }

    #[test]
    fn from_parts_validation() {
        let t1 = perm(&[1, 0, 2]);
        let t2 = perm(&[0, 2, 1]);
        assert!(matches!(
            CanonicalForm::from_parts(3, 0, vec![Permutation::identity(3)]),
            Err(BraidError::TrivialFactor(0))
        ));
        assert!(matches!(
            CanonicalForm::from_parts(3, 0, vec![t1.clone(), Permutation::reversal(3)]),
            Err(BraidError::TrivialFactor(1))
        ));
        // x₁ · x₂ is not left-weighted (x₂ could move into the first factor)
        assert!(matches!(
            CanonicalForm::from_parts(3, 0, vec![t1.clone(), t2.clone()]),
            Err(BraidError::NotLeftWeighted(0))
        ));
        // x₁ · x₁ is left-weighted
        let sq = CanonicalForm::from_parts(3, 0, vec![t1.clone(), t1.clone()]).unwrap();
        assert_eq!(sq, to_canonical(&w(3, "1 1")));
        assert!(CanonicalForm::from_parts(3, 0, vec![perm(&[1, 0, 2, 3])]).is_err());
    }

    #[test]
    fn projection_of_form_matches_word() {
        let u = w(6, "1 -2 3 5 -4 2 2 -1 5");
        assert_eq!(to_canonical(&u).permutation(), u.permutation());
    }
}
