//! Private and public key material.
//!
//! A commuting pair is built from two parabolic subgroups on disjoint strand
//! ranges, `x₁..x_{h−1}` and `x_{h+1}..x_{n−1}` with `h = ⌊n/2⌋`, conjugated
//! by the same secret braid `z`. Anything drawn from one side commutes with
//! anything drawn from the other.

use std::ops::RangeInclusive;

use rand::Rng;
use thiserror::Error;

use crate::braid::{BraidError, BraidWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeygenError {
    #[error("commuting pairs need n >= 4, got {0}")]
    TooFewStrands(usize),
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("cannot sample from an empty generator list")]
    EmptyGenerators,
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub n: usize,
    /// Length of the unconjugated private word.
    pub l: usize,
    /// Number of published subgroup generators.
    pub gen_count: usize,
    pub gen_len: usize,
    pub conj_len: usize,
    pub seed: u64,
}

impl SamplerConfig {
    /// `k = 5`, `gen_len = l/4`, `conj_len = l/2`.
    pub fn with_defaults(n: usize, l: usize, seed: u64) -> Self {
        SamplerConfig {
            n,
            l,
            gen_count: 5,
            gen_len: (l / 4).max(1),
            conj_len: (l / 2).max(1),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), KeygenError> {
        if self.n < 4 {
            return Err(KeygenError::TooFewStrands(self.n));
        }
        if self.l == 0 || self.gen_len == 0 || self.conj_len == 0 {
            return Err(KeygenError::InvalidConfig("all lengths must be at least 1"));
        }
        if self.gen_count < 2 {
            return Err(KeygenError::InvalidConfig("at least two subgroup generators are required"));
        }
        Ok(())
    }
}

/// Which strand half the private element lives on. The published
/// generators use the other half.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrandHalf {
    Lower,
    Upper,
}

impl StrandHalf {
    pub fn opposite(self) -> StrandHalf {
        match self {
            StrandHalf::Lower => StrandHalf::Upper,
            StrandHalf::Upper => StrandHalf::Lower,
        }
    }

    /// Generator indices of this half; the middle generator `x_{⌊n/2⌋}` is
    /// in neither.
    pub fn generators(self, n: usize) -> RangeInclusive<i32> {
        let h = (n / 2) as i32;
        match self {
            StrandHalf::Lower => 1..=h - 1,
            StrandHalf::Upper => h + 1..=n as i32 - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutingPair {
    /// `a₁` for Alice, `b₂` for Bob.
    pub private_elem: BraidWord,
    pub subgroup_gens: Vec<BraidWord>,
    /// The secret conjugator `z`. Never published.
    pub conjugator: BraidWord,
}

/// Uniform signed-generator walk over `indices` that never steps back
/// onto the previous letter's inverse.
pub fn random_word_over<R: Rng + ?Sized>(
    n: usize,
    indices: RangeInclusive<i32>,
    length: usize,
    rng: &mut R,
) -> BraidWord {
    let (lo, hi) = (*indices.start(), *indices.end());
    assert!(lo >= 1 && hi < n as i32 && lo <= hi, "empty or out-of-range generator set");
    let span = (hi - lo + 1) as usize;
    let letter_at = |slot: usize| {
        let idx = lo + (slot / 2) as i32;
        if slot.is_multiple_of(2) { idx } else { -idx }
    };
    let mut letters: Vec<i32> = Vec::with_capacity(length);
    for _ in 0..length {
        let letter = match letters.last() {
            None => letter_at(rng.gen_range(0..2 * span)),
            Some(&prev) => {
                // pick among the 2·span − 1 letters other than -prev
                let forbidden = -prev;
                let mut slot = rng.gen_range(0..2 * span - 1);
                let forbidden_slot = ((forbidden.abs() - lo) * 2) as usize + (forbidden < 0) as usize;
                if slot >= forbidden_slot {
                    slot += 1;
                }
                letter_at(slot)
            }
        };
        letters.push(letter);
    }
    BraidWord::new(n, letters).expect("letters are in range and never cancel")
}

/// A freely reduced word of exactly `length` letters over all of `x₁..x_{n−1}`.
pub fn random_word<R: Rng + ?Sized>(n: usize, length: usize, rng: &mut R) -> BraidWord {
    random_word_over(n, 1..=n as i32 - 1, length, rng)
}

pub fn generate_commuting_pair<R: Rng + ?Sized>(
    cfg: &SamplerConfig,
    side: StrandHalf,
    rng: &mut R,
) -> Result<CommutingPair, KeygenError> {
    cfg.validate()?;
    let n = cfg.n;
    let z = random_word(n, cfg.conj_len, rng);
    let core = random_word_over(n, side.generators(n), cfg.l, rng);
    let private_elem = core.conjugate_by(&z)?;
    let subgroup_gens = (0..cfg.gen_count)
        .map(|_| random_word_over(n, side.opposite().generators(n), cfg.gen_len, rng).conjugate_by(&z))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CommutingPair { private_elem, subgroup_gens, conjugator: z })
}

/// Draws `factor_budget` (generator index, exponent ±1) choices.
pub fn subgroup_choices<R: Rng + ?Sized>(
    gen_count: usize,
    factor_budget: usize,
    rng: &mut R,
) -> Result<Vec<(usize, i8)>, KeygenError> {
    if gen_count == 0 {
        return Err(KeygenError::EmptyGenerators);
    }
    Ok((0..factor_budget)
        .map(|_| {
            let idx = rng.gen_range(0..gen_count);
            (idx, if rng.gen_bool(0.5) { 1 } else { -1 })
        })
        .collect())
}

/// Product of `factor_budget` uniformly chosen generators or inverses.
pub fn sample_subgroup_element<R: Rng + ?Sized>(
    gens: &[BraidWord],
    factor_budget: usize,
    rng: &mut R,
) -> Result<BraidWord, KeygenError> {
    let choices = subgroup_choices(gens.len(), factor_budget, rng)?;
    Ok(product_of_choices(gens, &choices)?)
}

pub fn product_of_choices(gens: &[BraidWord], choices: &[(usize, i8)]) -> Result<BraidWord, BraidError> {
    let n = gens.first().map(|g| g.strands()).unwrap_or(2);
    let inverses: Vec<BraidWord> = gens.iter().map(|g| g.inverse()).collect();
    BraidWord::product(
        n,
        choices
            .iter()
            .map(|&(i, e)| if e > 0 { &gens[i] } else { &inverses[i] }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::commutes;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn random_word_lengths() {
        let mut r = rng(1);
        assert!(random_word(3, 0, &mut r).is_empty());
        for len in [1, 2, 17, 300] {
            let w = random_word(5, len, &mut r);
            assert_eq!(w.len(), len);
        }
        // single generator: the walk can never change sign
        let w = random_word_over(4, 1..=1, 10, &mut r);
        assert_eq!(w.len(), 10);
        assert!(w.letters().iter().all(|&l| l == w.letters()[0]));
    }

    #[test]
    fn length_one_words_cover_all_letters() {
        let mut r = rng(2);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..400 {
            seen.insert(random_word(3, 1, &mut r).letters()[0]);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![-2, -1, 1, 2]);
    }

    #[test]
    fn random_words_are_reproducible() {
        assert_eq!(random_word(8, 64, &mut rng(9)), random_word(8, 64, &mut rng(9)));
        assert_ne!(random_word(8, 64, &mut rng(9)), random_word(8, 64, &mut rng(10)));
    }

    #[test]
    fn halves() {
        assert_eq!(StrandHalf::Lower.generators(4), 1..=1);
        assert_eq!(StrandHalf::Upper.generators(4), 3..=3);
        assert_eq!(StrandHalf::Lower.generators(64), 1..=31);
        assert_eq!(StrandHalf::Upper.generators(64), 33..=63);
        assert_eq!(StrandHalf::Upper.generators(7), 4..=6);
    }

    #[test]
    fn config_validation() {
        assert_eq!(SamplerConfig::with_defaults(3, 8, 0).validate(), Err(KeygenError::TooFewStrands(3)));
        let mut cfg = SamplerConfig::with_defaults(8, 8, 0);
        assert!(cfg.validate().is_ok());
        cfg.gen_count = 1;
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig::with_defaults(64, 1024, 0);
        assert_eq!((cfg.gen_count, cfg.gen_len, cfg.conj_len), (5, 256, 512));
    }

    #[test]
    fn unconjugated_toy_pair_commutes() {
        let n = 4;
        let a = BraidWord::new(n, [1, 1, 1]).unwrap();
        for g in [vec![3], vec![3, 3], vec![-3]] {
            let g = BraidWord::new(n, g).unwrap();
            assert!(commutes(&a, &g).unwrap());
        }
    }

    #[test]
    fn commuting_pairs() {
        for seed in 0..100u64 {
            let n = [4, 5, 8][seed as usize % 3];
            let mut cfg = SamplerConfig::with_defaults(n, 12, seed);
            cfg.conj_len = 6;
            let side = if seed % 2 == 0 { StrandHalf::Lower } else { StrandHalf::Upper };
            let pair = generate_commuting_pair(&cfg, side, &mut rng(seed)).unwrap();
            assert_eq!(pair.subgroup_gens.len(), 5);
            for g in &pair.subgroup_gens {
                assert!(commutes(&pair.private_elem, g).unwrap(), "seed {seed}");
            }
            let mut r = rng(seed + 1000);
            let s = sample_subgroup_element(&pair.subgroup_gens, 4, &mut r).unwrap();
            assert!(commutes(&pair.private_elem, &s).unwrap());

            // stripping z exposes disjoint supports separated by x_{⌊n/2⌋}
            let strip = pair.conjugator.inverse();
            let core = pair.private_elem.conjugate_by(&strip).unwrap();
            let own = side.generators(n);
            assert!(core.letters().iter().all(|l| own.contains(&l.abs())));
            let other = side.opposite().generators(n);
            for g in &pair.subgroup_gens {
                let gc = g.conjugate_by(&strip).unwrap();
                assert!(gc.letters().iter().all(|l| other.contains(&l.abs())));
            }
        }
    }

    #[test]
    fn pair_generation_is_deterministic() {
        let cfg = SamplerConfig::with_defaults(8, 16, 5);
        let a = generate_commuting_pair(&cfg, StrandHalf::Lower, &mut rng(cfg.seed)).unwrap();
        let b = generate_commuting_pair(&cfg, StrandHalf::Lower, &mut rng(cfg.seed)).unwrap();
        assert_eq!(a, b);
        let bad = SamplerConfig::with_defaults(3, 16, 5);
        assert!(generate_commuting_pair(&bad, StrandHalf::Lower, &mut rng(0)).is_err());
    }

    #[test]
    fn subgroup_sampling() {
        let g = BraidWord::new(4, [1, 2]).unwrap();
        let mut r = rng(3);
        for _ in 0..20 {
            let s = sample_subgroup_element(std::slice::from_ref(&g), 1, &mut r).unwrap();
            assert!(s == g || s == g.inverse());
        }
        assert_eq!(sample_subgroup_element(&[], 3, &mut r), Err(KeygenError::EmptyGenerators));
        let gens = vec![g.clone(), BraidWord::new(4, [3]).unwrap()];
        assert_eq!(
            sample_subgroup_element(&gens, 8, &mut rng(4)).unwrap(),
            sample_subgroup_element(&gens, 8, &mut rng(4)).unwrap()
        );
    }
}
