#![allow(dead_code)]

use braidkex::braid::BraidWord;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform signed letters, no reduction control (the constructor reduces).
pub fn any_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> BraidWord {
    let letters: Vec<i32> = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..n as i32);
            if rng.gen_bool(0.5) { i } else { -i }
        })
        .collect();
    BraidWord::new(n, letters).unwrap()
}

fn free_reduce(word: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn free_inverse(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|&l| -l).collect()
}

/// Artin's faithful action of `Bₙ` on the free group `F(a₁..aₙ)`: returns
/// the reduced images of the free generators. Two braids are equal iff
/// their images agree. Only usable on short words; images grow quickly.
pub fn artin_images(word: &BraidWord) -> Vec<Vec<i32>> {
    let n = word.strands();
    let mut images: Vec<Vec<i32>> = (1..=n as i32).map(|j| vec![j]).collect();
    for &letter in word.letters() {
        let i = letter.unsigned_abs() as usize - 1;
        let (ai, aj) = (images[i].clone(), images[i + 1].clone());
        if letter > 0 {
            // a_i ↦ a_i a_{i+1} a_i⁻¹, a_{i+1} ↦ a_i
            let mut w = ai.clone();
            w.extend_from_slice(&aj);
            w.extend(free_inverse(&ai));
            images[i] = free_reduce(w);
            images[i + 1] = ai;
        } else {
            // a_i ↦ a_{i+1}, a_{i+1} ↦ a_{i+1}⁻¹ a_i a_{i+1}
            let mut w = free_inverse(&aj);
            w.extend_from_slice(&ai);
            w.extend_from_slice(&aj);
            images[i] = aj;
            images[i + 1] = free_reduce(w);
        }
    }
    images
}

/// Rewrites `word` by `steps` random insertions of relators, trivial pairs
/// and commutations; the result represents the same braid.
pub fn scramble(rng: &mut ChaCha8Rng, word: &BraidWord, steps: usize) -> BraidWord {
    let n = word.strands();
    let mut letters = word.letters().to_vec();
    for _ in 0..steps {
        let pos = rng.gen_range(0..=letters.len());
        let i = rng.gen_range(1..n as i32);
        let insert: Vec<i32> = match rng.gen_range(0..4) {
            0 => vec![i, -i],
            1 => vec![-i, i],
            2 if i + 1 < n as i32 => {
                // x_i x_{i+1} x_i (x_{i+1} x_i x_{i+1})⁻¹, possibly inverted
                let r = vec![i, i + 1, i, -(i + 1), -i, -(i + 1)];
                if rng.gen_bool(0.5) { r } else { free_inverse(&r) }
            }
            3 => {
                let j = rng.gen_range(1..n as i32);
                if (i - j).abs() > 1 {
                    vec![i, j, -i, -j]
                } else {
                    vec![i, -i]
                }
            }
            _ => vec![-i, i],
        };
        letters.splice(pos..pos, insert);
    }
    BraidWord::new(n, letters).unwrap()
}
