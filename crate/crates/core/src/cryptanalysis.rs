//! Passive-adversary tools: an exhaustive double-coset search for toy
//! sizes, a beam-search length attack, the equivalent-key check, and the
//! cycle-type distinguisher for the shared key.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::braid::{commutes, equals, to_canonical, BraidError, BraidWord, CanonicalForm, Permutation};
use crate::keygen::{self, StrandHalf};
use crate::protocol::{self, ProtocolError, Transcript};

#[derive(Debug, Error)]
pub enum CryptanalysisError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("invalid experiment setup: {0}")]
    InvalidSetup(&'static str),
}

/// `w₁ = a · w · b` with `a ∈ ⟨left_gens⟩`, `b ∈ ⟨right_gens⟩`.
#[derive(Debug, Clone)]
pub struct DecompositionInstance {
    n: usize,
    w: BraidWord,
    w1: BraidWord,
    left_gens: Vec<BraidWord>,
    right_gens: Vec<BraidWord>,
    w_form: CanonicalForm,
    w1_form: CanonicalForm,
    left_forms: Vec<CanonicalForm>,
    right_forms: Vec<CanonicalForm>,
}

impl DecompositionInstance {
    pub fn new(
        w: BraidWord,
        w1: BraidWord,
        left_gens: Vec<BraidWord>,
        right_gens: Vec<BraidWord>,
    ) -> Result<Self, CryptanalysisError> {
        let n = w.strands();
        for x in std::iter::once(&w1).chain(&left_gens).chain(&right_gens) {
            if x.strands() != n {
                return Err(BraidError::StrandMismatch { left: n, right: x.strands() }.into());
            }
        }
        Ok(DecompositionInstance {
            n,
            w_form: to_canonical(&w),
            w1_form: to_canonical(&w1),
            left_forms: left_gens.iter().map(to_canonical).collect(),
            right_forms: right_gens.iter().map(to_canonical).collect(),
            w,
            w1,
            left_gens,
            right_gens,
        })
    }

    /// Builds an instance from normal forms without renormalizing them.
    pub fn from_forms(
        w: CanonicalForm,
        w1: CanonicalForm,
        left: Vec<CanonicalForm>,
        right: Vec<CanonicalForm>,
    ) -> Result<Self, CryptanalysisError> {
        let n = w.strands();
        for x in std::iter::once(&w1).chain(&left).chain(&right) {
            if x.strands() != n {
                return Err(BraidError::StrandMismatch { left: n, right: x.strands() }.into());
            }
        }
        Ok(DecompositionInstance {
            n,
            w: w.to_word(),
            w1: w1.to_word(),
            left_gens: left.iter().map(CanonicalForm::to_word).collect(),
            right_gens: right.iter().map(CanonicalForm::to_word).collect(),
            w_form: w,
            w1_form: w1,
            left_forms: left,
            right_forms: right,
        })
    }

    /// Alice's transmission `P_A = a₁ w a₂` with `a₂ ∈ ⟨B⟩`. The left
    /// subgroup is whatever the caller believes centralizes `A`.
    pub fn alice_from_transcript(t: &Transcript, left: Vec<CanonicalForm>) -> Result<Self, CryptanalysisError> {
        DecompositionInstance::from_forms(
            t.params().base_form().clone(),
            t.transmission_a().clone(),
            left,
            t.subgroup_b().to_vec(),
        )
    }

    /// Bob's transmission `P_B = b₁ w b₂` with `b₁ ∈ ⟨A⟩`.
    pub fn bob_from_transcript(t: &Transcript, right: Vec<CanonicalForm>) -> Result<Self, CryptanalysisError> {
        DecompositionInstance::from_forms(
            t.params().base_form().clone(),
            t.transmission_b().clone(),
            t.subgroup_a().to_vec(),
            right,
        )
    }

    /// Replaces the left subgroup by all of `Bₙ`, modelling an adversary who
    /// cannot compute the concealed centralizer.
    pub fn with_concealed_left(&self) -> Self {
        let mut out = self.clone();
        out.left_gens = artin_generators(self.n);
        out.left_forms = out.left_gens.iter().map(to_canonical).collect();
        out
    }

    pub fn with_concealed_right(&self) -> Self {
        let mut out = self.clone();
        out.right_gens = artin_generators(self.n);
        out.right_forms = out.right_gens.iter().map(to_canonical).collect();
        out
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &BraidWord {
        &self.w
    }

    pub fn w1(&self) -> &BraidWord {
        &self.w1
    }

    pub fn left_gens(&self) -> &[BraidWord] {
        &self.left_gens
    }

    pub fn right_gens(&self) -> &[BraidWord] {
        &self.right_gens
    }
}

pub fn artin_generators(n: usize) -> Vec<BraidWord> {
    (1..n as i32)
        .map(|i| BraidWord::generator(n, i).expect("index in range"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredPair {
    pub left: BraidWord,
    pub right: BraidWord,
}

/// A product of generators and inverses, tracked as choices so it can be
/// rebuilt as a word.
type Choices = Vec<(usize, i8)>;

fn word_of(gens: &[BraidWord], choices: &[(usize, i8)], n: usize) -> BraidWord {
    if choices.is_empty() {
        return BraidWord::identity(n);
    }
    keygen::product_of_choices(gens, choices).expect("generators share strand count")
}

/// Signed generator forms: index `2i` is `gᵢ`, `2i + 1` is `gᵢ⁻¹`.
fn signed_forms(forms: &[CanonicalForm]) -> Vec<CanonicalForm> {
    forms.iter().flat_map(|f| [f.clone(), f.inverse()]).collect()
}

fn choice_of(slot: usize) -> (usize, i8) {
    (slot / 2, if slot.is_multiple_of(2) { 1 } else { -1 })
}

/// All products of at most `depth` signed generators with no adjacent
/// `g g⁻¹`, shortest first, as `(choices, form)`.
fn enumerate_products(n: usize, forms: &[CanonicalForm], depth: usize) -> Vec<(Choices, CanonicalForm)> {
    let signed = signed_forms(forms);
    let mut out = vec![(Vec::new(), CanonicalForm::identity(n))];
    let mut frontier_start = 0;
    for _ in 0..depth {
        let frontier_end = out.len();
        for idx in frontier_start..frontier_end {
            for (slot, g) in signed.iter().enumerate() {
                let (gi, ge) = choice_of(slot);
                if out[idx].0.last() == Some(&(gi, -ge)) {
                    continue;
                }
                let mut choices = out[idx].0.clone();
                choices.push((gi, ge));
                let form = out[idx].1.multiply(g).expect("same strand count");
                out.push((choices, form));
            }
        }
        frontier_start = frontier_end;
    }
    out
}

/// Exhaustive search of `a ∈ ⟨L⟩`, `b ∈ ⟨R⟩` with at most the given number
/// of generator factors each. Returns the first hit in shortest-first order.
pub fn brute_force_decompose(
    inst: &DecompositionInstance,
    max_left_factors: usize,
    max_right_factors: usize,
) -> Option<RecoveredPair> {
    let n = inst.n;
    let mut by_form: HashMap<CanonicalForm, Choices> = HashMap::new();
    for (choices, b) in enumerate_products(n, &inst.right_forms, max_right_factors) {
        let wb = inst.w_form.multiply(&b).expect("same strand count");
        by_form.entry(wb).or_insert(choices);
    }
    for (choices, a) in enumerate_products(n, &inst.left_forms, max_left_factors) {
        let target = a.inverse().multiply(&inst.w1_form).expect("same strand count");
        if let Some(right) = by_form.get(&target) {
            return Some(RecoveredPair {
                left: word_of(&inst.left_gens, &choices, n),
                right: word_of(&inst.right_gens, right, n),
            });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOutcome {
    pub recovered: Option<RecoveredPair>,
    pub iterations: usize,
}

#[derive(Clone)]
struct BeamState {
    left: Choices,
    right: Choices,
    residue: CanonicalForm,
}

/// Beam search that peels signed generators off `w₁` from the left
/// (`a ← a·g`) or right (`b ← g·b`), keeping the `beam_width` residues
/// `a⁻¹ w₁ b⁻¹` of smallest canonical length. Succeeds when the residue is `w`.
pub fn length_attack(inst: &DecompositionInstance, beam_width: usize, max_iters: usize) -> AttackOutcome {
    let n = inst.n;
    if beam_width == 0 {
        return AttackOutcome { recovered: None, iterations: 0 };
    }
    let success = |s: &BeamState| RecoveredPair {
        left: word_of(&inst.left_gens, &s.left, n),
        right: word_of(&inst.right_gens, &s.right, n),
    };
    let start = BeamState { left: Vec::new(), right: Vec::new(), residue: inst.w1_form.clone() };
    if start.residue == inst.w_form {
        return AttackOutcome { recovered: Some(success(&start)), iterations: 0 };
    }
    // peeling g from the left multiplies the residue by g⁻¹ on the left
    let left_peel: Vec<CanonicalForm> = signed_forms(&inst.left_forms).iter().map(CanonicalForm::inverse).collect();
    let right_peel: Vec<CanonicalForm> = signed_forms(&inst.right_forms).iter().map(CanonicalForm::inverse).collect();

    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    seen.insert(start.residue.clone());
    let mut beam = vec![start];
    for iter in 1..=max_iters {
        let mut candidates: Vec<BeamState> = Vec::new();
        for state in &beam {
            for (slot, peel) in left_peel.iter().enumerate() {
                let (gi, ge) = choice_of(slot);
                if state.left.last() == Some(&(gi, -ge)) {
                    continue;
                }
                let residue = peel.multiply(&state.residue).expect("same strand count");
                if seen.insert(residue.clone()) {
                    let mut left = state.left.clone();
                    left.push((gi, ge));
                    candidates.push(BeamState { left, right: state.right.clone(), residue });
                }
            }
            for (slot, peel) in right_peel.iter().enumerate() {
                let (gi, ge) = choice_of(slot);
                if state.right.first() == Some(&(gi, -ge)) {
                    continue;
                }
                let residue = state.residue.multiply(peel).expect("same strand count");
                if seen.insert(residue.clone()) {
                    let mut right = Vec::with_capacity(state.right.len() + 1);
                    right.push((gi, ge));
                    right.extend_from_slice(&state.right);
                    candidates.push(BeamState { left: state.left.clone(), right, residue });
                }
            }
        }
        if let Some(hit) = candidates.iter().find(|c| c.residue == inst.w_form) {
            return AttackOutcome { recovered: Some(success(hit)), iterations: iter };
        }
        if candidates.is_empty() {
            return AttackOutcome { recovered: None, iterations: iter };
        }
        candidates.sort_by_key(|c| c.residue.canonical_length());
        candidates.truncate(beam_width);
        beam = candidates;
    }
    AttackOutcome { recovered: None, iterations: max_iters }
}

/// Does `pair` reproduce `w₁`, and does its left half commute with the
/// peer element it must pass through during key computation?
pub fn check_equivalent_pair(
    inst: &DecompositionInstance,
    pair: &RecoveredPair,
    peer_private: &BraidWord,
) -> Result<bool, CryptanalysisError> {
    let product = BraidWord::product(inst.n, [&pair.left, &inst.w, &pair.right])?;
    if !equals(&product, &inst.w1)? {
        return Ok(false);
    }
    Ok(commutes(&pair.left, peer_private)?)
}

/// `ρ_B = π(w⁻¹ · P_B)`.
pub fn rho_of(w: &BraidWord, p_b: &CanonicalForm) -> Result<Permutation, CryptanalysisError> {
    if w.strands() != p_b.strands() {
        return Err(BraidError::StrandMismatch { left: w.strands(), right: p_b.strands() }.into());
    }
    Ok(w.permutation().inverse().compose(&p_b.permutation()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguisherVerdict {
    pub rho_b: Permutation,
    /// `π(P_A)⁻¹ ∘ π(candidate)`
    pub candidate_residue: Permutation,
    /// Cycle types of the residue and `ρ_B` agree. Always true for the real key.
    pub consistent: bool,
}

pub fn distinguisher(
    w: &BraidWord,
    p_a: &CanonicalForm,
    p_b: &CanonicalForm,
    candidate: &CanonicalForm,
) -> Result<DistinguisherVerdict, CryptanalysisError> {
    let n = w.strands();
    for f in [p_a, p_b, candidate] {
        if f.strands() != n {
            return Err(BraidError::StrandMismatch { left: n, right: f.strands() }.into());
        }
    }
    let rho_b = rho_of(w, p_b)?;
    let candidate_residue = p_a.permutation().inverse().compose(&candidate.permutation());
    let consistent = candidate_residue.cycle_type() == rho_b.cycle_type();
    Ok(DistinguisherVerdict { rho_b, candidate_residue, consistent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinguisherSummary {
    pub n: usize,
    pub l: usize,
    pub trials: usize,
    pub seed: u64,
    pub true_key_accepted: usize,
    pub random_rejected: usize,
    /// Trials where `w⁻¹P_B` is a pure braid.
    pub pure_rho: usize,
    /// Trials where both `P_A` and `w⁻¹P_B` are pure.
    pub all_pure: usize,
}

impl DistinguisherSummary {
    pub fn true_key_acceptance(&self) -> f64 {
        self.true_key_accepted as f64 / self.trials as f64
    }

    pub fn random_rejection_rate(&self) -> f64 {
        self.random_rejected as f64 / self.trials as f64
    }

    pub fn pure_braid_incidence(&self) -> f64 {
        self.pure_rho as f64 / self.trials as f64
    }

    /// Every trial was fully pure, so the test only compares identities.
    pub fn degenerate(&self) -> bool {
        self.all_pure == self.trials
    }
}

impl fmt::Display for DistinguisherSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "l={}", self.l)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "trials={}", self.trials)?;
        writeln!(f, "acceptance={:.6}", self.true_key_acceptance())?;
        writeln!(f, "rejection={:.6}", self.random_rejection_rate())?;
        writeln!(f, "pure_braid_incidence={:.6}", self.pure_braid_incidence())?;
        write!(f, "all_pure_degenerate={}", self.degenerate())
    }
}

/// Runs `trials` handshakes; for each, tests the real key and one random
/// `a·w·b` (uniform words of length `l`) against the cycle-type condition.
pub fn distinguisher_experiment(
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<DistinguisherSummary, CryptanalysisError> {
    if trials == 0 {
        return Err(CryptanalysisError::InvalidSetup("trials must be at least 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut summary = DistinguisherSummary {
        n,
        l,
        trials,
        seed,
        true_key_accepted: 0,
        random_rejected: 0,
        pure_rho: 0,
        all_pure: 0,
    };
    for _ in 0..trials {
        let run = protocol::run_handshake(n, l, rng.next_u64())?;
        let t = &run.transcript;
        let w = t.params().base();
        let (p_a, p_b) = (t.transmission_a(), t.transmission_b());
        let verdict = distinguisher(w, p_a, p_b, &run.key_a)?;
        summary.true_key_accepted += verdict.consistent as usize;
        if verdict.rho_b.is_identity() {
            summary.pure_rho += 1;
            if p_a.permutation().is_identity() {
                summary.all_pure += 1;
            }
        }
        let a = keygen::random_word(n, l, &mut rng);
        let b = keygen::random_word(n, l, &mut rng);
        let candidate = to_canonical(&a).multiply(t.params().base_form())?.multiply(&to_canonical(&b))?;
        if !distinguisher(w, p_a, p_b, &candidate)?.consistent {
            summary.random_rejected += 1;
        }
    }
    Ok(summary)
}

/// Shape of the planted instances used to compare public and concealed
/// left subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantedConfig {
    pub n: usize,
    pub w_len: usize,
    pub gen_count: usize,
    pub gen_len: usize,
    pub depth_left: usize,
    pub depth_right: usize,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig { n: 8, w_len: 16, gen_count: 3, gen_len: 3, depth_left: 2, depth_right: 2 }
    }
}

/// `w₁ = a·w·b` with `a`, `b` products of unconjugated generators drawn
/// from the lower and upper strand halves.
pub fn plant_instance<R: Rng + ?Sized>(
    cfg: &PlantedConfig,
    rng: &mut R,
) -> Result<(DecompositionInstance, RecoveredPair), CryptanalysisError> {
    if cfg.n < 4 || cfg.gen_count == 0 || cfg.gen_len == 0 {
        return Err(CryptanalysisError::InvalidSetup("need n >= 4 and nonempty generators"));
    }
    let n = cfg.n;
    let gens = |half: StrandHalf, rng: &mut R| -> Vec<BraidWord> {
        (0..cfg.gen_count)
            .map(|_| keygen::random_word_over(n, half.generators(n), cfg.gen_len, rng))
            .collect()
    };
    let left_gens = gens(StrandHalf::Lower, rng);
    let right_gens = gens(StrandHalf::Upper, rng);
    let w = keygen::random_word(n, cfg.w_len, rng);
    let a = keygen::sample_subgroup_element(&left_gens, cfg.depth_left, rng)
        .map_err(|_| CryptanalysisError::InvalidSetup("empty generators"))?;
    let b = keygen::sample_subgroup_element(&right_gens, cfg.depth_right, rng)
        .map_err(|_| CryptanalysisError::InvalidSetup("empty generators"))?;
    let w1 = BraidWord::product(n, [&a, &w, &b])?;
    let inst = DecompositionInstance::new(w, w1, left_gens, right_gens)?;
    Ok((inst, RecoveredPair { left: a, right: b }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthAttackSummary {
    pub instances: usize,
    pub public_successes: usize,
    pub concealed_successes: usize,
    pub beam_width: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl LengthAttackSummary {
    pub fn public_rate(&self) -> f64 {
        self.public_successes as f64 / self.instances as f64
    }

    pub fn concealed_rate(&self) -> f64 {
        self.concealed_successes as f64 / self.instances as f64
    }
}

impl fmt::Display for LengthAttackSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "instances={}", self.instances)?;
        writeln!(f, "beam={}", self.beam_width)?;
        writeln!(f, "max_iters={}", self.max_iters)?;
        writeln!(f, "public_success_rate={:.6}", self.public_rate())?;
        write!(f, "concealed_success_rate={:.6}", self.concealed_rate())
    }
}

/// Runs the length attack on the same planted instances twice: once with
/// the left subgroup public, once with it replaced by all of `Bₙ`.
pub fn length_attack_experiment(
    cfg: &PlantedConfig,
    instances: usize,
    beam_width: usize,
    max_iters: usize,
    seed: u64,
) -> Result<LengthAttackSummary, CryptanalysisError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut summary = LengthAttackSummary {
        instances,
        public_successes: 0,
        concealed_successes: 0,
        beam_width,
        max_iters,
        seed,
    };
    for _ in 0..instances {
        let (inst, _) = plant_instance(cfg, &mut rng)?;
        if length_attack(&inst, beam_width, max_iters).recovered.is_some() {
            summary.public_successes += 1;
        }
        if length_attack(&inst.with_concealed_left(), beam_width, max_iters).recovered.is_some() {
            summary.concealed_successes += 1;
        }
    }
    Ok(summary)
}
