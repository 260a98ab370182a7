//! The two-party handshake.
//!
//! Message order is fixed: `Params`, `SubgroupA`, `SubgroupB`,
//! `TransmissionA`, `TransmissionB`. Alice holds `(a₁, a₂)` and Bob holds
//! `(b₁, b₂)`; `a₁` commutes with Bob's `b₁ ∈ ⟨A⟩` and `b₂` commutes with
//! Alice's `a₂ ∈ ⟨B⟩`, so
//!
//! ```text
//! K_A = a₁ · P_B · a₂ = a₁b₁ · w · b₂a₂ = b₁a₁ · w · a₂b₂ = b₁ · P_A · b₂ = K_B
//! ```

use std::collections::VecDeque;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::braid::{to_canonical, BraidError, BraidWord, CanonicalForm};
use crate::keygen::{self, CommutingPair, KeygenError, SamplerConfig, StrandHalf};
use crate::wire::{self, WireError, MAX_WIRE_STRANDS};

/// Subgroup generators multiplied together to form `a₂` or `b₁`.
pub const DEFAULT_FACTOR_BUDGET: usize = 16;

pub const SESSION_KEY_LABEL: &[u8] = b"BKEXK1";

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("{role} cannot {action} in phase {phase:?}")]
    WrongPhase { role: Role, action: &'static str, phase: Phase },
    #[error("{role} expected a {expected:?} message, got {got:?}")]
    WrongKind { role: Role, expected: MessageKind, got: MessageKind },
    #[error("strand-count mismatch: expected {expected}, got {got}")]
    StrandMismatch { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("peer published an empty subgroup")]
    EmptySubgroup,
    #[error("transcript out of order: position {position} holds {got:?}, expected {expected:?}")]
    TranscriptOrder { position: usize, expected: MessageKind, got: MessageKind },
    #[error("transcript has {0} messages, expected 5")]
    TranscriptLength(usize),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Keygen(#[from] KeygenError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn peer(self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }

    /// Strand half of this role's private element.
    pub fn private_half(self) -> StrandHalf {
        match self {
            Role::Alice => StrandHalf::Lower,
            Role::Bob => StrandHalf::Upper,
        }
    }

    fn subgroup_kind(self) -> MessageKind {
        match self {
            Role::Alice => MessageKind::SubgroupA,
            Role::Bob => MessageKind::SubgroupB,
        }
    }

    fn transmission_kind(self) -> MessageKind {
        match self {
            Role::Alice => MessageKind::TransmissionA,
            Role::Bob => MessageKind::TransmissionB,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Alice => "alice",
            Role::Bob => "bob",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Init,
    PublishedSubgroup,
    ReceivedSubgroup,
    SentTransmission,
    Complete,
}

/// Public parameters: strand count, key length, and the base braid `w`.
#[derive(Clone)]
pub struct ProtocolParams {
    pub n: usize,
    pub l: usize,
    base: BraidWord,
    base_form: CanonicalForm,
}

impl ProtocolParams {
    pub fn new(l: usize, base: BraidWord) -> Result<Self, ProtocolError> {
        let n = base.strands();
        check_bounds(n, l)?;
        let base_form = to_canonical(&base);
        Ok(ProtocolParams { n, l, base, base_form })
    }

    /// Parameters as received over the wire; `w` is the expansion of its
    /// normal form.
    pub fn from_base_form(l: usize, base_form: CanonicalForm) -> Self {
        ProtocolParams { n: base_form.strands(), l, base: base_form.to_word(), base_form }
    }

    pub fn base(&self) -> &BraidWord {
        &self.base
    }

    pub fn base_form(&self) -> &CanonicalForm {
        &self.base_form
    }
}

impl PartialEq for ProtocolParams {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.l == other.l && self.base_form == other.base_form
    }
}

impl Eq for ProtocolParams {}

impl fmt::Debug for ProtocolParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtocolParams")
            .field("n", &self.n)
            .field("l", &self.l)
            .field("base_form", &self.base_form)
            .finish()
    }
}

fn check_bounds(n: usize, l: usize) -> Result<(), ProtocolError> {
    if n < 4 {
        return Err(ProtocolError::InvalidParams(format!("n must be at least 4, got {n}")));
    }
    if n > MAX_WIRE_STRANDS {
        return Err(ProtocolError::InvalidParams(format!("n must be at most {MAX_WIRE_STRANDS}, got {n}")));
    }
    if l == 0 {
        return Err(ProtocolError::InvalidParams("l must be at least 1".into()));
    }
    Ok(())
}

/// Public parameters with `w` a random reduced word of length `l`.
pub fn make_params(n: usize, l: usize, seed: u64) -> Result<ProtocolParams, ProtocolError> {
    check_bounds(n, l)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ProtocolParams::new(l, keygen::random_word(n, l, &mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Params,
    SubgroupA,
    SubgroupB,
    TransmissionA,
    TransmissionB,
}

impl MessageKind {
    pub const ORDER: [MessageKind; 5] = [
        MessageKind::Params,
        MessageKind::SubgroupA,
        MessageKind::SubgroupB,
        MessageKind::TransmissionA,
        MessageKind::TransmissionB,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HandshakeMessage {
    Params(ProtocolParams),
    SubgroupA(Vec<CanonicalForm>),
    SubgroupB(Vec<CanonicalForm>),
    /// `P_A = N(a₁ w a₂)`
    TransmissionA(CanonicalForm),
    /// `P_B = N(b₁ w b₂)`
    TransmissionB(CanonicalForm),
}

impl HandshakeMessage {
    pub fn kind(&self) -> MessageKind {
        match self {
            HandshakeMessage::Params(_) => MessageKind::Params,
            HandshakeMessage::SubgroupA(_) => MessageKind::SubgroupA,
            HandshakeMessage::SubgroupB(_) => MessageKind::SubgroupB,
            HandshakeMessage::TransmissionA(_) => MessageKind::TransmissionA,
            HandshakeMessage::TransmissionB(_) => MessageKind::TransmissionB,
        }
    }
}

/// The five public messages of one handshake, in protocol order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    messages: Vec<HandshakeMessage>,
}

impl Transcript {
    pub fn from_messages(messages: Vec<HandshakeMessage>) -> Result<Self, ProtocolError> {
        if messages.len() != MessageKind::ORDER.len() {
            return Err(ProtocolError::TranscriptLength(messages.len()));
        }
        for (position, (m, expected)) in messages.iter().zip(MessageKind::ORDER).enumerate() {
            if m.kind() != expected {
                return Err(ProtocolError::TranscriptOrder { position, expected, got: m.kind() });
            }
        }
        let t = Transcript { messages };
        let n = t.params().n;
        let forms = t
            .subgroup_a()
            .iter()
            .chain(t.subgroup_b())
            .chain([t.transmission_a(), t.transmission_b()]);
        for f in forms {
            if f.strands() != n {
                return Err(ProtocolError::StrandMismatch { expected: n, got: f.strands() });
            }
        }
        Ok(t)
    }

    pub fn messages(&self) -> &[HandshakeMessage] {
        &self.messages
    }

    pub fn params(&self) -> &ProtocolParams {
        match &self.messages[0] {
            HandshakeMessage::Params(p) => p,
            _ => unreachable!("validated order"),
        }
    }

    pub fn subgroup_a(&self) -> &[CanonicalForm] {
        match &self.messages[1] {
            HandshakeMessage::SubgroupA(g) => g,
            _ => unreachable!("validated order"),
        }
    }

    pub fn subgroup_b(&self) -> &[CanonicalForm] {
        match &self.messages[2] {
            HandshakeMessage::SubgroupB(g) => g,
            _ => unreachable!("validated order"),
        }
    }

    pub fn transmission_a(&self) -> &CanonicalForm {
        match &self.messages[3] {
            HandshakeMessage::TransmissionA(f) => f,
            _ => unreachable!("validated order"),
        }
    }

    pub fn transmission_b(&self) -> &CanonicalForm {
        match &self.messages[4] {
            HandshakeMessage::TransmissionB(f) => f,
            _ => unreachable!("validated order"),
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, WireError> {
        wire::encode_transcript(&self.messages)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        Transcript::from_messages(wire::decode_transcript(bytes)?)
    }
}

/// One participant. Private material never leaves this struct except
/// through the accessors used by tests and the analysis harness.
#[derive(Clone)]
pub struct PartyState {
    role: Role,
    phase: Phase,
    params: ProtocolParams,
    sampler: SamplerConfig,
    factor_budget: usize,
    rng: ChaCha20Rng,
    pair: Option<CommutingPair>,
    private_form: Option<CanonicalForm>,
    peer_gens: Vec<BraidWord>,
    peer_gen_forms: Vec<CanonicalForm>,
    second_key: Option<BraidWord>,
    second_form: Option<CanonicalForm>,
    transmission: Option<CanonicalForm>,
    peer_transmission: Option<CanonicalForm>,
    shared_key: Option<CanonicalForm>,
}

impl fmt::Debug for PartyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartyState")
            .field("role", &self.role)
            .field("phase", &self.phase)
            .finish_non_exhaustive()
    }
}

impl PartyState {
    /// Default sampler (`k = 5`, `gen_len = l/4`, `conj_len = l/2`) and
    /// factor budget.
    pub fn new(role: Role, params: &ProtocolParams, seed: u64) -> Result<Self, ProtocolError> {
        let sampler = SamplerConfig::with_defaults(params.n, params.l, seed);
        PartyState::with_config(role, params, sampler, DEFAULT_FACTOR_BUDGET)
    }

    pub fn with_config(
        role: Role,
        params: &ProtocolParams,
        sampler: SamplerConfig,
        factor_budget: usize,
    ) -> Result<Self, ProtocolError> {
        if sampler.n != params.n {
            return Err(ProtocolError::StrandMismatch { expected: params.n, got: sampler.n });
        }
        sampler.validate()?;
        if factor_budget == 0 {
            return Err(ProtocolError::InvalidParams("factor budget must be at least 1".into()));
        }
        Ok(PartyState {
            role,
            phase: Phase::Init,
            params: params.clone(),
            rng: ChaCha20Rng::seed_from_u64(sampler.seed),
            sampler,
            factor_budget,
            pair: None,
            private_form: None,
            peer_gens: Vec::new(),
            peer_gen_forms: Vec::new(),
            second_key: None,
            second_form: None,
            transmission: None,
            peer_transmission: None,
            shared_key: None,
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn pair(&self) -> Option<&CommutingPair> {
        self.pair.as_ref()
    }

    /// `a₂` for Alice, `b₁` for Bob.
    pub fn second_key(&self) -> Option<&BraidWord> {
        self.second_key.as_ref()
    }

    pub fn second_key_form(&self) -> Option<&CanonicalForm> {
        self.second_form.as_ref()
    }

    pub fn private_form(&self) -> Option<&CanonicalForm> {
        self.private_form.as_ref()
    }

    pub fn peer_gens(&self) -> &[BraidWord] {
        &self.peer_gens
    }

    pub fn transmission(&self) -> Option<&CanonicalForm> {
        self.transmission.as_ref()
    }

    pub fn peer_transmission(&self) -> Option<&CanonicalForm> {
        self.peer_transmission.as_ref()
    }

    pub fn shared_key(&self) -> Option<&CanonicalForm> {
        self.shared_key.as_ref()
    }

    /// The element multiplied on the left of `w` (`a₁` or `b₁`).
    pub fn left_private(&self) -> Option<&BraidWord> {
        match self.role {
            Role::Alice => self.pair.as_ref().map(|p| &p.private_elem),
            Role::Bob => self.second_key.as_ref(),
        }
    }

    /// The element multiplied on the right of `w` (`a₂` or `b₂`).
    pub fn right_private(&self) -> Option<&BraidWord> {
        match self.role {
            Role::Alice => self.second_key.as_ref(),
            Role::Bob => self.pair.as_ref().map(|p| &p.private_elem),
        }
    }

    fn expect_phase(&self, phase: Phase, action: &'static str) -> Result<(), ProtocolError> {
        if self.phase != phase {
            return Err(ProtocolError::WrongPhase { role: self.role, action, phase: self.phase });
        }
        Ok(())
    }

    fn check_strands(&self, form: &CanonicalForm) -> Result<(), ProtocolError> {
        if form.strands() != self.params.n {
            return Err(ProtocolError::StrandMismatch { expected: self.params.n, got: form.strands() });
        }
        Ok(())
    }

    /// Steps (1)/(2): pick the private element and publish commuting
    /// generators.
    pub fn publish_subgroup(&mut self) -> Result<HandshakeMessage, ProtocolError> {
        self.expect_phase(Phase::Init, "publish a subgroup")?;
        let pair = keygen::generate_commuting_pair(&self.sampler, self.role.private_half(), &mut self.rng)?;
        let gens: Vec<CanonicalForm> = pair.subgroup_gens.iter().map(to_canonical).collect();
        self.private_form = Some(to_canonical(&pair.private_elem));
        self.pair = Some(pair);
        self.phase = Phase::PublishedSubgroup;
        Ok(match self.role {
            Role::Alice => HandshakeMessage::SubgroupA(gens),
            Role::Bob => HandshakeMessage::SubgroupB(gens),
        })
    }

    pub fn receive_subgroup(&mut self, msg: &HandshakeMessage) -> Result<(), ProtocolError> {
        self.expect_phase(Phase::PublishedSubgroup, "receive a subgroup")?;
        let expected = self.role.peer().subgroup_kind();
        let gens = match (msg, self.role) {
            (HandshakeMessage::SubgroupB(g), Role::Alice) | (HandshakeMessage::SubgroupA(g), Role::Bob) => g,
            _ => return Err(ProtocolError::WrongKind { role: self.role, expected, got: msg.kind() }),
        };
        if gens.is_empty() {
            return Err(ProtocolError::EmptySubgroup);
        }
        for g in gens {
            self.check_strands(g)?;
        }
        self.peer_gens = gens.iter().map(CanonicalForm::to_word).collect();
        self.peer_gen_forms = gens.clone();
        self.phase = Phase::ReceivedSubgroup;
        Ok(())
    }

    /// Steps (3)/(4): sample from the peer's subgroup and send
    /// `N(a₁ w a₂)` or `N(b₁ w b₂)`.
    pub fn send_transmission(&mut self) -> Result<HandshakeMessage, ProtocolError> {
        self.expect_phase(Phase::ReceivedSubgroup, "send a transmission")?;
        let choices = keygen::subgroup_choices(self.peer_gens.len(), self.factor_budget, &mut self.rng)?;
        let second = keygen::product_of_choices(&self.peer_gens, &choices)?;
        let inverse_forms: Vec<CanonicalForm> = self.peer_gen_forms.iter().map(CanonicalForm::inverse).collect();
        let mut second_form = CanonicalForm::identity(self.params.n);
        for &(i, e) in &choices {
            let g = if e > 0 { &self.peer_gen_forms[i] } else { &inverse_forms[i] };
            second_form = second_form.multiply(g)?;
        }
        let private = self.private_form.as_ref().expect("set when the subgroup was published");
        let w = self.params.base_form();
        let payload = match self.role {
            Role::Alice => private.multiply(w)?.multiply(&second_form)?,
            Role::Bob => second_form.multiply(w)?.multiply(private)?,
        };
        self.second_key = Some(second);
        self.second_form = Some(second_form);
        self.transmission = Some(payload.clone());
        self.phase = Phase::SentTransmission;
        Ok(match self.role {
            Role::Alice => HandshakeMessage::TransmissionA(payload),
            Role::Bob => HandshakeMessage::TransmissionB(payload),
        })
    }

    /// Steps (5)/(6): `K_A = a₁ P_B a₂` or `K_B = b₁ P_A b₂`.
    pub fn compute_shared_key(&mut self, msg: &HandshakeMessage) -> Result<&CanonicalForm, ProtocolError> {
        self.expect_phase(Phase::SentTransmission, "compute the shared key")?;
        let expected = self.role.peer().transmission_kind();
        let peer = match (msg, self.role) {
            (HandshakeMessage::TransmissionB(f), Role::Alice) | (HandshakeMessage::TransmissionA(f), Role::Bob) => f,
            _ => return Err(ProtocolError::WrongKind { role: self.role, expected, got: msg.kind() }),
        };
        self.check_strands(peer)?;
        let private = self.private_form.as_ref().expect("set when the subgroup was published");
        let second = self.second_form.as_ref().expect("set when the transmission was sent");
        let key = match self.role {
            Role::Alice => private.multiply(peer)?.multiply(second)?,
            Role::Bob => second.multiply(peer)?.multiply(private)?,
        };
        self.peer_transmission = Some(peer.clone());
        self.shared_key = Some(key);
        self.phase = Phase::Complete;
        Ok(self.shared_key.as_ref().expect("just set"))
    }
}

/// `SHA-256("BKEXK1" ‖ encode_braid(K))`.
pub fn derive_session_key(key: &CanonicalForm) -> Result<[u8; 32], WireError> {
    let mut hasher = Sha256::new();
    hasher.update(SESSION_KEY_LABEL);
    hasher.update(wire::encode_braid(key)?);
    Ok(hasher.finalize().into())
}

#[derive(Debug, Clone)]
pub struct HandshakeOutcome {
    pub key_a: CanonicalForm,
    pub key_b: CanonicalForm,
    pub transcript: Transcript,
    pub alice: PartyState,
    pub bob: PartyState,
}

impl HandshakeOutcome {
    pub fn keys_match(&self) -> bool {
        self.key_a == self.key_b
    }
}

/// Private seeds for both parties, derived from the public-parameter seed
/// on a separate ChaCha stream.
pub fn party_seeds(seed: u64) -> (u64, u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (rng.next_u64(), rng.next_u64())
}

/// Runs both parties over an in-process queue of encoded frames.
pub fn run_handshake(n: usize, l: usize, seed: u64) -> Result<HandshakeOutcome, ProtocolError> {
    let params = make_params(n, l, seed)?;
    let (alice_seed, bob_seed) = party_seeds(seed);
    let alice = PartyState::new(Role::Alice, &params, alice_seed)?;
    let bob = PartyState::new(Role::Bob, &params, bob_seed)?;
    run_parties(params, alice, bob)
}

pub fn run_parties(
    params: ProtocolParams,
    mut alice: PartyState,
    mut bob: PartyState,
) -> Result<HandshakeOutcome, ProtocolError> {
    let mut channel = Channel::default();
    channel.send(&HandshakeMessage::Params(params))?;
    channel.send(&alice.publish_subgroup()?)?;
    channel.send(&bob.publish_subgroup()?)?;

    let delivered_params = channel.recv_at(0)?;
    debug_assert_eq!(delivered_params.kind(), MessageKind::Params);
    bob.receive_subgroup(&channel.recv_at(1)?)?;
    alice.receive_subgroup(&channel.recv_at(2)?)?;

    channel.send(&alice.send_transmission()?)?;
    channel.send(&bob.send_transmission()?)?;
    let key_b = bob.compute_shared_key(&channel.recv_at(3)?)?.clone();
    let key_a = alice.compute_shared_key(&channel.recv_at(4)?)?.clone();

    let transcript = Transcript::from_messages(channel.into_messages()?)?;
    Ok(HandshakeOutcome { key_a, key_b, transcript, alice, bob })
}

/// Ordered, reliable queue of encoded frames.
#[derive(Default)]
struct Channel {
    frames: VecDeque<Vec<u8>>,
}

impl Channel {
    fn send(&mut self, msg: &HandshakeMessage) -> Result<(), ProtocolError> {
        self.frames.push_back(wire::encode_message(msg)?);
        Ok(())
    }

    fn recv_at(&self, index: usize) -> Result<HandshakeMessage, ProtocolError> {
        Ok(wire::decode_message(&self.frames[index])?)
    }

    fn into_messages(self) -> Result<Vec<HandshakeMessage>, ProtocolError> {
        self.frames
            .iter()
            .map(|f| wire::decode_message(f).map_err(ProtocolError::from))
            .collect()
    }
}
