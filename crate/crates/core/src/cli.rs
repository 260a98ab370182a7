//! Command-line front end: `nf`, `handshake`, `attack`, `distinguish`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::braid::{parse_word, to_canonical, BraidError};
use crate::cryptanalysis::{
    self, artin_generators, brute_force_decompose, length_attack, CryptanalysisError, DecompositionInstance,
};
use crate::protocol::{self, derive_session_key, party_seeds, PartyState, ProtocolError, Role, Transcript};
use crate::wire::{self, WireError};

pub const DEFAULT_N: usize = 64;
pub const DEFAULT_L: usize = 1024;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Cryptanalysis(#[from] CryptanalysisError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "braidkex", about = "Braid-group key establishment and cryptanalysis toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the left canonical form of a generator word such as "1 -2 1".
    Nf {
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(default_value = "", allow_hyphen_values = true)]
        word: String,
    },
    /// Run both parties in-process and report the session keys.
    Handshake {
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_L)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Subgroup generators multiplied into a₂ and b₁.
        #[arg(long, default_value_t = protocol::DEFAULT_FACTOR_BUDGET)]
        budget: usize,
    },
    /// Attack one transmission of a recorded transcript.
    Attack {
        #[arg(value_enum)]
        kind: AttackKind,
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Alice)]
        target: Target,
        #[arg(long, default_value_t = 2)]
        depth_left: usize,
        #[arg(long, default_value_t = 2)]
        depth_right: usize,
        #[arg(long, default_value_t = 8)]
        beam: usize,
        #[arg(long, default_value_t = 16)]
        max_iters: usize,
        /// Recorded in the report; the attacks themselves are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cycle-type distinguisher experiment over many handshakes.
    Distinguish {
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_L)]
        l: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackKind {
    Brute,
    Length,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Alice,
    Bob,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Nf { n, word } => {
            let form = to_canonical(&parse_word(&word, n)?);
            writeln!(out, "{form}")?;
        }
        Command::Handshake { n, l, seed, transcript, budget } => {
            let params = protocol::make_params(n, l, seed)?;
            let (alice_seed, bob_seed) = party_seeds(seed);
            let sampler = |s| crate::keygen::SamplerConfig::with_defaults(n, l, s);
            let alice = PartyState::with_config(Role::Alice, &params, sampler(alice_seed), budget)?;
            let bob = PartyState::with_config(Role::Bob, &params, sampler(bob_seed), budget)?;
            let outcome = protocol::run_parties(params, alice, bob)?;
            if let Some(path) = transcript {
                wire::write_transcript(path, outcome.transcript.messages())?;
            }
            let ka = derive_session_key(&outcome.key_a)?;
            let kb = derive_session_key(&outcome.key_b)?;
            writeln!(out, "alice_key={}", hex::encode(ka))?;
            writeln!(out, "bob_key={}", hex::encode(kb))?;
            writeln!(out, "{}", if outcome.keys_match() { "MATCH" } else { "MISMATCH" })?;
        }
        Command::Attack { kind, transcript, target, depth_left, depth_right, beam, max_iters, seed } => {
            let t = Transcript::from_messages(wire::read_transcript(&transcript)?)?;
            let n = t.params().n;
            // The subgroup the adversary cannot see is replaced by all of Bₙ.
            let all: Vec<_> = artin_generators(n).iter().map(to_canonical).collect();
            let inst = match target {
                Target::Alice => DecompositionInstance::alice_from_transcript(&t, all)?,
                Target::Bob => DecompositionInstance::bob_from_transcript(&t, all)?,
            };
            writeln!(out, "attack={}", match kind { AttackKind::Brute => "brute", AttackKind::Length => "length" })?;
            writeln!(out, "target={}", match target { Target::Alice => "alice", Target::Bob => "bob" })?;
            writeln!(out, "n={n}")?;
            writeln!(out, "seed={seed}")?;
            let recovered = match kind {
                AttackKind::Brute => brute_force_decompose(&inst, depth_left, depth_right),
                AttackKind::Length => {
                    let outcome = length_attack(&inst, beam, max_iters);
                    writeln!(out, "iterations={}", outcome.iterations)?;
                    outcome.recovered
                }
            };
            match recovered {
                Some(pair) => {
                    writeln!(out, "result=success")?;
                    writeln!(out, "left={}", pair.left)?;
                    writeln!(out, "right={}", pair.right)?;
                }
                None => writeln!(out, "result=failure")?,
            }
        }
        Command::Distinguish { n, l, trials, seed } => {
            let summary = cryptanalysis::distinguisher_experiment(n, l, trials, seed)?;
            writeln!(out, "{summary}")?;
        }
    }
    Ok(())
}
