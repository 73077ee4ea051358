//! The full key-distribution session between two message-passing endpoints:
//! distribution, sifting, testing, key extraction, reconciliation and
//! privacy amplification.

mod amplify;
mod bits;
mod endpoint;
mod phases;
mod reconcile;
mod sizing;
mod source;
mod transport;
mod wire;

use std::fmt::{self, Write as _};
use std::thread;

use crate::error::{Error, Result};
use crate::game::NoiseSpec;
use crate::ks::{builtin_rayset, RaySet};

pub use amplify::{
    check_tag, keys_agree, privacy_amplify, random_seed, seed_len, toeplitz, CHECK_BITS,
};
pub use bits::Bits;
pub use endpoint::{run_alice, run_bob, AliceView, BobView};
pub use phases::{
    alice_bit, choose_test_set, extract_raw_key, judge, key_indices, sift, test_phase,
    test_sample_size, RawKeys, TestOutcome,
};
pub use reconcile::{reconcile, BobReconciler, Reconciliation};
pub use sizing::{
    epsilon_correct, eta_distinguishability, output_length, DistinguishabilityReport, RateFn,
    Sizing,
};
pub use source::TrustedSource;
pub use transport::{
    link_pair, memory_pair, socket_pair, Link, LinkPair, LoggedMessage, MemoryLink, MessageLog,
    Party, SocketLink, Tap, TransportKind,
};
pub use wire::{Parity, Verdict, WireMessage};

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub rounds: u64,
    pub eta_tolerance: f64,
    pub gamma: f64,
    pub noise: NoiseSpec,
    pub block_size: usize,
    pub seed: u64,
    pub epsilon_sec: f64,
    pub sizing: Sizing,
    pub ray_set: RaySet,
}

impl SessionConfig {
    /// Noiseless defaults: η_tol 0.05, γ 0.2, blocks of 4, ε_sec 1e-9, Peres rays.
    pub fn new(rounds: u64, seed: u64) -> Self {
        SessionConfig {
            rounds,
            eta_tolerance: 0.05,
            gamma: 0.2,
            noise: NoiseSpec::NONE,
            block_size: 4,
            seed,
            epsilon_sec: 1e-9,
            sizing: Sizing::default(),
            ray_set: builtin_rayset("peres33").expect("builtin"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::range("gamma", self.gamma, "(0, 1)"));
        }
        if !(0.0..2.0 / 3.0).contains(&self.eta_tolerance) {
            return Err(Error::range(
                "eta_tolerance",
                self.eta_tolerance,
                "[0, 2/3)",
            ));
        }
        if self.block_size == 0 {
            return Err(Error::range("block_size", 0.0, ">= 1"));
        }
        if !(self.epsilon_sec > 0.0 && self.epsilon_sec < 1.0) {
            return Err(Error::range("epsilon_sec", self.epsilon_sec, "(0, 1)"));
        }
        if !(self.sizing.c >= 0.0 && self.sizing.c.is_finite()) {
            return Err(Error::range("c", self.sizing.c, "[0, inf)"));
        }
        if !(0.0..=1.0).contains(&self.noise.p) {
            return Err(Error::range("p", self.noise.p, "[0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortReason {
    TestFailed,
    EmptyKey,
    ReconciliationFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionOutcome {
    Completed,
    Aborted(AbortReason),
}

impl fmt::Display for SessionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionOutcome::Completed => "completed",
            SessionOutcome::Aborted(AbortReason::TestFailed) => "aborted:test_failed",
            SessionOutcome::Aborted(AbortReason::EmptyKey) => "aborted:empty_key",
            SessionOutcome::Aborted(AbortReason::ReconciliationFailed) => {
                "aborted:reconciliation_failed"
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub config: SessionConfig,
    pub messages: Vec<LoggedMessage>,
    pub kept_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub failures: usize,
    pub observed_failure: f64,
    pub raw_key_a: Bits,
    pub raw_key_b: Bits,
    /// Bob's key after parity bisection.
    pub reconciled_key_b: Bits,
    pub corrections: Vec<usize>,
    pub leakage_bits: usize,
    pub check_bits: usize,
    pub output_length: usize,
    pub final_key_a: Bits,
    pub final_key_b: Bits,
    pub outcome: SessionOutcome,
}

impl SessionTranscript {
    pub fn discarded(&self) -> usize {
        self.config.rounds as usize - self.kept_indices.len()
    }

    /// Serialised form: a header, the config, every message in send order
    /// prefixed by its sender, and a summary line.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = String::from("# tdiqkd session transcript\n");
        let _ = writeln!(
            s,
            "CONFIG|-|rounds={},eta_tol={:.16e},gamma={:.16e},noise_p={:.16e},block_size={},seed={},epsilon_sec={:.16e},rate_fn={},c={:.16e},ray_set={}",
            c.rounds,
            c.eta_tolerance,
            c.gamma,
            c.noise.probability(),
            c.block_size,
            c.seed,
            c.epsilon_sec,
            c.sizing.rate_fn.name(),
            c.sizing.c,
            c.ray_set.name(),
        );
        for m in &self.messages {
            let _ = writeln!(s, "{}>{}", m.from.tag(), m.message);
        }
        let _ = writeln!(
            s,
            "SUMMARY|-|kept={},tested={},failures={},observed_failure={:.16e},leakage_bits={},check_bits={},output_length={},raw_a={},raw_b={},final_a={},final_b={},outcome={},sizing={}",
            self.kept_indices.len(),
            self.test_indices.len(),
            self.failures,
            self.observed_failure,
            self.leakage_bits,
            self.check_bits,
            self.output_length,
            self.raw_key_a,
            self.raw_key_b,
            self.final_key_a,
            self.final_key_b,
            self.outcome,
            c.sizing.marker(),
        );
        s
    }
}

/// Run a session over the in-process transport.
pub fn run_session(config: &SessionConfig) -> Result<SessionTranscript> {
    run_session_over(config, TransportKind::Memory)
}

pub fn run_session_over(
    config: &SessionConfig,
    transport: TransportKind,
) -> Result<SessionTranscript> {
    config.validate()?;
    let source = TrustedSource::new(config.noise.source_state(), config.seed);
    let log = MessageLog::default();
    let (a, b) = link_pair(transport)?;
    let mut alice_link = Tap::new(a, Party::Alice, log.clone());
    let mut bob_link = Tap::new(b, Party::Bob, log.clone());

    let (alice, bob) = thread::scope(|s| {
        let source = &source;
        let bob = s.spawn(move || {
            let r = run_bob(config, &mut bob_link, source);
            if r.is_err() {
                source.close();
            }
            r
        });
        let alice = run_alice(config, &config.ray_set, &mut alice_link, source);
        if alice.is_err() {
            source.close();
        }
        drop(alice_link);
        (alice, bob.join().expect("bob thread panicked"))
    });
    let (alice, bob) = (alice?, bob?);
    let messages = std::mem::take(&mut *log.lock().expect("log lock"));

    let outcome = match alice.verdict {
        Some(Verdict::TestFailed) => SessionOutcome::Aborted(AbortReason::TestFailed),
        Some(Verdict::EmptyKey) | None => SessionOutcome::Aborted(AbortReason::EmptyKey),
        Some(Verdict::Accept) if !bob.tag_ok => {
            SessionOutcome::Aborted(AbortReason::ReconciliationFailed)
        }
        Some(Verdict::Accept) => SessionOutcome::Completed,
    };
    let (reconciled, corrections) = match bob.reconciliation {
        Some(r) => (r.corrected, r.corrections),
        None => (Bits::new(), Vec::new()),
    };
    let accepted = alice.verdict == Some(Verdict::Accept);
    Ok(SessionTranscript {
        config: config.clone(),
        messages,
        kept_indices: alice.kept,
        test_indices: alice.test,
        failures: alice.failures,
        observed_failure: alice.observed_failure,
        raw_key_a: alice.raw_key,
        raw_key_b: bob.raw_key,
        reconciled_key_b: reconciled,
        corrections,
        leakage_bits: alice.leakage_bits,
        check_bits: if accepted { CHECK_BITS } else { 0 },
        output_length: alice.output_length,
        final_key_a: alice.final_key,
        final_key_b: bob.final_key,
        outcome,
    })
}
