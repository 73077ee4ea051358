//! Alice's and Bob's sides of a session, each a sequential program over a link.

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{alice_basis, bob_basis};
use crate::ks::{ortho_structure, RaySet};
use crate::rng::{substream, Stream};

use super::amplify::{check_tag, privacy_amplify, random_seed, seed_len, CHECK_BITS};
use super::bits::Bits;
use super::phases::{alice_bit, choose_test_set, judge, key_indices};
use super::reconcile::{BobReconciler, Reconciliation};
use super::sizing::output_length;
use super::source::TrustedSource;
use super::transport::{Link, Party, Tap};
use super::wire::{Parity, Verdict, WireMessage};
use super::SessionConfig;

fn unexpected(expected: &str, got: &WireMessage) -> Error {
    Error::Protocol(format!("expected {expected}, got {}", got.type_name()))
}

#[derive(Debug, Clone, Default)]
pub struct AliceView {
    pub outcomes: Vec<usize>,
    pub kept: Vec<usize>,
    pub test: Vec<usize>,
    pub failures: usize,
    pub observed_failure: f64,
    pub verdict: Option<Verdict>,
    pub raw_key: Bits,
    pub leakage_bits: usize,
    pub output_length: usize,
    pub final_key: Bits,
    pub peer_ok: bool,
}

#[derive(Debug, Clone, Default)]
pub struct BobView {
    pub choices: Vec<bool>,
    pub kept: Vec<usize>,
    pub test: Vec<usize>,
    pub raw_key: Bits,
    pub reconciliation: Option<Reconciliation>,
    pub final_key: Bits,
    pub tag_ok: bool,
}

pub fn run_alice<L: Link>(
    cfg: &SessionConfig,
    set: &RaySet,
    link: &mut Tap<L>,
    source: &TrustedSource,
) -> Result<AliceView> {
    let mut rng = substream(cfg.seed, Stream::Alice);
    let structure = ortho_structure(set);
    let mut view = AliceView::default();

    for round in 0..cfg.rounds {
        let (v1, v2) = structure.pick_pair(set, &mut rng)?;
        link.send(WireMessage::Vectors { round, v1, v2 })?;
        view.outcomes
            .push(source.measure(round, Party::Alice, alice_basis(v1, v2)?)?);
        match link.recv()? {
            WireMessage::Announce { round: r, bit } if r == round => {
                if !bit {
                    view.kept.push(round as usize);
                }
            }
            other => return Err(unexpected("ANNOUNCE", &other)),
        }
    }

    if view.kept.is_empty() {
        return alice_abort(link, view, Verdict::EmptyKey);
    }

    view.test = choose_test_set(&view.kept, cfg.gamma, &mut rng);
    link.send(WireMessage::TestSet {
        rounds: view.test.iter().map(|&i| i as u64).collect(),
    })?;
    let choices = match link.recv()? {
        WireMessage::TestReveal { choices } if choices.len() == view.test.len() => choices,
        other => return Err(unexpected("TEST_REVEAL", &other)),
    };
    view.failures = view
        .test
        .iter()
        .zip(choices.as_slice())
        .filter(|&(&i, &c)| view.outcomes[i] != usize::from(c))
        .count();
    let (observed, accept) = judge(view.test.len(), view.failures, cfg.eta_tolerance);
    view.observed_failure = observed;
    let keys = key_indices(&view.kept, &view.test);
    if !accept {
        return alice_abort(link, view, Verdict::TestFailed);
    }
    if keys.is_empty() {
        return alice_abort(link, view, Verdict::EmptyKey);
    }
    send_verdict(link, &view, Verdict::Accept)?;
    view.verdict = Some(Verdict::Accept);

    view.raw_key = Bits(
        keys.iter()
            .map(|&i| alice_bit(view.outcomes[i], &mut rng))
            .collect(),
    );
    let n = view.raw_key.len();

    loop {
        match link.recv()? {
            WireMessage::Parity(Parity::Request { start, len }) if len > 0 && start + len <= n => {
                let parity = view.raw_key.parity(start, len);
                view.leakage_bits += 1;
                link.send(WireMessage::Parity(Parity::Reply { start, len, parity }))?;
            }
            WireMessage::Parity(Parity::Complete) => break,
            other => return Err(unexpected("PARITY request", &other)),
        }
    }

    let check_seed = random_seed(seed_len(CHECK_BITS, n), &mut rng);
    let tag = check_tag(&view.raw_key, &check_seed)?;
    view.output_length = output_length(
        n,
        observed,
        view.leakage_bits + CHECK_BITS,
        cfg.epsilon_sec,
        cfg.sizing,
    );
    let pa_seed = random_seed(seed_len(view.output_length, n), &mut rng);
    view.final_key = privacy_amplify(&view.raw_key, view.output_length, &pa_seed)?;
    link.send(WireMessage::PaSeed {
        check_seed,
        tag,
        output_length: view.output_length,
        pa_seed,
    })?;

    view.peer_ok = match link.recv()? {
        WireMessage::Done { ok } => ok,
        other => return Err(unexpected("DONE", &other)),
    };
    link.send(WireMessage::Done { ok: view.peer_ok })?;
    if !view.peer_ok {
        view.final_key = Bits::new();
    }
    Ok(view)
}

fn send_verdict<L: Link>(link: &mut Tap<L>, view: &AliceView, verdict: Verdict) -> Result<()> {
    link.send(WireMessage::Verdict {
        tested: view.test.len() as u64,
        failures: view.failures as u64,
        observed_failure: view.observed_failure,
        verdict,
    })
}

fn alice_abort<L: Link>(
    link: &mut Tap<L>,
    mut view: AliceView,
    verdict: Verdict,
) -> Result<AliceView> {
    send_verdict(link, &view, verdict)?;
    view.verdict = Some(verdict);
    match link.recv()? {
        WireMessage::Done { .. } => {}
        other => return Err(unexpected("DONE", &other)),
    }
    link.send(WireMessage::Done { ok: false })?;
    Ok(view)
}

pub fn run_bob<L: Link>(
    cfg: &SessionConfig,
    link: &mut Tap<L>,
    source: &TrustedSource,
) -> Result<BobView> {
    let mut rng = substream(cfg.seed, Stream::Bob);
    let mut view = BobView::default();

    for round in 0..cfg.rounds {
        let (v1, v2) = match link.recv()? {
            WireMessage::Vectors { round: r, v1, v2 } if r == round => (v1, v2),
            other => return Err(unexpected("VECTORS", &other)),
        };
        if !v1.is_orthogonal(&v2) {
            return Err(Error::NotOrthogonal(v1.dot(&v2).abs()));
        }
        let choice = rng.random::<bool>();
        let v_l = if choice { v2 } else { v1 };
        let outcome = source.measure(round, Party::Bob, bob_basis(v_l))?;
        let bit = outcome != 0;
        view.choices.push(choice);
        if !bit {
            view.kept.push(round as usize);
        }
        link.send(WireMessage::Announce { round, bit })?;
    }

    if !view.kept.is_empty() {
        let rounds = match link.recv()? {
            WireMessage::TestSet { rounds } => rounds,
            other => return Err(unexpected("TEST_SET", &other)),
        };
        view.test = rounds.iter().map(|&r| r as usize).collect();
        if view.test.windows(2).any(|w| w[0] >= w[1])
            || view
                .test
                .iter()
                .any(|i| view.kept.binary_search(i).is_err())
        {
            return Err(Error::Protocol(
                "test set is not an increasing subset of the kept rounds".into(),
            ));
        }
        let choices = Bits(view.test.iter().map(|&i| view.choices[i]).collect());
        link.send(WireMessage::TestReveal { choices })?;
    }

    let verdict = match link.recv()? {
        WireMessage::Verdict { verdict, .. } => verdict,
        other => return Err(unexpected("VERDICT", &other)),
    };
    if verdict != Verdict::Accept {
        link.send(WireMessage::Done { ok: false })?;
        expect_done(link)?;
        return Ok(view);
    }

    view.raw_key = Bits(
        key_indices(&view.kept, &view.test)
            .iter()
            .map(|&i| view.choices[i])
            .collect(),
    );
    let mut rec = BobReconciler::new(view.raw_key.clone(), cfg.block_size)?;
    while let Some((start, len)) = rec.next_request() {
        link.send(WireMessage::Parity(Parity::Request { start, len }))?;
        match link.recv()? {
            WireMessage::Parity(Parity::Reply {
                start: s,
                len: l,
                parity,
            }) => rec.on_parity(s, l, parity)?,
            other => return Err(unexpected("PARITY reply", &other)),
        }
    }
    link.send(WireMessage::Parity(Parity::Complete))?;
    let rec = rec.into_result();

    let (check_seed, tag, m, pa_seed) = match link.recv()? {
        WireMessage::PaSeed {
            check_seed,
            tag,
            output_length,
            pa_seed,
        } => (check_seed, tag, output_length, pa_seed),
        other => return Err(unexpected("PA_SEED", &other)),
    };
    view.tag_ok = check_tag(&rec.corrected, &check_seed)? == tag;
    if view.tag_ok {
        view.final_key = privacy_amplify(&rec.corrected, m, &pa_seed)?;
    }
    view.reconciliation = Some(rec);
    link.send(WireMessage::Done { ok: view.tag_ok })?;
    expect_done(link)?;
    Ok(view)
}

fn expect_done<L: Link>(link: &mut Tap<L>) -> Result<()> {
    match link.recv()? {
        WireMessage::Done { .. } => Ok(()),
        other => Err(unexpected("DONE", &other)),
    }
}
