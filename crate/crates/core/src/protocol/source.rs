//! The trusted entanglement source shared by both devices.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex};

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::sample_joint;
use crate::linalg::{joint_distribution, Basis3, Density9};
use crate::rng::{indexed_substream, Stream};

use super::transport::Party;

#[derive(Default)]
struct Slot {
    alice: Option<Basis3>,
    bob: Option<Basis3>,
    outcome: Option<(usize, usize)>,
    collected: u8,
}

#[derive(Default)]
struct Slots {
    rounds: HashMap<u64, Slot>,
    closed: bool,
}

/// Emits one copy of the (noisy) state per round and resolves both
/// measurements jointly.
///
/// Each device submits its basis for a round and blocks until the other
/// has done the same; the joint outcome is then drawn from the round's own
/// substream, so results do not depend on thread timing.
pub struct TrustedSource {
    state: Density9,
    seed: u64,
    slots: Mutex<Slots>,
    ready: Condvar,
}

impl TrustedSource {
    pub fn new(state: Density9, seed: u64) -> Self {
        TrustedSource {
            state,
            seed,
            slots: Mutex::default(),
            ready: Condvar::new(),
        }
    }

    pub fn state(&self) -> &Density9 {
        &self.state
    }

    /// Measure `party`'s qutrit of round `round` in `basis`.
    pub fn measure(&self, round: u64, party: Party, basis: Basis3) -> Result<usize> {
        let mut slots = self.slots.lock().expect("source lock");
        let slot = slots.rounds.entry(round).or_default();
        let mine = match party {
            Party::Alice => &mut slot.alice,
            Party::Bob => &mut slot.bob,
        };
        if mine.replace(basis).is_some() {
            return Err(Error::Protocol(format!(
                "{party:?} measured round {round} twice"
            )));
        }
        if let (Some(a), Some(b)) = (slot.alice, slot.bob) {
            let u = indexed_substream(self.seed, Stream::Source, round).random::<f64>();
            slot.outcome = Some(sample_joint(&joint_distribution(&self.state, &a, &b), u));
            self.ready.notify_all();
        }
        loop {
            if slots.closed {
                return Err(Error::Protocol("source closed".into()));
            }
            let slot = slots
                .rounds
                .get_mut(&round)
                .expect("slot exists until both collect");
            if let Some((a, b)) = slot.outcome {
                slot.collected += 1;
                if slot.collected == 2 {
                    slots.rounds.remove(&round);
                }
                return Ok(match party {
                    Party::Alice => a,
                    Party::Bob => b,
                });
            }
            slots = self.ready.wait(slots).expect("source lock");
        }
    }

    /// Wake and fail every pending measurement.
    pub fn close(&self) {
        self.slots.lock().expect("source lock").closed = true;
        self.ready.notify_all();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::phi0;
    use std::thread;

    #[test]
    fn both_sides_see_one_joint_outcome() {
        let src = TrustedSource::new(phi0().projector(), 9);
        let b = Basis3::standard();
        thread::scope(|s| {
            let h = s.spawn(|| {
                (0..50)
                    .map(|r| src.measure(r, Party::Bob, b).unwrap())
                    .collect::<Vec<_>>()
            });
            let a: Vec<usize> = (0..50)
                .map(|r| src.measure(r, Party::Alice, b).unwrap())
                .collect();
            assert_eq!(a, h.join().unwrap());
        });
    }

    #[test]
    fn closed_source_fails() {
        let src = TrustedSource::new(phi0().projector(), 1);
        src.close();
        assert!(src.measure(0, Party::Alice, Basis3::standard()).is_err());
        assert!(src.measure(0, Party::Alice, Basis3::standard()).is_err());
    }
}
