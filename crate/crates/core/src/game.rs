//! The two-party impossible-colouring game: bases, round play under the
//! quantum strategy, noise, and the classical bound.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::phi0;
use crate::ks::{OrthoStructure, RaySet};
use crate::linalg::{complete_basis, depolarize, joint_distribution, Basis3, Density9, Ray3};
use crate::rng::{indexed_substream, Stream};

/// Alice's orthogonal pair and Bob's choice between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundInput {
    pub v1: Ray3,
    pub v2: Ray3,
    /// `false` selects v₁, `true` selects v₂.
    pub bob_choice: bool,
}

impl RoundInput {
    pub fn new(v1: Ray3, v2: Ray3, bob_choice: bool) -> Result<Self> {
        let d = v1.dot(&v2).abs();
        if !v1.is_orthogonal(&v2) {
            return Err(Error::NotOrthogonal(d));
        }
        Ok(RoundInput { v1, v2, bob_choice })
    }

    /// The ray v_ℓ Bob puts first in his basis.
    pub fn chosen(&self) -> Ray3 {
        if self.bob_choice {
            self.v2
        } else {
            self.v1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub input: RoundInput,
    /// Index into B_a = {v₁, v₂, v_a}.
    pub alice_outcome: usize,
    /// Index into B_b = {v_ℓ, v_b₁, v_b₂}.
    pub bob_outcome: usize,
    /// Bob's public bit: `false` (0) iff his outcome was v_ℓ.
    pub bob_announcement: bool,
    pub kept: bool,
    /// Alice's outcome ray equals v_ℓ.
    pub matched: bool,
}

impl RoundRecord {
    pub fn from_outcomes(input: RoundInput, alice_outcome: usize, bob_outcome: usize) -> Self {
        let announcement = bob_outcome != 0;
        // B_a lists v1, v2 first, so the index decides the match directly.
        let matched = alice_outcome == usize::from(input.bob_choice);
        RoundRecord {
            input,
            alice_outcome,
            bob_outcome,
            bob_announcement: announcement,
            kept: !announcement,
            matched,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Depolarizing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        kind: NoiseKind::None,
        p: 0.0,
    };

    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::range("p", p, "[0, 1]"));
        }
        Ok(NoiseSpec {
            kind: NoiseKind::Depolarizing,
            p,
        })
    }

    /// `none` for p = 0, depolarising otherwise.
    pub fn from_p(p: f64) -> Result<Self> {
        if p == 0.0 {
            Ok(Self::NONE)
        } else {
            Self::depolarizing(p)
        }
    }

    pub fn probability(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Depolarizing => self.p,
        }
    }

    pub fn apply(&self, state: &Density9) -> Density9 {
        match self.kind {
            NoiseKind::None => *state,
            NoiseKind::Depolarizing => {
                depolarize(state, self.p).expect("p validated at construction")
            }
        }
    }

    /// The state the source emits: |φ₀⟩⟨φ₀| passed through this noise.
    pub fn source_state(&self) -> Density9 {
        self.apply(&phi0().projector())
    }
}

/// B_a = {v₁, v₂, v₁ × v₂}.
pub fn alice_basis(v1: Ray3, v2: Ray3) -> Result<Basis3> {
    complete_basis(&[v1, v2])
}

/// B_b = {v_ℓ, …} completed against the standard axes.
pub fn bob_basis(v_l: Ray3) -> Basis3 {
    complete_basis(&[v_l]).expect("a single unit ray always completes")
}

/// Inverse-CDF draw of one (alice, bob) cell of a joint table from `u ∈ [0,1)`.
pub fn sample_joint(table: &[[f64; 3]; 3], u: f64) -> (usize, usize) {
    let total: f64 = table.iter().flatten().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = (0, 0);
    for a in 0..3 {
        for b in 0..3 {
            let p = table[a][b];
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = (a, b);
            if target < acc {
                return (a, b);
            }
        }
    }
    last
}

/// Play one round: both parties measure `state` in their bases, Bob announces.
pub fn play_round<R: Rng + ?Sized>(
    state: &Density9,
    input: RoundInput,
    rng: &mut R,
) -> RoundRecord {
    let ba = alice_basis(input.v1, input.v2).expect("RoundInput guarantees orthogonality");
    let bb = bob_basis(input.chosen());
    let table = joint_distribution(state, &ba, &bb);
    let (a, b) = sample_joint(&table, rng.random::<f64>());
    RoundRecord::from_outcomes(input, a, b)
}

/// Game-failure rate among kept rounds for depolarising strength p: η = 2p/3.
pub fn eta_from_p(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::range("p", p, "[0, 1]"));
    }
    Ok(2.0 * p / 3.0)
}

pub fn p_from_eta(eta: f64) -> Result<f64> {
    if !(0.0..=2.0 / 3.0).contains(&eta) {
        return Err(Error::range("eta", eta, "[0, 2/3]"));
    }
    Ok((1.5 * eta).min(1.0))
}

/// Best winning probability of a d-dimensional impossible-colouring game
/// without shared entanglement: 1/d.
pub fn classical_bound(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::range("d", f64::from(d), "d >= 2"));
    }
    Ok(1.0 / f64::from(d))
}

/// Aggregate statistics of a batch of rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GameStats {
    pub rounds: u64,
    pub kept: u64,
    pub matched_kept: u64,
}

impl GameStats {
    pub fn record(&mut self, r: &RoundRecord) {
        self.rounds += 1;
        if r.kept {
            self.kept += 1;
            if r.matched {
                self.matched_kept += 1;
            }
        }
    }

    pub fn mismatched_kept(&self) -> u64 {
        self.kept - self.matched_kept
    }

    pub fn keep_rate(&self) -> f64 {
        self.kept as f64 / self.rounds.max(1) as f64
    }

    pub fn match_rate(&self) -> f64 {
        self.matched_kept as f64 / self.kept.max(1) as f64
    }

    /// Observed conditional failure rate, the estimate of η.
    pub fn eta_estimate(&self) -> f64 {
        self.mismatched_kept() as f64 / self.kept.max(1) as f64
    }
}

/// The inputs of round `index` under `seed`, drawn from its own substream.
pub fn round_input(
    set: &RaySet,
    structure: &OrthoStructure,
    seed: u64,
    index: u64,
) -> Result<(RoundInput, f64)> {
    let mut rng = indexed_substream(seed, Stream::Game, index);
    let (v1, v2) = structure.pick_pair(set, &mut rng)?;
    let choice = rng.random::<bool>();
    let u = rng.random::<f64>();
    Ok((RoundInput::new(v1, v2, choice)?, u))
}

/// Play `rounds` rounds on `set` with the source state for `noise`.
///
/// Round `i` draws everything from the substream `(seed, i)`, so any subset
/// of rounds can be replayed in isolation.
pub fn run_montecarlo(set: &RaySet, noise: NoiseSpec, rounds: u64, seed: u64) -> Result<GameStats> {
    let structure = crate::ks::ortho_structure(set);
    let state = noise.source_state();
    let mut stats = GameStats::default();
    for i in 0..rounds {
        let (input, u) = round_input(set, &structure, seed, i)?;
        let ba = alice_basis(input.v1, input.v2)?;
        let bb = bob_basis(input.chosen());
        let (a, b) = sample_joint(&joint_distribution(&state, &ba, &bb), u);
        stats.record(&RoundRecord::from_outcomes(input, a, b));
    }
    Ok(stats)
}

/// Win count of uniformly drawn deterministic classical strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalEstimate {
    pub trials: u64,
    pub wins: u64,
}

impl ClassicalEstimate {
    pub fn rate(&self) -> f64 {
        self.wins as f64 / self.trials.max(1) as f64
    }
}

/// Draw `trials` deterministic strategies uniformly on the axes inputs and
/// play each once on a uniformly random input.
///
/// A strategy is a response table for each party: Alice maps each ordered
/// orthogonal pair to an outcome of B_a, Bob maps each v_ℓ to an outcome of
/// B_b. The round is won when both name the same ray.
pub fn sample_classical_strategies<R: Rng + ?Sized>(trials: u64, rng: &mut R) -> ClassicalEstimate {
    let axes: [Ray3; 3] = std::array::from_fn(Ray3::axis);
    let pairs: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut wins = 0;
    for _ in 0..trials {
        let alice_table: Vec<usize> = (0..pairs.len()).map(|_| rng.random_range(0..3)).collect();
        let bob_table: [usize; 3] = std::array::from_fn(|_| rng.random_range(0..3));
        let which = rng.random_range(0..pairs.len());
        let (i, j) = pairs[which];
        let choice = rng.random::<bool>();
        let v_l = if choice { j } else { i };
        let ba = alice_basis(axes[i], axes[j]).expect("axes are orthogonal");
        let bb = bob_basis(axes[v_l]);
        if ba[alice_table[which]] == bb[bob_table[v_l]] {
            wins += 1;
        }
    }
    ClassicalEstimate { trials, wins }
}
