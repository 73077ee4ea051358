//! Simulator and analysis toolkit for a ternary device-independent QKD
//! protocol built on the two-party impossible-colouring pseudo-telepathy game.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: kets, density operators, real rays and bases over C³ / C⁹.
//! * [`gates`]: the qutrit gate set and the two-qutrit Bell-preparation circuit.
//! * [`ks`]: Kochen-Specker ray sets and an exhaustive colouring checker.
//! * [`game`]: round play under the quantum strategy, noise, classical bound.
//! * [`protocol`]: the full two-endpoint key-distillation session.
//! * [`security`]: entropies, key-rate bounds and curves.

pub mod consts;
pub mod error;
pub mod game;
pub mod gates;
pub mod ks;
pub mod linalg;
pub mod protocol;
pub mod rng;
pub mod security;

pub use error::{Error, Result};
pub use game::{NoiseSpec, RoundInput, RoundRecord};
pub use gates::{BellIndex, ControlledGate9, Gate3, GateLabel};
pub use ks::{ColouringResult, OrthoStructure, RaySet};
pub use linalg::{Basis3, Density9, Ket3, Ket9, Ray3};
pub use protocol::{SessionConfig, SessionOutcome, SessionTranscript, WireMessage};
pub use security::{EntropyReport, GroupSums, Spectrum9};
