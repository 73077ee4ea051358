//! Final-key sizing and the correctness / distinguishability checks.

use crate::error::{Error, Result};
use crate::security::{h2, key_rate};

/// Per-bit rate used to size the final key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateFn {
    /// 1 − h₂(η).
    #[default]
    BinaryEntropy,
    /// The closed-form ternary key rate, floored at 0.
    TernaryKeyRate,
}

impl RateFn {
    pub fn rate(self, eta: f64) -> f64 {
        match self {
            RateFn::BinaryEntropy => 1.0 - h2(eta.clamp(0.0, 1.0)).expect("clamped"),
            RateFn::TernaryKeyRate => key_rate(eta.clamp(0.0, 2.0 / 3.0))
                .expect("clamped")
                .max(0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RateFn::BinaryEntropy => "binary-entropy",
            RateFn::TernaryKeyRate => "ternary-key-rate",
        }
    }
}

impl std::str::FromStr for RateFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary-entropy" => Ok(RateFn::BinaryEntropy),
            "ternary-key-rate" => Ok(RateFn::TernaryKeyRate),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Rate function plus the finite-size constant c in c·√n.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sizing {
    pub rate_fn: RateFn,
    pub c: f64,
}

impl Sizing {
    /// c = 0 drops the finite-size correction entirely.
    pub fn is_asymptotic(&self) -> bool {
        self.c == 0.0
    }

    pub fn marker(&self) -> &'static str {
        if self.is_asymptotic() {
            "asymptotic"
        } else {
            "finite"
        }
    }
}

/// max(0, ⌊n·rate(η) − c·√n⌋ − leakage − ⌈2·log₂(1/ε)⌉).
pub fn output_length(
    n_key_bits: usize,
    eta_observed: f64,
    leakage_bits: usize,
    epsilon_sec: f64,
    sizing: Sizing,
) -> usize {
    let n = n_key_bits as f64;
    let bulk = (n * sizing.rate_fn.rate(eta_observed) - sizing.c * n.sqrt()).floor();
    let margin = if epsilon_sec >= 1.0 {
        0.0
    } else {
        (2.0 * (1.0 / epsilon_sec).log2()).ceil()
    };
    let len = bulk - leakage_bits as f64 - margin;
    if len > 0.0 {
        (len as usize).min(n_key_bits)
    } else {
        0
    }
}

/// 1 − (1 − η)ᵏ.
pub fn epsilon_correct(eta: f64, k: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::range("eta", eta, "[0, 1]"));
    }
    Ok(1.0 - (1.0 - eta).powf(k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinguishabilityReport {
    /// |p̂(0) − 1/2|.
    pub delta: f64,
    /// 4·√(1/(4n)).
    pub margin: f64,
    pub pass: bool,
}

/// Statistical distance of the empirical bit law from a fair coin.
pub fn eta_distinguishability(
    bits: &[bool],
    eta_tolerance: f64,
) -> Result<DistinguishabilityReport> {
    if bits.is_empty() {
        return Err(Error::range("bitstring length", 0.0, ">= 1"));
    }
    let n = bits.len() as f64;
    let zeros = bits.iter().filter(|&&b| !b).count() as f64;
    let delta = (zeros / n - 0.5).abs();
    let margin = 4.0 * (1.0 / (4.0 * n)).sqrt();
    Ok(DistinguishabilityReport {
        delta,
        margin,
        pass: delta <= eta_tolerance + margin,
    })
}
