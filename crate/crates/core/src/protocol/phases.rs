//! Sifting, parameter estimation and raw-key extraction over round records.

use rand::seq::index::sample;
use rand::Rng;

use crate::game::RoundRecord;

use super::bits::Bits;

/// Indices of the rounds whose announcement was 0.
pub fn sift(records: &[RoundRecord]) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.bob_announcement)
        .map(|(i, _)| i)
        .collect()
}

/// ⌈γ·|kept|⌉, capped at |kept|.
pub fn test_sample_size(kept: usize, gamma: f64) -> usize {
    ((gamma * kept as f64).ceil() as usize).min(kept)
}

/// Alice's uniform draw of the test rounds, returned in increasing order.
pub fn choose_test_set<R: Rng + ?Sized>(kept: &[usize], gamma: f64, rng: &mut R) -> Vec<usize> {
    let k = test_sample_size(kept.len(), gamma);
    let mut picked: Vec<usize> = sample(rng, kept.len(), k)
        .into_iter()
        .map(|i| kept[i])
        .collect();
    picked.sort_unstable();
    picked
}

/// Observed failure rate and whether the matched fraction reaches 1 − η_tol.
pub fn judge(tested: usize, failures: usize, eta_tolerance: f64) -> (f64, bool) {
    if tested == 0 {
        return (0.0, true);
    }
    let observed = failures as f64 / tested as f64;
    let matched = (tested - failures) as f64 / tested as f64;
    (observed, matched >= 1.0 - eta_tolerance - 1e-12)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub test_indices: Vec<usize>,
    pub failures: usize,
    pub observed_failure: f64,
    pub accept: bool,
}

pub fn test_phase<R: Rng + ?Sized>(
    records: &[RoundRecord],
    kept: &[usize],
    gamma: f64,
    eta_tolerance: f64,
    rng: &mut R,
) -> TestOutcome {
    let test_indices = choose_test_set(kept, gamma, rng);
    let failures = test_indices
        .iter()
        .filter(|&&i| !records[i].matched)
        .count();
    let (observed_failure, accept) = judge(test_indices.len(), failures, eta_tolerance);
    TestOutcome {
        test_indices,
        failures,
        observed_failure,
        accept,
    }
}

/// Kept rounds that were not consumed by testing, in order.
pub fn key_indices(kept: &[usize], test: &[usize]) -> Vec<usize> {
    kept.iter()
        .copied()
        .filter(|i| test.binary_search(i).is_err())
        .collect()
}

/// Alice's key bit from her outcome index in {v₁, v₂, v_a}; v_a gives a coin.
pub fn alice_bit<R: Rng + ?Sized>(outcome: usize, rng: &mut R) -> bool {
    match outcome {
        0 => false,
        1 => true,
        _ => rng.random::<bool>(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawKeys {
    pub alice: Bits,
    pub bob: Bits,
}

/// Bit 0 where v_ℓ = v₁ and 1 where v_ℓ = v₂, in round order.
pub fn extract_raw_key<R: Rng + ?Sized>(
    records: &[RoundRecord],
    indices: &[usize],
    rng: &mut R,
) -> RawKeys {
    let mut alice = Bits::new();
    let mut bob = Bits::new();
    for &i in indices {
        let r = &records[i];
        bob.push(r.input.bob_choice);
        alice.push(alice_bit(r.alice_outcome, rng));
    }
    RawKeys { alice, bob }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RoundInput;
    use crate::linalg::Ray3;
    use crate::rng::{substream, Stream};

    fn record(choice: bool, alice: usize, bob: usize) -> RoundRecord {
        let input = RoundInput::new(Ray3::axis(0), Ray3::axis(1), choice).unwrap();
        RoundRecord::from_outcomes(input, alice, bob)
    }

    #[test]
    fn sift_all_discarded() {
        let rs = vec![record(false, 1, 2), record(true, 0, 1)];
        assert!(sift(&rs).is_empty());
    }

    #[test]
    fn raw_key_worked_example() {
        let zeros = [2, 3, 4, 8];
        let rs: Vec<RoundRecord> = (1..=8)
            .map(|i| {
                let choice = !zeros.contains(&i);
                record(choice, usize::from(choice), 0)
            })
            .collect();
        let kept = sift(&rs);
        assert_eq!(kept.len(), 8);
        let keys = extract_raw_key(&rs, &kept, &mut substream(0, Stream::Alice));
        assert_eq!(keys.bob.to_string(), "10001110");
        assert_eq!(keys.alice, keys.bob);
    }

    #[test]
    fn all_v1_gives_zero_key() {
        let rs: Vec<RoundRecord> = (0..5).map(|_| record(false, 0, 0)).collect();
        let keys = extract_raw_key(&rs, &sift(&rs), &mut substream(0, Stream::Alice));
        assert_eq!(keys.bob, Bits::zeros(5));
    }

    #[test]
    fn test_set_size_and_exclusion() {
        let kept: Vec<usize> = (0..10).map(|i| 3 * i).collect();
        let t = choose_test_set(&kept, 0.25, &mut substream(1, Stream::Alice));
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|i| kept.contains(i)));
        let k = key_indices(&kept, &t);
        assert_eq!(k.len(), 7);
        assert!(k.iter().all(|i| !t.contains(i)));
    }

    #[test]
    fn judging() {
        assert_eq!(judge(10, 0, 0.05), (0.0, true));
        assert_eq!(judge(10, 1, 0.1), (0.1, true));
        assert!(!judge(10, 2, 0.1).1);
        assert_eq!(judge(0, 0, 0.0), (0.0, true));
    }
}
