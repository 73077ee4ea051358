//! Toeplitz hashing over GF(2).

use rand::Rng;

use crate::error::{Error, Result};

use super::bits::Bits;

/// Tag width of the post-reconciliation key comparison.
pub const CHECK_BITS: usize = 64;

/// Seed length for an `m × n` Toeplitz matrix.
pub fn seed_len(m: usize, n: usize) -> usize {
    if m == 0 || n == 0 {
        0
    } else {
        m + n - 1
    }
}

pub fn random_seed<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Bits {
    Bits((0..len).map(|_| rng.random::<bool>()).collect())
}

/// T·key with T[i][j] = seed[i − j + n − 1].
pub fn toeplitz(key: &Bits, m: usize, seed: &Bits) -> Result<Bits> {
    let n = key.len();
    if seed.len() != seed_len(m, n) {
        return Err(Error::range("seed length", seed.len() as f64, "m + n - 1"));
    }
    let s = seed.as_slice();
    let k = key.as_slice();
    Ok(Bits(
        (0..m)
            .map(|i| (0..n).fold(false, |acc, j| acc ^ (s[i + n - 1 - j] & k[j])))
            .collect(),
    ))
}

/// Compress `key` to `output_length` bits with the Toeplitz matrix of `seed`.
pub fn privacy_amplify(key: &Bits, output_length: usize, seed: &Bits) -> Result<Bits> {
    if output_length > key.len() {
        return Err(Error::range(
            "output_length",
            output_length as f64,
            "[0, key length]",
        ));
    }
    toeplitz(key, output_length, seed)
}

/// 64-bit Toeplitz tag of a key, used to compare keys after reconciliation.
pub fn check_tag(key: &Bits, seed: &Bits) -> Result<u64> {
    let t = toeplitz(key, CHECK_BITS, seed)?;
    Ok(t.as_slice()
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
}

/// Whether two keys hash to the same tag under `seed`.
pub fn keys_agree(a: &Bits, b: &Bits, seed: &Bits) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(check_tag(a, seed)? == check_tag(b, seed)?)
}
