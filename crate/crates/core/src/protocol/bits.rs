use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bitstring, displayed as `0`/`1` characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// XOR of the bits in `start..start + len`.
    pub fn parity(&self, start: usize, len: usize) -> bool {
        self.0[start..start + len].iter().fold(false, |p, &b| p ^ b)
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(Bits(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Number of positions where the strings differ.
    pub fn distance(&self, other: &Bits) -> Result<usize> {
        Ok(self.xor(other)?.0.iter().filter(|&&b| b).count())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Pack into lowercase hex, most significant bit first, zero-padded to
    /// a whole nibble.
    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|c| {
                let v = c
                    .iter()
                    .enumerate()
                    .fold(0u32, |v, (i, &b)| v | (u32::from(b) << (3 - i)));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Bits> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Wire(format!(
                "hex of {} digits cannot hold {len} bits",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Wire(format!("bad hex digit `{ch}`")))?;
            bits.extend((0..4).map(|i| v & (1 << (3 - i)) != 0));
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::Wire("nonzero padding bits".into()));
        }
        bits.truncate(len);
        Ok(Bits(bits))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Wire(format!("bad bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}
