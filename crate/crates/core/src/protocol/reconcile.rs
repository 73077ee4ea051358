//! Single-pass parity bisection, driven from Bob's side.

use crate::error::{Error, Result};

use super::bits::Bits;

/// Bob's half of the parity exchange.
///
/// Bob walks the top-level blocks in order, asking for each parity. On a
/// mismatch he asks for the parity of the first half, `floor(len/2)` bits,
/// and descends into whichever half disagrees until one bit remains, which
/// he flips.
#[derive(Debug, Clone)]
pub struct BobReconciler {
    key: Bits,
    block: usize,
    next_block: usize,
    /// A range whose parity is known to disagree, under bisection.
    hunting: Option<(usize, usize)>,
    pending: Option<(usize, usize)>,
    corrections: Vec<usize>,
    mismatched_blocks: Vec<usize>,
    disclosed: usize,
}

impl BobReconciler {
    pub fn new(key: Bits, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::range("block_size", 0.0, ">= 1"));
        }
        Ok(BobReconciler {
            key,
            block: block_size,
            next_block: 0,
            hunting: None,
            pending: None,
            corrections: Vec::new(),
            mismatched_blocks: Vec::new(),
            disclosed: 0,
        })
    }

    /// The next range whose parity Bob needs, or `None` when finished.
    pub fn next_request(&mut self) -> Option<(usize, usize)> {
        let req = match self.hunting {
            Some((s, l)) => (s, l / 2),
            None => {
                let start = self.next_block * self.block;
                if start >= self.key.len() {
                    return None;
                }
                (start, self.block.min(self.key.len() - start))
            }
        };
        self.pending = Some(req);
        Some(req)
    }

    /// Feed Alice's parity for the last requested range.
    pub fn on_parity(&mut self, start: usize, len: usize, parity: bool) -> Result<()> {
        if self.pending.take() != Some((start, len)) {
            return Err(Error::Protocol(format!(
                "unrequested parity for {start}+{len}"
            )));
        }
        self.disclosed += 1;
        let differs = parity != self.key.parity(start, len);
        let next = match self.hunting {
            None => {
                if differs {
                    self.mismatched_blocks.push(self.next_block);
                }
                self.next_block += 1;
                differs.then_some((start, len))
            }
            Some((s, l)) => {
                if differs {
                    Some((s, l / 2))
                } else {
                    Some((s + l / 2, l - l / 2))
                }
            }
        };
        self.hunting = match next {
            Some((s, 1)) => {
                self.key.flip(s);
                self.corrections.push(s);
                None
            }
            other => other,
        };
        Ok(())
    }

    pub fn key(&self) -> &Bits {
        &self.key
    }

    pub fn into_result(self) -> Reconciliation {
        Reconciliation {
            corrected: self.key,
            corrections: self.corrections,
            mismatched_blocks: self.mismatched_blocks,
            leakage_bits: self.disclosed,
        }
    }
}

/// Result of one reconciliation pass on Bob's key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconciliation {
    pub corrected: Bits,
    /// Key positions Bob flipped.
    pub corrections: Vec<usize>,
    /// Zero-based indices of top-level blocks whose parities disagreed.
    pub mismatched_blocks: Vec<usize>,
    /// Parity bits Alice disclosed.
    pub leakage_bits: usize,
}

/// Run the exchange with both keys in hand.
pub fn reconcile(alice: &Bits, bob: &Bits, block_size: usize) -> Result<Reconciliation> {
    if alice.len() != bob.len() {
        return Err(Error::LengthMismatch(alice.len(), bob.len()));
    }
    let mut r = BobReconciler::new(bob.clone(), block_size)?;
    while let Some((s, l)) = r.next_request() {
        r.on_parity(s, l, alice.parity(s, l))?;
    }
    Ok(r.into_result())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example() {
        let r = reconcile(&bits("10001110"), &bits("10000110"), 4).unwrap();
        assert_eq!(r.mismatched_blocks, vec![1]);
        assert_eq!(r.corrections, vec![4]);
        assert_eq!(r.corrected, bits("10001110"));
        assert_eq!(r.leakage_bits, 4);
    }

    #[test]
    fn identical_keys_leak_one_bit_per_block() {
        let k = bits("1011001110");
        let r = reconcile(&k, &k, 4).unwrap();
        assert!(r.corrections.is_empty());
        assert_eq!(r.leakage_bits, 3);
    }

    #[test]
    fn even_errors_are_invisible() {
        let r = reconcile(&bits("1111"), &bits("0011"), 4).unwrap();
        assert!(r.mismatched_blocks.is_empty());
        assert_ne!(r.corrected, bits("1111"));
    }

    #[test]
    fn length_and_block_checks() {
        assert!(matches!(
            reconcile(&bits("10"), &bits("1"), 4),
            Err(Error::LengthMismatch(2, 1))
        ));
        assert!(reconcile(&bits("10"), &bits("10"), 0).is_err());
        let r = reconcile(&Bits::new(), &Bits::new(), 4).unwrap();
        assert_eq!(r.leakage_bits, 0);
    }

    #[test]
    fn out_of_order_reply_is_rejected() {
        let mut r = BobReconciler::new(bits("1010"), 2).unwrap();
        r.next_request();
        assert!(r.on_parity(2, 2, true).is_err());
    }

    #[test]
    fn single_errors_always_fixed() {
        for n in 1..=12usize {
            for e in 0..n {
                let a = Bits((0..n).map(|i| i % 3 == 0).collect());
                let mut b = a.clone();
                b.flip(e);
                for block in 1..=5 {
                    assert_eq!(reconcile(&a, &b, block).unwrap().corrected, a);
                }
            }
        }
    }
}
