//! Line-oriented wire format: `TYPE|round|key=value,...`.
//!
//! `round` is `-` for messages not tied to a round. Floats use 17
//! significant digits, so every message round-trips bit-exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Ray3;

use super::bits::Bits;

/// Alice's decision after the test phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    TestFailed,
    EmptyKey,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::TestFailed => "test_failed",
            Verdict::EmptyKey => "empty_key",
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accept" => Ok(Verdict::Accept),
            "test_failed" => Ok(Verdict::TestFailed),
            "empty_key" => Ok(Verdict::EmptyKey),
            other => Err(Error::Wire(format!("unknown verdict `{other}`"))),
        }
    }
}

/// One step of the parity-bisection exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Bob asks for the parity of `start..start + len`.
    Request { start: usize, len: usize },
    /// Alice discloses it.
    Reply {
        start: usize,
        len: usize,
        parity: bool,
    },
    /// Bob has finished every block.
    Complete,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    Vectors {
        round: u64,
        v1: Ray3,
        v2: Ray3,
    },
    Announce {
        round: u64,
        bit: bool,
    },
    TestSet {
        rounds: Vec<u64>,
    },
    /// Bob's choice bits (1 = v₂) for the test rounds, in TEST_SET order.
    TestReveal {
        choices: Bits,
    },
    Verdict {
        tested: u64,
        failures: u64,
        observed_failure: f64,
        verdict: Verdict,
    },
    Parity(Parity),
    PaSeed {
        check_seed: Bits,
        tag: u64,
        output_length: usize,
        pa_seed: Bits,
    },
    Done {
        ok: bool,
    },
}

impl WireMessage {
    pub fn type_name(&self) -> &'static str {
        match self {
            WireMessage::Vectors { .. } => "VECTORS",
            WireMessage::Announce { .. } => "ANNOUNCE",
            WireMessage::TestSet { .. } => "TEST_SET",
            WireMessage::TestReveal { .. } => "TEST_REVEAL",
            WireMessage::Verdict { .. } => "VERDICT",
            WireMessage::Parity(_) => "PARITY",
            WireMessage::PaSeed { .. } => "PA_SEED",
            WireMessage::Done { .. } => "DONE",
        }
    }

    pub fn round(&self) -> Option<u64> {
        match self {
            WireMessage::Vectors { round, .. } | WireMessage::Announce { round, .. } => {
                Some(*round)
            }
            _ => None,
        }
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let bit = |b: bool| if b { "1" } else { "0" }.to_string();
        match self {
            WireMessage::Vectors { v1, v2, .. } => vec![("v1", fmt_ray(v1)), ("v2", fmt_ray(v2))],
            WireMessage::Announce { bit: b, .. } => vec![("bit", bit(*b))],
            WireMessage::TestSet { rounds } => {
                vec![(
                    "rounds",
                    rounds
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(";"),
                )]
            }
            WireMessage::TestReveal { choices } => vec![("choices", choices.to_string())],
            WireMessage::Verdict {
                tested,
                failures,
                observed_failure,
                verdict,
            } => vec![
                ("tested", tested.to_string()),
                ("failures", failures.to_string()),
                ("observed_failure", format!("{observed_failure:.16e}")),
                ("verdict", verdict.as_str().to_string()),
            ],
            WireMessage::Parity(Parity::Request { start, len }) => {
                vec![
                    ("op", "req".into()),
                    ("start", start.to_string()),
                    ("len", len.to_string()),
                ]
            }
            WireMessage::Parity(Parity::Reply { start, len, parity }) => vec![
                ("op", "rep".into()),
                ("start", start.to_string()),
                ("len", len.to_string()),
                ("parity", bit(*parity)),
            ],
            WireMessage::Parity(Parity::Complete) => vec![("op", "end".into())],
            WireMessage::PaSeed {
                check_seed,
                tag,
                output_length,
                pa_seed,
            } => vec![
                ("check_len", check_seed.len().to_string()),
                ("check", check_seed.to_hex()),
                ("tag", format!("{tag:016x}")),
                ("out_len", output_length.to_string()),
                ("seed_len", pa_seed.len().to_string()),
                ("seed", pa_seed.to_hex()),
            ],
            WireMessage::Done { ok } => vec![("ok", bit(*ok))],
        }
    }

    pub fn encode(&self) -> String {
        self.to_string()
    }

    pub fn decode(line: &str) -> Result<Self> {
        line.parse()
    }
}

impl fmt::Display for WireMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|", self.type_name())?;
        match self.round() {
            Some(r) => write!(f, "{r}|")?,
            None => f.write_str("-|")?,
        }
        let body: Vec<String> = self
            .fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        f.write_str(&body.join(","))
    }
}

fn fmt_ray(r: &Ray3) -> String {
    let c = r.components();
    format!("{:.16e};{:.16e};{:.16e}", c[0], c[1], c[2])
}

struct Fields<'a> {
    pairs: Vec<(&'a str, &'a str)>,
    next: usize,
}

impl<'a> Fields<'a> {
    fn parse(body: &'a str) -> Result<Self> {
        let pairs = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|kv| {
                    kv.split_once('=')
                        .ok_or_else(|| Error::Wire(format!("field without `=`: `{kv}`")))
                })
                .collect::<Result<_>>()?
        };
        Ok(Fields { pairs, next: 0 })
    }

    /// The next field, which must be called `key`.
    fn take(&mut self, key: &str) -> Result<&'a str> {
        match self.pairs.get(self.next) {
            Some(&(k, v)) if k == key => {
                self.next += 1;
                Ok(v)
            }
            Some(&(k, _)) => Err(Error::Wire(format!("expected field `{key}`, found `{k}`"))),
            None => Err(Error::Wire(format!("missing field `{key}`"))),
        }
    }

    fn num<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.take(key)?;
        v.parse()
            .map_err(|_| Error::Wire(format!("bad value `{v}` for `{key}`")))
    }

    fn bit(&mut self, key: &str) -> Result<bool> {
        match self.take(key)? {
            "0" => Ok(false),
            "1" => Ok(true),
            v => Err(Error::Wire(format!("bad bit `{v}` for `{key}`"))),
        }
    }

    fn ray(&mut self, key: &str) -> Result<Ray3> {
        let v = self.take(key)?;
        let parts: Vec<f64> = v
            .split(';')
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::Wire(format!("bad component `{x}`")))
            })
            .collect::<Result<_>>()?;
        let c: [f64; 3] = parts
            .try_into()
            .map_err(|_| Error::Wire(format!("ray `{v}` needs three components")))?;
        Ray3::from_unit(c).map_err(|e| Error::Wire(e.to_string()))
    }

    fn finish(self) -> Result<()> {
        match self.pairs.get(self.next) {
            None => Ok(()),
            Some(&(k, _)) => Err(Error::Wire(format!("unexpected field `{k}`"))),
        }
    }
}

impl FromStr for WireMessage {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.splitn(3, '|');
        let (ty, round, body) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(r), Some(b)) => (t, r, b),
            _ => return Err(Error::Wire(format!("malformed record `{line}`"))),
        };
        let round: Option<u64> = match round {
            "-" => None,
            r => Some(
                r.parse()
                    .map_err(|_| Error::Wire(format!("bad round `{r}`")))?,
            ),
        };
        let need_round = || round.ok_or_else(|| Error::Wire(format!("{ty} needs a round")));
        let mut f = Fields::parse(body)?;
        let msg = match ty {
            "VECTORS" => WireMessage::Vectors {
                round: need_round()?,
                v1: f.ray("v1")?,
                v2: f.ray("v2")?,
            },
            "ANNOUNCE" => WireMessage::Announce {
                round: need_round()?,
                bit: f.bit("bit")?,
            },
            "TEST_SET" => {
                let v = f.take("rounds")?;
                let rounds = if v.is_empty() {
                    Vec::new()
                } else {
                    v.split(';')
                        .map(|x| {
                            x.parse()
                                .map_err(|_| Error::Wire(format!("bad round `{x}`")))
                        })
                        .collect::<Result<_>>()?
                };
                WireMessage::TestSet { rounds }
            }
            "TEST_REVEAL" => WireMessage::TestReveal {
                choices: f.take("choices")?.parse()?,
            },
            "VERDICT" => WireMessage::Verdict {
                tested: f.num("tested")?,
                failures: f.num("failures")?,
                observed_failure: f.num("observed_failure")?,
                verdict: f.take("verdict")?.parse()?,
            },
            "PARITY" => WireMessage::Parity(match f.take("op")? {
                "req" => Parity::Request {
                    start: f.num("start")?,
                    len: f.num("len")?,
                },
                "rep" => Parity::Reply {
                    start: f.num("start")?,
                    len: f.num("len")?,
                    parity: f.bit("parity")?,
                },
                "end" => Parity::Complete,
                op => return Err(Error::Wire(format!("unknown parity op `{op}`"))),
            }),
            "PA_SEED" => {
                let check_len = f.num("check_len")?;
                let check_seed = Bits::from_hex(f.take("check")?, check_len)?;
                let tag_hex = f.take("tag")?;
                let tag = u64::from_str_radix(tag_hex, 16)
                    .map_err(|_| Error::Wire(format!("bad tag `{tag_hex}`")))?;
                let output_length = f.num("out_len")?;
                let seed_len = f.num("seed_len")?;
                let pa_seed = Bits::from_hex(f.take("seed")?, seed_len)?;
                WireMessage::PaSeed {
                    check_seed,
                    tag,
                    output_length,
                    pa_seed,
                }
            }
            "DONE" => WireMessage::Done { ok: f.bit("ok")? },
            other => return Err(Error::Wire(format!("unknown message type `{other}`"))),
        };
        f.finish()?;
        if msg.round().is_none() && round.is_some() {
            return Err(Error::Wire(format!("{ty} takes no round")));
        }
        Ok(msg)
    }
}
