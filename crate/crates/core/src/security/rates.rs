use crate::consts::TOL;
use crate::error::{Error, Result};

/// Base of the logarithm in the closed-form key-rate expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Three,
    Two,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Three => x.log(3.0),
            LogBase::Two => x.log2(),
        }
    }

    /// c·log(x) with 0·log 0 = 0.
    fn clog(self, c: f64, x: f64) -> f64 {
        if c == 0.0 || x <= 0.0 {
            0.0
        } else {
            c * self.log(x)
        }
    }
}

/// Asymptotic key rate of the r = 1.5 noise family.
pub fn key_rate(eta: f64) -> Result<f64> {
    key_rate_in(eta, LogBase::Natural)
}

/// [`key_rate`] with the logarithms read in `base`.
pub fn key_rate_in(eta: f64, base: LogBase) -> Result<f64> {
    if !(0.0..=2.0 / 3.0).contains(&eta) {
        return Err(Error::range("eta", eta, "[0, 2/3]"));
    }
    let t1 = base.clog(3.0 * eta / 2.0, 3.0 * eta / 16.0);
    let t2 = base.clog(9.0 * eta / 8.0, 9.0 * eta / 16.0);
    let t3 = base.clog((3.0 * eta - 2.0) / 2.0, 1.0 - 1.5 * eta);
    let t4 = base.clog((9.0 * eta - 8.0) / 8.0, 1.0 - 9.0 * eta / 8.0);
    let c5 = (9.0 * eta * eta + 32.0 * (3.0 * eta - 2.0).powi(2)) / 128.0;
    let t5 = base.clog(c5, 297.0 * eta * eta / 128.0 - 3.0 * eta + 1.0);
    Ok(t1 - t2 - t3 + t4 + t5 + 1.0)
}

/// Binary Shannon entropy in bits.
pub fn h2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::range("x", x, "[0, 1]"));
    }
    let t = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    Ok(t(x) + t(1.0 - x))
}

/// 1 − 2·h₂(η).
pub fn bb84_rate(eta: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eta) {
        return Err(Error::range("eta", eta, "[0, 1/2]"));
    }
    Ok(1.0 - 2.0 * h2(eta)?)
}

/// n·(1 − h₂(η)) − c·√n.
pub fn minentropy_bound(n: u64, eta: f64, c: f64) -> Result<f64> {
    if c < 0.0 {
        return Err(Error::range("c", c, "c >= 0"));
    }
    let n = n as f64;
    Ok(n * (1.0 - h2(eta)?) - c * n.sqrt())
}

/// Bisection on `[lo, hi]` to an absolute width of 1e-6.
pub fn bisect<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::range(
            "bracket",
            lo,
            "an interval with a sign change",
        ));
    }
    while hi - lo > TOL.root_width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn key_rate_root() -> Result<f64> {
    bisect(key_rate, 1e-9, 0.3)
}

pub fn bb84_root() -> Result<f64> {
    bisect(bb84_rate, 1e-9, 0.2)
}
