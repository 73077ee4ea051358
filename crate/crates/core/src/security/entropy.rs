use crate::consts::TOL;
use crate::error::{Error, Result};

/// x·log₃x with 0·log 0 = 0.
pub fn xlog3x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log(3.0)
    }
}

/// Eigenvalues λ₀..λ₈ of a Bell-diagonal two-qutrit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum9 {
    lambda: [f64; 9],
}

impl Spectrum9 {
    pub fn new(lambda: [f64; 9]) -> Result<Self> {
        if let Some((i, l)) = lambda
            .iter()
            .enumerate()
            .find(|(_, l)| !l.is_finite() || **l < TOL.spectrum_floor)
        {
            return Err(Error::InvalidSpectrum(format!("λ{i} = {l}")));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > TOL.spectrum_sum {
            return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {sum}")));
        }
        Ok(Spectrum9 { lambda })
    }

    pub fn pure() -> Self {
        let mut lambda = [0.0; 9];
        lambda[0] = 1.0;
        Spectrum9 { lambda }
    }

    pub fn uniform() -> Self {
        Spectrum9 {
            lambda: [1.0 / 9.0; 9],
        }
    }

    pub fn lambda(&self) -> &[f64; 9] {
        &self.lambda
    }

    pub fn groups(&self) -> GroupSums {
        let mut s = [0.0; 3];
        let mut q = [0.0; 3];
        for g in 0..3 {
            for l in &self.lambda[3 * g..3 * g + 3] {
                s[g] += l;
                q[g] += l * l;
            }
        }
        GroupSums { s, q }
    }

    /// Σλᵢ², the trace of the displayed σ̃_XY.
    pub fn purity(&self) -> f64 {
        self.lambda.iter().map(|l| l * l).sum()
    }
}

/// Per-group sums S_g = Σλ and Q_g = Σλ² over λ₃g..λ₃g₊₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSums {
    pub s: [f64; 3],
    pub q: [f64; 3],
}

/// Conditional-entropy ingredients, in trits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub h_xe: f64,
    pub h_e: f64,
    pub h_xy: f64,
    pub h_y: f64,
    pub rate_lb: f64,
    /// Trace of σ̃_XY (Σλ²); 1 only for a pure spectrum.
    pub trace_xy: f64,
}

impl EntropyReport {
    /// H(X|E) − H(X|Y) assembled from the four entropies.
    pub fn entropy_difference(&self) -> f64 {
        (self.h_xe - self.h_e) - (self.h_xy - self.h_y)
    }
}

pub fn entropies(spec: &Spectrum9) -> EntropyReport {
    let g = spec.groups();
    let sum_s: f64 = g.s.iter().map(|&x| xlog3x(x)).sum();
    let sum_q: f64 = g.q.iter().map(|&x| xlog3x(x)).sum();
    let sum_l: f64 = spec.lambda.iter().map(|&x| xlog3x(x)).sum();
    let purity = spec.purity();
    EntropyReport {
        h_xe: 1.0 - sum_s,
        h_e: -sum_l,
        h_xy: purity - sum_q,
        h_y: 1.0,
        rate_lb: rate_lower_bound(spec),
        trace_xy: purity,
    }
}

/// 1 + Σλ log₃λ − ΣS_g log₃S_g + ΣQ_g log₃Q_g.
pub fn rate_lower_bound(spec: &Spectrum9) -> f64 {
    let g = spec.groups();
    1.0 + spec.lambda.iter().map(|&x| xlog3x(x)).sum::<f64>()
        - g.s.iter().map(|&x| xlog3x(x)).sum::<f64>()
        + g.q.iter().map(|&x| xlog3x(x)).sum::<f64>()
}

/// diag(1 − rη, rη/8, …, rη/8).
pub fn spectrum_from_noise(eta: f64, r: f64) -> Result<Spectrum9> {
    let x = r * eta;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::range("r*eta", x, "[0, 1]"));
    }
    let mut lambda = [x / 8.0; 9];
    lambda[0] = 1.0 - x;
    Spectrum9::new(lambda)
}

/// 2 + Σ_g (log₃Q_g − 1)·Q_g.
pub fn mutual_information(spec: &Spectrum9) -> f64 {
    2.0 + spec.groups().q.iter().map(|&q| xlog3x(q) - q).sum::<f64>()
}

/// The closed form for the diag(1 − rη, rη/8, …) family.
///
/// Negative r is accepted (rη ≤ 1 is the only constraint) so the dashed
/// curves of the r < 0 family can be evaluated.
pub fn mutual_information_printed(eta: f64, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::range("eta", eta, "[0, 1]"));
    }
    if r * eta > 1.0 || !r.is_finite() {
        return Err(Error::range("r*eta", r * eta, "(-inf, 1]"));
    }
    let a = r * r * eta * eta;
    let b = (r * eta - 1.0).powi(2);
    let log3 = |x: f64| x.log(3.0);
    let t1 = if a > 0.0 {
        3.0 * a * log3(a / 64.0)
    } else {
        0.0
    };
    let t2 = 8.0 * (a + 8.0 * b) * log3(a / 24.0 + b / 3.0);
    let c = a + 32.0 * b;
    let t3 = if c > 0.0 {
        c * log3(a / 96.0 + b / 3.0)
    } else {
        0.0
    };
    Ok((t1 - t2 + t3) / 32.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pure_spectrum() {
        let r = entropies(&Spectrum9::pure());
        assert_eq!((r.h_xe, r.h_e, r.h_xy, r.h_y), (1.0, 0.0, 1.0, 1.0));
        assert_eq!(rate_lower_bound(&Spectrum9::pure()), 1.0);
        assert_eq!(mutual_information(&Spectrum9::pure()), 1.0);
    }

    #[test]
    fn uniform_spectrum() {
        let r = entropies(&Spectrum9::uniform());
        assert!(close(r.h_xe, 2.0, 1e-12));
        assert!(close(r.h_e, 2.0, 1e-12));
        assert!(close(r.h_xy, 1.0 / 9.0 + 1.0 / 3.0, 1e-12));
        assert_eq!(r.h_y, 1.0);
        // 1 + (-2) - (-1) + 3 * (1/27) log3(1/27)
        assert!(close(r.rate_lb, 1.0 - 2.0 + 1.0 - 1.0 / 3.0, 1e-12));
        assert!(close(r.trace_xy, 1.0 / 9.0, 1e-15));
        assert!(close(
            mutual_information(&Spectrum9::uniform()),
            14.0 / 9.0,
            1e-12
        ));
    }

    #[test]
    fn invalid_spectra() {
        assert!(Spectrum9::new([0.2; 9]).is_err());
        let mut l = [0.0; 9];
        l[0] = 1.1;
        l[1] = -0.1;
        assert!(matches!(Spectrum9::new(l), Err(Error::InvalidSpectrum(_))));
        let mut l = [0.0; 9];
        l[0] = f64::NAN;
        assert!(Spectrum9::new(l).is_err());
    }

    #[test]
    fn group_sums() {
        let l = [0.1, 0.2, 0.0, 0.3, 0.0, 0.0, 0.1, 0.1, 0.2];
        let g = Spectrum9::new(l).unwrap().groups();
        assert!(
            close(g.s[0], 0.3, 1e-15) && close(g.s[1], 0.3, 1e-15) && close(g.s[2], 0.4, 1e-15)
        );
        assert!(
            close(g.q[0], 0.05, 1e-15) && close(g.q[1], 0.09, 1e-15) && close(g.q[2], 0.06, 1e-15)
        );
    }

    #[test]
    fn noise_family() {
        assert_eq!(spectrum_from_noise(0.0, 1.5).unwrap(), Spectrum9::pure());
        let s = spectrum_from_noise(0.2, 1.5).unwrap();
        assert!(close(s.lambda()[0], 0.7, 1e-15));
        assert!(s.lambda()[1..].iter().all(|&l| close(l, 0.0375, 1e-15)));
        let s = spectrum_from_noise(2.0 / 3.0, 1.5).unwrap();
        assert!(close(s.lambda()[0], 0.0, 1e-15));
        assert!(s.lambda()[1..].iter().all(|&l| close(l, 0.125, 1e-15)));
        assert!(spectrum_from_noise(0.1, -1.0).is_err());
        assert!(spectrum_from_noise(0.7, 1.5).is_err());
        for r in [0.5, 1.0, 1.5] {
            assert_eq!(rate_lower_bound(&spectrum_from_noise(0.0, r).unwrap()), 1.0);
        }
    }

    #[test]
    fn printed_mutual_information() {
        for r in [-2.0, -1.0, 0.5, 1.5] {
            assert!(close(
                mutual_information_printed(0.0, r).unwrap(),
                1.0,
                1e-15
            ));
        }
        let at = |e| mutual_information_printed(e, 1.5).unwrap();
        assert!(at(0.1) > at(0.2) && at(0.2) > at(0.3));
        assert!(mutual_information_printed(0.5, 3.0).is_err());
        assert!(mutual_information_printed(1.5, 0.5).is_err());
        assert!(mutual_information_printed(1.0 / 1.5, 1.5)
            .unwrap()
            .is_finite());
    }
}
