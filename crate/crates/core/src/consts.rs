//! Numerical tolerances shared by every module.

/// One record of every tolerance the crate uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Norm below which a vector counts as zero.
    pub zero_norm: f64,
    /// Unit-norm check for kets and rays.
    pub unit_norm: f64,
    /// Largest |dot| for two rays to count as orthogonal.
    pub orthogonal: f64,
    /// Threshold for the sign-canonicalising scan of a ray.
    pub sign_scan: f64,
    /// Hermiticity, trace and unitarity checks.
    pub operator: f64,
    /// Smallest admissible eigenvalue of a density operator.
    pub min_eigenvalue: f64,
    /// Joint outcome tables must sum to one within this.
    pub probability_sum: f64,
    /// Spectrum sums and the negative floor of spectrum entries.
    pub spectrum_sum: f64,
    pub spectrum_floor: f64,
    /// Absolute stopping width for bisection root finding.
    pub root_width: f64,
}

pub const TOL: Tolerances = Tolerances {
    zero_norm: 1e-14,
    unit_norm: 1e-12,
    orthogonal: 1e-10,
    sign_scan: 1e-12,
    operator: 1e-12,
    min_eigenvalue: -1e-12,
    probability_sum: 1e-10,
    spectrum_sum: 1e-12,
    spectrum_floor: -1e-14,
    root_width: 1e-6,
};
