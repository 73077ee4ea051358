//! Complex linear algebra over C³ and C⁹ = C³ ⊗ C³.
//!
//! Everything here is fixed-size and allocation-free. Two-qutrit indices are
//! flattened as `3 * a + b` where `a` is Alice's (first) qutrit.

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;

use crate::consts::TOL;
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Vectors that can be rescaled to unit Euclidean norm.
pub trait Normalize: Sized {
    fn norm(&self) -> f64;
    fn scaled(&self, factor: f64) -> Self;
}

impl Normalize for [f64; 3] {
    fn norm(&self) -> f64 {
        self.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
    fn scaled(&self, factor: f64) -> Self {
        self.map(|x| x * factor)
    }
}

impl<const N: usize> Normalize for [C64; N] {
    fn norm(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
    fn scaled(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }
}

/// Rescale `v` to unit norm. Fails with [`Error::ZeroVector`] below 1e-14.
pub fn normalize<V: Normalize>(v: &V) -> Result<V> {
    let n = v.norm();
    if n < TOL.zero_norm {
        return Err(Error::ZeroVector(n));
    }
    Ok(v.scaled(1.0 / n))
}

/// A normalised single-qutrit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket3([C64; 3]);

impl Ket3 {
    pub fn new(amplitudes: [C64; 3]) -> Result<Self> {
        normalize(&amplitudes).map(Ket3)
    }

    /// The computational state |i⟩.
    pub fn basis(i: usize) -> Self {
        let mut a = [ZERO; 3];
        a[i] = ONE;
        Ket3(a)
    }

    pub fn amplitudes(&self) -> &[C64; 3] {
        &self.0
    }
}

impl From<Ray3> for Ket3 {
    fn from(r: Ray3) -> Self {
        Ket3(r.0.map(|x| C64::new(x, 0.0)))
    }
}

/// A normalised two-qutrit state; amplitude `(a, b)` lives at `3a + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket9([C64; 9]);

impl Ket9 {
    pub fn new(amplitudes: [C64; 9]) -> Result<Self> {
        normalize(&amplitudes).map(Ket9)
    }

    /// Wrap amplitudes that are already normalised (checked in debug builds).
    pub(crate) fn from_normalized(amplitudes: [C64; 9]) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-9);
        Ket9(amplitudes)
    }

    /// The product state |a⟩|b⟩.
    pub fn basis(a: usize, b: usize) -> Self {
        let mut v = [ZERO; 9];
        v[3 * a + b] = ONE;
        Ket9(v)
    }

    pub fn amplitudes(&self) -> &[C64; 9] {
        &self.0
    }

    pub fn amplitude(&self, a: usize, b: usize) -> C64 {
        self.0[3 * a + b]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket9) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// |⟨self|other⟩|², insensitive to global phase.
    pub fn fidelity(&self, other: &Ket9) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> Density9 {
        let mut m = [[ZERO; 9]; 9];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.0[i] * self.0[j].conj();
            }
        }
        Density9(m)
    }
}

impl Index<usize> for Ket9 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

/// |a⟩ ⊗ |b⟩.
pub fn tensor(a: &Ket3, b: &Ket3) -> Ket9 {
    let mut v = [ZERO; 9];
    for x in 0..3 {
        for y in 0..3 {
            v[3 * x + y] = a.0[x] * b.0[y];
        }
    }
    Ket9(v)
}

/// A two-qutrit density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density9([[C64; 9]; 9]);

impl Density9 {
    /// Validate and wrap a 9×9 matrix.
    pub fn new(matrix: [[C64; 9]; 9]) -> Result<Self> {
        for i in 0..9 {
            for j in 0..9 {
                let d = (matrix[i][j] - matrix[j][i].conj()).norm();
                if d > TOL.operator {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({i},{j}), deviation {d:.3e}"
                    )));
                }
            }
        }
        let trace: C64 = (0..9).map(|i| matrix[i][i]).sum();
        if (trace - ONE).norm() > TOL.operator {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < TOL.min_eigenvalue {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Density9(matrix))
    }

    /// Wrap a matrix known to be a valid state by construction.
    pub(crate) fn from_raw(matrix: [[C64; 9]; 9]) -> Self {
        Density9(matrix)
    }

    pub fn maximally_mixed() -> Self {
        let mut m = [[ZERO; 9]; 9];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C64::new(1.0 / 9.0, 0.0);
        }
        Density9(m)
    }

    pub fn matrix(&self) -> &[[C64; 9]; 9] {
        &self.0
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> C64 {
        (0..9).map(|i| self.0[i][i]).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 9] {
        hermitian_eigenvalues(&self.0)
    }

    /// ⟨v|ρ|v⟩ for an arbitrary (not necessarily normalised) vector.
    pub fn expectation(&self, v: &[C64; 9]) -> f64 {
        let mut acc = ZERO;
        for i in 0..9 {
            if v[i] == ZERO {
                continue;
            }
            let row: C64 = (0..9).map(|j| self.0[i][j] * v[j]).sum();
            acc += v[i].conj() * row;
        }
        acc.re
    }

    /// ⟨φ|ρ|ψ⟩.
    pub fn sandwich(&self, phi: &Ket9, psi: &Ket9) -> C64 {
        let mut acc = ZERO;
        for i in 0..9 {
            let row: C64 = (0..9).map(|j| self.0[i][j] * psi.0[j]).sum();
            acc += phi.0[i].conj() * row;
        }
        acc
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Density9) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..9 {
            for j in 0..9 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }
}

impl From<&Ket9> for Density9 {
    fn from(k: &Ket9) -> Self {
        k.projector()
    }
}

/// (1 − p)·ρ + p·I/9.
pub fn depolarize(state: &Density9, p: f64) -> Result<Density9> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::range("p", p, "[0, 1]"));
    }
    let mut m = state.0;
    for (i, row) in m.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e *= 1.0 - p;
            if i == j {
                *e += p / 9.0;
            }
        }
    }
    Ok(Density9(m))
}

/// A real unit ray in R³, stored with its first nonzero component positive.
///
/// Equality is projective: `v == -v`.
#[derive(Clone, Copy)]
pub struct Ray3([f64; 3]);

impl Ray3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_components([x, y, z])
    }

    pub fn from_components(c: [f64; 3]) -> Result<Self> {
        let mut u = normalize(&c)?;
        if let Some(&lead) = u.iter().find(|x| x.abs() > TOL.sign_scan) {
            if lead < 0.0 {
                u = u.map(|x| -x);
            }
        }
        Ok(Ray3(u.map(|x| if x == 0.0 { 0.0 } else { x })))
    }

    /// Wrap components that are already unit-norm and sign-canonical,
    /// keeping their bits unchanged.
    pub fn from_unit(c: [f64; 3]) -> Result<Self> {
        let n = c.norm();
        if (n - 1.0).abs() > TOL.unit_norm {
            return Err(Error::range("ray norm", n, "1 +- 1e-12"));
        }
        let r = Self::from_components(c)?;
        if r.0
            .iter()
            .zip(c.iter())
            .any(|(a, b)| a.signum() != b.signum() && (a.abs() > TOL.sign_scan))
        {
            return Err(Error::range("leading ray component", c[0], "positive"));
        }
        Ok(Ray3(c))
    }

    /// The standard axis e_i.
    pub fn axis(i: usize) -> Self {
        let mut c = [0.0; 3];
        c[i] = 1.0;
        Ray3(c)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Ray3) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn cross(&self, other: &Ray3) -> [f64; 3] {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = other.0;
        [a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0]
    }

    pub fn is_orthogonal(&self, other: &Ray3) -> bool {
        self.dot(other).abs() < TOL.orthogonal
    }
}

impl PartialEq for Ray3 {
    fn eq(&self, other: &Self) -> bool {
        (1.0 - self.dot(other).abs()).abs() < TOL.orthogonal
    }
}

impl fmt::Debug for Ray3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ray3({:.6}, {:.6}, {:.6})",
            self.0[0], self.0[1], self.0[2]
        )
    }
}

impl Index<usize> for Ray3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// An ordered orthonormal triple of rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis3([Ray3; 3]);

impl Basis3 {
    pub fn new(rays: [Ray3; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = rays[i].dot(&rays[j]).abs();
                if d >= TOL.orthogonal {
                    return Err(Error::NotOrthogonal(d));
                }
            }
        }
        Ok(Basis3(rays))
    }

    pub fn standard() -> Self {
        Basis3([Ray3::axis(0), Ray3::axis(1), Ray3::axis(2)])
    }

    pub fn rays(&self) -> &[Ray3; 3] {
        &self.0
    }

    /// Index of the basis ray equal to `r` (up to sign), if any.
    pub fn position(&self, r: &Ray3) -> Option<usize> {
        self.0.iter().position(|x| x == r)
    }
}

impl Index<usize> for Basis3 {
    type Output = Ray3;
    fn index(&self, i: usize) -> &Ray3 {
        &self.0[i]
    }
}

/// Extend one or two orthogonal rays to an orthonormal basis.
///
/// Two rays are completed by their cross product. One ray is completed by
/// Gram-Schmidt against e₀, e₁, e₂ in order, skipping axes whose residual
/// norm is below 1e-10. Given rays keep their positions at the front.
pub fn complete_basis(partial: &[Ray3]) -> Result<Basis3> {
    match *partial {
        [a, b] => {
            let d = a.dot(&b).abs();
            if d >= TOL.orthogonal {
                return Err(Error::NotOrthogonal(d));
            }
            let c = Ray3::from_components(a.cross(&b))?;
            Basis3::new([a, b, c])
        }
        [a] => {
            let mut found: Vec<Ray3> = vec![a];
            for k in 0..3 {
                if found.len() == 3 {
                    break;
                }
                let mut r = Ray3::axis(k).0;
                for f in &found {
                    let d: f64 = (0..3).map(|i| r[i] * f.0[i]).sum();
                    for (i, x) in r.iter_mut().enumerate() {
                        *x -= d * f.0[i];
                    }
                }
                if r.norm() < TOL.orthogonal {
                    continue;
                }
                found.push(Ray3::from_components(r)?);
            }
            Basis3::new([found[0], found[1], found[2]])
        }
        _ => Err(Error::range(
            "partial basis size",
            partial.len() as f64,
            "{1, 2}",
        )),
    }
}

/// Outcome probabilities `table[a][b]` for Alice measuring in `basis_a` and
/// Bob in `basis_b`.
pub fn joint_distribution(state: &Density9, basis_a: &Basis3, basis_b: &Basis3) -> [[f64; 3]; 3] {
    let mut table = [[0.0; 3]; 3];
    for (a, row) in table.iter_mut().enumerate() {
        for (b, p) in row.iter_mut().enumerate() {
            let w = product_vector(&basis_a[a], &basis_b[b]);
            *p = state.expectation(&w).max(0.0);
        }
    }
    table
}

/// The (real) product vector a ⊗ b as complex amplitudes.
pub fn product_vector(a: &Ray3, b: &Ray3) -> [C64; 9] {
    let mut w = [ZERO; 9];
    for x in 0..3 {
        for y in 0..3 {
            w[3 * x + y] = C64::new(a.0[x] * b.0[y], 0.0);
        }
    }
    w
}

/// Eigenvalues (ascending) of a 9×9 Hermitian matrix.
///
/// Works on the real symmetric embedding [[Re, −Im], [Im, Re]], whose
/// spectrum is that of the input with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &[[C64; 9]; 9]) -> [f64; 9] {
    const N: usize = 18;
    let mut a = [[0.0f64; N]; N];
    for i in 0..9 {
        for j in 0..9 {
            let z = m[i][j];
            a[i][j] = z.re;
            a[i + 9][j + 9] = z.re;
            a[i][j + 9] = -z.im;
            a[i + 9][j] = z.im;
        }
    }
    let mut ev = jacobi_eigenvalues(a);
    ev.sort_by(|x, y| x.total_cmp(y));
    let mut out = [0.0; 9];
    for (k, o) in out.iter_mut().enumerate() {
        *o = 0.5 * (ev[2 * k] + ev[2 * k + 1]);
    }
    out
}

/// Cyclic Jacobi rotations on a real symmetric matrix.
fn jacobi_eigenvalues<const N: usize>(mut a: [[f64; N]; N]) -> [f64; N] {
    for _sweep in 0..100 {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::array::from_fn(|i| a[i][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn phi0() -> Ket9 {
        let s = 1.0 / 3f64.sqrt();
        let mut v = [ZERO; 9];
        for j in 0..3 {
            v[4 * j] = C64::new(s, 0.0);
        }
        Ket9(v)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 0.0, 0.0]).unwrap(), [1.0, 0.0, 0.0]);
        let s = 1.0 / 3f64.sqrt();
        let v = normalize(&[1.0, 1.0, 1.0]).unwrap();
        for x in v {
            assert!((x - s).abs() < 1e-15);
        }
        assert!(matches!(
            normalize(&[0.0, 0.0, 0.0]),
            Err(Error::ZeroVector(_))
        ));
    }

    #[test]
    fn rays_are_sign_canonical() {
        let r = Ray3::new(0.0, -3.0, 4.0).unwrap();
        let c = r.components();
        assert_eq!(c[0].to_bits(), 0f64.to_bits());
        assert!((c[1] - 0.6).abs() < 1e-15 && (c[2] + 0.8).abs() < 1e-15);
        assert_eq!(r, Ray3::new(0.0, 3.0, -4.0).unwrap());
        assert_ne!(r, Ray3::axis(1));
    }

    #[test]
    fn complete_two_axes() {
        let b = complete_basis(&[Ray3::axis(0), Ray3::axis(1)]).unwrap();
        assert_eq!(b[2].components(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn complete_one_axis() {
        let b = complete_basis(&[Ray3::axis(0)]).unwrap();
        assert_eq!(b, Basis3::standard());
        let b = complete_basis(&[Ray3::axis(1)]).unwrap();
        assert_eq!(b.rays(), &[Ray3::axis(1), Ray3::axis(0), Ray3::axis(2)]);
    }

    #[test]
    fn complete_diagonal_pair_uses_sign_rule() {
        let a = Ray3::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0).unwrap();
        let b = Ray3::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0).unwrap();
        let basis = complete_basis(&[a, b]).unwrap();
        let c = basis[2].components();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15 && (c[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complete_rejects_non_orthogonal() {
        let a = Ray3::axis(0);
        let b = Ray3::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            complete_basis(&[a, b]),
            Err(Error::NotOrthogonal(_))
        ));
        assert!(matches!(
            complete_basis(&[a, a]),
            Err(Error::NotOrthogonal(_))
        ));
    }

    #[test]
    fn tensor_examples() {
        let k = tensor(&Ket3::basis(0), &Ket3::basis(0));
        assert_eq!(k, Ket9::basis(0, 0));
        let k = tensor(&Ket3::basis(1), &Ket3::basis(2));
        assert_eq!(k, Ket9::basis(1, 2));
        let plus = Ket3::new([ONE, ONE, ZERO]).unwrap();
        let k = tensor(&plus, &Ket3::basis(0));
        assert!((k.amplitude(0, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((k.amplitude(1, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(k.amplitude(2, 0).norm() < 1e-15);
    }

    #[test]
    fn joint_distribution_bell_standard_axes() {
        let rho = phi0().projector();
        let t = joint_distribution(&rho, &Basis3::standard(), &Basis3::standard());
        for (a, row) in t.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                let want = if a == b { 1.0 / 3.0 } else { 0.0 };
                assert!((p - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_distribution_maximally_mixed_is_uniform() {
        let rho = Density9::maximally_mixed();
        let a = complete_basis(&[Ray3::new(1.0, 2.0, 3.0).unwrap()]).unwrap();
        let t = joint_distribution(&rho, &a, &Basis3::standard());
        for p in t.iter().flatten() {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarize_endpoints_and_range() {
        let rho = phi0().projector();
        assert_eq!(depolarize(&rho, 0.0).unwrap(), rho);
        let mixed = depolarize(&rho, 1.0).unwrap();
        assert!(mixed.max_abs_diff(&Density9::maximally_mixed()) < 1e-15);
        assert!(matches!(depolarize(&rho, 1.5), Err(Error::Range { .. })));
        assert!(matches!(depolarize(&rho, -0.1), Err(Error::Range { .. })));
    }

    #[test]
    fn density_validation() {
        let mut m = *Density9::maximally_mixed().matrix();
        assert!(Density9::new(m).is_ok());
        m[0][1] = C64::new(0.01, 0.0);
        assert!(matches!(Density9::new(m), Err(Error::InvalidState(_))));
        let mut m = *Density9::maximally_mixed().matrix();
        m[0][0] = C64::new(0.5, 0.0);
        assert!(matches!(Density9::new(m), Err(Error::InvalidState(_))));
        // Unit trace, Hermitian, but indefinite.
        let mut m = [[ZERO; 9]; 9];
        m[0][0] = C64::new(1.5, 0.0);
        m[1][1] = C64::new(-0.5, 0.0);
        assert!(matches!(Density9::new(m), Err(Error::InvalidState(_))));
        assert!(Density9::new(*phi0().projector().matrix()).is_ok());
    }

    #[test]
    fn eigenvalues_of_pure_state() {
        let ev = phi0().projector().eigenvalues();
        assert!((ev[8] - 1.0).abs() < 1e-12);
        for e in &ev[..8] {
            assert!(e.abs() < 1e-12);
        }
    }
}
