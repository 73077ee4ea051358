use crate::error::Result;
use crate::gates::{bell_basis, omega_pow};
use crate::linalg::{product_vector, Basis3, Density9, Ray3, C64, ZERO};

use super::entropy::Spectrum9;

/// Σ₁ᵏ Σ₂ʲ with Σ₁ the cyclic shift and Σ₂ the clock.
fn pauli(k: usize, j: usize) -> [[C64; 3]; 3] {
    let mut m = [[ZERO; 3]; 3];
    for c in 0..3 {
        m[(c + k) % 3][c] = omega_pow(j * c);
    }
    m
}

/// τ ⊗ τ̄.
fn pauli_pair(k: usize, j: usize) -> [[C64; 9]; 9] {
    let t = pauli(k, j);
    let mut m = [[ZERO; 9]; 9];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    m[3 * a + b][3 * c + d] = t[a][c] * t[b][d].conj();
                }
            }
        }
    }
    m
}

/// Average of (τ⊗τ̄) σ (τ⊗τ̄)† over the nine generalised Paulis.
pub fn bell_twirl(state: &Density9) -> Density9 {
    let s = state.matrix();
    let mut out = [[ZERO; 9]; 9];
    for k in 0..3 {
        for j in 0..3 {
            let u = pauli_pair(k, j);
            let mut us = [[ZERO; 9]; 9];
            for r in 0..9 {
                for c in 0..9 {
                    us[r][c] = (0..9).map(|i| u[r][i] * s[i][c]).sum();
                }
            }
            for r in 0..9 {
                for c in 0..9 {
                    let v: C64 = (0..9).map(|i| us[r][i] * u[c][i].conj()).sum();
                    out[r][c] += v / 9.0;
                }
            }
        }
    }
    Density9::from_raw(out)
}

/// λᵢ = ⟨φᵢ|𝒟(σ)|φᵢ⟩.
pub fn spectrum_of(state: &Density9) -> Result<Spectrum9> {
    let t = bell_twirl(state);
    let basis = bell_basis();
    let lambda = std::array::from_fn(|i| t.sandwich(&basis[i], &basis[i]).re.max(0.0));
    let sum: f64 = lambda.iter().sum();
    Spectrum9::new(lambda.map(|l| l / sum))
}

/// Largest off-diagonal magnitude of `state` in the Bell basis.
pub fn bell_offdiagonal(state: &Density9) -> f64 {
    let basis = bell_basis();
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        for j in 0..9 {
            if i != j {
                worst = worst.max(state.sandwich(&basis[i], &basis[j]).norm());
            }
        }
    }
    worst
}

/// Whether every game-violating outcome probability stays within η/2.
///
/// Bob's basis starts with v_ℓ. An outcome pair (b, b′) violates the game
/// when exactly one of "Alice's ray is v_ℓ" and "Bob's ray is v_ℓ" holds.
pub fn gamma_membership(state: &Density9, eta: f64, basis_a: &Basis3, basis_b: &Basis3) -> bool {
    let v_l: Ray3 = basis_b[0];
    let limit = eta / 2.0 + 1e-12;
    for a in basis_a.rays() {
        for (j, b) in basis_b.rays().iter().enumerate() {
            let alice_hit = *a == v_l;
            let bob_hit = j == 0;
            if alice_hit != bob_hit && state.expectation(&product_vector(a, b)) > limit {
                return false;
            }
        }
    }
    true
}
