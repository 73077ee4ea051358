//! Qutrit gates and the two-qutrit circuit preparing the 3-dimensional Bell basis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::consts::TOL;
use crate::error::{Error, Result};
use crate::linalg::{Ket9, C64, ONE, ZERO};

/// ω = e^{2πi/3}.
pub fn omega() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// ωᵏ with the exponent reduced mod 3.
pub fn omega_pow(k: usize) -> C64 {
    match k % 3 {
        0 => ONE,
        1 => omega(),
        _ => omega().conj(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateLabel {
    I,
    X01,
    X12,
    X02,
    XPlus1,
    XPlus2,
    H3,
}

impl GateLabel {
    pub const ALL: [GateLabel; 7] = [
        GateLabel::I,
        GateLabel::X01,
        GateLabel::X12,
        GateLabel::X02,
        GateLabel::XPlus1,
        GateLabel::XPlus2,
        GateLabel::H3,
    ];
}

impl FromStr for GateLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "I" => GateLabel::I,
            "X01" => GateLabel::X01,
            "X12" => GateLabel::X12,
            "X02" => GateLabel::X02,
            "Xplus1" | "X+1" => GateLabel::XPlus1,
            "Xplus2" | "X+2" => GateLabel::XPlus2,
            "H3" => GateLabel::H3,
            other => return Err(Error::UnknownLabel(other.to_string())),
        })
    }
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateLabel::I => "I",
            GateLabel::X01 => "X01",
            GateLabel::X12 => "X12",
            GateLabel::X02 => "X02",
            GateLabel::XPlus1 => "Xplus1",
            GateLabel::XPlus2 => "Xplus2",
            GateLabel::H3 => "H3",
        };
        f.write_str(s)
    }
}

/// A single-qutrit unitary with its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate3 {
    pub label: GateLabel,
    pub matrix: [[C64; 3]; 3],
}

fn permutation(images: [usize; 3]) -> [[C64; 3]; 3] {
    // column p carries |p> to |images[p]>
    let mut m = [[ZERO; 3]; 3];
    for (p, &q) in images.iter().enumerate() {
        m[q][p] = ONE;
    }
    m
}

/// The exact matrix for `label`. H3 carries the 1/√3 factor.
pub fn gate(label: GateLabel) -> Gate3 {
    let matrix = match label {
        GateLabel::I => permutation([0, 1, 2]),
        GateLabel::X01 => permutation([1, 0, 2]),
        GateLabel::X12 => permutation([0, 2, 1]),
        GateLabel::X02 => permutation([2, 1, 0]),
        GateLabel::XPlus1 => permutation([1, 2, 0]),
        GateLabel::XPlus2 => permutation([2, 0, 1]),
        GateLabel::H3 => {
            let s = 1.0 / 3f64.sqrt();
            let mut m = [[ZERO; 3]; 3];
            for (r, row) in m.iter_mut().enumerate() {
                for (c, e) in row.iter_mut().enumerate() {
                    *e = omega_pow(r * c) * s;
                }
            }
            m
        }
    };
    Gate3 { label, matrix }
}

impl Gate3 {
    pub fn apply(&self, v: &[C64; 3]) -> [C64; 3] {
        std::array::from_fn(|r| (0..3).map(|c| self.matrix[r][c] * v[c]).sum())
    }

    /// Largest deviation of U·U† from the identity.
    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.matrix)
    }
}

pub(crate) fn unitarity_error<const N: usize>(m: &[[C64; N]; N]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let z: C64 = (0..N).map(|k| m[i][k] * m[j][k].conj()).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((z - target).norm());
        }
    }
    worst
}

/// Apply a single-qutrit gate to qutrit `which` (0 = first) of a two-qutrit state.
pub fn apply_local(g: &Gate3, which: usize, state: &Ket9) -> Ket9 {
    let a = state.amplitudes();
    let mut out = [ZERO; 9];
    for x in 0..3 {
        for y in 0..3 {
            for k in 0..3 {
                if which == 0 {
                    out[3 * x + y] += g.matrix[x][k] * a[3 * k + y];
                } else {
                    out[3 * x + y] += g.matrix[y][k] * a[3 * x + k];
                }
            }
        }
    }
    Ket9::from_normalized(out)
}

/// Apply `target_gate` to the second qutrit when the first is |control_value⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlledGate9 {
    control_value: usize,
    target_gate: Gate3,
}

impl ControlledGate9 {
    pub fn new(control_value: usize, target_gate: Gate3) -> Result<Self> {
        if control_value > 2 {
            return Err(Error::range(
                "control_value",
                control_value as f64,
                "{0, 1, 2}",
            ));
        }
        Ok(ControlledGate9 {
            control_value,
            target_gate,
        })
    }

    pub fn control_value(&self) -> usize {
        self.control_value
    }

    pub fn target_gate(&self) -> &Gate3 {
        &self.target_gate
    }

    /// The induced 9×9 matrix.
    pub fn matrix(&self) -> [[C64; 9]; 9] {
        let mut m = [[ZERO; 9]; 9];
        for x in 0..3 {
            for y in 0..3 {
                for k in 0..3 {
                    m[3 * x + y][3 * x + k] = if x == self.control_value {
                        self.target_gate.matrix[y][k]
                    } else if y == k {
                        ONE
                    } else {
                        ZERO
                    };
                }
            }
        }
        m
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.matrix())
    }
}

pub fn apply_controlled(cg: &ControlledGate9, state: &Ket9) -> Ket9 {
    let a = state.amplitudes();
    let mut out = *a;
    let x = cg.control_value;
    let block = [a[3 * x], a[3 * x + 1], a[3 * x + 2]];
    let moved = cg.target_gate.apply(&block);
    out[3 * x..3 * x + 3].copy_from_slice(&moved);
    Ket9::from_normalized(out)
}

/// Index j ∈ 0..9 of a Bell state |φ_j⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellIndex(usize);

impl BellIndex {
    pub fn new(j: usize) -> Result<Self> {
        if j > 8 {
            return Err(Error::range("Bell index", j as f64, "0..=8"));
        }
        Ok(BellIndex(j))
    }

    pub fn all() -> impl Iterator<Item = BellIndex> {
        (0..9).map(BellIndex)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Shift u (selects U ∈ {I, X₊₁, X₊₂}); j = 3u + x.
    pub fn shift(self) -> usize {
        self.0 / 3
    }

    /// Phase row x, also the first-qutrit circuit input.
    pub fn phase(self) -> usize {
        self.0 % 3
    }

    /// The gate U placed on the second qutrit before the controlled gates.
    pub fn shift_gate(self) -> GateLabel {
        match self.shift() {
            0 => GateLabel::I,
            1 => GateLabel::XPlus1,
            _ => GateLabel::XPlus2,
        }
    }
}

/// Run the preparation circuit for |φ_j⟩: input |x0⟩, H₃ on the first qutrit,
/// U on the second, then C₁(X₊₁) and C₂(X₊₂).
pub fn prepare_bell(j: BellIndex) -> Ket9 {
    let mut state = Ket9::basis(j.phase(), 0);
    state = apply_local(&gate(GateLabel::H3), 0, &state);
    state = apply_local(&gate(j.shift_gate()), 1, &state);
    let c1 = ControlledGate9 {
        control_value: 1,
        target_gate: gate(GateLabel::XPlus1),
    };
    let c2 = ControlledGate9 {
        control_value: 2,
        target_gate: gate(GateLabel::XPlus2),
    };
    state = apply_controlled(&c1, &state);
    apply_controlled(&c2, &state)
}

/// |φ_{3u+x}⟩ = (1/√3) Σ_k ω^{xk} |k, k+u⟩.
pub fn bell_state(j: BellIndex) -> Ket9 {
    let s = 1.0 / 3f64.sqrt();
    let (u, x) = (j.shift(), j.phase());
    let mut v = [ZERO; 9];
    for k in 0..3 {
        v[3 * k + (k + u) % 3] = omega_pow(x * k) * s;
    }
    Ket9::from_normalized(v)
}

pub fn bell_basis() -> [Ket9; 9] {
    std::array::from_fn(|j| bell_state(BellIndex(j)))
}

/// |φ₀⟩ = (|00⟩ + |11⟩ + |22⟩)/√3.
pub fn phi0() -> Ket9 {
    bell_state(BellIndex(0))
}

/// Largest deviation of the Gram matrix of `kets` from the identity.
pub fn gram_error(kets: &[Ket9]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((a.inner(b) - target).norm());
        }
    }
    worst
}

/// Fidelity of the circuit output to the analytic Bell state, for all nine j.
pub fn circuit_fidelities() -> [(BellIndex, f64); 9] {
    std::array::from_fn(|j| {
        let idx = BellIndex(j);
        (idx, prepare_bell(idx).fidelity(&bell_state(idx)))
    })
}

/// Check that every gate is unitary within the operator tolerance.
pub fn all_unitary() -> bool {
    GateLabel::ALL
        .iter()
        .all(|&l| gate(l).unitarity_error() < TOL.operator)
}
