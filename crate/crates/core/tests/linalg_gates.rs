use proptest::prelude::*;
use tdiqkd_core::gates::{
    all_unitary, bell_basis, circuit_fidelities, gate, gram_error, phi0, prepare_bell,
    ControlledGate9,
};
use tdiqkd_core::linalg::{
    complete_basis, depolarize, joint_distribution, Basis3, Ket9, Ray3, C64,
};
use tdiqkd_core::{BellIndex, GateLabel};

fn ray() -> impl Strategy<Value = Ray3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-3)
        .prop_map(|(x, y, z)| Ray3::new(x, y, z).unwrap())
}

fn basis() -> impl Strategy<Value = Basis3> {
    (ray(), ray())
        .prop_filter("independent", |(a, b)| a.dot(b).abs() < 0.99)
        .prop_map(|(a, b)| {
            let c = Ray3::from_components(a.cross(&b)).unwrap();
            complete_basis(&[a, c]).unwrap()
        })
}

fn ket9() -> impl Strategy<Value = Ket9> {
    prop::array::uniform9((-1.0..1.0f64, -1.0..1.0f64))
        .prop_filter("nonzero", |a| {
            a.iter().map(|(r, i)| r * r + i * i).sum::<f64>() > 1e-3
        })
        .prop_map(|a| Ket9::new(a.map(|(r, i)| C64::new(r, i))).unwrap())
}

proptest! {
    #[test]
    fn joint_table_sums_to_one(psi in ket9(), a in basis(), b in basis()) {
        let t = joint_distribution(&psi.projector(), &a, &b);
        let s: f64 = t.iter().flatten().sum();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phi0_same_basis_is_diagonal(b in basis()) {
        let t = joint_distribution(&phi0().projector(), &b, &b);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    prop_assert!(t[i][j].abs() < 1e-12);
                } else {
                    prop_assert!((t[i][j] - 1.0 / 3.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn completion_is_idempotent(a in ray(), b in ray()) {
        let one = complete_basis(&[a]).unwrap();
        prop_assert_eq!(complete_basis(&[one[0]]).unwrap(), one);
        prop_assert_eq!(one[0], a);
        prop_assume!(a.dot(&b).abs() < 0.99);
        let c = Ray3::from_components(a.cross(&b)).unwrap();
        let two = complete_basis(&[a, c]).unwrap();
        prop_assert_eq!(complete_basis(&[two[0], two[1]]).unwrap(), two);
    }

    #[test]
    fn depolarize_zero_is_identity(psi in ket9(), p in 0.0..=1.0f64) {
        let rho = depolarize(&psi.projector(), p).unwrap();
        prop_assert_eq!(depolarize(&rho, 0.0).unwrap(), rho);
    }

    #[test]
    fn ray_equality_is_projective(r in ray()) {
        let c = r.components();
        let neg = Ray3::from_components([-c[0], -c[1], -c[2]]).unwrap();
        prop_assert_eq!(neg, r);
        prop_assert!(neg.components().iter().zip(c).all(|(a, b)| (a - b).abs() < 1e-15));
    }
}

#[test]
fn every_gate_is_unitary() {
    assert!(all_unitary());
    for l in GateLabel::ALL {
        assert!(gate(l).unitarity_error() < 1e-12, "{l}");
        for c in 0..3 {
            assert!(ControlledGate9::new(c, gate(l)).unwrap().unitarity_error() < 1e-12);
        }
    }
}

#[test]
fn circuit_matches_bell_basis() {
    for (j, f) in circuit_fidelities() {
        assert!(f >= 1.0 - 1e-12, "j = {}: {f}", j.get());
    }
    let outputs: Vec<Ket9> = BellIndex::all().map(prepare_bell).collect();
    assert!(gram_error(&outputs) < 1e-10);
    assert!(gram_error(&bell_basis()) < 1e-10);
}

/// Independent construction: φ_{3u+x} = Σ_k ω^{xk} |k, k+u⟩ / √3.
#[test]
fn circuit_matches_direct_formula() {
    let w = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
    for j in 0..9 {
        let (u, x) = (j / 3, j % 3);
        let mut amp = [C64::new(0.0, 0.0); 9];
        for k in 0..3 {
            amp[3 * k + (k + u) % 3] = w(x * k) / 3f64.sqrt();
        }
        let expect = Ket9::new(amp).unwrap();
        let got = prepare_bell(BellIndex::new(j).unwrap());
        assert!((got.fidelity(&expect) - 1.0).abs() < 1e-12, "j = {j}");
    }
}
