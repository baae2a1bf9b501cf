use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qpv_core::qcore::linalg::{c, CMatrix, CVector};
use qpv_core::qcore::ops::{gates, probabilities};
use qpv_core::qcore::random::{haar_unitary_with, random_density_with, random_state_with};
use qpv_core::qcore::{haar_random_unitary, random_pure_state, trace_distance};
use qpv_core::{
    apply, bb84_state, bell_state, binary_entropy, conditional_entropy, fidelity, measure, partial_trace, purified_distance, Povm,
    QuantumState, RegisterLayout, SeedStream, Unitary,
};

fn three() -> RegisterLayout {
    RegisterLayout::new([("A", 1), ("B", 1), ("C", 1)]).unwrap()
}

fn mixed(layout: &RegisterLayout, rank: usize, seed: u64) -> QuantumState {
    let rho = random_density_with(layout.dim(), rank, &mut SeedStream::new(seed).rng());
    QuantumState::mixed(layout.clone(), rho).unwrap()
}

/// `|<a|b>|` computed by hand.
fn overlap(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<num_complex::Complex64>().norm()
}

#[test]
fn fixed_examples() {
    let plus = bb84_state(2).unwrap();
    let zero = bb84_state(0).unwrap();
    let one = bb84_state(1).unwrap();
    assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(purified_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(purified_distance(&zero, &plus).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
    let bell = bell_state();
    assert_abs_diff_eq!(fidelity(&bell, &bell).unwrap(), 1.0, epsilon = 1e-12);

    // F(|0><0|, I/2): sqrt(sigma) = I/sqrt(2), so the fidelity is tr sqrt(|0><0|/2).
    let q = RegisterLayout::new([("Q", 1)]).unwrap();
    let half = QuantumState::maximally_mixed(q).unwrap();
    assert_abs_diff_eq!(fidelity(&zero, &half).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);

    let reduced = partial_trace(&bell, &["R"]).unwrap().density();
    assert_abs_diff_eq!((reduced - CMatrix::identity(2, 2).scale(0.5)).norm(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(conditional_entropy(&bell, &["R"], &["Q"]).unwrap(), -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(binary_entropy(0.25).unwrap(), 2.0 - 0.75 * 3f64.log2(), epsilon = 1e-12);
}

#[test]
fn circuit_identity_and_born_rule() {
    let layout = RegisterLayout::new([("R", 1), ("Q", 1)]).unwrap();
    let h = Unitary::new(gates::h(), &["R"]).unwrap();
    let cnot = Unitary::new(gates::cnot(), &["R", "Q"]).unwrap();
    let s = apply(&apply(&QuantumState::zero(layout), &h).unwrap(), &cnot).unwrap();
    assert_abs_diff_eq!(fidelity(&s, &bell_state()).unwrap(), 1.0, epsilon = 1e-12);

    let plus = bb84_state(2).unwrap();
    let z = Povm::computational(2, &["Q"]).unwrap();
    let shots = 10_000;
    let ones: usize = (0..shots).map(|i| measure(&plus, &z, i as u64).unwrap().0).sum();
    let sigma = (0.25 / shots as f64).sqrt();
    assert!((ones as f64 / shots as f64 - 0.5).abs() < 3.0 * sigma);

    let both = Povm::computational(4, &["R", "Q"]).unwrap();
    let p = probabilities(&bell_state(), &both).unwrap();
    assert_abs_diff_eq!(p[1] + p[2], 0.0, epsilon = 1e-12);
}

#[test]
fn haar_first_moment() {
    let mut rng = SeedStream::new(99).rng();
    let layout = RegisterLayout::new([("Q", 1)]).unwrap();
    let n = 10_000;
    let mean = (0..n)
        .map(|_| random_state_with(&layout, &mut rng).amplitudes().unwrap()[0].norm_sqr())
        .sum::<f64>()
        / n as f64;
    assert!((mean - 0.5).abs() < 0.02, "{mean}");
    assert_eq!(haar_random_unitary(4, 3).unwrap(), haar_random_unitary(4, 3).unwrap());
    assert_eq!(random_pure_state(&layout, 5), random_pure_state(&layout, 5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fidelity_data_processing(s1 in any::<u64>(), s2 in any::<u64>(), r1 in 1usize..=8, r2 in 1usize..=8) {
        let l = three();
        let (rho, sigma) = (mixed(&l, r1, s1), mixed(&l, r2, s2));
        let full = fidelity(&rho, &sigma).unwrap();
        for keep in [&["A", "B"][..], &["C"], &["B"]] {
            let part = fidelity(&partial_trace(&rho, keep).unwrap(), &partial_trace(&sigma, keep).unwrap()).unwrap();
            prop_assert!(part >= full - 1e-9, "{} < {}", part, full);
        }
    }

    #[test]
    fn purified_distance_below_euclidean(s in any::<u64>()) {
        let l = three();
        let mut rng = SeedStream::new(s).rng();
        let (x, y) = (random_state_with(&l, &mut rng), random_state_with(&l, &mut rng));
        let (vx, vy) = (x.amplitudes().unwrap(), y.amplitudes().unwrap());
        let euclid = (vx - vy).norm();
        let p = purified_distance(&x, &y).unwrap();
        prop_assert!(p <= euclid + 1e-12);
        // Pure-state oracle.
        prop_assert!((fidelity(&x, &y).unwrap() - overlap(vx, vy)).abs() < 1e-10);
    }

    #[test]
    fn unitary_invariance(s in any::<u64>()) {
        let l = three();
        let mut rng = SeedStream::new(s).rng();
        let (x, y) = (random_state_with(&l, &mut rng), random_state_with(&l, &mut rng));
        let u = Unitary::new(haar_unitary_with(8, &mut rng), &["A", "B", "C"]).unwrap();
        let before = purified_distance(&x, &y).unwrap();
        let after = purified_distance(&apply(&x, &u).unwrap(), &apply(&y, &u).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-10);
        let local = Unitary::new(haar_unitary_with(2, &mut rng), &["B"]).unwrap();
        let moved = apply(&x, &local).unwrap();
        prop_assert!((moved.amplitudes().unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_inequality(s in any::<u64>(), ranks in (1usize..=4, 1usize..=4, 1usize..=4)) {
        let l = RegisterLayout::new([("A", 1), ("B", 1)]).unwrap();
        let a = mixed(&l, ranks.0, s);
        let b = mixed(&l, ranks.1, s.wrapping_add(1));
        let d = mixed(&l, ranks.2, s.wrapping_add(2));
        let pd = |x: &QuantumState, y: &QuantumState| purified_distance(x, y).unwrap();
        prop_assert!(pd(&a, &d) <= pd(&a, &b) + pd(&b, &d) + 1e-9);
        prop_assert!((pd(&a, &b) - pd(&b, &a)).abs() < 1e-10);
        prop_assert!(pd(&a, &b) >= trace_distance(&a, &b).unwrap() - 1e-9);
    }

    #[test]
    fn partial_trace_is_linear(s in any::<u64>(), lambda in 0.0f64..=1.0) {
        let l = three();
        let (a, b) = (mixed(&l, 3, s), mixed(&l, 2, s ^ 0x55));
        let mix = QuantumState::mixed(l.clone(), a.density().scale(lambda) + b.density().scale(1.0 - lambda)).unwrap();
        let lhs = partial_trace(&mix, &["A", "C"]).unwrap().density();
        let rhs = partial_trace(&a, &["A", "C"]).unwrap().density().scale(lambda)
            + partial_trace(&b, &["A", "C"]).unwrap().density().scale(1.0 - lambda);
        prop_assert!((lhs.clone() - rhs).norm() < 1e-12);
        prop_assert!((lhs.trace() - c(1.0, 0.0)).norm() < 1e-12);
    }
}
