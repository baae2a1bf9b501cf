use qpv_core::checks::entropic::{cit_sums, measured_conditional_entropy};
use qpv_core::checks::routing::{bell_weights, overlap_witness, route_layout};
use qpv_core::checks::{self, run_suite, Relation, SUITES};
use qpv_core::qcore::linalg::{c, projector, CVector};
use qpv_core::qcore::state::omega_vector;
use qpv_core::{binary_entropy, QuantumState, RegisterLayout};

#[test]
fn every_suite_passes_with_default_seed() {
    for name in SUITES {
        for r in run_suite(name, 2024).unwrap() {
            println!("{}", r.to_jsonl());
            assert!(r.pass, "{name}: {r:?}");
        }
    }
    assert!(run_suite("nonsense", 0).is_err());
}

#[test]
fn suites_are_deterministic() {
    let a = run_suite("m1_m2", 5).unwrap();
    let b = run_suite("m1_m2", 5).unwrap();
    assert_eq!(a, b);
}

fn cit_layout() -> RegisterLayout {
    RegisterLayout::new([("R", 1), ("E", 2), ("F", 2)]).unwrap()
}

#[test]
fn cit_equality_cases() {
    // |0>_R |00>: certain in one basis, uniform in the other.
    let s = QuantumState::basis(cit_layout(), 0).unwrap();
    let [a, b] = cit_sums(&s).unwrap();
    assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    // |Omega>_{RE} |0>_F: E predicts either basis, F nothing.
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(32);
    v[0] = c(w, 0.0);
    v[1 | 1 << 1] = c(w, 0.0);
    let s = QuantumState::pure(cit_layout(), v).unwrap();
    assert!(measured_conditional_entropy(&s, "R", false, &["E"]).unwrap().abs() < 1e-12);
    let [a, b] = cit_sums(&s).unwrap();
    assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
}

#[test]
fn cit_rejects_bad_dimensions() {
    assert!(checks::check_cit(1, (3, 2), 0).is_err());
}

#[test]
fn afw_constant_value() {
    let r = checks::check_afw();
    // 2d + (1+d) h(1/(1+d)) at d = 0.013, evaluated independently.
    let d: f64 = 0.013;
    let p = 1.0 / (1.0 + d);
    let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    assert!((r.lhs - (2.0 * d + (1.0 + d) * h)).abs() < 1e-12);
    assert!((r.lhs - 0.1263).abs() < 1e-4);
    assert!(r.pass);
    assert_eq!(checks::entropic::afw_value(0.0), 0.0);
}

#[test]
fn fano_binary_channel_is_tight() {
    // Z uniform, W = Z flipped with probability 0.09: H(Z|W) = h(0.09).
    let layout = RegisterLayout::new([("R", 1), ("W", 1)]).unwrap();
    let e: f64 = 0.09;
    let mut v = CVector::zeros(4);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for z in 0..2usize {
        v[z | z << 1] += c(half * (1.0 - e).sqrt(), 0.0);
        v[z | (1 - z) << 1] += c(half * e.sqrt(), 0.0);
    }
    // Dephase W by measuring it: use the mixed state of (Z, W).
    let rho = qpv_core::qcore::linalg::CMatrix::from_fn(4, 4, |i, j| if i == j { c(v[i].norm_sqr(), 0.0) } else { c(0.0, 0.0) });
    let s = QuantumState::mixed(layout, rho).unwrap();
    let h = measured_conditional_entropy(&s, "R", false, &["W"]).unwrap();
    assert!((h - binary_entropy(0.09).unwrap()).abs() < 1e-12);
}

#[test]
fn m1_m2_examples_from_bell_algebra() {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let phi2 = CVector::from_vec(vec![c(w, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-w, 0.0)]);
    let rho = projector(&phi2);
    assert!(qpv_core::protocol::m1_accept_probability(&rho).unwrap().abs() < 1e-12);
    assert!((qpv_core::protocol::m2_accept_probability(&rho).unwrap() - 0.5).abs() < 1e-12);
    let p = bell_weights(&projector(&omega_vector()));
    assert!((p[0] - 1.0).abs() < 1e-12);
}

#[test]
fn overlap_witness_reaches_one_half() {
    assert!((overlap_witness(&route_layout()).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn low_fidelity_bounds_at_intermediate_epsilon() {
    let r = checks::check_low_fidelity_route(0.2, 50, 3).unwrap();
    assert!(r.pass && r.lhs > 3f64.sqrt() / 2.0 - 0.4);
    assert_eq!(r.relation, Relation::Ge);
    assert!(checks::check_low_fidelity_route(0.5, 1, 0).is_err());
}
