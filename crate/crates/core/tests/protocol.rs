use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qpv_core::analysis::boolean::{ip_function, random_function, xor_function};
use qpv_core::attacks::keep_q;
use qpv_core::protocol::experiment::wilson_interval;
use qpv_core::protocol::run::attack_prover;
use qpv_core::protocol::{
    accept_probability, average_accept_probability, m1_accept_probability, m2_accept_probability, repeat_sequential,
    run_experiment, run_meas, run_noisy_threshold, run_route_bb84, run_route_entangled, timing_check, ExperimentConfig,
    Geometry, NoisyRepeatConfig, NoisyRunner, ProtocolConfig, ProtocolKind, Prover,
};
use qpv_core::qcore::linalg::{c, outer, CMatrix, CVector};
use qpv_core::SeedStream;

fn cfg(kind: ProtocolKind) -> ProtocolConfig {
    ProtocolConfig::new(kind)
}

fn avg(kind: ProtocolKind, prover: Prover) -> f64 {
    let f = ip_function(2).unwrap();
    let mut total = 0.0;
    for x in 0..4 {
        for y in 0..4 {
            total += average_accept_probability(&cfg(kind), &f, x, y, &prover).unwrap();
        }
    }
    total / 16.0
}

#[test]
fn dishonest_provers_on_the_routing_protocols() {
    assert_abs_diff_eq!(avg(ProtocolKind::RouteEntangled, Prover::ApplyX), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(avg(ProtocolKind::RouteEntangled, Prover::WrongVerifier), 0.0, epsilon = 1e-12);
    // Per preparation: |0> always, |1> never, |+> and |-> half the time.
    assert_abs_diff_eq!(avg(ProtocolKind::RouteBb84, Prover::DiscardSendZero), 0.5, epsilon = 1e-12);
    // Per preparation: 1, 1, 1/2, 1/2.
    assert_abs_diff_eq!(avg(ProtocolKind::RouteBb84, Prover::MeasureComputational), 0.75, epsilon = 1e-12);
    let f = ip_function(2).unwrap();
    for (prep, want) in [(0, 1.0), (1, 0.0), (2, 0.5), (3, 0.5)] {
        let p = accept_probability(&cfg(ProtocolKind::RouteBb84), &f, 1, 2, &Prover::DiscardSendZero, Some(prep)).unwrap();
        assert_abs_diff_eq!(p, want, epsilon = 1e-12);
    }
}

#[test]
fn dishonest_provers_on_the_measuring_protocol() {
    assert_abs_diff_eq!(avg(ProtocolKind::Meas, Prover::RandomBit), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(avg(ProtocolKind::Meas, Prover::WrongBasis), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(avg(ProtocolKind::Meas, Prover::Honest), 1.0, epsilon = 1e-12);
}

#[test]
fn timing_rejections() {
    let f = Arc::new(xor_function(1).unwrap());
    let geometry = Geometry::default();
    for seed in 0..4 {
        let honest = run_route_entangled(&f, 0, 1, &Prover::Honest, seed).unwrap();
        assert!(honest.accepted && timing_check(&honest, &geometry));
        let late = run_route_entangled(&f, 0, 1, &Prover::Delayed(0.1), seed).unwrap();
        assert!(!late.accepted && !timing_check(&late, &geometry));
        let elsewhere = run_meas(&f, 1, 1, &Prover::FromPosition(0.3), seed).unwrap();
        assert!(!elsewhere.accepted && !elsewhere.timing_ok);
        let wrong = run_route_bb84(&f, 1, 0, &Prover::WrongVerifier, seed).unwrap();
        assert!(!wrong.accepted);
    }
    for run in [
        run_route_bb84(&f, 1, 1, &Prover::Honest, 9).unwrap(),
        run_meas(&f, 0, 1, &Prover::Honest, 9).unwrap(),
    ] {
        assert!(run.accepted && run.events.iter().all(|e| e.time >= 0.0));
    }
}

#[test]
fn m1_m2_examples() {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let omega = CVector::from_vec(vec![c(w, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(w, 0.0)]);
    let phi1 = CVector::from_vec(vec![c(0.0, 0.0), c(w, 0.0), c(w, 0.0), c(0.0, 0.0)]);
    let cases = [
        (outer(&omega, &omega), 1.0, 1.0),
        (CMatrix::identity(4, 4).scale(0.25), 0.25, 0.5),
        (outer(&phi1, &phi1), 0.0, 0.5),
    ];
    for (rho, m1, m2) in cases {
        assert_abs_diff_eq!(m1_accept_probability(&rho).unwrap(), m1, epsilon = 1e-12);
        assert_abs_diff_eq!(m2_accept_probability(&rho).unwrap(), m2, epsilon = 1e-12);
    }
    assert!(m1_accept_probability(&CMatrix::identity(2, 2)).is_err());
}

#[test]
fn sequential_repetition() {
    let f = ip_function(2).unwrap();
    let c = cfg(ProtocolKind::RouteEntangled);
    let honest = repeat_sequential(&c, &f, 100, &Prover::Honest, SeedStream::new(3)).unwrap();
    assert!(honest.accepted && honest.rounds.len() == 100);
    let broken = repeat_sequential(&c, &f, 10, &Prover::Synthetic(0.0), SeedStream::new(3)).unwrap();
    assert!(!broken.accepted && !broken.rounds[0].accepted);

    // Overall acceptance against the p^r oracle.
    let (p, r, trials) = (0.9f64, 5, 10_000);
    let hits = (0..trials)
        .filter(|&t| repeat_sequential(&c, &f, r, &Prover::Synthetic(p), SeedStream::new(11).split(t)).unwrap().accepted)
        .count();
    let want = p.powi(r as i32);
    let sigma = (want * (1.0 - want) / trials as f64).sqrt();
    assert!((hits as f64 / trials as f64 - want).abs() <= 3.0 * sigma);

    let a = repeat_sequential(&c, &f, 20, &Prover::Synthetic(0.5), SeedStream::new(8)).unwrap();
    let b = repeat_sequential(&c, &f, 20, &Prover::Synthetic(0.5), SeedStream::new(8)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn noiseless_threshold_and_ties() {
    let f = random_function(2, 1).unwrap();
    let c = cfg(ProtocolKind::Meas);
    let out = run_noisy_threshold(&NoisyRepeatConfig::new(200, 0.0).unwrap(), &c, &f, &Prover::Honest, SeedStream::new(0)).unwrap();
    assert_eq!(out.accept_count, 200);
    assert!(out.accepted);
    // 0.996 * 250 = 249 exactly: 249 acceptances tie and are rejected.
    let tie = NoisyRepeatConfig::new(250, 0.0).unwrap();
    assert_abs_diff_eq!(tie.threshold(), 249.0, epsilon = 1e-9);
    assert!(NoisyRepeatConfig::new(10, 0.02).is_err());
}

#[test]
fn attacks_run_as_provers() {
    let f = xor_function(1).unwrap();
    let prover = attack_prover(keep_q(1).unwrap());
    let c = cfg(ProtocolKind::RouteEntangled);
    let p: Vec<f64> = (0..4).map(|i| accept_probability(&c, &f, i / 2, i % 2, &prover, None).unwrap()).collect();
    assert_eq!(p, vec![1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn experiment_from_json() {
    let cfg = ExperimentConfig::from_json(
        r#"{"protocol": "route_bb84", "n": 2, "f": {"kind": "ip"}, "rounds": 50, "eta": 0.01, "trials": 200, "seed": 5}"#,
    )
    .unwrap();
    let r = run_experiment(&cfg, None, true).unwrap();
    assert_eq!(r.rows.len(), 50 * 200);
    assert_eq!(r.summary.round_accept_probability, 1.0);
    assert!(r.summary.ci95[0] <= r.summary.acceptance_rate && r.summary.acceptance_rate <= r.summary.ci95[1]);
    assert_eq!(run_experiment(&cfg, None, true).unwrap(), r);
    assert!(ExperimentConfig::from_json(r#"{"protocol": "meas", "n": 1, "f": {"kind": "ip"}, "rounds": 1, "bogus": 0}"#).is_err());
    let [lo, hi] = wilson_interval(50, 100);
    assert!(lo < 0.5 && 0.5 < hi && (lo + hi - 1.0).abs() < 1e-12);
}

/// `P[Bin(r, p) > t]`.
fn binomial_above(r: u64, p: f64, t: f64) -> f64 {
    let mut pmf = vec![0.0; r as usize + 1];
    pmf[0] = 1.0;
    for _ in 0..r {
        for j in (0..=r as usize).rev() {
            pmf[j] = pmf[j] * (1.0 - p) + if j > 0 { pmf[j - 1] * p } else { 0.0 };
        }
    }
    pmf.iter().enumerate().filter(|(k, _)| *k as f64 > t).map(|(_, v)| v).sum()
}

#[test]
fn threshold_acceptance_is_not_monotone_in_noise() {
    // At r = 200 the cut drops from 199 to 198 between these two rates.
    let exact = |eta: f64| binomial_above(200, 1.0 - eta, NoisyRepeatConfig::new(200, eta).unwrap().threshold());
    assert!(exact(0.0011) > exact(0.001) + 0.1);
    let f = ip_function(1).unwrap();
    let c = cfg(ProtocolKind::RouteEntangled);
    let trials = 20_000;
    for eta in [0.001, 0.0011] {
        let runner = NoisyRunner::new(NoisyRepeatConfig::new(200, eta).unwrap(), &c, &f, &Prover::Honest).unwrap();
        let rate = runner.trials(trials, SeedStream::new(2), false).iter().filter(|o| o.accepted).count() as f64 / trials as f64;
        let p = exact(eta);
        assert!((rate - p).abs() <= 4.0 * (p * (1.0 - p) / trials as f64).sqrt(), "{eta}: {rate} vs {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn acceptance_is_monotone_in_noise(seed in any::<u64>(), e1 in 0.0f64..=0.01, e2 in 0.0f64..=0.01) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let f = ip_function(1).unwrap();
        let c = cfg(ProtocolKind::RouteEntangled);
        let count = |eta: f64| {
            let runner = NoisyRunner::new(NoisyRepeatConfig::new(300, eta).unwrap(), &c, &f, &Prover::Honest).unwrap();
            runner.trials(20, SeedStream::new(seed), false)
        };
        let same_cut = |a: f64, b: f64| a.floor() == b.floor();
        for (a, b) in count(lo).iter().zip(count(hi).iter()) {
            prop_assert!(a.accept_count >= b.accept_count);
            // The threshold falls with the noise, so acceptance itself is
            // only monotone while its integer part stays put.
            if same_cut(a.threshold, b.threshold) {
                prop_assert!(a.accepted || !b.accepted);
            }
        }
    }
}
