use num_bigint::BigUint;
use proptest::prelude::*;
use qpv_core::analysis::boolean::{first_bit_of_x, hamming, ip_function, random_function};
use qpv_core::analysis::cc::{oneway_cc_bruteforce, smp_cc, smp_cc_bruteforce};
use qpv_core::analysis::counting::{
    attacker_qubit_bound, counting_bound, decimal, delta_margin_check, delta_margin_check_at, delta_margin_value,
    hamming_volume, net_size_report, volume_entropy_check, QubitBoundInput,
};
use qpv_core::BooleanFunction;

#[test]
fn inner_product_tables() {
    assert_eq!(ip_function(1).unwrap().bit_string(), "0001");
    let ip2 = ip_function(2).unwrap();
    assert!(!ip2.eval(0b11, 0b11));
    assert!(ip2.eval(0b10, 0b11));
}

#[test]
fn hamming_distances() {
    let f = random_function(3, 17).unwrap();
    assert_eq!(hamming(&f, &f).unwrap(), 0);
    assert_eq!(hamming(&f, &f.negate()).unwrap(), 64);
    assert!(hamming(&f, &ip_function(2).unwrap()).is_err());
    let mean = (0..100)
        .map(|s| hamming(&random_function(3, 2 * s).unwrap(), &random_function(3, 2 * s + 1).unwrap()).unwrap() as f64 / 64.0)
        .sum::<f64>()
        / 100.0;
    assert!((mean - 0.5).abs() < 0.03, "{mean}");
}

#[test]
fn hamming_volume_matches_enumeration() {
    assert_eq!(hamming_volume(4, 0).unwrap(), BigUint::from(1u32));
    assert_eq!(hamming_volume(4, 2).unwrap(), BigUint::from(11u32));
    for n in 1..=12u64 {
        for a in 0..=n {
            let direct = (0u32..1 << n).filter(|w| w.count_ones() as u64 <= a).count();
            assert_eq!(hamming_volume(n, a).unwrap(), BigUint::from(direct));
        }
    }
    assert!(hamming_volume(3, 4).is_err());
    assert!(volume_entropy_check(20, 0.25).unwrap());
    assert!(volume_entropy_check(10, 0.33).is_err());
}

#[test]
fn net_sizes() {
    let l = 927f64.log2();
    let q0 = net_size_report(0);
    assert!((q0.log2_net_a - 2.0 * l).abs() < 1e-12 && (q0.log2_net_a - 19.72).abs() < 0.01);
    let q1 = net_size_report(1);
    // 16 log2(927) = 157.70.
    assert!((q1.k - 16.0 * l).abs() < 1e-9 && (q1.k - 157.70).abs() < 0.01);
    assert_eq!(q1.log2_net_s, q1.k);
    for q in 1..6 {
        assert_eq!(net_size_report(q).k / net_size_report(q - 1).k, 4.0);
    }
}

#[test]
fn delta_margin() {
    assert!(delta_margin_check());
    let v = delta_margin_value(&decimal("0.00216").unwrap());
    let approx = v.numer().to_string().parse::<f64>().unwrap() / v.denom().to_string().parse::<f64>().unwrap();
    assert!((approx - 0.006494).abs() < 1e-6);
    assert!(!delta_margin_check_at(&decimal("0.0022").unwrap()));
    assert!(delta_margin_check_at(&decimal("0").unwrap()));
}

#[test]
fn counting_examples() {
    assert!(counting_bound(10, 0).unwrap().passes);
    assert!(counting_bound(12, 1).unwrap().passes);
    let outside = counting_bound(10, 5).unwrap();
    assert!(!outside.passes && !outside.in_claimed_regime);
    let r = counting_bound(16, 3).unwrap();
    assert!(r.log2_bound_lower <= r.log2_bound && r.log2_bound <= r.log2_bound_upper);
    assert!(r.precision_bits >= 200);
}

#[test]
fn qubit_bounds() {
    assert_eq!(attacker_qubit_bound(QubitBoundInput::Random { n: 10 }).unwrap(), 0);
    assert_eq!(attacker_qubit_bound(QubitBoundInput::Random { n: 30 }).unwrap(), 10);
    assert_eq!(attacker_qubit_bound(QubitBoundInput::Cc { k: 64 }).unwrap(), 0);
    assert!(attacker_qubit_bound(QubitBoundInput::Cc { k: 0 }).is_err());
}

#[test]
fn communication_complexity_examples() {
    let zero = BooleanFunction::constant(2, false).unwrap();
    assert_eq!(smp_cc_bruteforce(&zero, 1).unwrap().errors, 0);
    assert_eq!(smp_cc_bruteforce(&ip_function(1).unwrap(), 1).unwrap().errors, 0);
    assert_eq!(oneway_cc_bruteforce(&first_bit_of_x(2).unwrap(), 1).unwrap().errors, 0);
    let ip2 = ip_function(2).unwrap();
    assert_eq!(oneway_cc_bruteforce(&ip2, 2).unwrap().errors, 0);

    // The one-way lower bound n/2 - log(1/eps) - 1 at the advantage eps
    // the best one-bit protocol achieves.
    let best = oneway_cc_bruteforce(&ip2, 1).unwrap();
    let eps = 0.5 - best.error();
    assert!(1.0 >= 2.0 / 2.0 - (1.0 / eps).log2() - 1.0);
    assert_eq!(best.errors, 3);

    assert_eq!(smp_cc(&ip_function(1).unwrap(), 0.25).unwrap(), 1);
    assert_eq!(smp_cc(&zero, 0.25).unwrap(), 1);
    assert!(smp_cc_bruteforce(&ip_function(4).unwrap(), 1).is_err());
}

#[test]
fn smp_error_falls_with_message_length() {
    for seed in 0..20 {
        for n in 1..=2 {
            let f = random_function(n, seed).unwrap();
            let e: Vec<usize> = (1..=2).map(|k| smp_cc_bruteforce(&f, k).unwrap().errors).collect();
            assert!(e[0] >= e[1]);
            for k in 1..=2 {
                assert!(oneway_cc_bruteforce(&f, k).unwrap().errors <= e[k - 1]);
            }
        }
    }
}

proptest! {
    #[test]
    fn hamming_is_a_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (random_function(2, a).unwrap(), random_function(2, b).unwrap(), random_function(2, c).unwrap());
        let d = |x: &BooleanFunction, y: &BooleanFunction| hamming(x, y).unwrap();
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h));
    }

    #[test]
    fn boolean_functions_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let f = random_function(n, seed).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<BooleanFunction>(&json).unwrap(), f);
    }
}
