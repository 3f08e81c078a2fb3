use manet_core::stats::{
    rank_sum_exact, rank_sum_normal, summarize, synthetic_sample, wilcoxon_rank_sum, Method, Sign, Summary, ALPHA,
};
use proptest::prelude::*;
mod common;

use common::{instance, oracle_p, oracle_ranks, random_instance};
use rand::Rng;

#[test]
fn exact_test_matches_enumeration_oracle() {
    let mut rng = manet_core::seed::rng(2024);
    for _ in 0..1000 {
        let (a, b) = random_instance(&mut rng);
        let (w, p) = rank_sum_exact(&a, &b).unwrap();
        let expected_w: f64 = oracle_ranks(&[a.clone(), b.clone()].concat())[..a.len()].iter().sum();
        assert_eq!(w, expected_w);
        let q = oracle_p(&a, &b);
        assert!((p - q).abs() < 1e-12, "{a:?} {b:?}: {p} vs {q}");
        let r = wilcoxon_rank_sum(&a, &b, ALPHA).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert_eq!(r.p_value, p);
    }
}

// With heavy ties at these sizes the approximation can cross alpha (about 1%
// of instances); the test itself always enumerates there.
#[test]
fn normal_approximation_agrees_away_from_alpha_without_ties() {
    let mut rng = manet_core::seed::rng(77);
    for _ in 0..1000 {
        let (a, b) = instance(&mut rng, false);
        let exact = oracle_p(&a, &b);
        let (_, approx) = rank_sum_normal(&a, &b).unwrap();
        if (exact - ALPHA).abs() > 0.01 {
            assert_eq!(exact < ALPHA, approx < ALPHA, "{a:?} {b:?}: exact {exact} normal {approx}");
        }
    }
}

#[test]
fn identical_samples_are_equal() {
    for n in [1, 5, 8, 9, 51] {
        let z = vec![0.0; n];
        assert_eq!(wilcoxon_rank_sum(&z, &z, ALPHA).unwrap().sign, Sign::Equal);
    }
}

#[test]
fn published_rastrigin_rows_give_a_plus() {
    let manet = Summary {
        best: 0.0,
        worst: 1.99,
        mean: 0.585,
        median: 1.34e-7,
        std: 0.659,
    };
    let jso = Summary {
        best: 3.98,
        worst: 13.2,
        mean: 8.56,
        median: 8.02,
        std: 2.10,
    };
    let r = wilcoxon_rank_sum(&synthetic_sample(&manet, 51), &synthetic_sample(&jso, 51), ALPHA).unwrap();
    assert_eq!(r.method, Method::Normal);
    assert_eq!(r.sign, Sign::Better);
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.0f64..10.0, (0u8..5).prop_map(f64::from)], 1..30)
}

proptest! {
    #[test]
    fn swapping_samples_flips_the_sign(a in sample(), b in sample()) {
        let ab = wilcoxon_rank_sum(&a, &b, ALPHA).unwrap();
        let ba = wilcoxon_rank_sum(&b, &a, ALPHA).unwrap();
        prop_assert_eq!(ab.sign, ba.sign.flip());
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn sign_is_scale_invariant(a in sample(), b in sample(), k in 1e-3f64..1e3) {
        let scaled = |v: &[f64]| v.iter().map(|x| x * k).collect::<Vec<_>>();
        let r = wilcoxon_rank_sum(&a, &b, ALPHA).unwrap();
        let s = wilcoxon_rank_sum(&scaled(&a), &scaled(&b), ALPHA).unwrap();
        prop_assert_eq!(r.sign, s.sign);
        prop_assert!((r.p_value - s.p_value).abs() < 1e-12);
    }

    #[test]
    fn p_value_is_a_probability(a in sample(), b in sample()) {
        let r = wilcoxon_rank_sum(&a, &b, ALPHA).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert_eq!(r.sign == Sign::Equal, r.p_value >= ALPHA);
    }

    #[test]
    fn summary_ignores_order(mut v in prop::collection::vec(-1e6f64..1e6, 1..60), seed in any::<u64>()) {
        let s = summarize(&v).unwrap();
        let mut rng = manet_core::seed::rng(seed);
        for i in (1..v.len()).rev() {
            let j = rng.random_range(0..=i);
            v.swap(i, j);
        }
        let t = summarize(&v).unwrap();
        prop_assert_eq!((s.best, s.worst, s.median), (t.best, t.worst, t.median));
        prop_assert!((s.mean - t.mean).abs() <= 1e-9 * (1.0 + s.mean.abs()));
        prop_assert!((s.std - t.std).abs() <= 1e-9 * (1.0 + s.std));
        prop_assert!(s.best <= s.median && s.median <= s.worst && s.std >= 0.0);
    }
}
