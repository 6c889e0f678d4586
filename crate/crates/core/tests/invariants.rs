//! Cross-module property tests.

use proptest::prelude::*;

use tailrisk_core::dist::{GpdParams, gpd_cdf, gpd_quantile};
use tailrisk_core::fit::hill_estimator;
use tailrisk_core::tail::{TailModel, es_q, tail_prob, var_q};
use tailrisk_core::threshold::{empirical_mean_excess, sample_lmoments};

fn shape() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -0.8..0.95f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gpd_round_trip(xi in shape(), beta in 0.05..20.0f64, q in 0.0..0.9999f64) {
        let p = GpdParams::new(xi, beta).unwrap();
        let x = gpd_quantile(&p, q).unwrap();
        let back = gpd_cdf(&p, x).unwrap();
        prop_assert!((back - q).abs() < 1e-11, "q={q} back={back}");
    }

    #[test]
    fn gpd_scale_equivariance(xi in shape(), s in 0.01..100.0f64, q in 0.0..0.999f64) {
        let unit = GpdParams::new(xi, 1.0).unwrap();
        let scaled = GpdParams::new(xi, s).unwrap();
        prop_assert_eq!(
            gpd_quantile(&scaled, q).unwrap(),
            s * gpd_quantile(&unit, q).unwrap()
        );
    }

    #[test]
    fn gpd_cdf_monotone(xi in shape(), beta in 0.05..20.0f64, a in 0.0..50.0f64, b in 0.0..50.0f64) {
        let p = GpdParams::new(xi, beta).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(gpd_cdf(&p, lo).unwrap() <= gpd_cdf(&p, hi).unwrap());
    }

    #[test]
    fn gev_cdf_monotone(gamma in -1.5..1.5f64, a in -30.0..30.0f64, b in -30.0..30.0f64) {
        let g = tailrisk_core::dist::GevParams { gamma };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(
            tailrisk_core::dist::gev_cdf(&g, lo) <= tailrisk_core::dist::gev_cdf(&g, hi)
        );
    }

    #[test]
    fn lmoment_ratios_bounded(data in prop::collection::vec(-1e4..1e4f64, 4..120)) {
        // |tau3| <= 1 always; |tau4| <= 1 from n = 5 up (at exactly n = 4
        // the single 4-subset contrast can push tau4 out to +-1.5)
        if let Ok(lm) = sample_lmoments(&data) {
            prop_assert!(lm.tau3.abs() <= 1.0 + 1e-9, "tau3 {}", lm.tau3);
            let t4_bound = if data.len() == 4 { 1.5 } else { 1.0 };
            prop_assert!(lm.tau4.abs() <= t4_bound + 1e-9, "tau4 {}", lm.tau4);
        }
    }

    #[test]
    fn mean_excess_equivariance(
        data in prop::collection::vec(0.0..1e3f64, 3..60),
        c in -500.0..500.0f64,
        s in 0.01..50.0f64,
    ) {
        let u = data[0];
        if let Ok(me) = empirical_mean_excess(&data, u) {
            let shifted: Vec<f64> = data.iter().map(|x| x + c).collect();
            let me_shift = empirical_mean_excess(&shifted, u + c).unwrap();
            prop_assert!((me_shift - me).abs() <= 1e-9 * (1.0 + me.abs() + c.abs()));

            let scaled: Vec<f64> = data.iter().map(|x| x * s).collect();
            let me_scale = empirical_mean_excess(&scaled, u * s).unwrap();
            prop_assert!((me_scale - s * me).abs() <= 1e-12 * (1.0 + (s * me).abs()));
        }
    }

    #[test]
    fn var_es_ordering(
        xi in -0.8..0.95f64,
        beta in 0.05..10.0f64,
        u in -5.0..50.0f64,
        q in 0.95..0.9999f64,
    ) {
        let m = TailModel::new(u, xi, beta, 10_000, 1_000).unwrap();
        let v = var_q(&m, q).unwrap();
        let e = es_q(&m, q).unwrap();
        prop_assert!(e >= v, "es {e} < var {v}");
        // inversion identity
        let back = 1.0 - tail_prob(&m, v).unwrap();
        prop_assert!((back - q).abs() <= 1e-10 * q.max(1e-3));
    }

    #[test]
    fn hill_scale_invariance(
        data in prop::collection::vec(0.01..1e5f64, 5..80),
        c in 0.001..1000.0f64,
    ) {
        let k = data.len() / 2;
        if k >= 2 {
            let scaled: Vec<f64> = data.iter().map(|x| x * c).collect();
            let a = hill_estimator(&data, k).unwrap();
            let b = hill_estimator(&scaled, k).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
