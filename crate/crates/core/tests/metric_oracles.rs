mod common;

use pdtb_lab::eval::{chi2_sf, chi_square, gamma_q, ln_gamma, macro_f1, ConfusionMatrix};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma;

#[test]
fn metrics_match_brute_force() {
    for seed in 0..5 {
        let r = common::metric_oracles(200, seed);
        assert!(r.is_ok(), "seed {seed}: {r:?}");
    }
}

#[test]
fn gamma_and_tail_match_statrs() {
    for a in [0.5, 1.0, 1.5, 2.0, 3.5, 7.0, 12.5, 40.0] {
        for x in [1e-3, 0.1, 0.9, 1.0, 2.5, 6.0, 15.0, 60.0] {
            let want = gamma::gamma_ur(a, x);
            assert!((gamma_q(a, x) - want).abs() < 1e-12, "Q({a}, {x})");
        }
        assert!((ln_gamma(a) - gamma::ln_gamma(a)).abs() < 1e-12);
    }
    for dof in 1..=20 {
        let d = ChiSquared::new(dof as f64).unwrap();
        for x in [0.01, 0.5, 3.84, 10.0, 35.0] {
            assert!((chi2_sf(x, dof as f64) - d.sf(x)).abs() < 1e-12, "sf({x}; {dof})");
        }
    }
}

#[test]
fn textbook_two_by_two() {
    // 2x2 with expected counts 25 everywhere: X2 = 4 * 25/25 = 4
    let r = chi_square(&[vec![30.0, 20.0], vec![20.0, 30.0]], false).unwrap();
    assert!((r.statistic - 4.0).abs() < 1e-12);
    assert_eq!(r.dof, 1);
    let y = chi_square(&[vec![30.0, 20.0], vec![20.0, 30.0]], true).unwrap();
    assert!((y.statistic - 4.0 * 4.5 * 4.5 / 25.0).abs() < 1e-12);
}

#[test]
fn zero_margin_is_degenerate() {
    let r = chi_square(&[vec![0.0, 0.0], vec![3.0, 5.0]], false).unwrap();
    assert!(r.degenerate);
    assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
}

#[test]
fn macro_skips_unsupported_labels() {
    let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    // c never occurs as gold or prediction
    let m = ConfusionMatrix::from_indices(labels, &[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
    let fa = 2.0 * 1.0 * 0.5 / 1.5;
    let fb = 2.0 * (2.0 / 3.0) * 1.0 / (5.0 / 3.0);
    assert!((macro_f1(&m) - (fa + fb) / 2.0).abs() < 1e-12);
}

#[test]
fn weighted_overall_identity() {
    let r = common::weighted_overall_identity();
    assert!(r.is_ok(), "{r:?}");
}
