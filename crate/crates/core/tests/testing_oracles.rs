mod support;

use std::collections::{BTreeSet, HashSet};

use multibag::resampling::rng_from_seed;
use multibag::simulation::{generate_dataset, SimulationDesign};
use multibag::{bh_reject, p_value_two_sided, t_statistic, test_dataset, TestConfig, VarianceMode};
use proptest::prelude::*;
use rand::Rng;

use support::{bh_brute_force, t_two_sided_quadrature};

#[test]
fn quadrature_oracle_reproduces_known_values() {
    // Cauchy closed form and the 97.5% quantile at df = 4
    assert!((t_two_sided_quadrature(1.0, 1.0) - 0.5).abs() < 1e-13);
    let cauchy = 2.0 * (0.5 - 3.0f64.atan() / std::f64::consts::PI);
    assert!((t_two_sided_quadrature(3.0, 1.0) - cauchy).abs() < 1e-13);
    assert!((t_two_sided_quadrature(2.776, 4.0) - 0.05).abs() < 5e-4);
}

#[test]
fn p_value_matches_quadrature_on_random_grid() {
    let mut rng = rng_from_seed(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let df = rng.random_range(1.0..1000.0);
        let t = rng.random_range(-50.0..50.0);
        let err = (p_value_two_sided(t, df).unwrap() - t_two_sided_quadrature(t, df)).abs();
        worst = worst.max(err);
        assert!(err <= 1e-10, "t={t} df={df} err={err:e}");
    }
    eprintln!("max |p - quadrature| = {worst:e}");
}

#[test]
fn p_value_at_integer_df_small_t() {
    for df in 1..=30 {
        for i in 0..40 {
            let t = i as f64 * 0.25;
            let err = (p_value_two_sided(t, df as f64).unwrap() - t_two_sided_quadrature(t, df as f64)).abs();
            assert!(err <= 1e-10, "t={t} df={df} err={err:e}");
        }
    }
}

#[test]
fn p_value_decreases_in_abs_t() {
    for &df in &[1.0, 2.5, 4.0, 18.0, 200.0, 1000.0] {
        let mut prev = p_value_two_sided(0.0, df).unwrap();
        assert_eq!(prev, 1.0);
        for i in 1..2000 {
            let p = p_value_two_sided(i as f64 * 0.01, df).unwrap();
            assert!(p <= prev, "df={df} t={}", i as f64 * 0.01);
            assert_eq!(p, p_value_two_sided(-(i as f64) * 0.01, df).unwrap());
            prev = p;
        }
    }
}

#[test]
fn bh_matches_brute_force_on_random_vectors() {
    let mut rng = rng_from_seed(77);
    for trial in 0..1000 {
        let n = rng.random_range(1..=50);
        let q = [0.01, 0.05, 0.1, 0.2][trial % 4];
        let p: Vec<f64> = (0..n)
            .map(|_| {
                // mix of small values, ties and uniform noise
                match rng.random_range(0..4) {
                    0 => rng.random_range(0.0..0.01),
                    1 => (rng.random_range(0..5) as f64) * 0.01,
                    _ => rng.random::<f64>(),
                }
            })
            .collect();
        let got: HashSet<usize> = bh_reject(&p, q).unwrap().rows().iter().copied().collect();
        assert_eq!(got, bh_brute_force(&p, q), "p={p:?} q={q}");
    }
}

#[test]
fn bh_ties_take_rows_in_index_order() {
    // all equal and all rejected, or all equal and none rejected
    let all = bh_reject(&[0.02; 5], 0.1).unwrap();
    assert_eq!(all.len(), 5);
    let none = bh_reject(&[0.5; 5], 0.1).unwrap();
    assert!(none.is_empty());
}

#[test]
fn strongly_shifted_rows_are_found() {
    let design = SimulationDesign {
        n_rows: 100,
        n_null: 95,
        effect_delta: 10.0,
        ..SimulationDesign::reference()
    };
    let cfg = TestConfig::pooled(0.05).unwrap();
    let shifted: BTreeSet<usize> = (0..5).collect();
    let mut found_all = 0;
    for rep in 0..1000u64 {
        let (data, _) = generate_dataset(&design, &mut rng_from_seed(rep)).unwrap();
        let list = test_dataset(&data, &cfg).unwrap();
        if shifted.is_subset(list.rows()) {
            found_all += 1;
        }
    }
    assert!(
        found_all as f64 / 1000.0 >= 0.99,
        "found all shifted rows in {found_all}/1000"
    );
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..12)
}

proptest! {
    #[test]
    fn t_is_antisymmetric(x in sample(), y in sample()) {
        for mode in [VarianceMode::Pooled, VarianceMode::Welch] {
            let a = t_statistic(&x, &y, mode).unwrap();
            let b = t_statistic(&y, &x, mode).unwrap();
            prop_assert_eq!(a.t_stat, -b.t_stat);
            prop_assert_eq!(a.p_value, b.p_value);
            prop_assert!((0.0..=1.0).contains(&a.p_value));
        }
    }

    #[test]
    fn t_is_scale_invariant(x in sample(), y in sample(), scale in 0.01f64..100.0) {
        for mode in [VarianceMode::Pooled, VarianceMode::Welch] {
            let a = t_statistic(&x, &y, mode).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * scale).collect();
            let b = t_statistic(&xs, &ys, mode).unwrap();
            prop_assert!((a.t_stat - b.t_stat).abs() <= 1e-9 * (1.0 + a.t_stat.abs()));
        }
    }

    #[test]
    fn location_shift_moves_only_numerator(x in sample(), y in sample(), c in -50.0f64..50.0) {
        let a = t_statistic(&x, &y, VarianceMode::Pooled).unwrap();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let b = t_statistic(&x, &shifted, VarianceMode::Pooled).unwrap();
        prop_assume!(a.t_stat.is_finite() && a.t_stat != 0.0);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let diff = mean(&y) - mean(&x);
        prop_assume!(diff.abs() > 1e-6);
        // same standard error: t scales with the mean difference
        let se = diff / a.t_stat;
        prop_assert!((b.t_stat * se - (diff + c)).abs() <= 1e-7 * (1.0 + (diff + c).abs()));
    }

    #[test]
    fn bh_monotone_in_p_and_q(
        p in prop::collection::vec(0.0f64..=1.0, 1..40),
        which in any::<prop::sample::Index>(),
        factor in 0.0f64..1.0,
        q in 0.01f64..0.5,
        dq in 0.0f64..0.4,
    ) {
        let base = bh_reject(&p, q).unwrap();
        let mut lowered = p.clone();
        let i = which.index(p.len());
        lowered[i] *= factor;
        prop_assert!(base.rows().is_subset(bh_reject(&lowered, q).unwrap().rows()));
        let q2 = (q + dq).min(0.99);
        prop_assert!(base.rows().is_subset(bh_reject(&p, q2).unwrap().rows()));
    }
}
