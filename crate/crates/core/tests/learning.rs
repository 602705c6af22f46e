use lowdeg::l2di::{self, MuSpec};
use lowdeg::learn::{self, LearnerConfig, Setting};
use lowdeg::linalg;
use lowdeg::qudit_algebra::Observable;
use lowdeg::rng;
use serde_json::Value;

#[test]
fn budget_matches_golden() {
    let golden: Value = serde_json::from_str(include_str!("golden/budget.json")).unwrap();
    let c = LearnerConfig::new(1000, 2, 1, 0.1, 0.01, 0);
    for (setting, key) in [(Setting::Cyclic, "cyclic"), (Setting::Qudit, "qudit")] {
        let b = learn::sample_budget(&c, setting).unwrap();
        let want = golden[key]["exact"].as_f64().unwrap();
        assert!((b.exact - want).abs() <= 1e-9 * want, "{key}: {} vs {want}", b.exact);
        assert_eq!(b.samples, golden[key]["samples"].as_u64().unwrap());
    }
}

#[test]
fn budget_decreases_in_eps() {
    let mut prev = u64::MAX;
    for eps in [0.01, 0.05, 0.1, 0.5, 1.0] {
        let c = LearnerConfig::new(50, 3, 2, eps, 0.1, 0);
        let s = learn::sample_budget(&c, Setting::Cyclic).unwrap().samples;
        assert!(s < prev);
        prev = s;
    }
}

#[test]
fn arbitrary_truncation_degree() {
    assert_eq!(learn::arbitrary_degree(2, 0.04), 5);
    assert_eq!(learn::arbitrary_degree(3, 0.5), 1);
}

#[test]
fn arbitrary_learner_mean_squared_error() {
    let mut r = rng::stream(71);
    let a = Observable::new(2, 3, linalg::random_hermitian(9, &mut r)).unwrap();
    let scale = 1.0 / linalg::op_norm(a.matrix());
    let a = a.scale(scale);
    let eps = 0.3;
    let config = LearnerConfig::new(2, 3, 1, eps, 0.1, 5);
    let out = learn::learn_arbitrary(&config, &a, Some(&a)).unwrap();
    let learned = learn::synthesize(2, 3, &out.coeff_map()).unwrap();
    let mse = l2di::mean_squared_deviation(&a, &learned, MuSpec::HaarProduct, 100_000, 6).unwrap();
    assert!(mse.mean <= eps, "{}", mse.mean);
}
