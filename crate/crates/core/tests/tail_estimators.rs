use thompson_bandit::analysis::{lemma_a_violation_estimate, prop1_tail_estimate, TailEstimate};
use thompson_bandit::simulator::BanditInstance;

fn check_lemma_a(trials: u64) -> TailEstimate {
    // C_2 = 32 / 0.8^2 = 50, so arm 2 saturates after 50 ln t pulls
    let instance = BanditInstance::new(vec![0.9, 0.1]).unwrap();
    let t = 10_000u64;
    let e = lemma_a_violation_estimate(&instance, t, trials, 2024).unwrap();
    let bound = 2.0 / (t as f64).powi(2);
    assert!(e.estimate <= bound + 3.0 * e.std_error, "{e:?}");
    assert!((0.0..=1.0).contains(&e.estimate));
    let p = e.estimate;
    assert!((e.std_error - (p * (1.0 - p) / trials as f64).sqrt()).abs() < 1e-15);
    e
}

#[test]
fn saturated_arm_overshoot_is_rare() {
    check_lemma_a(2000);
}

#[test]
#[ignore = "10^5 Thompson trials of 10^4 rounds; run with --ignored"]
fn saturated_arm_overshoot_full_scale() {
    check_lemma_a(100_000);
}

#[test]
fn first_pull_is_uniform() {
    let instance = BanditInstance::new(vec![0.7, 0.2, 0.4]).unwrap();
    let trials = 6000;
    let e = prop1_tail_estimate(&instance, 0.5, 1, trials, 1).unwrap();
    // N_1(1) <= 1 always holds
    assert_eq!(e.estimate, 1.0);
    let e = prop1_tail_estimate(&instance, 0.5, 2, trials, 1).unwrap();
    let sigma = (2.0 / 9.0 / trials as f64).sqrt();
    assert!(e.estimate >= 2.0 / 3.0 - 4.0 * sigma, "{e:?}");
}
