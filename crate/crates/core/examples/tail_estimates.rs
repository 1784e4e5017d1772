//! Monte Carlo estimates of the two tail events bounded in the analysis.

use thompson_bandit::analysis::{lemma_a_violation_estimate, prop1_tail_curve};
use thompson_bandit::simulator::BanditInstance;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let instance = BanditInstance::new(vec![0.9, 0.1])?;
    for e in prop1_tail_curve(&instance, 0.3, &[1, 10, 100, 500], 400, 11)? {
        println!(
            "P(N_1({:>3}) <= t^0.3) ~ {:.4} +- {:.4}",
            e.t, e.estimate, e.std_error
        );
    }
    let e = lemma_a_violation_estimate(&instance, 2000, 100, 11)?;
    println!(
        "saturated-arm overshoot by t = {}: {:.4} +- {:.4}",
        e.t, e.estimate, e.std_error
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
