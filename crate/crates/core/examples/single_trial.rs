//! Stepping one Thompson Sampling trial by hand.

use thompson_bandit::policies::{PolicyKind, PolicySpec};
use thompson_bandit::simulator::{BanditInstance, Pairing, Trial, TrialStreams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let instance = BanditInstance::new(vec![0.2, 0.25])?;
    let spec = PolicySpec::new(PolicyKind::Thompson, 1000)?;
    let mut trial = Trial::new(
        &instance,
        spec,
        TrialStreams::derive(42, 0, 0, Pairing::Paired),
    );
    for _ in 0..5 {
        let (arm, reward) = trial.step();
        println!(
            "t={} samples={:.3?} pulled arm {arm}, reward {}",
            trial.rounds_played(),
            trial.last_samples(),
            u8::from(reward)
        );
    }
    while trial.rounds_played() < 1000 {
        trial.step();
    }
    println!(
        "after 1000 rounds: counts {:?}, regret {:.2}",
        trial.counts(),
        trial.regret()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
