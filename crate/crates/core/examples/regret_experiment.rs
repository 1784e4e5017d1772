//! A small paired Monte Carlo comparison of all five policies.

use thompson_bandit::policies::{PolicyKind, PolicySpec};
use thompson_bandit::simulator::{
    log_grid, run_experiment, BanditInstance, ExperimentConfig, Pairing,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let horizon = 2000;
    let config = ExperimentConfig {
        instance: BanditInstance::new(vec![0.8, 0.9])?,
        policies: PolicyKind::ALL
            .iter()
            .map(|&kind| PolicySpec::new(kind, horizon))
            .collect::<Result<_, _>>()?,
        horizon,
        trials: 40,
        master_seed: 2012,
        grid: log_grid(horizon, 8),
        pairing: Pairing::Paired,
    };
    for summary in run_experiment(&config)? {
        let last = summary.grid.len() - 1;
        println!(
            "{:<9} mean regret at T {:>8.3}   central 99% [{:.1}, {:.1}]",
            summary.policy.kind().name(),
            summary.mean[last],
            summary.q005[last],
            summary.q995[last]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
