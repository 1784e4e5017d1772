//! Config file to result CSVs, as `ts-bandit run` does it.

use thompson_bandit::cli::{write_results, RunConfig};
use thompson_bandit::simulator::run_experiment;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::temp_dir().join("ts-bandit-config-example");
    let text = format!(
        "means = 0.2, 0.25\nhorizon = 500\ntrials = 20\nseed = 9\npolicies = ts, klucb\ngrid = 1, 10, 100, 500\nout_dir = {}\n",
        out_dir.display()
    );
    let config = RunConfig::parse(&text)?;
    print!("canonical form:\n{}", config.canonical());
    println!("hash: {}", config.hash());

    let summaries = run_experiment(&config.experiment()?)?;
    for path in write_results(&config, &summaries, "example".into())? {
        println!("--- {}", path.display());
        print!("{}", std::fs::read_to_string(path)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
