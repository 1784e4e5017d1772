//! Runs the numeric invariant suites (`ts-bandit check <suite>` runs one).
//! Pass suite names as arguments to pick a subset.

use thompson_bandit::checks::Suite;

pub fn run_suites(names: &[String]) -> Result<(), Box<dyn std::error::Error>> {
    let suites: Vec<Suite> = if names.is_empty() {
        Suite::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?
    };
    for suite in suites {
        let report = suite.run()?;
        println!("{suite}: ok, {} cases", report.cases);
        for note in &report.notes {
            println!("    {note}");
        }
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    run_suites(&["lemma3".into(), "lambda-grid".into()])
}

#[allow(dead_code)]
fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    run_suites(&names).unwrap();
}
