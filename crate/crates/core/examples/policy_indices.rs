//! Index values of each policy on a fixed set of arm statistics, and the arm
//! each policy would pull next.

use thompson_bandit::policies::{
    indices, select, ArmState, PolicyKind, PolicySpec, SelectionContext,
};
use thompson_bandit::rng::RngStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let arms = [
        ArmState::new(40, 10)?,
        ArmState::new(12, 4)?,
        ArmState::new(8, 1)?,
    ];
    let round = 61;
    let horizon = 1000;
    let mut rng = RngStream::new(3, 0);
    for kind in PolicyKind::ALL {
        let spec = PolicySpec::new(kind, horizon)?;
        let choice = select(&spec, SelectionContext::new(round, &arms, &mut rng));
        match indices(&spec, &arms, round) {
            Some(values) => println!("{:<9} indices {values:.5?} -> arm {choice}", kind.name()),
            None => println!(
                "{:<9} (sampled)                         -> arm {choice}",
                kind.name()
            ),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
