//! The asymptotic regret lower bound `ln t * sum_a gap_a / K(mu_a, mu*)` of
//! the ten-arm instance.

use thompson_bandit::analysis::theorem_bound;
use thompson_bandit::simulator::{
    log_grid, lower_bound_coefficient, lower_bound_curve, BanditInstance,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let instance = BanditInstance::new(vec![
        0.1, 0.05, 0.05, 0.05, 0.02, 0.02, 0.02, 0.01, 0.01, 0.01,
    ])?;
    println!("coefficient {:.6}", lower_bound_coefficient(&instance)?);
    let grid = log_grid(20_000, 6);
    for (t, value) in grid.iter().zip(lower_bound_curve(&instance, &grid)?) {
        println!("t = {t:>6}  lower bound {value:>9.3}");
    }
    println!(
        "Thompson leading term at T (eps = 0): {:.3}",
        theorem_bound(&instance, 0.0, 20_000)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
