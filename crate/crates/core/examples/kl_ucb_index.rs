//! Inverting the Bernoulli KL divergence: the largest `q` with
//! `n K(s/n, q) <= threshold`.

use thompson_bandit::distributions::{kl, kl_ucb_index};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("K(0.5, 0.25) = {}", kl(0.5, 0.25));
    println!(
        "{:>4} {:>5} {:>9} {:>12} {:>12}",
        "s", "n", "threshold", "index", "residual"
    );
    for (s, n, threshold) in [
        (3, 10, 2.0),
        (30, 100, 2.0),
        (300, 1000, 2.0),
        (0, 5, 1.0),
        (5, 5, 1.0),
    ] {
        let index = kl_ucb_index(s, n, threshold)?;
        // at q = 1 the constraint is slack and there is no residual
        let residual = if index < 1.0 {
            format!(
                "{:.2e}",
                n as f64 * kl(s as f64 / n as f64, index) - threshold
            )
        } else {
            "-".to_owned()
        };
        println!("{s:>4} {n:>5} {threshold:>9} {index:>12.9} {residual:>12}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
