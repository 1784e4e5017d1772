//! Constants of the finite-time analysis for one suboptimal arm, and the
//! interval lemma checked against its exact value.

use thompson_bandit::analysis::{
    compute_constants, lambda0_alternative, lemma3_bound, lemma3_lhs_exact, Lemma3Input,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let c = compute_constants(0.9, 0.8, 0.1, 10_000, 0.5)?;
    println!("y = {:.4}, C_a = {:.1}, alpha = {:.6}", c.y, c.c_a, c.alpha);
    println!(
        "lambda1 = {:.6}, lambda2 = {:.6}, lambda0 = {:.6}",
        c.lambda1, c.lambda2, c.lambda0
    );
    println!(
        "alternative lambda0 = {:.6}",
        lambda0_alternative(0.9, 0.8)?
    );

    let lambda = c.lambda_mid();
    for (j, f) in [(1, 5.0), (100, 50.0), (1000, 500.0)] {
        let input = Lemma3Input { j, f, lambda };
        println!(
            "j = {j:>4}, f = {f:>5}: exact {:.3e} <= bound {:.3e}",
            lemma3_lhs_exact(&input, c.mu1, c.y),
            lemma3_bound(&input, &c)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
