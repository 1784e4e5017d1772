//! Beta posterior cdf, quantiles and samples computed through binomial tails.

use thompson_bandit::distributions::{
    beta_cdf, beta_quantile, beta_sample, binom_cdf, binom_pmf, BetaParams,
};
use thompson_bandit::rng::RngStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("f_Bin(10, 0.2; 3)  = {}", binom_pmf(10, 0.2, 3)?);
    println!("F_Bin(2, 0.85; 0)  = {}", binom_cdf(2, 0.85, 0));

    // Posterior after 4 successes in 6 pulls.
    let posterior = BetaParams::posterior(4, 6);
    println!(
        "posterior          = Beta({}, {})",
        posterior.alpha(),
        posterior.beta()
    );
    for y in [0.25, 0.5, 0.75] {
        let identity = 1.0
            - binom_cdf(
                posterior.alpha() + posterior.beta() - 1,
                y,
                posterior.alpha() as i64 - 1,
            );
        println!(
            "F_Beta({y:.2})       = {:.12}  (binomial form {identity:.12})",
            beta_cdf(posterior, y)
        );
    }
    let q = beta_quantile(posterior, 0.9)?;
    println!(
        "90% quantile       = {q:.12}, cdf there = {:.12}",
        beta_cdf(posterior, q)
    );

    let mut rng = RngStream::new(7, 0);
    let draws: Vec<f64> = (0..5).map(|_| beta_sample(posterior, &mut rng)).collect();
    println!("five samples       = {draws:.4?}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
