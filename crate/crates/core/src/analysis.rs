//! Closed-form constants and bound evaluators from the finite-time analysis of
//! Thompson Sampling, plus Monte Carlo estimators for its two tail events.
//!
//! Notation follows the two-arm reduction used throughout: `mu1` is the
//! optimal mean, `mu_a < mu1` a suboptimal one, `delta = (mu1 - mu_a) / 2` and
//! `y = mu_a + delta` the midpoint between them.

use std::f64::consts::E;

use rayon::prelude::*;

use crate::distributions::{binom_pmf, binom_sf, kl};
use crate::error::{Error, Result};
use crate::policies::{PolicyKind, PolicySpec};
use crate::simulator::{BanditInstance, Pairing, Trial, TrialStreams};

/// What is reported for the additive constant of the regret bound, which has
/// no closed form.
pub const THEOREM_CONSTANT_NOTE: &str = "Theorem-1 additive constant: unspecified in paper";

/// Every closed-form constant attached to one `(mu1, mu_a, epsilon, T, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConstants {
    pub mu1: f64,
    pub mu_a: f64,
    pub epsilon: f64,
    pub horizon: u64,
    pub b: f64,
    /// `(mu1 - mu_a) / 2`
    pub delta: f64,
    /// `mu_a + delta`
    pub y: f64,
    /// Saturation constant `32 / (mu1 - mu_a)^2`.
    pub c_a: f64,
    /// `(1/2)^(1 - y)`
    pub alpha: f64,
    /// Largest `lambda` with `R_lambda > 1`; infinite when `y <= 1/2`.
    pub lambda1: f64,
    /// Root of the affine map `lambda -> d_lambda(y, mu1)`.
    pub lambda2: f64,
    /// `min(lambda1, lambda2)`
    pub lambda0: f64,
    /// `D(epsilon, mu1, mu_a)`
    pub d: f64,
    /// `K_{T,a}(epsilon) = (1 + epsilon)(ln T + ln ln T) / K(mu_a, mu1)`
    pub k_ta: f64,
}

fn check_pair(mu1: f64, mu_a: f64) -> Result<()> {
    if !(mu_a > 0.0 && mu_a < mu1 && mu1 < 1.0) {
        return Err(Error::domain(format!(
            "need 0 < mu_a < mu1 < 1, got mu1 = {mu1}, mu_a = {mu_a}"
        )));
    }
    Ok(())
}

/// Negative binary entropy `y ln y + (1 - y) ln(1 - y)`, the slope of
/// `d_lambda` in `lambda`.
fn neg_entropy(y: f64) -> f64 {
    y * y.ln() + (1.0 - y) * (1.0 - y).ln()
}

/// `d_lambda(y, mu1) = y ln(y^lambda / mu1) + (1 - y) ln((1 - y)^lambda / (1 - mu1))`.
pub fn d_lambda(lambda: f64, y: f64, mu1: f64) -> f64 {
    y * (lambda * y.ln() - mu1.ln()) + (1.0 - y) * (lambda * (1.0 - y).ln() - (1.0 - mu1).ln())
}

/// The same quantity rearranged as an affine function of `lambda`.
pub fn d_lambda_affine(lambda: f64, y: f64, mu1: f64) -> f64 {
    lambda * neg_entropy(y) - (y * mu1.ln() + (1.0 - y) * (1.0 - mu1).ln())
}

/// `R_lambda(mu1, y) = mu1 (1 - y)^lambda / (y^lambda (1 - mu1))`.
pub fn r_lambda(lambda: f64, mu1: f64, y: f64) -> f64 {
    mu1 / (1.0 - mu1) * ((1.0 - y) / y).powf(lambda)
}

/// `ln(mu1 / (1 - mu1)) / ln(y / (1 - y))` for `y > 1/2`, else `+inf`.
pub fn lambda1(mu1: f64, y: f64) -> f64 {
    if y > 0.5 {
        (mu1 / (1.0 - mu1)).ln() / (y / (1.0 - y)).ln()
    } else {
        f64::INFINITY
    }
}

/// `[y ln mu1 + (1 - y) ln(1 - mu1)] / [y ln y + (1 - y) ln(1 - y)]`.
pub fn lambda2(mu1: f64, y: f64) -> f64 {
    (y * mu1.ln() + (1.0 - y) * (1.0 - mu1).ln()) / neg_entropy(y)
}

/// `lambda0` through its divergence form,
/// `1 + K(y, mu1) / [y ln(1/y) + (1 - y) ln(1/(1 - y))]` with
/// `y = (mu1 + mu2) / 2`.
pub fn lambda0_alternative(mu1: f64, mu2: f64) -> Result<f64> {
    check_pair(mu1, mu2)?;
    let y = mu2 + (mu1 - mu2) / 2.0;
    let entropy = y * (1.0 / y).ln() + (1.0 - y) * (1.0 / (1.0 - y)).ln();
    Ok(1.0 + kl(y, mu1) / entropy)
}

/// `(lambda / e)^lambda`, the maximum of `x^lambda e^-x` over `x > 0`.
pub fn c_lambda(lambda: f64) -> f64 {
    (lambda / E).powf(lambda)
}

pub fn compute_constants(
    mu1: f64,
    mu_a: f64,
    epsilon: f64,
    horizon: u64,
    b: f64,
) -> Result<AnalysisConstants> {
    check_pair(mu1, mu_a)?;
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if horizon < 3 {
        return Err(Error::domain(format!(
            "horizon must be >= 3, got {horizon}"
        )));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::domain(format!("b must lie in (0, 1), got {b}")));
    }
    let gap = mu1 - mu_a;
    let delta = gap / 2.0;
    let y = mu_a + delta;
    let lambda1 = lambda1(mu1, y);
    let lambda2 = lambda2(mu1, y);
    let spread = (mu_a * (1.0 - mu_a)).min(mu1 * (1.0 - mu1));
    let log_t = (horizon as f64).ln();
    Ok(AnalysisConstants {
        mu1,
        mu_a,
        epsilon,
        horizon,
        b,
        delta,
        y,
        c_a: 32.0 / (gap * gap),
        alpha: 0.5f64.powf(1.0 - y),
        lambda1,
        lambda2,
        lambda0: lambda1.min(lambda2),
        d: (1.0 + epsilon / 2.0).powi(2) / (epsilon * epsilon * spread * spread),
        k_ta: (1.0 + epsilon) * (log_t + log_t.ln()) / kl(mu_a, mu1),
    })
}

impl AnalysisConstants {
    pub fn d_lambda(&self, lambda: f64) -> f64 {
        d_lambda(lambda, self.y, self.mu1)
    }

    pub fn r_lambda(&self, lambda: f64) -> f64 {
        r_lambda(lambda, self.mu1, self.y)
    }

    /// `C_{lambda,mu1,mu2} = (lambda/e)^lambda (1 - y)^-lambda R / (R - 1)`.
    pub fn c_lambda_mu(&self, lambda: f64) -> f64 {
        let r = self.r_lambda(lambda);
        c_lambda(lambda) * (1.0 - self.y).powf(-lambda) * r / (r - 1.0)
    }

    /// `beta_t = sqrt(6 ln t / t^b)`.
    pub fn beta_t(&self, t: u64) -> f64 {
        (6.0 * (t as f64).ln() / (t as f64).powf(self.b)).sqrt()
    }

    /// Midpoint of the admissible interval `(1, lambda0)`.
    pub fn lambda_mid(&self) -> f64 {
        0.5 * (1.0 + self.lambda0)
    }
}

/// One evaluation point of the interval lemma: `j` plays of the optimal arm,
/// an interval of length at least `f`, and an exponent `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma3Input {
    pub j: u64,
    pub f: f64,
    pub lambda: f64,
}

/// `sum_{s=0}^{j} (1 - F_Bin(j+1, y; s))^f * f_Bin(j, mu1; s)`: the exact
/// probability that `f` fresh posterior samples of the optimal arm all stay
/// below `y` after `j` plays.
pub fn lemma3_lhs_exact(input: &Lemma3Input, mu1: f64, y: f64) -> f64 {
    let Lemma3Input { j, f, .. } = *input;
    (0..=j)
        .map(|s| {
            let tail = binom_sf(j + 1, y, s as i64);
            let weight = binom_pmf(j, mu1, s).expect("s <= j and mu1 is a probability");
            if weight == 0.0 {
                0.0
            } else {
                tail.powf(f) * weight
            }
        })
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// `alpha^f + C_{lambda,mu1,mu2} f^-lambda e^{-j d_lambda}`.
pub fn lemma3_bound(input: &Lemma3Input, constants: &AnalysisConstants) -> Result<f64> {
    let Lemma3Input { j, f, lambda } = *input;
    if !(lambda > 1.0 && lambda < constants.lambda0) {
        return Err(Error::domain(format!(
            "lambda {lambda} outside (1, {})",
            constants.lambda0
        )));
    }
    let r = constants.r_lambda(lambda);
    debug_assert!(r > 1.0);
    let tail = constants.c_lambda_mu(lambda)
        * f.powf(-lambda)
        * (-(j as f64) * constants.d_lambda(lambda)).exp();
    Ok(constants.alpha.powf(f) + tail)
}

/// Leading term `(1 + epsilon) sum_a gap_a (ln T + ln ln T) / K(mu_a, mu*)` of
/// the Thompson Sampling regret bound. The additive constant is not part of
/// the value (see [`THEOREM_CONSTANT_NOTE`]).
pub fn theorem_bound(instance: &BanditInstance, epsilon: f64, horizon: u64) -> Result<f64> {
    instance.unique_optimum()?;
    if horizon < 3 {
        return Err(Error::domain(format!(
            "horizon must be >= 3, got {horizon}"
        )));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::domain(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    let best = instance.optimal_mean();
    let log_t = (horizon as f64).ln();
    let sum: f64 = instance
        .means()
        .iter()
        .filter(|&&m| m < best)
        .map(|&m| (best - m) * (log_t + log_t.ln()) / kl(m, best))
        .sum();
    Ok((1.0 + epsilon) * sum)
}

/// Monte Carlo estimate of a tail probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub t: u64,
    /// Exponent of the `N_1(t) <= t^b` event; `None` for events without one.
    pub b: Option<f64>,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl TailEstimate {
    fn from_hits(t: u64, b: Option<f64>, trials: u64, hits: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            t,
            b,
            trials,
            estimate: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

fn thompson_trial<'a>(
    instance: &'a BanditInstance,
    horizon: u64,
    seed: u64,
    trial: u64,
) -> Trial<'a> {
    let spec = PolicySpec::new(PolicyKind::Thompson, horizon.max(3)).expect("thompson spec");
    Trial::new(
        instance,
        spec,
        TrialStreams::derive(seed, trial, 0, Pairing::Paired),
    )
}

/// Estimates `P(N_1(t) <= t^b)` under Thompson Sampling at every `t` in
/// `checkpoints`, from one set of `trials` runs.
pub fn prop1_tail_curve(
    instance: &BanditInstance,
    b: f64,
    checkpoints: &[u64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    let best = instance.unique_optimum()?;
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::domain(format!("b must lie in (0, 1), got {b}")));
    }
    if trials == 0 || checkpoints.is_empty() || checkpoints.contains(&0) {
        return Err(Error::domain("need trials >= 1 and checkpoints >= 1"));
    }
    let mut sorted = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let last = *sorted.last().unwrap();

    let hits_per_trial: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut run = thompson_trial(instance, last, seed, trial);
            let mut hits = Vec::with_capacity(sorted.len());
            for &t in &sorted {
                while run.rounds_played() < t {
                    run.step();
                }
                hits.push(run.arms()[best].pulls() as f64 <= (t as f64).powf(b));
            }
            hits
        })
        .collect();

    Ok(checkpoints
        .iter()
        .map(|t| {
            let k = sorted.binary_search(t).unwrap();
            let hits = hits_per_trial.iter().filter(|h| h[k]).count() as u64;
            TailEstimate::from_hits(*t, Some(b), trials, hits)
        })
        .collect())
}

pub fn prop1_tail_estimate(
    instance: &BanditInstance,
    b: f64,
    t: u64,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    Ok(prop1_tail_curve(instance, b, &[t], trials, seed)?[0])
}

/// Estimates the probability that, within `t` rounds, some saturated
/// suboptimal arm (more than `C_a ln t` pulls when sampled) draws a Thompson
/// sample above `mu_a + delta_a`.
pub fn lemma_a_violation_estimate(
    instance: &BanditInstance,
    t: u64,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    let best = instance.unique_optimum()?;
    if t < 2 {
        return Err(Error::domain(format!("t must be >= 2, got {t}")));
    }
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let mu1 = instance.optimal_mean();
    let log_t = (t as f64).ln();
    // (arm, saturation level, sample ceiling)
    let watched: Vec<(usize, f64, f64)> = instance
        .means()
        .iter()
        .enumerate()
        .filter(|&(a, _)| a != best)
        .map(|(a, &m)| {
            let gap = mu1 - m;
            (a, 32.0 / (gap * gap) * log_t, m + gap / 2.0)
        })
        .collect();
    let reachable = watched.iter().any(|&(_, level, _)| level < t as f64);

    let hits = (0..trials)
        .into_par_iter()
        .filter(|&trial| {
            if !reachable {
                return false;
            }
            let mut run = thompson_trial(instance, t, seed, trial);
            let mut pulls = vec![0u64; instance.arms()];
            while run.rounds_played() < t {
                pulls
                    .iter_mut()
                    .zip(run.arms())
                    .for_each(|(p, a)| *p = a.pulls());
                run.step();
                let samples = run.last_samples();
                if watched
                    .iter()
                    .any(|&(a, level, ceiling)| pulls[a] as f64 > level && samples[a] > ceiling)
                {
                    return true;
                }
            }
            false
        })
        .count() as u64;
    Ok(TailEstimate::from_hits(t, None, trials, hits))
}
