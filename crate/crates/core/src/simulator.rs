//! Seeded Monte Carlo regret simulation.
//!
//! A trial is a single run of one policy on one instance. Its randomness comes
//! from two [`RngStream`]s: one feeds the reward uniforms (one per round), the
//! other feeds the policy (Thompson samples, tie breaks). Stream ids are a pure
//! function of `(master seed, trial, policy slot)`, so any trial can be
//! replayed on its own and results never depend on thread scheduling.
//!
//! Regret is recorded as pseudo-regret `sum_a gap_a * N_a(t)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::kl;
use crate::error::{Error, Result};
use crate::policies::{self, ArmState, PolicyKind, PolicySpec, SelectionContext};
use crate::rng::RngStream;

/// True Bernoulli means of the arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    means: Vec<f64>,
}

impl BanditInstance {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::domain(format!(
                "a bandit needs at least 2 arms, got {}",
                means.len()
            )));
        }
        if let Some(&bad) = means.iter().find(|m| !(**m > 0.0 && **m < 1.0)) {
            return Err(Error::domain(format!("arm mean {bad} outside (0, 1)")));
        }
        Ok(Self { means })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn optimal_mean(&self) -> f64 {
        self.means.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn gaps(&self) -> Vec<f64> {
        let best = self.optimal_mean();
        self.means.iter().map(|m| best - m).collect()
    }

    /// Index of the optimal arm, or an error if the maximum is shared.
    pub fn unique_optimum(&self) -> Result<usize> {
        let best = self.optimal_mean();
        let mut winners = self.means.iter().enumerate().filter(|(_, &m)| m == best);
        let (arm, _) = winners.next().expect("at least two arms");
        if winners.next().is_some() {
            return Err(Error::NonUniqueOptimum(best));
        }
        Ok(arm)
    }
}

/// `sum_a (mu* - mu_a) * counts_a`.
pub fn pseudo_regret(instance: &BanditInstance, counts: &[u64]) -> f64 {
    debug_assert_eq!(counts.len(), instance.arms());
    let best = instance.optimal_mean();
    instance
        .means
        .iter()
        .zip(counts)
        .map(|(m, &n)| (best - m) * n as f64)
        .sum()
}

/// Lai-Robbins constant `sum_{gap > 0} gap_a / K(mu_a, mu*)`.
pub fn lower_bound_coefficient(instance: &BanditInstance) -> Result<f64> {
    instance.unique_optimum()?;
    let best = instance.optimal_mean();
    Ok(instance
        .means
        .iter()
        .filter(|&&m| m < best)
        .map(|&m| (best - m) / kl(m, best))
        .sum())
}

/// Asymptotic regret lower bound `coefficient * ln t` at each grid round.
pub fn lower_bound_curve(instance: &BanditInstance, grid: &[u64]) -> Result<Vec<f64>> {
    let c = lower_bound_coefficient(instance)?;
    Ok(grid.iter().map(|&t| c * (t as f64).ln()).collect())
}

/// Up to `points` distinct rounds spaced evenly in `ln t` over `[1, horizon]`,
/// always including both ends.
pub fn log_grid(horizon: u64, points: usize) -> Vec<u64> {
    assert!(horizon >= 1);
    if points <= 1 || horizon == 1 {
        return vec![horizon];
    }
    let top = (horizon as f64).ln();
    let mut grid: Vec<u64> = (0..points)
        .map(|i| {
            let t = (top * i as f64 / (points - 1) as f64).exp().round() as u64;
            t.clamp(1, horizon)
        })
        .collect();
    grid.push(1);
    grid.push(horizon);
    grid.sort_unstable();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Trial `i` of every policy sees the same reward uniforms.
    #[default]
    Paired,
    Independent,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::Paired => "paired",
            Pairing::Independent => "independent",
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paired" => Ok(Pairing::Paired),
            "independent" => Ok(Pairing::Independent),
            other => Err(Error::domain(format!(
                "pairing must be `paired` or `independent`, got `{other}`"
            ))),
        }
    }
}

const SHARED_SLOT: u64 = 0xFFFF;
const ROLE_REWARDS: u64 = 0;
const ROLE_POLICY: u64 = 1;

fn stream_id(trial: u64, slot: u64, role: u64) -> u64 {
    debug_assert!(trial < 1 << 40);
    (trial << 24) | ((slot & 0xFFFF) << 8) | role
}

/// The two random streams owned by one trial.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    pub rewards: RngStream,
    pub policy: RngStream,
}

impl TrialStreams {
    /// Streams for trial `trial` of the policy in slot `policy_slot`.
    pub fn derive(master_seed: u64, trial: u64, policy_slot: usize, pairing: Pairing) -> Self {
        let slot = policy_slot as u64;
        let reward_slot = match pairing {
            Pairing::Paired => SHARED_SLOT,
            Pairing::Independent => slot,
        };
        Self {
            rewards: RngStream::new(master_seed, stream_id(trial, reward_slot, ROLE_REWARDS)),
            policy: RngStream::new(master_seed, stream_id(trial, slot, ROLE_POLICY)),
        }
    }
}

/// Step-by-step state of one trial.
pub struct Trial<'a> {
    instance: &'a BanditInstance,
    spec: PolicySpec,
    arms: Vec<ArmState>,
    round: u64,
    streams: TrialStreams,
    samples: Vec<f64>,
}

impl<'a> Trial<'a> {
    pub fn new(instance: &'a BanditInstance, spec: PolicySpec, streams: TrialStreams) -> Self {
        Self {
            instance,
            spec,
            arms: vec![ArmState::default(); instance.arms()],
            round: 0,
            streams,
            samples: Vec::with_capacity(instance.arms()),
        }
    }

    /// Plays one round; returns the chosen arm and its reward.
    pub fn step(&mut self) -> (usize, bool) {
        let t = self.round + 1;
        let arm = if self.spec.kind() == PolicyKind::Thompson {
            policies::thompson_samples_into(
                &self.arms,
                &mut self.streams.policy,
                &mut self.samples,
            );
            policies::argmax_uniform(&self.samples, &mut self.streams.policy)
        } else {
            let ctx = SelectionContext::new(t, &self.arms, &mut self.streams.policy);
            policies::select(&self.spec, ctx)
        };
        let reward = self.streams.rewards.uniform() < self.instance.means[arm];
        self.arms[arm].record(reward);
        self.round = t;
        (arm, reward)
    }

    pub fn rounds_played(&self) -> u64 {
        self.round
    }

    pub fn arms(&self) -> &[ArmState] {
        &self.arms
    }

    pub fn counts(&self) -> Vec<u64> {
        self.arms.iter().map(|a| a.pulls()).collect()
    }

    /// Thompson samples drawn in the last round (empty for index policies).
    pub fn last_samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn regret(&self) -> f64 {
        pseudo_regret(self.instance, &self.counts())
    }
}

/// Runs `horizon` rounds and returns `(t, pseudo-regret)` at each grid round.
/// Grid rounds beyond the horizon are ignored.
pub fn run_trial(
    instance: &BanditInstance,
    spec: &PolicySpec,
    horizon: u64,
    streams: TrialStreams,
    grid: &[u64],
) -> Vec<(u64, f64)> {
    let mut trial = Trial::new(instance, *spec, streams);
    let mut out = Vec::with_capacity(grid.len());
    let mut next = grid.iter().copied().filter(|&g| g <= horizon).peekable();
    while trial.rounds_played() < horizon {
        trial.step();
        while next.peek() == Some(&trial.rounds_played()) {
            out.push((trial.rounds_played(), trial.regret()));
            next.next();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: BanditInstance,
    pub policies: Vec<PolicySpec>,
    pub horizon: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub grid: Vec<u64>,
    pub pairing: Pairing,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 3 {
            return Err(Error::domain(format!(
                "horizon must be >= 3, got {}",
                self.horizon
            )));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be >= 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::domain("no policies given"));
        }
        if self.grid.is_empty() {
            return Err(Error::domain("record grid is empty"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("record grid must be strictly increasing"));
        }
        if self.grid[0] < 1 || *self.grid.last().unwrap() > self.horizon {
            return Err(Error::domain("record grid must lie within [1, horizon]"));
        }
        Ok(())
    }
}

/// Per-policy aggregate over all trials of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretSummary {
    pub policy: PolicySpec,
    pub grid: Vec<u64>,
    pub mean: Vec<f64>,
    /// 0.5% quantile.
    pub q005: Vec<f64>,
    /// 99.5% quantile.
    pub q995: Vec<f64>,
    /// 99.95% quantile.
    pub q9995: Vec<f64>,
    /// Regret of every trial at the last grid round, in trial order.
    pub final_by_trial: Vec<f64>,
}

/// Nearest-rank empirical quantile of an ascending slice.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    // the slack keeps p * n from rounding up past an exact integer
    let rank = ((p * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[rank - 1]
}

fn summarize(spec: PolicySpec, grid: &[u64], per_trial: &[Vec<(u64, f64)>]) -> RegretSummary {
    let trials = per_trial.len();
    let mut column = Vec::with_capacity(trials);
    let mut summary = RegretSummary {
        policy: spec,
        grid: grid.to_vec(),
        mean: Vec::with_capacity(grid.len()),
        q005: Vec::with_capacity(grid.len()),
        q995: Vec::with_capacity(grid.len()),
        q9995: Vec::with_capacity(grid.len()),
        final_by_trial: per_trial
            .iter()
            .map(|t| t.last().map_or(0.0, |p| p.1))
            .collect(),
    };
    for g in 0..grid.len() {
        column.clear();
        column.extend(per_trial.iter().map(|t| t[g].1));
        summary
            .mean
            .push(column.iter().sum::<f64>() / trials as f64);
        column.sort_by(f64::total_cmp);
        summary.q005.push(nearest_rank(&column, 0.005));
        summary.q995.push(nearest_rank(&column, 0.995));
        summary.q9995.push(nearest_rank(&column, 0.9995));
    }
    summary
}

/// Runs every policy of `config` on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RegretSummary>> {
    config.validate()?;
    Ok(config
        .policies
        .iter()
        .enumerate()
        .map(|(slot, spec)| {
            let per_trial: Vec<Vec<(u64, f64)>> = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let streams =
                        TrialStreams::derive(config.master_seed, trial, slot, config.pairing);
                    run_trial(
                        &config.instance,
                        spec,
                        config.horizon,
                        streams,
                        &config.grid,
                    )
                })
                .collect();
            summarize(*spec, &config.grid, &per_trial)
        })
        .collect())
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<Vec<RegretSummary>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("cannot start thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}
