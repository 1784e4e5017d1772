//! Arm-selection policies over shared per-arm sufficient statistics.
//!
//! Every policy reads the same [`ArmState`] vector. Index policies give an
//! unpulled arm an infinite index, so each arm is tried once before any
//! formula applies. Ties are broken uniformly at random from the context's
//! stream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    beta_cdf, beta_quantile, beta_sample, kl, kl_ucb_bisect, kl_ucb_lower_bound,
    kl_ucb_upper_bound, BetaParams, INDEX_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Smallest and largest Bayes-UCB quantile orders.
pub const BAYES_UCB_MIN_ORDER: f64 = 0.5;
pub const BAYES_UCB_MAX_ORDER: f64 = 1.0 - 1e-12;

/// Pull count and success count of one arm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmState {
    pulls: u64,
    successes: u64,
}

impl ArmState {
    pub fn new(pulls: u64, successes: u64) -> Result<Self> {
        if successes > pulls {
            return Err(Error::domain(format!(
                "successes {successes} exceed pulls {pulls}"
            )));
        }
        Ok(Self { pulls, successes })
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    /// Empirical mean, `None` before the first pull.
    pub fn mean(&self) -> Option<f64> {
        (self.pulls > 0).then(|| self.successes as f64 / self.pulls as f64)
    }

    pub fn posterior(&self) -> BetaParams {
        BetaParams::posterior(self.successes, self.pulls)
    }

    pub fn record(&mut self, reward: bool) {
        self.pulls += 1;
        self.successes += u64::from(reward);
    }
}

/// State after observing one more reward on this arm.
pub fn update(arm: ArmState, reward: bool) -> ArmState {
    let mut next = arm;
    next.record(reward);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    Thompson,
    Ucb1,
    UcbV,
    KlUcb,
    BayesUcb,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Thompson,
        PolicyKind::Ucb1,
        PolicyKind::UcbV,
        PolicyKind::KlUcb,
        PolicyKind::BayesUcb,
    ];

    /// Short lowercase name used in config files and output file names.
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Thompson => "thompson",
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::UcbV => "ucbv",
            PolicyKind::KlUcb => "klucb",
            PolicyKind::BayesUcb => "bayesucb",
        }
    }

    /// Whether the exploration term depends on the horizon.
    pub fn uses_horizon(self) -> bool {
        matches!(self, PolicyKind::KlUcb | PolicyKind::BayesUcb)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "thompson" | "ts" => Ok(PolicyKind::Thompson),
            "ucb1" | "ucb" => Ok(PolicyKind::Ucb1),
            "ucbv" => Ok(PolicyKind::UcbV),
            "klucb" => Ok(PolicyKind::KlUcb),
            "bayesucb" => Ok(PolicyKind::BayesUcb),
            _ => Err(Error::domain(format!("unknown policy `{s}`"))),
        }
    }
}

/// A policy together with the horizon its exploration term may need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolicySpec {
    kind: PolicyKind,
    horizon: u64,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, horizon: u64) -> Result<Self> {
        if kind.uses_horizon() && horizon < 3 {
            return Err(Error::domain(format!(
                "{kind} needs a horizon of at least 3, got {horizon}"
            )));
        }
        Ok(Self { kind, horizon })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

/// Everything a policy may look at when choosing the arm for one round.
pub struct SelectionContext<'a> {
    /// 1-based round number.
    pub round: u64,
    pub arms: &'a [ArmState],
    pub rng: &'a mut RngStream,
}

impl<'a> SelectionContext<'a> {
    pub fn new(round: u64, arms: &'a [ArmState], rng: &'a mut RngStream) -> Self {
        debug_assert!(round >= 1);
        debug_assert_eq!(arms.iter().map(|a| a.pulls).sum::<u64>(), round - 1);
        Self { round, arms, rng }
    }
}

/// Picks uniformly among `candidates`; consumes randomness only on a real tie.
fn break_tie(candidates: &[usize], rng: &mut RngStream) -> usize {
    match candidates {
        [only] => *only,
        _ => candidates[rng.below(candidates.len())],
    }
}

/// Index of the largest value, ties broken uniformly at random.
pub fn argmax_uniform(values: &[f64], rng: &mut RngStream) -> usize {
    argmax(values.iter().copied(), rng)
}

fn argmax(values: impl Iterator<Item = f64>, rng: &mut RngStream) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut ties = Vec::new();
    for (arm, v) in values.enumerate() {
        if v > best {
            best = v;
            ties.clear();
            ties.push(arm);
        } else if v == best {
            ties.push(arm);
        }
    }
    break_tie(&ties, rng)
}

/// Fills `out` with one posterior sample per arm, drawn in arm order.
pub fn thompson_samples_into(arms: &[ArmState], rng: &mut RngStream, out: &mut Vec<f64>) {
    out.clear();
    out.extend(arms.iter().map(|arm| beta_sample(arm.posterior(), rng)));
}

/// Draws one posterior sample per arm and plays the largest.
pub fn thompson_select(ctx: SelectionContext<'_>) -> usize {
    let SelectionContext { arms, rng, .. } = ctx;
    let mut samples = Vec::with_capacity(arms.len());
    thompson_samples_into(arms, rng, &mut samples);
    argmax_uniform(&samples, rng)
}

/// `mean + sqrt(2 ln t / n)`; infinite for an unpulled arm.
pub fn ucb1_index(arm: ArmState, round: u64) -> f64 {
    let Some(mean) = arm.mean() else {
        return f64::INFINITY;
    };
    mean + (2.0 * (round as f64).ln() / arm.pulls as f64).sqrt()
}

/// `k/n + sqrt(2 ln t / n * (k/n)(1 - k/n)) + 3 ln t / n`; infinite for an
/// unpulled arm.
pub fn ucbv_index(arm: ArmState, round: u64) -> f64 {
    let Some(mean) = arm.mean() else {
        return f64::INFINITY;
    };
    let n = arm.pulls as f64;
    let log_t = (round as f64).ln();
    mean + (2.0 * log_t / n * mean * (1.0 - mean)).sqrt() + 3.0 * log_t / n
}

/// Exploration budget `ln t + ln ln T`, floored at zero.
pub fn klucb_threshold(round: u64, horizon: u64) -> f64 {
    ((round as f64).ln() + (horizon as f64).ln().ln()).max(0.0)
}

/// KL-UCB index to within a tenth of [`INDEX_TOLERANCE`]; infinite for an
/// unpulled arm.
pub fn klucb_index(arm: ArmState, round: u64, horizon: u64) -> f64 {
    if arm.pulls == 0 {
        return f64::INFINITY;
    }
    let threshold = klucb_threshold(round, horizon);
    kl_ucb_bisect(arm.successes, arm.pulls, threshold, 0.1 * INDEX_TOLERANCE)
        .expect("arm state is well formed")
}

/// Quantile order `1 - 1/(t ln T)`, clamped to
/// `[BAYES_UCB_MIN_ORDER, BAYES_UCB_MAX_ORDER]`.
pub fn bayesucb_order(round: u64, horizon: u64) -> f64 {
    let order = 1.0 - 1.0 / (round as f64 * (horizon as f64).ln());
    if order.is_nan() {
        return BAYES_UCB_MIN_ORDER;
    }
    order.clamp(BAYES_UCB_MIN_ORDER, BAYES_UCB_MAX_ORDER)
}

/// Bayes-UCB index: posterior quantile of order [`bayesucb_order`].
/// Defined for unpulled arms too (uniform posterior).
pub fn bayesucb_index(arm: ArmState, round: u64, horizon: u64) -> f64 {
    beta_quantile(arm.posterior(), bayesucb_order(round, horizon))
        .expect("order is clamped inside (0, 1)")
}

/// Chooses an arm for `ctx.round` under `spec`.
pub fn select(spec: &PolicySpec, ctx: SelectionContext<'_>) -> usize {
    if spec.kind == PolicyKind::Thompson {
        return thompson_select(ctx);
    }
    let SelectionContext { round, arms, rng } = ctx;
    let unpulled: Vec<usize> = (0..arms.len()).filter(|&a| arms[a].pulls == 0).collect();
    if !unpulled.is_empty() {
        return break_tie(&unpulled, rng);
    }
    match spec.kind {
        PolicyKind::Ucb1 => argmax(arms.iter().map(|&a| ucb1_index(a, round)), rng),
        PolicyKind::UcbV => argmax(arms.iter().map(|&a| ucbv_index(a, round)), rng),
        PolicyKind::KlUcb => select_klucb(arms, round, spec.horizon, rng),
        PolicyKind::BayesUcb => select_bayesucb(arms, round, spec.horizon, rng),
        PolicyKind::Thompson => unreachable!(),
    }
}

/// Running argmax that lets the caller skip arms proven to lie strictly
/// below the current best.
struct Leader {
    best: f64,
    ties: Vec<usize>,
}

impl Leader {
    fn new() -> Self {
        Self {
            best: f64::NEG_INFINITY,
            ties: Vec::new(),
        }
    }

    fn offer(&mut self, arm: usize, value: f64) {
        if value > self.best {
            self.best = value;
            self.ties.clear();
            self.ties.push(arm);
        } else if value == self.best {
            self.ties.push(arm);
        }
    }
}

// Same argmax as computing every KL-UCB index. Arms are visited by the
// closed-form lower bound on their index, so the leader is usually found
// first; an arm is skipped only when its closed-form upper bound, or the
// divergence test at the current best, shows u < best.
fn select_klucb(arms: &[ArmState], round: u64, horizon: u64, rng: &mut RngStream) -> usize {
    let threshold = klucb_threshold(round, horizon);
    let mut order: Vec<(f64, f64, usize)> = arms
        .iter()
        .enumerate()
        .map(|(a, arm)| {
            let p = arm.successes as f64 / arm.pulls as f64;
            let level = threshold / arm.pulls as f64;
            (
                kl_ucb_lower_bound(p, level),
                kl_ucb_upper_bound(p, level),
                a,
            )
        })
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.2.cmp(&y.2)));

    let mut leader = Leader::new();
    for &(_, upper, a) in &order {
        if leader.best > upper {
            continue;
        }
        let arm = arms[a];
        let p = arm.successes as f64 / arm.pulls as f64;
        let level = threshold / arm.pulls as f64;
        if leader.best > p && kl(p, leader.best) > level {
            continue;
        }
        leader.offer(a, klucb_index(arm, round, horizon));
    }
    leader.ties.sort_unstable();
    break_tie(&leader.ties, rng)
}

// Skips an arm when its cdf just below the current best already exceeds the
// order, i.e. its quantile sits clearly under the best. The margin is far
// above the quantile tolerance so exact ties are still computed in full.
fn select_bayesucb(arms: &[ArmState], round: u64, horizon: u64, rng: &mut RngStream) -> usize {
    const MARGIN: f64 = 1e-9;
    let level = bayesucb_order(round, horizon);
    let mut order: Vec<(f64, usize)> = arms
        .iter()
        .enumerate()
        .map(|(a, arm)| {
            let params = arm.posterior();
            let mean = params.mean();
            let var = mean * (1.0 - mean) / (params.alpha() + params.beta() + 1) as f64;
            (mean + 3.0 * var.sqrt(), a)
        })
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut leader = Leader::new();
    for &(_, a) in &order {
        let params = arms[a].posterior();
        if leader.best > MARGIN && beta_cdf(params, leader.best - MARGIN) > level {
            continue;
        }
        leader.offer(a, bayesucb_index(arms[a], round, horizon));
    }
    leader.ties.sort_unstable();
    break_tie(&leader.ties, rng)
}

/// Every index for the given state, in arm order. Thompson has no index and
/// returns `None`.
pub fn indices(spec: &PolicySpec, arms: &[ArmState], round: u64) -> Option<Vec<f64>> {
    let f = |arm: &ArmState| match spec.kind {
        PolicyKind::Ucb1 => ucb1_index(*arm, round),
        PolicyKind::UcbV => ucbv_index(*arm, round),
        PolicyKind::KlUcb => klucb_index(*arm, round, spec.horizon),
        PolicyKind::BayesUcb if arm.pulls == 0 => f64::INFINITY,
        PolicyKind::BayesUcb => bayesucb_index(*arm, round, spec.horizon),
        PolicyKind::Thompson => unreachable!(),
    };
    (spec.kind != PolicyKind::Thompson).then(|| arms.iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arm(pulls: u64, successes: u64) -> ArmState {
        ArmState::new(pulls, successes).unwrap()
    }

    #[test]
    fn update_examples() {
        assert_eq!(update(arm(0, 0), true), arm(1, 1));
        assert_eq!(update(arm(5, 2), false), arm(6, 2));
        assert!(ArmState::new(2, 3).is_err());
    }

    #[test]
    fn ucb1_examples() {
        // mpmath: 0.5 + sqrt(ln 8)
        assert!((ucb1_index(arm(2, 1), 8) - 1.9420268866008830).abs() < 1e-12);
        assert_eq!(ucb1_index(arm(7, 3), 1), 3.0 / 7.0);
        assert!(ucb1_index(arm(4, 2), 50) > ucb1_index(arm(8, 4), 50));
        assert_eq!(ucb1_index(arm(0, 0), 5), f64::INFINITY);
    }

    #[test]
    fn ucbv_examples() {
        // mpmath: 0.5 + sqrt(2 ln 8 / 2 * 0.25) + 3 ln 8 / 2
        assert!((ucbv_index(arm(2, 1), 8) - 4.3401757558201954).abs() < 1e-12);
        let t = 37u64;
        let expected = 3.0 * (t as f64).ln() / 9.0;
        assert!((ucbv_index(arm(9, 0), t) - expected).abs() < 1e-15);
        assert_eq!(ucbv_index(arm(7, 3), 1), 3.0 / 7.0);
    }

    #[test]
    fn klucb_examples() {
        // ln ln T = ln 2  <=>  T = e^2; at t = 1 the threshold is ln 2.
        let threshold = klucb_threshold(1, 7);
        assert!(threshold > 0.0);
        let direct = crate::distributions::kl_ucb_index(0, 1, 2f64.ln()).unwrap();
        assert!((direct - 0.5).abs() < 1e-9);
        assert_eq!(klucb_index(arm(6, 6), 10, 100), 1.0);
        let mut prev = 0.0;
        for t in 1..200 {
            let u = klucb_index(arm(12, 5), t, 1000);
            assert!(u >= prev);
            prev = u;
        }
    }

    #[test]
    fn bayesucb_examples() {
        // order = 1 - 1/(2 ln 100), mpmath
        let q = bayesucb_index(arm(0, 0), 2, 100);
        assert!((q - 0.891426379524187043).abs() < 1e-10);
        let direct = beta_quantile(
            BetaParams::new(3, 3).unwrap(),
            1.0 - 1.0 / (10.0 * 1000f64.ln()),
        )
        .unwrap();
        assert!((bayesucb_index(arm(4, 2), 10, 1000) - direct).abs() < 1e-10);
        assert!(bayesucb_index(arm(4, 2), 10, 1000) < klucb_index(arm(4, 2), 10, 1000));
    }

    #[test]
    fn bayesucb_order_clamped() {
        assert_eq!(bayesucb_order(1, 100), 1.0 - 1.0 / 100f64.ln());
        assert_eq!(bayesucb_order(1, 3), BAYES_UCB_MIN_ORDER);
        assert_eq!(bayesucb_order(1, 1), BAYES_UCB_MIN_ORDER);
        assert_eq!(bayesucb_order(u64::MAX, u64::MAX), BAYES_UCB_MAX_ORDER);
    }

    #[test]
    fn horizon_guard() {
        assert!(PolicySpec::new(PolicyKind::KlUcb, 2).is_err());
        assert!(PolicySpec::new(PolicyKind::BayesUcb, 2).is_err());
        assert!(PolicySpec::new(PolicyKind::Ucb1, 2).is_ok());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert_eq!("KL-UCB".parse::<PolicyKind>().unwrap(), PolicyKind::KlUcb);
        assert!("dmed".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn unpulled_arm_dominates() {
        let arms = [arm(0, 0), arm(3, 3)];
        for kind in [
            PolicyKind::Ucb1,
            PolicyKind::UcbV,
            PolicyKind::KlUcb,
            PolicyKind::BayesUcb,
        ] {
            let spec = PolicySpec::new(kind, 100).unwrap();
            let mut rng = RngStream::new(1, 1);
            assert_eq!(select(&spec, SelectionContext::new(4, &arms, &mut rng)), 0);
        }
    }

    #[test]
    fn ucb1_picks_better_arm() {
        let arms = [arm(10, 9), arm(10, 1)];
        let spec = PolicySpec::new(PolicyKind::Ucb1, 100).unwrap();
        let mut rng = RngStream::new(1, 1);
        // the sums of pulls need not match the round for a direct index query
        assert_eq!(
            select(
                &spec,
                SelectionContext {
                    round: 100,
                    arms: &arms,
                    rng: &mut rng
                }
            ),
            0
        );
    }

    #[test]
    fn first_round_is_uniform() {
        let arms = [ArmState::default(); 4];
        for kind in PolicyKind::ALL {
            let spec = PolicySpec::new(kind, 1000).unwrap();
            let mut counts = [0usize; 4];
            let mut rng = RngStream::new(99, kind as u64);
            for _ in 0..8000 {
                counts[select(&spec, SelectionContext::new(1, &arms, &mut rng))] += 1;
            }
            // 2000 expected per arm, sd about 39
            for c in counts {
                assert!((c as f64 - 2000.0).abs() < 200.0, "{kind}: {counts:?}");
            }
        }
    }

    #[test]
    fn thompson_is_deterministic_given_rng() {
        let arms = [arm(4, 2), arm(5, 3), arm(3, 1)];
        let spec = PolicySpec::new(PolicyKind::Thompson, 100).unwrap();
        let rng = RngStream::new(5, 5);
        let a = select(&spec, SelectionContext::new(13, &arms, &mut rng.clone()));
        let b = select(&spec, SelectionContext::new(13, &arms, &mut rng.clone()));
        assert_eq!(a, b);
    }

    #[test]
    fn thompson_prefers_clearly_better_arm() {
        let arms = [arm(1000, 900), arm(1000, 100)];
        let spec = PolicySpec::new(PolicyKind::Thompson, 100).unwrap();
        let mut rng = RngStream::new(17, 0);
        let hits = (0..10_000)
            .filter(|_| select(&spec, SelectionContext::new(2001, &arms, &mut rng)) == 0)
            .count();
        assert!(hits as f64 / 10_000.0 >= 0.999);
    }

    #[test]
    fn pruned_selection_matches_full_argmax() {
        let mut gen = RngStream::new(3, 3);
        for _ in 0..2000 {
            let k = 2 + gen.below(8);
            let arms: Vec<ArmState> = (0..k)
                .map(|_| {
                    let n = 1 + gen.below(300) as u64;
                    arm(n, gen.below(n as usize + 1) as u64)
                })
                .collect();
            let round = arms.iter().map(|a| a.pulls()).sum::<u64>() + 1;
            for kind in [PolicyKind::KlUcb, PolicyKind::BayesUcb] {
                let spec = PolicySpec::new(kind, 20_000).unwrap();
                let idx = indices(&spec, &arms, round).unwrap();
                let best = idx.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut rng = RngStream::new(0, 0);
                let chosen = select(&spec, SelectionContext::new(round, &arms, &mut rng));
                assert!(best - idx[chosen] <= 1e-9, "{kind} {arms:?}");
            }
        }
    }

    #[test]
    fn identical_arms_tie_uniformly_under_pruning() {
        let arms = [arm(10, 4), arm(10, 4), arm(10, 1)];
        for kind in [PolicyKind::KlUcb, PolicyKind::BayesUcb, PolicyKind::Ucb1] {
            let spec = PolicySpec::new(kind, 1000).unwrap();
            let mut rng = RngStream::new(8, 8);
            let mut counts = [0usize; 3];
            for _ in 0..2000 {
                counts[select(&spec, SelectionContext::new(31, &arms, &mut rng))] += 1;
            }
            assert_eq!(counts[2], 0, "{kind}");
            assert!(counts[0] > 850 && counts[1] > 850, "{kind}: {counts:?}");
        }
    }
}
