//! Named invariant suites, runnable from the command line.
//!
//! Each suite walks a fixed grid (or a fixed pseudo-random sample) and stops
//! at the first case that violates its invariant.

use std::fmt;
use std::str::FromStr;

use crate::analysis::{
    c_lambda, compute_constants, d_lambda, d_lambda_affine, lambda0_alternative, lambda1, lambda2,
    lemma3_bound, lemma3_lhs_exact, prop1_tail_curve, r_lambda, Lemma3Input,
};
use crate::distributions::{beta_cdf, binom_cdf, kl, kl_ucb_index, BetaParams};
use crate::error::Error;
use crate::policies::{bayesucb_index, klucb_index, ArmState};
use crate::rng::RngStream;
use crate::simulator::BanditInstance;

/// Tolerance for the Beta-Binomial identity.
pub const BETA_BINOMIAL_TOLERANCE: f64 = 1e-10;
/// Agreement required between the bisection index and the grid search.
pub const KL_GRID_AGREEMENT: f64 = 2e-6;
/// Residual allowed on `n K(s/n, u) = threshold` when the constraint binds.
pub const KL_RESIDUAL_TOLERANCE: f64 = 1e-8;
pub const D1_TOLERANCE: f64 = 1e-12;
pub const LAMBDA0_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    BetaBinomial,
    KlInversion,
    IndexDominance,
    Lemma3,
    LambdaGrid,
    Prop1Tail,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::BetaBinomial,
        Suite::KlInversion,
        Suite::IndexDominance,
        Suite::Lemma3,
        Suite::LambdaGrid,
        Suite::Prop1Tail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::BetaBinomial => "beta-binomial",
            Suite::KlInversion => "kl-inversion",
            Suite::IndexDominance => "index-dominance",
            Suite::Lemma3 => "lemma3",
            Suite::LambdaGrid => "lambda-grid",
            Suite::Prop1Tail => "prop1-tail",
        }
    }

    pub fn run(self) -> Result<SuiteReport, CheckFailure> {
        match self {
            Suite::BetaBinomial => beta_binomial(),
            Suite::KlInversion => kl_inversion(1000, 0x5eed),
            Suite::IndexDominance => index_dominance(10_000, 0x5eed),
            Suite::Lemma3 => lemma3_grid(),
            Suite::LambdaGrid => lambda_grid(),
            Suite::Prop1Tail => prop1_tail(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: u64,
    /// Informational lines (worst errors, estimates).
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub suite: Suite,
    pub case: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.suite, self.case)
    }
}

impl std::error::Error for CheckFailure {}

fn fail(suite: Suite, case: String) -> CheckFailure {
    CheckFailure { suite, case }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(m);
    for i in 1..=m {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Beta cdf by quadrature of the density. For integer parameters with
/// `a + b <= 2 * rule.len() + 1` the integrand is a polynomial the rule
/// integrates exactly.
pub fn beta_cdf_quadrature(a: u64, b: u64, y: f64, rule: &[(f64, f64)]) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let ln_norm = libm::lgamma((a + b) as f64) - libm::lgamma(a as f64) - libm::lgamma(b as f64);
    let half = 0.5 * y;
    let sum: f64 = rule
        .iter()
        .map(|&(node, weight)| {
            let x = half * (node + 1.0);
            weight * ((a - 1) as f64 * x.ln() + (b - 1) as f64 * (-x).ln_1p() + ln_norm).exp()
        })
        .sum();
    half * sum
}

fn beta_binomial() -> Result<SuiteReport, CheckFailure> {
    let suite = Suite::BetaBinomial;
    let rule = gauss_legendre(64);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for a in 1..=50u64 {
        for b in 1..=50u64 {
            let params = BetaParams::new(a, b).expect("positive");
            for k in 1..=99 {
                let y = k as f64 / 100.0;
                let via_identity = 1.0 - binom_cdf(a + b - 1, y, a as i64 - 1);
                let direct = beta_cdf(params, y);
                let oracle = beta_cdf_quadrature(a, b, y, &rule);
                let err = (direct - oracle).abs().max((via_identity - oracle).abs());
                worst = worst.max(err);
                cases += 1;
                if err > BETA_BINOMIAL_TOLERANCE {
                    return Err(fail(
                        suite,
                        format!(
                            "a={a} b={b} y={y}: identity {via_identity:e}, quadrature {oracle:e}"
                        ),
                    ));
                }
            }
        }
    }
    // the binomial median sits at floor(jy) or ceil(jy)
    for j in 1..=200u64 {
        for k in 1..=99 {
            let y = k as f64 / 100.0;
            let s = (y * j as f64).ceil() as i64;
            cases += 1;
            if binom_cdf(j, y, s) < 0.5 {
                return Err(fail(suite, format!("median: F_Bin({j}, {y}; {s}) < 1/2")));
            }
        }
    }
    Ok(SuiteReport {
        suite,
        cases,
        notes: vec![format!("max |identity - quadrature| = {worst:.3e}")],
    })
}

/// Largest point of the `step` grid on `[p, 1]` where `n K(p, x) <= threshold`.
///
/// The feasible set is an interval starting at `p`, so a coarse pass locates
/// the last feasible cell and a fine pass scans it point by point.
pub fn kl_index_grid_search(s: u64, n: u64, threshold: f64, step: f64) -> f64 {
    let p = s as f64 / n as f64;
    let feasible = |x: f64| n as f64 * kl(p, x) <= threshold;
    let coarse = 1000.0 * step;
    let mut base = p;
    while base + coarse <= 1.0 && feasible(base + coarse) {
        base += coarse;
    }
    let mut best = base;
    let mut i = 1u64;
    loop {
        let x = base + i as f64 * step;
        if x > 1.0 || x > base + coarse || !feasible(x) {
            break;
        }
        best = x;
        i += 1;
    }
    best
}

/// Random `(s, n, threshold)` with `n` in `1..=1000` and threshold in `[0, 10)`.
pub fn random_kl_case(rng: &mut RngStream) -> (u64, u64, f64) {
    let n = 1 + rng.below(1000) as u64;
    let s = rng.below(n as usize + 1) as u64;
    (s, n, 10.0 * rng.uniform())
}

pub fn kl_inversion(cases: u64, seed: u64) -> Result<SuiteReport, CheckFailure> {
    let suite = Suite::KlInversion;
    let mut rng = RngStream::new(seed, 1);
    let mut worst_gap = 0.0f64;
    let mut worst_residual = 0.0f64;
    for _ in 0..cases {
        let (s, n, threshold) = random_kl_case(&mut rng);
        let index = kl_ucb_index(s, n, threshold).expect("valid case");
        let grid = kl_index_grid_search(s, n, threshold, 1e-6);
        let gap = (index - grid).abs();
        worst_gap = worst_gap.max(gap);
        if gap > KL_GRID_AGREEMENT {
            return Err(fail(
                suite,
                format!("s={s} n={n} f={threshold}: bisection {index}, grid {grid}"),
            ));
        }
        let p = s as f64 / n as f64;
        if index < 1.0 && threshold > 0.0 {
            let residual = (n as f64 * kl(p, index) - threshold).abs();
            worst_residual = worst_residual.max(residual);
            if residual > KL_RESIDUAL_TOLERANCE {
                return Err(fail(
                    suite,
                    format!("s={s} n={n} f={threshold}: residual {residual:e}"),
                ));
            }
        }
    }
    Ok(SuiteReport {
        suite,
        cases,
        notes: vec![
            format!("max |bisection - grid| = {worst_gap:.3e}"),
            format!("max constraint residual = {worst_residual:.3e}"),
        ],
    })
}

/// Random arm state, round and horizon: pulls in `1..=10^4`, `t` in
/// `1..=2*10^4`, `T` in `10..=10^5`.
pub fn random_index_case(rng: &mut RngStream) -> (ArmState, u64, u64) {
    let pulls = 1 + rng.below(10_000) as u64;
    let successes = rng.below(pulls as usize + 1) as u64;
    let round = 1 + rng.below(20_000) as u64;
    let horizon = 10 + rng.below(100_000 - 10 + 1) as u64;
    (
        ArmState::new(pulls, successes).expect("valid"),
        round,
        horizon,
    )
}

pub fn index_dominance(cases: u64, seed: u64) -> Result<SuiteReport, CheckFailure> {
    let suite = Suite::IndexDominance;
    let mut rng = RngStream::new(seed, 2);
    let mut closest = f64::INFINITY;
    for _ in 0..cases {
        let (arm, round, horizon) = random_index_case(&mut rng);
        let q = bayesucb_index(arm, round, horizon);
        let u = klucb_index(arm, round, horizon);
        closest = closest.min(u - q);
        if !(q < u) {
            return Err(fail(
                suite,
                format!("{arm:?} t={round} T={horizon}: q={q} >= u={u}"),
            ));
        }
    }
    Ok(SuiteReport {
        suite,
        cases,
        notes: vec![format!("min u - q = {closest:.3e}")],
    })
}

/// `(mu1, mu2)` pairs on which the interval lemma is checked.
pub const LEMMA3_PAIRS: [(f64, f64); 3] = [(0.9, 0.8), (0.25, 0.2), (0.5, 0.3)];
pub const LEMMA3_J: [u64; 4] = [1, 10, 100, 1000];
pub const LEMMA3_F: [f64; 3] = [5.0, 50.0, 500.0];

fn lemma3_grid() -> Result<SuiteReport, CheckFailure> {
    let suite = Suite::Lemma3;
    let mut cases = 0;
    let mut tightest = f64::INFINITY;
    for (mu1, mu2) in LEMMA3_PAIRS {
        let c =
            compute_constants(mu1, mu2, 0.1, 100, 0.5).map_err(|e| fail(suite, e.to_string()))?;
        let lambda = c.lambda_mid();
        for j in LEMMA3_J {
            for f in LEMMA3_F {
                let input = Lemma3Input { j, f, lambda };
                let lhs = lemma3_lhs_exact(&input, c.mu1, c.y);
                let rhs = lemma3_bound(&input, &c).map_err(|e| fail(suite, e.to_string()))?;
                cases += 1;
                tightest = tightest.min(rhs / lhs.max(f64::MIN_POSITIVE));
                if lhs > rhs {
                    return Err(fail(
                        suite,
                        format!("mu=({mu1}, {mu2}) j={j} f={f} lambda={lambda}: {lhs:e} > {rhs:e}"),
                    ));
                }
            }
        }
    }
    let spot = lemma3_lhs_exact(
        &Lemma3Input {
            j: 1,
            f: 1.0,
            lambda: 1.01,
        },
        0.9,
        0.85,
    );
    cases += 1;
    if (spot - 0.748).abs() > 1e-10 {
        return Err(fail(suite, format!("spot value {spot} != 0.748")));
    }
    Ok(SuiteReport {
        suite,
        cases,
        notes: vec![format!("smallest bound / exact ratio = {tightest:.4}")],
    })
}

/// The 50 interior points `i / 51`.
pub fn unit_grid_50() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 51.0).collect()
}

fn lambda_grid() -> Result<SuiteReport, CheckFailure> {
    let suite = Suite::LambdaGrid;
    let grid = unit_grid_50();
    let mut cases = 0;

    for &mu1 in &grid {
        for &y in grid.iter().filter(|&&y| y < mu1) {
            cases += 1;
            let d1 = d_lambda(1.0, y, mu1);
            if (d1 - kl(y, mu1)).abs() > D1_TOLERANCE {
                return Err(fail(
                    suite,
                    format!("d_1({y}, {mu1}) = {d1} != K = {}", kl(y, mu1)),
                ));
            }
            let affine = d_lambda_affine(1.3, y, mu1);
            if (affine - d_lambda(1.3, y, mu1)).abs() > 1e-12 {
                return Err(fail(
                    suite,
                    format!("affine form of d_lambda disagrees at ({y}, {mu1})"),
                ));
            }
        }
    }

    let mut worst = 0.0f64;
    for &mu1 in &grid {
        for &mu2 in grid.iter().filter(|&&m| m < mu1) {
            cases += 1;
            let y = mu2 + (mu1 - mu2) / 2.0;
            let (l1, l2) = (lambda1(mu1, y), lambda2(mu1, y));
            if !(l2 > 1.0) {
                return Err(fail(suite, format!("lambda2({mu1}, {mu2}) = {l2} <= 1")));
            }
            if l2 > l1 {
                return Err(fail(
                    suite,
                    format!("lambda2 {l2} > lambda1 {l1} at ({mu1}, {mu2})"),
                ));
            }
            let alt = lambda0_alternative(mu1, mu2).expect("valid pair");
            worst = worst.max((alt - l2).abs());
            if (alt - l2).abs() > LAMBDA0_TOLERANCE {
                return Err(fail(
                    suite,
                    format!("lambda0 forms {alt} vs {l2} at ({mu1}, {mu2})"),
                ));
            }
            // R_lambda > 1 on (1, lambda1)
            let top = l1.min(10.0);
            for k in 1..10 {
                let lambda = 1.0 + (top - 1.0) * k as f64 / 10.0;
                if r_lambda(lambda, mu1, y) <= 1.0 {
                    return Err(fail(suite, format!("R_{lambda}({mu1}, {y}) <= 1")));
                }
            }
        }
    }

    for k in 1..=40 {
        let lambda = 1.0 + k as f64 / 10.0;
        let cap = c_lambda(lambda);
        for e in -60..=60 {
            let x = 10f64.powf(e as f64 / 20.0);
            cases += 1;
            if x.powf(lambda) * (-x).exp() > cap * (1.0 + 1e-12) {
                return Err(fail(
                    suite,
                    format!("x^l e^-x > (l/e)^l at x={x}, l={lambda}"),
                ));
            }
        }
    }
    Ok(SuiteReport {
        suite,
        cases,
        notes: vec![format!("max |lambda0 forms| = {worst:.3e}")],
    })
}

/// Monte Carlo limits for the optimal-arm tail.
pub const PROP1_MAX_ESTIMATE: f64 = 0.01;

fn prop1_tail() -> Result<SuiteReport, CheckFailure> {
    let suite = Suite::Prop1Tail;
    let instance = BanditInstance::new(vec![0.9, 0.1]).expect("valid");
    let curve = prop1_tail_curve(&instance, 0.3, &[500, 1000, 2000], 10_000, 0x7a11)
        .map_err(|e| fail(suite, e.to_string()))?;
    let (early, mid, late) = (curve[0], curve[1], curve[2]);
    if mid.estimate > PROP1_MAX_ESTIMATE {
        return Err(fail(
            suite,
            format!("P(N_1(1000) <= 1000^0.3) = {} > 0.01", mid.estimate),
        ));
    }
    let slack = 3.0 * (early.std_error.powi(2) + late.std_error.powi(2)).sqrt();
    if late.estimate > early.estimate + slack {
        return Err(fail(
            suite,
            format!(
                "estimate grows: t=2000 {} > t=500 {} + {slack}",
                late.estimate, early.estimate
            ),
        ));
    }
    Ok(SuiteReport {
        suite,
        cases: 3,
        notes: curve
            .iter()
            .map(|e| format!("t={} estimate={} se={:.2e}", e.t, e.estimate, e.std_error))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_on_polynomials() {
        let rule = gauss_legendre(64);
        let total: f64 = rule.iter().map(|w| w.1).sum();
        assert!((total - 2.0).abs() < 1e-13);
        // Beta(2,1) cdf is y^2, Beta(1,3) cdf is 1 - (1-y)^3
        assert!((beta_cdf_quadrature(2, 1, 0.3, &rule) - 0.09).abs() < 1e-14);
        assert!((beta_cdf_quadrature(1, 3, 0.3, &rule) - (1.0 - 0.7f64.powi(3))).abs() < 1e-14);
    }

    #[test]
    fn grid_search_finds_known_root() {
        // K(0, x) = -ln(1 - x) = ln 2 at x = 1/2
        let x = kl_index_grid_search(0, 1, 2f64.ln(), 1e-6);
        assert!((x - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn suite_names_parse() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nosuch".parse::<Suite>().is_err());
    }

    #[test]
    fn small_random_suites_pass() {
        kl_inversion(50, 3).unwrap();
        index_dominance(200, 3).unwrap();
    }
}
