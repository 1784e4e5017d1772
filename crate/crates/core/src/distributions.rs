//! Bernoulli, Binomial and Beta primitives.
//!
//! Everything here works with integer Beta parameters, which is all a
//! uniform-prior Bernoulli posterior ever needs. The Beta cdf is evaluated
//! through the Binomial tail, `F_Beta(a, b; y) = P(Bin(a + b - 1, y) >= a)`,
//! and the Binomial tails are summed term by term from the start point
//! outward, so the work is proportional to the number of terms that matter.

use std::fmt;

use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Absolute tolerance guaranteed on quantiles returned by [`beta_quantile`].
pub const QUANTILE_TOLERANCE: f64 = 1e-10;

/// Absolute tolerance guaranteed on values returned by [`kl_ucb_index`].
pub const INDEX_TOLERANCE: f64 = 1e-9;

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidProbability(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Integer parameters of a Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BetaParams {
    alpha: u64,
    beta: u64,
}

impl BetaParams {
    pub fn new(alpha: u64, beta: u64) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::domain(format!(
                "Beta parameters must be >= 1, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Uniform-prior posterior after `successes` out of `pulls`.
    pub fn posterior(successes: u64, pulls: u64) -> Self {
        debug_assert!(successes <= pulls);
        Self {
            alpha: successes + 1,
            beta: pulls - successes + 1,
        }
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha as f64 / (self.alpha + self.beta) as f64
    }
}

/// Bernoulli Kullback-Leibler divergence `K(p, q)`.
///
/// Uses `0 ln 0 = 0`. Returns `+inf` when `q` is 0 or 1 and differs from `p`.
pub fn kl(p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    if q <= 0.0 || q >= 1.0 {
        return f64::INFINITY;
    }
    let head = if p > 0.0 { p * (p / q).ln() } else { 0.0 };
    let tail = if p < 1.0 {
        (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
    } else {
        0.0
    };
    (head + tail).max(0.0)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

fn ln_binom_pmf(j: u64, y: f64, s: u64) -> f64 {
    let mut lp = ln_choose(j, s);
    if s > 0 {
        lp += s as f64 * y.ln();
    }
    if s < j {
        lp += (j - s) as f64 * (-y).ln_1p();
    }
    lp
}

/// Probability that a Binomial(`j`, `y`) variable equals `s`.
pub fn binom_pmf(j: u64, y: f64, s: u64) -> Result<f64> {
    if s > j {
        return Err(Error::domain(format!(
            "binomial outcome {s} outside 0..={j}"
        )));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::InvalidProbability(y));
    }
    if y == 0.0 {
        return Ok(if s == 0 { 1.0 } else { 0.0 });
    }
    if y == 1.0 {
        return Ok(if s == j { 1.0 } else { 0.0 });
    }
    Ok(ln_binom_pmf(j, y, s).exp())
}

/// Neumaier compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `P(X <= s)` and `P(X > s)` for `X ~ Bin(j, y)`, `s < j`, `0 < y < 1`.
///
/// Sums whichever tail starts on the decreasing side of the mode and stops
/// once the geometric bound on the remainder drops below the rounding level.
fn binom_tails(j: u64, y: f64, s: u64) -> (f64, f64) {
    debug_assert!(s < j && y > 0.0 && y < 1.0);
    let mode = ((j + 1) as f64 * y).floor() as u64;
    let odds = y / (1.0 - y);
    let mut acc = CompensatedSum::default();
    let mut term = ln_binom_pmf(j, y, if s < mode { s } else { s + 1 }).exp();
    if s < mode {
        // pmf(i - 1) / pmf(i) = i / ((j - i + 1) odds), decreasing as i falls.
        let mut i = s;
        loop {
            acc.add(term);
            if i == 0 || term == 0.0 {
                break;
            }
            let ratio = i as f64 / ((j - i + 1) as f64 * odds);
            if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 * acc.value() {
                break;
            }
            term *= ratio;
            i -= 1;
        }
        let lower = acc.value().min(1.0);
        (lower, 1.0 - lower)
    } else {
        // pmf(i + 1) / pmf(i) = (j - i) odds / (i + 1), decreasing as i grows.
        let mut i = s + 1;
        loop {
            acc.add(term);
            if i == j || term == 0.0 {
                break;
            }
            let ratio = (j - i) as f64 * odds / (i + 1) as f64;
            if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 * acc.value() {
                break;
            }
            term *= ratio;
            i += 1;
        }
        let upper = acc.value().min(1.0);
        (1.0 - upper, upper)
    }
}

/// `P(X <= s)` for `X ~ Bin(j, y)`. Total in `s`: negative `s` gives 0 and
/// `s >= j` gives 1.
pub fn binom_cdf(j: u64, y: f64, s: i64) -> f64 {
    if s < 0 {
        return 0.0;
    }
    let s = s as u64;
    if s >= j {
        return 1.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    if y >= 1.0 {
        return 0.0;
    }
    binom_tails(j, y, s).0
}

/// `P(X > s)` for `X ~ Bin(j, y)`, summed directly rather than as `1 - cdf`
/// whenever that tail is the short one.
pub fn binom_sf(j: u64, y: f64, s: i64) -> f64 {
    if s < 0 {
        return 1.0;
    }
    let s = s as u64;
    if s >= j {
        return 0.0;
    }
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    binom_tails(j, y, s).1
}

/// Beta cdf for integer parameters, via `1 - F_Bin(a + b - 1, y; a - 1)`.
pub fn beta_cdf(params: BetaParams, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let n = params.alpha + params.beta - 1;
    // beta >= 1 keeps alpha - 1 < n.
    binom_tails(n, y, params.alpha - 1).1
}

/// Quantile of order `order` of a Beta distribution, by bisection on
/// [`beta_cdf`] to within [`QUANTILE_TOLERANCE`].
pub fn beta_quantile(params: BetaParams, order: f64) -> Result<f64> {
    if !(order > 0.0 && order < 1.0) {
        return Err(Error::domain(format!(
            "quantile order {order} outside (0, 1)"
        )));
    }
    let (mut lo, mut hi) = quantile_bracket(params, order);
    while hi - lo > 0.05 * QUANTILE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_cdf(params, mid) < order {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// Upper-order quantiles get a narrower starting bracket. With n = a + b - 1
// and p = (a - 1)/n, the Chernoff bound P(Bin(n, x) <= a - 1) <=
// exp(-n K(p, x)) puts the quantile below the KL-UCB bound for budget
// ln(1/(1 - order)); both ends are checked against the cdf before use.
fn quantile_bracket(params: BetaParams, order: f64) -> (f64, f64) {
    if order < 0.5 {
        return (0.0, 1.0);
    }
    let n = (params.alpha + params.beta - 1) as f64;
    let p = (params.alpha - 1) as f64 / n;
    let hi = kl_ucb_upper_bound(p, -(-order).ln_1p() / n);
    let hi = if hi < 1.0 && beta_cdf(params, hi) >= order {
        hi
    } else {
        1.0
    };
    let lo = if p > 0.0 && beta_cdf(params, p) < order {
        p
    } else {
        0.0
    };
    (lo, hi)
}

/// One draw from `Beta(alpha, beta)`, strictly inside `(0, 1)`.
pub fn beta_sample(params: BetaParams, rng: &mut RngStream) -> f64 {
    let dist = Beta::new(params.alpha as f64, params.beta as f64)
        .expect("integer parameters >= 1 are valid");
    let x: f64 = dist.sample(rng);
    x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Closed-form upper bound on the KL-UCB index for empirical mean `p` and
/// per-sample budget `level = threshold / n`.
///
/// Combines Pinsker, `K(p, q) >= 2 (q - p)^2`, with the sharper bound for
/// small means, `K(p, q) >= (q - p)^2 / (2q)` for `q >= p`.
pub fn kl_ucb_upper_bound(p: f64, level: f64) -> f64 {
    let pinsker = p + (level / 2.0).sqrt();
    let bernstein = p + level + (2.0 * p * level + level * level).sqrt();
    pinsker.min(bernstein).min(1.0)
}

/// Closed-form lower bound on the KL-UCB index, from `K(p, q) <= (q - p)^2 /
/// (q (1 - q))`: every point up to the larger root of
/// `(x - p)^2 = level x (1 - x)` is feasible.
pub fn kl_ucb_lower_bound(p: f64, level: f64) -> f64 {
    let b = 2.0 * p + level;
    let disc = (b * b - 4.0 * (1.0 + level) * p * p).max(0.0);
    ((b + disc.sqrt()) / (2.0 * (1.0 + level))).clamp(p, 1.0)
}

/// KL-UCB upper confidence index: the largest `x` in `[s/n, 1]` with
/// `n * K(s/n, x) <= threshold`.
///
/// Bisection runs to the resolution of `f64`, well inside
/// [`INDEX_TOLERANCE`]; the returned point always satisfies the constraint.
pub fn kl_ucb_index(s: u64, n: u64, threshold: f64) -> Result<f64> {
    kl_ucb_bisect(s, n, threshold, 0.0)
}

/// Bisection for [`kl_ucb_index`] stopping once the bracket is narrower than
/// `width` (or at `f64` resolution). Returns the feasible end of the bracket.
pub(crate) fn kl_ucb_bisect(s: u64, n: u64, threshold: f64, width: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("KL-UCB index undefined for n = 0"));
    }
    if s > n {
        return Err(Error::domain(format!("successes {s} exceed pulls {n}")));
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::domain(format!(
            "exploration threshold must be >= 0, got {threshold}"
        )));
    }
    let p = s as f64 / n as f64;
    if s == n {
        return Ok(1.0);
    }
    if threshold == 0.0 {
        return Ok(p);
    }
    let level = threshold / n as f64;
    // hi is never strictly feasible: kl(p, 1) is infinite for p < 1, and the
    // closed-form bound only overestimates the root.
    let hi_start = kl_ucb_upper_bound(p, level);
    let lo_start = kl_ucb_lower_bound(p, level).min(hi_start);
    let (mut lo, mut hi) = if kl(p, lo_start) <= level {
        (lo_start, hi_start)
    } else {
        (p, hi_start)
    };
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kl(p, mid) <= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl(0.3, 0.3), 0.0);
        // mpmath, 30 digits
        assert!(close(
            kl(0.5, 0.25),
            0.143841036225890463719609502997,
            1e-15
        ));
        assert_eq!(kl(0.2, 1.0), f64::INFINITY);
        assert_eq!(kl(0.2, 0.0), f64::INFINITY);
        assert_eq!(kl(0.0, 0.0), 0.0);
        assert!(close(kl(0.0, 0.5), 2f64.ln(), 1e-15));
        assert!(close(kl(1.0, 0.5), 2f64.ln(), 1e-15));
    }

    #[test]
    fn probability_rejects_out_of_range() {
        assert!(Probability::new(1.5).is_err());
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::new(0.25).unwrap().value(), 0.25);
    }

    #[test]
    fn beta_params_reject_zero() {
        assert!(BetaParams::new(0, 3).is_err());
        assert!(BetaParams::new(3, 0).is_err());
        assert_eq!(BetaParams::posterior(2, 5), BetaParams::new(3, 4).unwrap());
    }

    #[test]
    fn pmf_examples() {
        assert!(close(binom_pmf(2, 0.5, 1).unwrap(), 0.5, 1e-15));
        assert!(close(binom_pmf(1, 0.3, 0).unwrap(), 0.7, 1e-15));
        // C(10,3) 0.2^3 0.8^7, evaluated as an exact rational product
        let direct = 120.0 * 0.2f64.powi(3) * 0.8f64.powi(7);
        assert!(close(binom_pmf(10, 0.2, 3).unwrap(), 0.201326592, 1e-13));
        assert!(close(direct, 0.201326592, 1e-13));
        assert!(binom_pmf(3, 0.5, 4).is_err());
        assert!(binom_pmf(3, 1.5, 1).is_err());
    }

    #[test]
    fn pmf_large_j_is_finite() {
        let p = binom_pmf(1_000_000, 0.3, 300_000).unwrap();
        assert!(p > 0.0 && p < 1e-2, "{p}");
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(binom_cdf(7, 0.4, 7), 1.0);
        assert_eq!(binom_cdf(7, 0.4, -1), 0.0);
        assert!(close(binom_cdf(2, 0.85, 0), 0.0225, 1e-15));
        assert!(close(binom_cdf(2, 0.85, 1), 0.2775, 1e-15));
    }

    #[test]
    fn cdf_matches_pmf_sum() {
        for &(j, y) in &[(30u64, 0.1), (30, 0.5), (200, 0.93), (1, 0.4)] {
            let mut running = 0.0;
            for s in 0..j {
                running += binom_pmf(j, y, s).unwrap();
                assert!(
                    close(binom_cdf(j, y, s as i64), running, 1e-13),
                    "{j} {y} {s}"
                );
            }
        }
    }

    #[test]
    fn beta_cdf_examples() {
        let uniform = BetaParams::new(1, 1).unwrap();
        for y in [0.0, 0.1, 0.37, 0.5, 0.99, 1.0] {
            assert!(close(beta_cdf(uniform, y), y, 1e-15));
        }
        assert!(close(
            beta_cdf(BetaParams::new(2, 1).unwrap(), 0.5),
            0.25,
            1e-15
        ));
        let b34 = BetaParams::new(3, 4).unwrap();
        assert!(close(beta_cdf(b34, 0.3), 1.0 - binom_cdf(6, 0.3, 2), 1e-15));
    }

    #[test]
    fn quantile_examples() {
        let q = beta_quantile(BetaParams::new(1, 1).unwrap(), 0.37).unwrap();
        assert!(close(q, 0.37, QUANTILE_TOLERANCE));
        let q = beta_quantile(BetaParams::new(2, 1).unwrap(), 0.25).unwrap();
        assert!(close(q, 0.5, QUANTILE_TOLERANCE));
        assert!(beta_quantile(BetaParams::new(2, 1).unwrap(), 0.0).is_err());
        assert!(beta_quantile(BetaParams::new(2, 1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn quantile_matches_bisection_oracle() {
        // Oracle: plain bisection on the cdf to 1e-14 width, independent of
        // the stopping rule used above.
        let params = BetaParams::new(5, 3).unwrap();
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if beta_cdf(params, mid) < 0.9 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let q = beta_quantile(params, 0.9).unwrap();
        assert!(close(q, lo, QUANTILE_TOLERANCE));
        assert!(close(beta_cdf(params, q), 0.9, 1e-9));
    }

    #[test]
    fn sample_is_reproducible_and_interior() {
        let params = BetaParams::new(3, 7).unwrap();
        let a = beta_sample(params, &mut RngStream::new(11, 5));
        let b = beta_sample(params, &mut RngStream::new(11, 5));
        assert_eq!(a, b);
        let mut rng = RngStream::new(12, 0);
        for _ in 0..1000 {
            let x = beta_sample(BetaParams::new(1, 5000).unwrap(), &mut rng);
            assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn kl_ucb_index_examples() {
        assert_eq!(kl_ucb_index(5, 5, 3.0).unwrap(), 1.0);
        assert_eq!(kl_ucb_index(2, 5, 0.0).unwrap(), 0.4);
        // K(0, x) = -ln(1 - x) = ln 2  =>  x = 1/2
        assert!(close(
            kl_ucb_index(0, 1, 2f64.ln()).unwrap(),
            0.5,
            INDEX_TOLERANCE
        ));
        assert!(kl_ucb_index(0, 0, 1.0).is_err());
        assert!(kl_ucb_index(3, 2, 1.0).is_err());
    }
}
