//! Composition model: per-step success `p·x` raised to the sequence length,
//! averaged over length buckets weighted by task count.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{to_f64, StatsError};

/// Target accuracy in `y` for the inverse estimate.
pub const Y_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBucket<F> {
    /// Sequence length, 1..=10.
    pub n: u32,
    /// Number of tasks with this length.
    pub w: F,
    /// Observed accuracy at this length.
    pub a: F,
}

impl<F: Float> LengthBucket<F> {
    pub fn new(n: u32, w: F, a: F) -> Result<Self, StatsError> {
        let bucket = LengthBucket { n, w, a };
        bucket.check()?;
        Ok(bucket)
    }

    fn check(&self) -> Result<(), StatsError> {
        let n = self.n;
        if !(1..=10).contains(&n) {
            return Err(StatsError::InvalidBucket { n, reason: "length must be in 1..=10" });
        }
        if self.w.is_nan() || self.w < F::zero() || !self.w.is_finite() {
            return Err(StatsError::InvalidBucket { n, reason: "weight must be finite and non-negative" });
        }
        if !(self.a >= F::zero() && self.a <= F::one()) {
            return Err(StatsError::InvalidBucket { n, reason: "accuracy must be in [0, 1]" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionEstimate<F> {
    pub p: F,
    pub x: F,
    pub y: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealEstimate<F> {
    pub x_hat: F,
    /// Predicted solve rate with perfect single-step accuracy.
    pub y_at_p1: F,
}

fn total_weight<F: Float>(buckets: &[LengthBucket<F>]) -> Result<F, StatsError> {
    let mut total = F::zero();
    for b in buckets {
        b.check()?;
        total = total + b.w;
    }
    if total > F::zero() {
        Ok(total)
    } else {
        Err(StatsError::EmptyBuckets)
    }
}

fn unit_interval<F: Float>(name: &'static str, v: F) -> Result<(), StatsError> {
    if v > F::zero() && v <= F::one() {
        Ok(())
    } else {
        Err(StatsError::OutOfDomain { name, value: to_f64(v), domain: "(0, 1]" })
    }
}

/// Weighted mean of bucket accuracies.
///
/// Products and partial sums carry their rounding errors (fma and two-sum),
/// and the quotient gets one residual correction, so short inputs such as
/// weights (2, 1) over (0.9, 0.6) land on the nearest float.
pub fn weighted_p<F: Float>(buckets: &[LengthBucket<F>]) -> Result<F, StatsError> {
    let total = total_weight(buckets)?;
    let (mut hi, mut lo) = (F::zero(), F::zero());
    for b in buckets {
        let prod = b.w * b.a;
        let prod_err = b.w.mul_add(b.a, -prod);
        let sum = hi + prod;
        let back = sum - hi;
        let sum_err = (hi - (sum - back)) + (prod - back);
        hi = sum;
        lo = lo + sum_err + prod_err;
    }
    let q = hi / total;
    let residual = (-q).mul_add(total, hi) + lo;
    Ok(q + residual / total)
}

fn power_sum<F: Float>(q: F, buckets: &[LengthBucket<F>], total: F) -> F {
    buckets.iter().fold(F::zero(), |acc, b| acc + b.w * q.powi(b.n as i32)) / total
}

/// Predicted solve rate `Σ w_n (p·x)^n / Σ w_n`.
pub fn sequence_success<F: Float>(p: F, x: F, buckets: &[LengthBucket<F>]) -> Result<F, StatsError> {
    unit_interval("p", p)?;
    unit_interval("x", x)?;
    let total = total_weight(buckets)?;
    Ok(power_sum(p * x, buckets, total))
}

/// Solves `sequence_success(p_observed, x, buckets) = y_observed` for `x`
/// on (0, 1] by bisection, then re-evaluates at `p = 1`.
///
/// Bisection runs until the bracket cannot shrink further, which leaves
/// the residual well inside [`Y_TOLERANCE`].
pub fn estimate_ideal_accuracy<F: Float>(y_observed: F, p_observed: F, buckets: &[LengthBucket<F>]) -> Result<IdealEstimate<F>, StatsError> {
    unit_interval("p", p_observed)?;
    if !(y_observed > F::zero() && y_observed <= F::one()) {
        return Err(StatsError::OutOfDomain { name: "y", value: to_f64(y_observed), domain: "(0, 1]" });
    }
    let total = total_weight(buckets)?;
    let f = |x: F| power_sum(p_observed * x, buckets, total);

    let y_max = f(F::one());
    let tol = F::from(Y_TOLERANCE).expect("tolerance is representable");
    if y_observed > y_max + tol {
        return Err(StatsError::NoRootInRange { observed: to_f64(y_observed), max: to_f64(y_max) });
    }

    let (mut lo, mut hi) = (F::zero(), F::one());
    let two = F::one() + F::one();
    for _ in 0..4096 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y_observed {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // `hi` always satisfies f(hi) >= y_observed or is 1; prefer whichever
    // endpoint lands closer.
    let x_hat = if lo > F::zero() && (f(lo) - y_observed).abs() < (f(hi) - y_observed).abs() { lo } else { hi };
    let y_at_p1 = power_sum(x_hat, buckets, total);
    Ok(IdealEstimate { x_hat, y_at_p1 })
}
