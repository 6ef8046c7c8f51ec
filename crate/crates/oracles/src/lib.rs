//! Reference implementations used to check the streaming accumulators.
//!
//! Two very different things live here:
//!
//! * [`twopass_central_moments`] is the ground truth. It holds the whole data set in memory,
//!   computes the mean with compensated summation, refines it once, and then sums each power of
//!   the deviations with compensated summation again.
//! * [`PowerSumAccumulator`] is the textbook one-pass algorithm that keeps raw power sums
//!   `Σ xᵏ` and expands them into central moments at query time. It is numerically unstable on
//!   data with a large mean and a small spread, and it is kept that way on purpose. Do not use it
//!   for anything except demonstrating that instability.
//!
//! Nothing in this crate depends on `moments-core`, so the two can be compared honestly.

mod compensated;
mod naive;
mod twopass;

pub use compensated::NeumaierSum;
pub use naive::{naive_central_moments, PowerSumAccumulator};
pub use twopass::twopass_central_moments;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("moment order {0} is out of range (must be at least 2)")]
    InvalidOrder(usize),
}

/// Mean and central power sums `M_q = Σ (x − μ)^q` for `q = 2..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralSums {
    pub count: u64,
    pub mean: f64,
    /// `sums[0]` is `M_2`, `sums[order - 2]` is `M_order`.
    pub sums: Vec<f64>,
}

impl CentralSums {
    pub fn order(&self) -> usize {
        self.sums.len() + 1
    }

    /// `M_q`, or `None` when `q` is outside `2..=order`.
    pub fn get(&self, q: usize) -> Option<f64> {
        q.checked_sub(2).and_then(|i| self.sums.get(i)).copied()
    }

    /// Population variance `M_2 / n`.
    pub fn variance(&self) -> f64 {
        self.sums[0] / self.count as f64
    }
}

/// Binomial coefficient by the multiplicative formula; exact for every `n ≤ 62`.
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step
        c = c * (n - i) / (i + 1);
    }
    c
}
