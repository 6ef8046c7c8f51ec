//! Single-observation update kernels.
//!
//! A kernel receives the running mean, the central sums `M_2..M_p` (slice index `i` holds
//! `M_{i+2}`), the count *after* the new observation, and the observation itself. Every kernel
//! follows the same recurrence:
//!
//! ```text
//! δ    = x − μ
//! μ   += δ/n
//! M_2 += δ(δ − δ/n)
//! M_q += −Σ_{k=1..q−2} C(q,k) (δ/n)^k M_{q−k} + δ(δ^{q−1} − (δ/n)^{q−1}),   q = 3..p
//! ```
//!
//! The `M_{q−k}` on the right are the values already updated for this observation, so the sums
//! are updated in ascending order of `q`, in place. `δ/n` is the only division.

use std::collections::BTreeMap;
use std::fmt;

use crate::binomial::BinomialTable;
use crate::flops::{Counted, Scalar};
use crate::{MomentsError, Result, MAX_ORDER};

pub trait UpdateKernel: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, order: usize) -> bool;

    fn apply(&self, mean: &mut f64, sums: &mut [f64], count: u64, x: f64);

    /// Same arithmetic as [`apply`](Self::apply), tallied by [`crate::flops`].
    fn apply_counted(&self, mean: &mut Counted, sums: &mut [Counted], count: u64, x: Counted);
}

impl fmt::Debug for dyn UpdateKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UpdateKernel({})", self.name())
    }
}

/// Loop over `q` for any order in `2..=MAX_ORDER`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GenericKernel;

/// Hand-unrolled order-4 update, ordered so that it performs the same operations as
/// [`GenericKernel`] at order 4 and therefore gives bit-identical results.
#[derive(Debug, Clone, Copy, Default)]
pub struct Order4Kernel;

impl UpdateKernel for GenericKernel {
    fn name(&self) -> &'static str {
        "generic"
    }

    fn supports(&self, order: usize) -> bool {
        (2..=MAX_ORDER).contains(&order)
    }

    fn apply(&self, mean: &mut f64, sums: &mut [f64], count: u64, x: f64) {
        generic_update(mean, sums, count, x);
    }

    fn apply_counted(&self, mean: &mut Counted, sums: &mut [Counted], count: u64, x: Counted) {
        generic_update(mean, sums, count, x);
    }
}

impl UpdateKernel for Order4Kernel {
    fn name(&self) -> &'static str {
        "order4"
    }

    fn supports(&self, order: usize) -> bool {
        order == 4
    }

    fn apply(&self, mean: &mut f64, sums: &mut [f64], count: u64, x: f64) {
        order4_update(mean, sums, count, x);
    }

    fn apply_counted(&self, mean: &mut Counted, sums: &mut [Counted], count: u64, x: Counted) {
        order4_update(mean, sums, count, x);
    }
}

#[inline]
pub(crate) fn generic_update<T: Scalar>(mean: &mut T, sums: &mut [T], count: u64, x: T) {
    let order = sums.len() + 1;
    debug_assert!((2..=MAX_ORDER).contains(&order));
    let table = BinomialTable::shared();

    let delta = x - *mean;
    let delta_n = delta / T::from_f64(count as f64);
    *mean = *mean + delta_n;

    // delta_pow[k] = δ^k and delta_n_pow[k] = (δ/n)^k, filled lazily up to k = q − 1
    let zero = T::from_f64(0.0);
    let mut delta_pow = [zero; MAX_ORDER];
    let mut delta_n_pow = [zero; MAX_ORDER];
    delta_pow[1] = delta;
    delta_n_pow[1] = delta_n;

    for q in 2..=order {
        if q > 2 {
            delta_pow[q - 1] = delta_pow[q - 2] * delta;
            delta_n_pow[q - 1] = delta_n_pow[q - 2] * delta_n;
        }
        let mut correction: Option<T> = None;
        for k in 1..=q - 2 {
            let term = T::from_f64(table.negated(q, k)) * delta_n_pow[k] * sums[q - k - 2];
            correction = Some(match correction {
                Some(acc) => acc + term,
                None => term,
            });
        }
        let tail = delta * (delta_pow[q - 1] - delta_n_pow[q - 1]);
        let increment = match correction {
            Some(acc) => acc + tail,
            None => tail,
        };
        sums[q - 2] = sums[q - 2] + increment;
    }
}

#[inline]
pub(crate) fn order4_update<T: Scalar>(mean: &mut T, sums: &mut [T], count: u64, x: T) {
    debug_assert_eq!(sums.len(), 3);
    let neg3 = T::from_f64(-3.0);
    let neg4 = T::from_f64(-4.0);
    let neg6 = T::from_f64(-6.0);

    let delta = x - *mean;
    let delta_n = delta / T::from_f64(count as f64);
    *mean = *mean + delta_n;

    let m2 = sums[0] + delta * (delta - delta_n);
    let delta_2 = delta * delta;
    let delta_n_2 = delta_n * delta_n;
    let m3 = sums[1] + (neg3 * delta_n * m2 + delta * (delta_2 - delta_n_2));
    let m4 = sums[2]
        + (neg4 * delta_n * m3
            + neg6 * delta_n_2 * m2
            + delta * (delta_2 * delta - delta_n_2 * delta_n));

    sums[0] = m2;
    sums[1] = m3;
    sums[2] = m4;
}

/// Kernels addressable by name.
pub struct KernelRegistry {
    kernels: BTreeMap<&'static str, Box<dyn UpdateKernel>>,
}

impl KernelRegistry {
    pub fn empty() -> Self {
        Self {
            kernels: BTreeMap::new(),
        }
    }

    /// Replaces any kernel already registered under the same name.
    pub fn register(&mut self, kernel: Box<dyn UpdateKernel>) {
        self.kernels.insert(kernel.name(), kernel);
    }

    pub fn get(&self, name: &str) -> Result<&dyn UpdateKernel> {
        self.kernels
            .get(name)
            .map(|k| k.as_ref())
            .ok_or_else(|| MomentsError::UnknownKernel(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.kernels.keys().copied()
    }

    /// The fastest registered kernel for `order`: a specialised one when available, the
    /// generic loop otherwise.
    pub fn best_for(&self, order: usize) -> Result<&dyn UpdateKernel> {
        self.kernels
            .values()
            .filter(|k| k.name() != "generic" && k.supports(order))
            .chain(self.kernels.get("generic"))
            .find(|k| k.supports(order))
            .map(|k| k.as_ref())
            .ok_or(MomentsError::InvalidOrder {
                order,
                max: MAX_ORDER,
            })
    }
}

impl Default for KernelRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(GenericKernel));
        reg.register(Box::new(Order4Kernel));
        reg
    }
}

impl fmt::Debug for KernelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
