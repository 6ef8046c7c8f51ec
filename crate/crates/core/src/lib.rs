//! Numerically stable one-pass accumulators for central moments of any order.
//!
//! ```
//! use moments_core::MomentAccumulator;
//!
//! let mut acc = MomentAccumulator::new(4)?;
//! acc.extend([1.0, 2.0, 3.0, 4.0, 5.0])?;
//! assert_eq!(acc.variance()?, 2.0);
//! assert_eq!(acc.skewness()?, 0.0);
//! assert!((acc.kurtosis()? - 1.7).abs() < 1e-12);
//! # Ok::<(), moments_core::MomentsError>(())
//! ```
//!
//! Accumulators over separate chunks combine with [`merge`] / [`merge_many`], which is how
//! parallel aggregation works: one accumulator per worker, folded left to right at the end.

mod accumulator;
pub mod binomial;
mod error;
pub mod flops;
pub mod kernel;
mod merge;
mod summary;

pub use accumulator::MomentAccumulator;
pub use binomial::BinomialTable;
pub use error::{MomentsError, Result};
pub use flops::OpCounter;
pub use kernel::{GenericKernel, KernelRegistry, Order4Kernel, UpdateKernel};
pub use merge::{merge, merge_many};
pub use summary::MomentSummary;

/// Highest supported moment order. Binomial coefficients stay exact well past this point.
pub const MAX_ORDER: usize = 32;
