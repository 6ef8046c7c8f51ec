use serde::{Deserialize, Serialize};

use crate::flops::{measure, Counted, OpCounter};
use crate::kernel::{generic_update, order4_update, UpdateKernel};
use crate::{MomentsError, Result, MAX_ORDER};

/// Streaming state for central moments up to a fixed order.
///
/// Holds the count `n`, the running mean, and `M_q = Σ (x_i − μ_n)^q` for `q = 2..=order`.
/// `M_1` is identically zero and is not stored. A freshly constructed accumulator has `n = 0`,
/// mean 0 and all sums 0; every statistic query on it is an error.
///
/// Serializes as the flat record `{order, count, mean, central_sums}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AccumulatorRecord", into = "AccumulatorRecord")]
pub struct MomentAccumulator {
    order: usize,
    count: u64,
    mean: f64,
    central_sums: Vec<f64>,
    saturated: bool,
}

#[derive(Serialize, Deserialize)]
struct AccumulatorRecord {
    order: usize,
    count: u64,
    mean: f64,
    central_sums: Vec<f64>,
}

impl From<MomentAccumulator> for AccumulatorRecord {
    fn from(acc: MomentAccumulator) -> Self {
        Self {
            order: acc.order,
            count: acc.count,
            mean: acc.mean,
            central_sums: acc.central_sums,
        }
    }
}

impl TryFrom<AccumulatorRecord> for MomentAccumulator {
    type Error = MomentsError;

    fn try_from(rec: AccumulatorRecord) -> Result<Self> {
        check_order(rec.order)?;
        if rec.central_sums.len() != rec.order - 1 {
            return Err(MomentsError::InvalidArgument(
                "central_sums must hold order - 1 entries",
            ));
        }
        if rec.count == 0 && (rec.mean != 0.0 || rec.central_sums.iter().any(|&m| m != 0.0)) {
            return Err(MomentsError::InvalidArgument(
                "empty accumulator must be all zero",
            ));
        }
        if rec.central_sums[0] < 0.0 {
            return Err(MomentsError::InvalidArgument("M_2 cannot be negative"));
        }
        let mut acc = Self {
            order: rec.order,
            count: rec.count,
            mean: rec.mean,
            central_sums: rec.central_sums,
            saturated: false,
        };
        acc.refresh_saturation();
        Ok(acc)
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if (2..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(MomentsError::InvalidOrder {
            order,
            max: MAX_ORDER,
        })
    }
}

impl MomentAccumulator {
    pub fn new(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            order,
            count: 0,
            mean: 0.0,
            central_sums: vec![0.0; order - 1],
            saturated: false,
        })
    }

    /// Accumulates every value of `data` in order.
    pub fn from_slice(order: usize, data: &[f64]) -> Result<Self> {
        let mut acc = Self::new(order)?;
        acc.extend(data.iter().copied())?;
        Ok(acc)
    }

    pub(crate) fn from_parts(order: usize, count: u64, mean: f64, central_sums: Vec<f64>) -> Self {
        let mut acc = Self {
            order,
            count,
            mean,
            central_sums,
            saturated: false,
        };
        acc.refresh_saturation();
        acc
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// True once any part of the state has overflowed to a non-finite value.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// `[M_2, …, M_order]`.
    pub fn central_sums(&self) -> &[f64] {
        &self.central_sums
    }

    /// `M_q` for `2 ≤ q ≤ order`.
    pub fn central_sum(&self, q: usize) -> Result<f64> {
        self.check_moment(q)?;
        Ok(self.central_sums[q - 2])
    }

    /// Absorbs one value with the generic recurrence.
    pub fn update(&mut self, x: f64) -> Result<()> {
        self.admit(x)?;
        self.count += 1;
        generic_update(&mut self.mean, &mut self.central_sums, self.count, x);
        self.refresh_saturation();
        Ok(())
    }

    /// Absorbs one value with the unrolled order-4 recurrence. Bit-identical to
    /// [`update`](Self::update); only valid on order-4 accumulators.
    pub fn update_order4(&mut self, x: f64) -> Result<()> {
        if self.order != 4 {
            return Err(MomentsError::UnsupportedKernel {
                kernel: "order4".into(),
                order: self.order,
            });
        }
        self.admit(x)?;
        self.count += 1;
        order4_update(&mut self.mean, &mut self.central_sums, self.count, x);
        self.refresh_saturation();
        Ok(())
    }

    /// Absorbs one value with any registered kernel.
    pub fn update_with(&mut self, kernel: &dyn UpdateKernel, x: f64) -> Result<()> {
        self.check_kernel(kernel)?;
        self.admit(x)?;
        self.count += 1;
        kernel.apply(&mut self.mean, &mut self.central_sums, self.count, x);
        self.refresh_saturation();
        Ok(())
    }

    /// Like [`update_with`](Self::update_with), additionally returning the floating-point
    /// operations the kernel performed.
    pub fn update_instrumented(&mut self, kernel: &dyn UpdateKernel, x: f64) -> Result<OpCounter> {
        self.check_kernel(kernel)?;
        self.admit(x)?;
        self.count += 1;
        let mut mean = Counted(self.mean);
        let mut sums: Vec<Counted> = self.central_sums.iter().map(|&m| Counted(m)).collect();
        let count = self.count;
        let ((), ops) = measure(|| kernel.apply_counted(&mut mean, &mut sums, count, Counted(x)));
        self.mean = mean.0;
        for (dst, src) in self.central_sums.iter_mut().zip(sums) {
            *dst = src.0;
        }
        self.refresh_saturation();
        Ok(ops)
    }

    /// Absorbs values in order, stopping at the first rejected one.
    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, values: I) -> Result<()> {
        for x in values {
            self.update(x)?;
        }
        Ok(())
    }

    /// `M_q / n`.
    pub fn central_moment(&self, q: usize) -> Result<f64> {
        self.check_moment(q)?;
        self.check_nonempty()?;
        Ok(self.central_sums[q - 2] / self.count as f64)
    }

    /// Population variance `M_2 / n`.
    pub fn variance(&self) -> Result<f64> {
        self.central_moment(2)
    }

    /// `M_2 / (n − 1)`; needs at least two values.
    pub fn sample_variance(&self) -> Result<f64> {
        self.check_nonempty()?;
        if self.count < 2 {
            return Err(MomentsError::UndefinedStatistic("sample variance"));
        }
        Ok(self.central_sums[0] / (self.count - 1) as f64)
    }

    /// `√n · M_3 / M_2^{3/2}`.
    pub fn skewness(&self) -> Result<f64> {
        self.check_moment(3)?;
        let m2 = self.spread("skewness")?;
        let n = self.count as f64;
        Ok(n.sqrt() * self.central_sums[1] / (m2 * m2.sqrt()))
    }

    /// `n · M_4 / M_2²` (not excess kurtosis).
    pub fn kurtosis(&self) -> Result<f64> {
        self.check_moment(4)?;
        let m2 = self.spread("kurtosis")?;
        let n = self.count as f64;
        Ok(n * self.central_sums[2] / (m2 * m2))
    }

    fn admit(&self, x: f64) -> Result<()> {
        if x.is_finite() {
            Ok(())
        } else {
            Err(MomentsError::NonFiniteInput(x))
        }
    }

    fn check_kernel(&self, kernel: &dyn UpdateKernel) -> Result<()> {
        if kernel.supports(self.order) {
            Ok(())
        } else {
            Err(MomentsError::UnsupportedKernel {
                kernel: kernel.name().into(),
                order: self.order,
            })
        }
    }

    fn check_moment(&self, q: usize) -> Result<()> {
        if (2..=self.order).contains(&q) {
            Ok(())
        } else {
            Err(MomentsError::InvalidOrder {
                order: q,
                max: self.order,
            })
        }
    }

    fn check_nonempty(&self) -> Result<()> {
        if self.saturated {
            Err(MomentsError::Saturated)
        } else if self.count == 0 {
            Err(MomentsError::EmptyAccumulator)
        } else {
            Ok(())
        }
    }

    /// `M_2`, provided it is positive.
    fn spread(&self, what: &'static str) -> Result<f64> {
        self.check_nonempty()?;
        match self.central_sums[0] {
            m2 if m2 > 0.0 => Ok(m2),
            _ => Err(MomentsError::UndefinedStatistic(what)),
        }
    }

    fn refresh_saturation(&mut self) {
        self.saturated =
            !(self.mean.is_finite() && self.central_sums.iter().all(|m| m.is_finite()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{GenericKernel, Order4Kernel};

    #[test]
    fn new_is_empty() {
        let acc = MomentAccumulator::new(2).unwrap();
        assert_eq!((acc.order(), acc.count(), acc.mean()), (2, 0, 0.0));
        assert_eq!(acc.central_sums(), &[0.0]);
        let acc = MomentAccumulator::new(4).unwrap();
        assert_eq!(acc.central_sums(), &[0.0, 0.0, 0.0]);
        assert!(matches!(
            MomentAccumulator::new(1),
            Err(MomentsError::InvalidOrder { order: 1, .. })
        ));
        assert!(MomentAccumulator::new(MAX_ORDER).is_ok());
        assert!(MomentAccumulator::new(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn first_value() {
        let mut acc = MomentAccumulator::new(4).unwrap();
        acc.update(5.0).unwrap();
        assert_eq!(acc.count(), 1);
        assert_eq!(acc.mean(), 5.0);
        assert_eq!(acc.central_sums(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn one_to_five() {
        let acc = MomentAccumulator::from_slice(4, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(acc.count(), 5);
        assert_eq!(acc.mean(), 3.0);
        assert_eq!(acc.central_sums(), &[10.0, 0.0, 34.0]);
        assert_eq!(acc.central_moment(2).unwrap(), 2.0);
        assert_eq!(acc.variance().unwrap(), 2.0);
        assert_eq!(acc.sample_variance().unwrap(), 2.5);
        assert_eq!(acc.skewness().unwrap(), 0.0);
        assert!((acc.kurtosis().unwrap() - 1.7).abs() < 1e-15);
    }

    #[test]
    fn zero_one() {
        let acc = MomentAccumulator::from_slice(4, &[0.0, 1.0]).unwrap();
        assert_eq!(acc.mean(), 0.5);
        assert_eq!(acc.central_sums(), &[0.5, 0.0, 0.125]);
    }

    #[test]
    fn symmetric_pair_saturates_kurtosis_bound() {
        let acc = MomentAccumulator::from_slice(4, &[-1.0, 1.0]).unwrap();
        assert_eq!(acc.variance().unwrap(), 1.0);
        assert_eq!(acc.kurtosis().unwrap(), 1.0);
    }

    #[test]
    fn constant_stream() {
        for c in [-2.5, 0.0, 7.0, 1e9] {
            let acc = MomentAccumulator::from_slice(8, &[c, c, c]).unwrap();
            assert_eq!(acc.mean(), c);
            assert!(acc.central_sums().iter().all(|&m| m == 0.0));
            for q in 2..=8 {
                assert_eq!(acc.central_moment(q).unwrap(), 0.0);
            }
            assert_eq!(
                acc.skewness(),
                Err(MomentsError::UndefinedStatistic("skewness"))
            );
            assert_eq!(
                acc.kurtosis(),
                Err(MomentsError::UndefinedStatistic("kurtosis"))
            );
        }
    }

    #[test]
    fn query_errors() {
        let empty = MomentAccumulator::new(4).unwrap();
        assert_eq!(empty.central_moment(2), Err(MomentsError::EmptyAccumulator));
        assert_eq!(empty.variance(), Err(MomentsError::EmptyAccumulator));
        assert_eq!(empty.skewness(), Err(MomentsError::EmptyAccumulator));

        let acc = MomentAccumulator::from_slice(2, &[1.0, 2.0]).unwrap();
        assert!(matches!(
            acc.central_moment(3),
            Err(MomentsError::InvalidOrder { order: 3, .. })
        ));
        assert!(matches!(
            acc.central_moment(1),
            Err(MomentsError::InvalidOrder { order: 1, .. })
        ));
        assert!(matches!(
            acc.skewness(),
            Err(MomentsError::InvalidOrder { .. })
        ));
        assert!(matches!(
            acc.kurtosis(),
            Err(MomentsError::InvalidOrder { .. })
        ));

        let single = MomentAccumulator::from_slice(4, &[9.0]).unwrap();
        assert_eq!(single.variance().unwrap(), 0.0);
        assert_eq!(
            single.sample_variance(),
            Err(MomentsError::UndefinedStatistic("sample variance"))
        );
    }

    #[test]
    fn non_finite_input_leaves_state_alone() {
        let mut acc = MomentAccumulator::from_slice(4, &[1.0, 2.0]).unwrap();
        let before = acc.clone();
        for bad in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(matches!(
                acc.update(bad),
                Err(MomentsError::NonFiniteInput(_))
            ));
            assert!(acc.update_order4(bad).is_err());
            assert!(acc.update_with(&GenericKernel, bad).is_err());
            assert_eq!(acc, before);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let mut acc = MomentAccumulator::new(32).unwrap();
        acc.extend([0.0, 1e20]).unwrap();
        assert!(acc.is_saturated());
        assert_eq!(acc.variance(), Err(MomentsError::Saturated));
        assert_eq!(acc.kurtosis(), Err(MomentsError::Saturated));
    }

    #[test]
    fn kernel_order_checks() {
        let mut acc = MomentAccumulator::new(3).unwrap();
        assert!(matches!(
            acc.update_order4(1.0),
            Err(MomentsError::UnsupportedKernel { .. })
        ));
        assert!(acc.update_with(&Order4Kernel, 1.0).is_err());
        assert!(acc.update_instrumented(&Order4Kernel, 1.0).is_err());
        assert_eq!(acc.count(), 0);
    }

    #[test]
    fn instrumented_matches_plain() {
        let data = [0.3, -1.7, 2.2, 8.5, 0.0, -4.25];
        let mut plain = MomentAccumulator::new(4).unwrap();
        let mut counted = MomentAccumulator::new(4).unwrap();
        for &x in &data {
            plain.update(x).unwrap();
            let ops = counted.update_instrumented(&Order4Kernel, x).unwrap();
            assert_eq!(ops.divs, 1);
            assert!(ops.total() <= 26);
        }
        assert_eq!(plain, counted);
    }

    #[test]
    fn serde_flat_record() {
        let acc = MomentAccumulator::from_slice(4, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let json = serde_json::to_string(&acc).unwrap();
        assert_eq!(
            json,
            r#"{"order":4,"count":5,"mean":3.0,"central_sums":[10.0,0.0,34.0]}"#
        );
        let back: MomentAccumulator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, acc);

        for bad in [
            r#"{"order":1,"count":0,"mean":0.0,"central_sums":[]}"#,
            r#"{"order":4,"count":1,"mean":0.0,"central_sums":[0.0]}"#,
            r#"{"order":2,"count":0,"mean":1.0,"central_sums":[0.0]}"#,
            r#"{"order":2,"count":3,"mean":1.0,"central_sums":[-1.0]}"#,
        ] {
            assert!(
                serde_json::from_str::<MomentAccumulator>(bad).is_err(),
                "{bad}"
            );
        }
    }
}
