use serde::Serialize;

use crate::{MomentAccumulator, MomentsError, Result};

/// Every statistic derivable from an accumulator, in the population convention.
///
/// Statistics whose preconditions fail (too few values, zero variance, insufficient order) are
/// `None`; they serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    #[serde(rename = "n")]
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub sample_variance: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    /// `M_q / n` for `q = 2..=order`.
    pub central_moments: Vec<f64>,
}

fn optional(stat: Result<f64>) -> Result<Option<f64>> {
    match stat {
        Ok(v) => Ok(Some(v)),
        Err(MomentsError::UndefinedStatistic(_) | MomentsError::InvalidOrder { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

impl MomentAccumulator {
    pub fn summarize(&self) -> Result<MomentSummary> {
        let variance = self.variance()?;
        let kurtosis = optional(self.kurtosis())?;
        Ok(MomentSummary {
            count: self.count(),
            mean: self.mean(),
            variance,
            sample_variance: optional(self.sample_variance())?,
            skewness: optional(self.skewness())?,
            kurtosis,
            excess_kurtosis: kurtosis.map(|k| k - 3.0),
            central_moments: (2..=self.order())
                .map(|q| self.central_moment(q))
                .collect::<Result<_>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_to_five() {
        let s = MomentAccumulator::from_slice(4, &[1.0, 2.0, 3.0, 4.0, 5.0])
            .unwrap()
            .summarize()
            .unwrap();
        assert_eq!(s.count, 5);
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.variance, 2.0);
        assert_eq!(s.sample_variance, Some(2.5));
        assert_eq!(s.skewness, Some(0.0));
        assert!((s.kurtosis.unwrap() - 1.7).abs() < 1e-15);
        assert!((s.excess_kurtosis.unwrap() + 1.3).abs() < 1e-15);
        assert_eq!(s.central_moments, vec![2.0, 0.0, 6.8]);
    }

    #[test]
    fn single_value() {
        let s = MomentAccumulator::from_slice(4, &[9.0])
            .unwrap()
            .summarize()
            .unwrap();
        assert_eq!((s.count, s.mean, s.variance), (1, 9.0, 0.0));
        assert_eq!(s.sample_variance, None);
        assert_eq!(s.skewness, None);
        assert_eq!(s.kurtosis, None);
        assert_eq!(s.excess_kurtosis, None);
        assert_eq!(s.central_moments, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_one_central_moments() {
        let s = MomentAccumulator::from_slice(4, &[0.0, 1.0])
            .unwrap()
            .summarize()
            .unwrap();
        assert_eq!(s.central_moments, vec![0.25, 0.0, 0.0625]);
    }

    #[test]
    fn low_order_leaves_higher_statistics_absent() {
        let s = MomentAccumulator::from_slice(2, &[1.0, 4.0])
            .unwrap()
            .summarize()
            .unwrap();
        assert_eq!(s.variance, 2.25);
        assert_eq!(s.skewness, None);
        assert_eq!(s.kurtosis, None);
        let s = MomentAccumulator::from_slice(3, &[1.0, 4.0, 4.0])
            .unwrap()
            .summarize()
            .unwrap();
        assert!(s.skewness.is_some());
        assert_eq!(s.kurtosis, None);
    }

    #[test]
    fn empty_and_saturated_fail() {
        assert_eq!(
            MomentAccumulator::new(4).unwrap().summarize(),
            Err(MomentsError::EmptyAccumulator)
        );
        let acc = MomentAccumulator::from_slice(32, &[0.0, 1e20]).unwrap();
        assert_eq!(acc.summarize(), Err(MomentsError::Saturated));
    }

    #[test]
    fn json_uses_null_for_absent() {
        let s = MomentAccumulator::from_slice(4, &[7.0, 7.0, 7.0])
            .unwrap()
            .summarize()
            .unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["variance"], 0.0);
        assert!(v["skewness"].is_null());
        assert!(v["kurtosis"].is_null());
    }
}
