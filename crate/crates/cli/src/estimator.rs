//! Whole-data moment estimators, selectable by name for `compare`.

use std::collections::BTreeMap;

use moments_core::MomentAccumulator;
use moments_oracles::{naive_central_moments, twopass_central_moments, CentralSums};

use crate::CliError;

pub trait MomentEstimator: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn estimate(&self, data: &[f64], order: usize) -> Result<CentralSums, CliError>;
}

/// The streaming accumulator from `moments-core`.
pub struct Stable;

/// Raw power sums expanded at the end; unstable by construction.
pub struct Naive;

/// Compensated two-pass reference.
pub struct TwoPass;

impl MomentEstimator for Stable {
    fn name(&self) -> &'static str {
        "stable"
    }

    fn description(&self) -> &'static str {
        "one-pass central-moment updates"
    }

    fn estimate(&self, data: &[f64], order: usize) -> Result<CentralSums, CliError> {
        let acc = MomentAccumulator::from_slice(order, data)?;
        if acc.is_empty() {
            return Err(CliError::NoData);
        }
        Ok(CentralSums {
            count: acc.count(),
            mean: acc.mean(),
            sums: acc.central_sums().to_vec(),
        })
    }
}

impl MomentEstimator for Naive {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn description(&self) -> &'static str {
        "one-pass raw power sums"
    }

    fn estimate(&self, data: &[f64], order: usize) -> Result<CentralSums, CliError> {
        Ok(naive_central_moments(data, order)?)
    }
}

impl MomentEstimator for TwoPass {
    fn name(&self) -> &'static str {
        "twopass"
    }

    fn description(&self) -> &'static str {
        "compensated two-pass reference"
    }

    fn estimate(&self, data: &[f64], order: usize) -> Result<CentralSums, CliError> {
        Ok(twopass_central_moments(data, order)?)
    }
}

pub struct EstimatorRegistry {
    entries: BTreeMap<&'static str, Box<dyn MomentEstimator>>,
}

impl EstimatorRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, estimator: Box<dyn MomentEstimator>) {
        self.entries.insert(estimator.name(), estimator);
    }

    pub fn get(&self, name: &str) -> Result<&dyn MomentEstimator, CliError> {
        self.entries
            .get(name)
            .map(|e| e.as_ref())
            .ok_or_else(|| CliError::Usage(format!("unknown estimator `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

impl Default for EstimatorRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Stable));
        reg.register(Box::new(Naive));
        reg.register(Box::new(TwoPass));
        reg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_agree_on_easy_data() {
        let reg = EstimatorRegistry::default();
        assert_eq!(
            reg.names().collect::<Vec<_>>(),
            vec!["naive", "stable", "twopass"]
        );
        for name in ["naive", "stable", "twopass"] {
            let e = reg
                .get(name)
                .unwrap()
                .estimate(&[1.0, 2.0, 3.0, 4.0, 5.0], 4)
                .unwrap();
            assert_eq!(e.mean, 3.0, "{name}");
            assert!((e.sums[0] - 10.0).abs() < 1e-12);
            assert!((e.sums[2] - 34.0).abs() < 1e-12);
        }
        assert!(matches!(reg.get("kahan"), Err(CliError::Usage(_))));
    }

    #[test]
    fn empty_data_rejected() {
        let reg = EstimatorRegistry::default();
        for name in reg.names() {
            assert!(reg.get(name).unwrap().estimate(&[], 4).is_err(), "{name}");
        }
    }
}
