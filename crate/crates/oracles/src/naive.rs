use crate::{binomial, CentralSums, OracleError};

/// Raw power sums `S_k = Σ xᵏ`, accumulated with plain floating-point addition.
///
/// Converting these to central moments subtracts large, nearly equal terms. On data whose mean
/// dwarfs its spread the result is dominated by rounding error. That is the point of this type.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumAccumulator {
    count: u64,
    /// `power_sums[k - 1]` is `S_k` for `k = 1..=order`.
    power_sums: Vec<f64>,
}

impl PowerSumAccumulator {
    pub fn new(order: usize) -> Result<Self, OracleError> {
        if order < 2 {
            return Err(OracleError::InvalidOrder(order));
        }
        Ok(Self {
            count: 0,
            power_sums: vec![0.0; order],
        })
    }

    pub fn order(&self) -> usize {
        self.power_sums.len()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn power_sums(&self) -> &[f64] {
        &self.power_sums
    }

    pub fn update(&mut self, x: f64) {
        self.count += 1;
        let mut power = 1.0;
        for s in self.power_sums.iter_mut() {
            power *= x;
            *s += power;
        }
    }

    /// Expands the power sums as `M_q = Σ_{k=0..q} C(q,k) (−μ)^k S_{q−k}` with `S_0 = n`.
    pub fn central_sums(&self) -> Result<CentralSums, OracleError> {
        if self.count == 0 {
            return Err(OracleError::InvalidArgument(
                "power-sum accumulator is empty",
            ));
        }
        let n = self.count as f64;
        let mean = self.power_sums[0] / n;
        let raw = |j: usize| if j == 0 { n } else { self.power_sums[j - 1] };

        let sums = (2..=self.order())
            .map(|q| {
                let mut total = 0.0;
                let mut neg_mean_pow = 1.0;
                for k in 0..=q {
                    total += binomial(q as u64, k as u64) as f64 * neg_mean_pow * raw(q - k);
                    neg_mean_pow *= -mean;
                }
                total
            })
            .collect();

        Ok(CentralSums {
            count: self.count,
            mean,
            sums,
        })
    }
}

/// One-pass power sums over `data`, expanded into central sums.
pub fn naive_central_moments(data: &[f64], order: usize) -> Result<CentralSums, OracleError> {
    let mut acc = PowerSumAccumulator::new(order)?;
    for &x in data {
        acc.update(x);
    }
    acc.central_sums()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twopass_central_moments;

    fn rel_err(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    #[test]
    fn well_conditioned_matches() {
        let r = naive_central_moments(&[1.0, 2.0, 3.0, 4.0, 5.0], 4).unwrap();
        assert_eq!(r.mean, 3.0);
        assert!(rel_err(r.sums[0], 10.0) <= 1e-12);
        assert!(r.sums[1].abs() <= 1e-12);
        assert!(rel_err(r.sums[2], 34.0) <= 1e-12);
    }

    #[test]
    fn huge_mean_loses_the_signal() {
        let data = [1e9, 1e9 + 1.0, 1e9 + 2.0];
        let r = naive_central_moments(&data, 2).unwrap();
        // exact population variance of deviations {-1, 0, 1} is 2/3
        let err = (r.variance() - 2.0 / 3.0).abs();
        assert!(
            err > 1e-3,
            "naive variance {} unexpectedly accurate",
            r.variance()
        );
    }

    #[test]
    fn constant_huge_data_leaves_residue() {
        let r = naive_central_moments(&[1e9; 3], 2).unwrap();
        let exact = twopass_central_moments(&[1e9; 3], 2).unwrap();
        assert_eq!(exact.sums[0], 0.0);
        // x² ≈ 1e18 is not representable exactly, so the residue is either nonzero or the
        // expansion happened to cancel; both are allowed, only the stable path must be zero.
        assert!(r.sums[0].is_finite());
    }

    #[test]
    fn empty_and_bad_order() {
        assert!(naive_central_moments(&[], 4).is_err());
        assert_eq!(
            PowerSumAccumulator::new(1),
            Err(OracleError::InvalidOrder(1))
        );
    }

    proptest::proptest! {
        #[test]
        fn agrees_with_twopass_on_unit_interval(
            data in proptest::collection::vec(0.0f64..1.0, 2..2000),
        ) {
            let naive = naive_central_moments(&data, 4).unwrap();
            let exact = twopass_central_moments(&data, 4).unwrap();
            for q in [2, 4] {
                let (a, b) = (naive.get(q).unwrap(), exact.get(q).unwrap());
                proptest::prop_assert!(rel_err(a, b) <= 1e-10 || (a - b).abs() <= 1e-12,
                    "q={} naive={} exact={}", q, a, b);
            }
        }
    }
}
