use std::sync::OnceLock;

use crate::{MomentsError, Result, MAX_ORDER};

/// Binomial coefficients `C(q, k)` for `0 ≤ k ≤ q ≤ max_order`, built with Pascal's rule.
///
/// Also keeps `−C(q, k)` as `f64` so the update kernels can multiply by it directly. Every
/// coefficient up to `C(32, 16)` is exactly representable in both `u64` and `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialTable {
    max_order: usize,
    rows: Vec<Vec<u64>>,
    negated: Vec<Vec<f64>>,
}

impl BinomialTable {
    pub fn new(max_order: usize) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&max_order) {
            return Err(MomentsError::InvalidOrder {
                order: max_order,
                max: MAX_ORDER,
            });
        }
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_order + 1);
        rows.push(vec![1]);
        for q in 1..=max_order {
            let prev = &rows[q - 1];
            let mut row = vec![1u64; q + 1];
            for k in 1..q {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        let negated = rows
            .iter()
            .map(|row| row.iter().map(|&c| -(c as f64)).collect())
            .collect();
        Ok(Self {
            max_order,
            rows,
            negated,
        })
    }

    /// Table up to [`MAX_ORDER`], built once per process.
    pub fn shared() -> &'static BinomialTable {
        static TABLE: OnceLock<BinomialTable> = OnceLock::new();
        TABLE.get_or_init(|| BinomialTable::new(MAX_ORDER).expect("MAX_ORDER is valid"))
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `C(q, k)`. Panics if `k > q` or `q > max_order`.
    pub fn coeff(&self, q: usize, k: usize) -> u64 {
        self.rows[q][k]
    }

    #[inline]
    pub(crate) fn negated(&self, q: usize, k: usize) -> f64 {
        self.negated[q][k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multiplicative(n: u64, k: u64) -> u64 {
        (0..k).fold(1u64, |c, i| c * (n - i) / (i + 1))
    }

    #[test]
    fn matches_closed_form() {
        let t = BinomialTable::shared();
        for q in 0..=MAX_ORDER {
            for k in 0..=q {
                assert_eq!(
                    t.coeff(q, k),
                    multiplicative(q as u64, k as u64),
                    "C({q},{k})"
                );
                assert_eq!(t.negated(q, k), -(t.coeff(q, k) as f64));
            }
        }
        assert_eq!(t.coeff(32, 16), 601_080_390);
    }

    #[test]
    fn pascal_and_edges() {
        let t = BinomialTable::new(10).unwrap();
        for q in 2..=10 {
            assert_eq!(t.coeff(q, 0), 1);
            assert_eq!(t.coeff(q, q), 1);
            for k in 1..q {
                assert_eq!(t.coeff(q, k), t.coeff(q - 1, k - 1) + t.coeff(q - 1, k));
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(BinomialTable::new(1).is_err());
        assert!(BinomialTable::new(MAX_ORDER + 1).is_err());
    }
}
