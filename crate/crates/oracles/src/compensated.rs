/// Neumaier's improved Kahan–Babuška summation.
///
/// Keeps a running correction for the low-order bits lost by each addition, so the result is
/// accurate to roughly twice the working precision regardless of summation order (barring
/// overflow).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_by_naive_sum() {
        let data = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = data.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(data.iter().copied().collect::<NeumaierSum>().total(), 2.0);
    }

    #[test]
    fn many_tenths() {
        let s: NeumaierSum = std::iter::repeat_n(0.1, 1_000_000).collect();
        assert!((s.total() - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(NeumaierSum::new().total(), 0.0);
    }
}
