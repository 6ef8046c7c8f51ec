//! Combining accumulators built over disjoint parts of a stream.
//!
//! With `δ = μ_b − μ_a`, `n = n_a + n_b`, `w_a = −n_b/n` and `w_b = n_a/n`, a value from `a`
//! deviates from the combined mean by `(x − μ_a) + w_a·δ`, and a value from `b` by
//! `(x − μ_b) + w_b·δ`. Expanding binomially with `M_0 = count` and `M_1 = 0`:
//!
//! ```text
//! M_q = M_q,a + M_q,b
//!     + Σ_{k=1..q−2} C(q,k) δ^k (w_a^k M_{q−k},a + w_b^k M_{q−k},b)
//!     + δ^q (n_a w_a^q + n_b w_b^q)
//! ```

use crate::binomial::BinomialTable;
use crate::{MomentAccumulator, MomentsError, Result, MAX_ORDER};

/// State equivalent to accumulating the values behind `a` followed by those behind `b`.
///
/// An empty operand is an exact identity: the other operand is returned unchanged.
pub fn merge(a: &MomentAccumulator, b: &MomentAccumulator) -> Result<MomentAccumulator> {
    if a.order() != b.order() {
        return Err(MomentsError::IncompatibleAccumulators {
            left: a.order(),
            right: b.order(),
        });
    }
    if b.is_empty() {
        return Ok(a.clone());
    }
    if a.is_empty() {
        return Ok(b.clone());
    }

    let order = a.order();
    let table = BinomialTable::shared();
    let (na, nb) = (a.count() as f64, b.count() as f64);
    let count = a.count() + b.count();
    let n = count as f64;
    let delta = b.mean() - a.mean();
    let wa = -nb / n;
    let wb = na / n;
    let mean = a.mean() + delta * (nb / n);

    let (ma, mb) = (a.central_sums(), b.central_sums());
    // lower-order sums with M_0 = count and M_1 = 0
    let lower = |m: &[f64], cnt: f64, j: usize| match j {
        0 => cnt,
        1 => 0.0,
        _ => m[j - 2],
    };

    let mut delta_pow = [0.0f64; MAX_ORDER + 1];
    let mut wa_pow = [0.0f64; MAX_ORDER + 1];
    let mut wb_pow = [0.0f64; MAX_ORDER + 1];
    delta_pow[0] = 1.0;
    wa_pow[0] = 1.0;
    wb_pow[0] = 1.0;
    for k in 1..=order {
        delta_pow[k] = delta_pow[k - 1] * delta;
        wa_pow[k] = wa_pow[k - 1] * wa;
        wb_pow[k] = wb_pow[k - 1] * wb;
    }

    let sums = (2..=order)
        .map(|q| {
            let mut total = ma[q - 2] + mb[q - 2];
            for k in 1..=q - 2 {
                let c = table.coeff(q, k) as f64;
                total += c
                    * delta_pow[k]
                    * (wa_pow[k] * lower(ma, na, q - k) + wb_pow[k] * lower(mb, nb, q - k));
            }
            total + delta_pow[q] * (na * wa_pow[q] + nb * wb_pow[q])
        })
        .collect();

    Ok(MomentAccumulator::from_parts(order, count, mean, sums))
}

/// Strict left fold of [`merge`] over `parts`, in the given order.
pub fn merge_many<'a, I>(parts: I) -> Result<MomentAccumulator>
where
    I: IntoIterator<Item = &'a MomentAccumulator>,
{
    let mut iter = parts.into_iter();
    let first = iter.next().ok_or(MomentsError::InvalidArgument(
        "merge_many needs at least one accumulator",
    ))?;
    iter.try_fold(first.clone(), |acc, next| merge(&acc, next))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc(data: &[f64]) -> MomentAccumulator {
        MomentAccumulator::from_slice(4, data).unwrap()
    }

    #[test]
    fn empty_is_identity() {
        let a = acc(&[1.0, 2.0]);
        let e = MomentAccumulator::new(4).unwrap();
        assert_eq!(merge(&a, &e).unwrap(), a);
        assert_eq!(merge(&e, &a).unwrap(), a);
        assert_eq!(merge(&e, &e).unwrap(), e);
    }

    fn assert_sums(got: &[f64], want: &[f64]) {
        for (g, w) in got.iter().zip(want) {
            assert!(
                (g - w).abs() <= 1e-9 * w.abs().max(1.0),
                "{got:?} vs {want:?}"
            );
        }
    }

    #[test]
    fn split_one_to_five() {
        let m = merge(&acc(&[1.0, 2.0]), &acc(&[3.0, 4.0, 5.0])).unwrap();
        assert_eq!(m.count(), 5);
        assert_eq!(m.mean(), 3.0);
        assert_sums(m.central_sums(), &[10.0, 0.0, 34.0]);
    }

    #[test]
    fn two_singletons() {
        let m = merge(&acc(&[0.0]), &acc(&[2.0])).unwrap();
        assert_eq!((m.count(), m.mean()), (2, 1.0));
        assert_eq!(m.central_sums(), &[2.0, 0.0, 2.0]);
    }

    #[test]
    fn order_mismatch() {
        let a = MomentAccumulator::from_slice(3, &[1.0]).unwrap();
        assert_eq!(
            merge(&a, &acc(&[1.0])),
            Err(MomentsError::IncompatibleAccumulators { left: 3, right: 4 })
        );
        assert!(merge_many([&acc(&[1.0]), &a]).is_err());
    }

    #[test]
    fn merge_many_edges() {
        let a = acc(&[1.0, 5.0, 2.0]);
        assert_eq!(merge_many([&a]).unwrap(), a);
        assert_eq!(
            merge_many(std::iter::empty::<&MomentAccumulator>()),
            Err(MomentsError::InvalidArgument(
                "merge_many needs at least one accumulator"
            ))
        );
        let parts = [acc(&[1.0]), acc(&[2.0, 3.0]), acc(&[4.0, 5.0])];
        let m = merge_many(&parts).unwrap();
        assert_eq!(m.count(), 5);
        assert_sums(m.central_sums(), &[10.0, 0.0, 34.0]);
    }
}
