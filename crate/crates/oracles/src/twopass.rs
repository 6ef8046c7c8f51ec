use crate::{CentralSums, NeumaierSum, OracleError};

/// Ground-truth central power sums by two passes over in-memory data.
///
/// Pass one finds the mean with compensated summation and refines it by the compensated mean
/// of the residuals. Pass two sums `(x − μ)^q` for every `q` in `2..=order`, again compensated.
/// Powers are formed by repeated multiplication of the deviation.
pub fn twopass_central_moments(data: &[f64], order: usize) -> Result<CentralSums, OracleError> {
    if order < 2 {
        return Err(OracleError::InvalidOrder(order));
    }
    if data.is_empty() {
        return Err(OracleError::InvalidArgument(
            "two-pass oracle needs at least one value",
        ));
    }
    let n = data.len() as f64;

    let rough = data.iter().copied().collect::<NeumaierSum>().total() / n;
    let residual = data
        .iter()
        .map(|&x| x - rough)
        .collect::<NeumaierSum>()
        .total()
        / n;
    let mean = rough + residual;

    let mut sums = vec![NeumaierSum::new(); order - 1];
    for &x in data {
        let d = x - mean;
        let mut power = d;
        for acc in sums.iter_mut() {
            power *= d;
            acc.add(power);
        }
    }

    Ok(CentralSums {
        count: data.len() as u64,
        mean,
        sums: sums.iter().map(NeumaierSum::total).collect(),
    })
}
