//! Lower weighted median.

use super::ExposureError;

/// Smallest value whose cumulative weight reaches half the total weight
/// (the lower weighted median). With integer weights this equals the plain
/// lower median of the weight-expanded list.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64, ExposureError> {
    assert_eq!(values.len(), weights.len(), "values/weights length mismatch");
    if values.is_empty() {
        return Err(ExposureError::EmptyMedian);
    }
    if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
        return Err(ExposureError::NegativeWeight(w));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(ExposureError::AllWeightsZero);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut cum = 0.0;
    for &k in &order {
        cum += weights[k];
        if cum >= total / 2.0 {
            return Ok(values[k]);
        }
    }
    // Unreachable barring rounding in the cumulative sum; return the max.
    Ok(values[*order.last().unwrap()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weights_is_plain_median() {
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(weighted_median(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn scale_invariance() {
        let v = [5.0, 1.0, 9.0, 4.0];
        let w = [0.5, 2.0, 1.0, 1.5];
        let w2: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
        assert_eq!(weighted_median(&v, &w).unwrap(), weighted_median(&v, &w2).unwrap());
    }

    #[test]
    fn all_zero_weights_is_an_error() {
        assert_eq!(
            weighted_median(&[1.0, 2.0], &[0.0, 0.0]),
            Err(ExposureError::AllWeightsZero)
        );
        assert_eq!(weighted_median(&[], &[]), Err(ExposureError::EmptyMedian));
    }

    /// Against the expansion oracle: with integer weights, the weighted
    /// median equals the lower median of the list with each value repeated
    /// weight times.
    #[test]
    fn integer_weight_expansion_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-50..50) as f64).collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
            if weights.iter().sum::<f64>() == 0.0 {
                continue;
            }
            let mut expanded = Vec::new();
            for (v, w) in values.iter().zip(&weights) {
                expanded.extend(std::iter::repeat(*v).take(*w as usize));
            }
            expanded.sort_by(f64::total_cmp);
            // Lower median: element at ceil(n/2) - 1.
            let oracle = expanded[expanded.len().div_ceil(2) - 1];
            assert_eq!(weighted_median(&values, &weights).unwrap(), oracle);
        }
    }
}
