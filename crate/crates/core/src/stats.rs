//! Shared statistical conventions used by every report.
//!
//! The conventions are fixed so that emitted tables are method-explicit:
//!
//! * median — midpoint of the two central order statistics for even n
//! * quartiles — linear interpolation between order statistics at
//!   h = (n - 1) * p (the common "linear" quantile method)
//! * standard deviation — sample form (n - 1 denominator), 0 for n = 1
//! * P95 — nearest-rank: the ceil(0.95 * n)-th order statistic
//!
//! All functions return `None` on empty input; callers translate that into
//! their own empty-input errors. Inputs are assumed finite.

/// Arithmetic mean.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    v
}

/// Median: middle order statistic, or the mean of the central two.
pub fn median(values: &[f64]) -> Option<f64> {
    let v = sorted(values);
    median_of_sorted(&v)
}

fn median_of_sorted(v: &[f64]) -> Option<f64> {
    let n = v.len();
    if n == 0 {
        return None;
    }
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Quantile by linear interpolation between order statistics at
/// h = (n - 1) * p. `p` must lie in [0, 1].
pub fn quantile_linear(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let v = sorted(values);
    Some(quantile_of_sorted(&v, p))
}

fn quantile_of_sorted(v: &[f64], p: f64) -> f64 {
    let n = v.len();
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (v[hi] - v[lo]) * (h - lo as f64)
    }
}

/// (q1, median, q3) under the shared conventions.
pub fn quartiles(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let v = sorted(values);
    Some((
        quantile_of_sorted(&v, 0.25),
        median_of_sorted(&v).expect("non-empty"),
        quantile_of_sorted(&v, 0.75),
    ))
}

/// Sample standard deviation via Welford's recurrence; 0.0 for a single value.
pub fn sample_stddev(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(0.0);
    }
    let mut count = 0.0;
    let mut running_mean = 0.0;
    let mut m2 = 0.0;
    for &x in values {
        count += 1.0;
        let delta = x - running_mean;
        running_mean += delta / count;
        m2 += delta * (x - running_mean);
    }
    Some((m2 / (count - 1.0)).sqrt())
}

/// Nearest-rank 95th percentile: the ceil(0.95 * n)-th smallest value.
pub fn p95_nearest_rank(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let v = sorted(values);
    let rank = ((0.95 * v.len() as f64).ceil() as usize).max(1);
    Some(v[rank - 1])
}

/// Five-number summary for box-plot exports.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number(values: &[f64]) -> Option<FiveNumber> {
    if values.is_empty() {
        return None;
    }
    let v = sorted(values);
    let (q1, med, q3) = (
        quantile_of_sorted(&v, 0.25),
        median_of_sorted(&v).expect("non-empty"),
        quantile_of_sorted(&v, 0.75),
    );
    Some(FiveNumber {
        min: v[0],
        q1,
        median: med,
        q3,
        max: v[v.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn median_of_three_point_spread() {
        assert_eq!(median(&[0.0, 50.0, 100.0]), Some(50.0));
    }

    #[test]
    fn p95_nearest_rank_hand_case() {
        let mut v = vec![0.0; 9];
        v.push(10.0);
        assert_eq!(p95_nearest_rank(&v), Some(10.0));
        assert_eq!(median(&v), Some(0.0));
        assert_abs_diff_eq!(mean(&v).unwrap(), 1.0);
    }

    #[test]
    fn p95_single_element() {
        assert_eq!(p95_nearest_rank(&[7.5]), Some(7.5));
    }

    #[test]
    fn quartiles_constant_input() {
        let (q1, med, q3) = quartiles(&[84.0; 6]).unwrap();
        assert_eq!((q1, med, q3), (84.0, 84.0, 84.0));
        assert_eq!(sample_stddev(&[84.0; 6]), Some(0.0));
    }

    #[test]
    fn stddev_single_value_is_zero() {
        assert_eq!(sample_stddev(&[42.0]), Some(0.0));
    }

    // Independent oracle routes: full-sort index arithmetic for quantiles and
    // the two-pass variance formula for the standard deviation.
    fn oracle_quantile(values: &[f64], p: f64) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = (v.len() as f64 - 1.0) * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if lo + 1 < v.len() {
            (1.0 - frac) * v[lo] + frac * v[lo + 1]
        } else {
            v[lo]
        }
    }

    fn oracle_stddev_two_pass(values: &[f64]) -> f64 {
        if values.len() < 2 {
            return 0.0;
        }
        let m = values.iter().sum::<f64>() / values.len() as f64;
        let ss = values.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
        (ss / (values.len() as f64 - 1.0)).sqrt()
    }

    #[test]
    fn random_arrays_match_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..60);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
            let (q1, med, q3) = quartiles(&values).unwrap();
            assert_abs_diff_eq!(q1, oracle_quantile(&values, 0.25), epsilon = 1e-9);
            assert_abs_diff_eq!(med, oracle_quantile(&values, 0.5), epsilon = 1e-9);
            assert_abs_diff_eq!(q3, oracle_quantile(&values, 0.75), epsilon = 1e-9);
            assert_abs_diff_eq!(
                sample_stddev(&values).unwrap(),
                oracle_stddev_two_pass(&values),
                epsilon = 1e-9
            );
        }
    }
}
