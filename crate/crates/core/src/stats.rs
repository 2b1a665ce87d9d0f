//! Order-stable reductions for Monte Carlo estimates.

/// Neumaier-compensated sum, evaluated in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Mean and standard error (unbiased variance over `n`) of `values`.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::NAN, samples: 0 };
        }
        let mean = compensated_sum(values) / n as f64;
        if n < 2 {
            return Self { mean, stderr: f64::NAN, samples: n };
        }
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = compensated_sum(&sq) / (n - 1) as f64;
        Self { mean, stderr: (var / n as f64).sqrt(), samples: n }
    }

    /// True when `value` lies within `k` standard errors of the mean. A zero
    /// standard error demands agreement to a relative 1e-9.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        let diff = (self.mean - value).abs();
        let slack = 1e-9 * self.mean.abs().max(value.abs()).max(f64::MIN_POSITIVE);
        diff <= k * self.stderr + slack
    }
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, (compensated_sum(&sq) / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&v), 2.0);
    }

    #[test]
    fn estimate_of_constant_has_zero_stderr() {
        let e = Estimate::from_samples(&[3.5; 10]);
        assert_eq!(e.mean, 3.5);
        assert_eq!(e.stderr, 0.0);
        assert!(e.agrees_with(3.5, 3.0));
        assert!(!e.agrees_with(3.6, 3.0));
    }

    #[test]
    fn estimate_matches_textbook() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((e.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }
}
