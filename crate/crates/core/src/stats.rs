//! Sample statistics shared by the Monte-Carlo estimators.

use serde::Serialize;

/// Mean and standard error of a Monte-Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(trials)`.
    pub stderr: f64,
    pub trials: usize,
}

impl MCEstimate {
    /// Summarizes samples in the order given. The reduction is sequential so
    /// the result only depends on the sample order.
    ///
    /// Panics on an empty slice.
    pub fn from_samples(samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "at least one sample is required");
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        MCEstimate {
            mean,
            stderr,
            trials: n,
        }
    }
}

/// Paired comparison of two statistics measured on the same trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairedEstimate {
    pub numerator: MCEstimate,
    pub denominator: MCEstimate,
    /// `numerator.mean / denominator.mean`.
    pub ratio: f64,
    /// Delta-method standard error of the ratio, using the paired residuals
    /// `a_t - ratio * b_t`.
    pub ratio_stderr: f64,
    /// Standard error of the paired difference `a_t - b_t`.
    pub difference_stderr: f64,
}

impl PairedEstimate {
    pub fn from_pairs(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples must have equal length");
        let numerator = MCEstimate::from_samples(a);
        let denominator = MCEstimate::from_samples(b);
        let ratio = if denominator.mean != 0.0 {
            numerator.mean / denominator.mean
        } else if numerator.mean == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let difference_stderr = MCEstimate::from_samples(&diff).stderr;
        let ratio_stderr = if denominator.mean != 0.0 && ratio.is_finite() {
            let resid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - ratio * y).collect();
            MCEstimate::from_samples(&resid).stderr / denominator.mean.abs()
        } else {
            0.0
        };
        PairedEstimate {
            numerator,
            denominator,
            ratio,
            ratio_stderr,
            difference_stderr,
        }
    }
}

/// Pearson correlation of two equally long samples; 0 when either is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples_have_zero_stderr() {
        let e = MCEstimate::from_samples(&[1.0; 10]);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.trials, 10);
    }

    #[test]
    fn single_sample() {
        let e = MCEstimate::from_samples(&[3.5]);
        assert_eq!(e.mean, 3.5);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn known_stderr() {
        // mean 2, sample variance 2.5, stderr sqrt(2.5/5)
        let e = MCEstimate::from_samples(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!((e.mean - 2.0).abs() < 1e-15);
        assert!((e.stderr - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn self_pairing_gives_unit_ratio() {
        let a = [1.0, 2.0, 5.0, 3.0];
        let p = PairedEstimate::from_pairs(&a, &a);
        assert_eq!(p.ratio, 1.0);
        assert_eq!(p.ratio_stderr, 0.0);
        assert_eq!(p.difference_stderr, 0.0);
    }
}
