use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};

/// Binomial frequency with an exact two-sided interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64, confidence: f64) -> Result<Self> {
        let (lo, hi) = clopper_pearson(successes, trials, confidence)?;
        Ok(Proportion {
            trials,
            successes,
            estimate: successes as f64 / trials as f64,
            lo,
            hi,
        })
    }

    /// `sqrt(p(1-p)/n)` at the observed frequency.
    pub fn stderr(&self) -> f64 {
        binomial_se(self.estimate, self.trials)
    }
}

pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Clopper–Pearson interval for `successes` out of `trials`.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InsufficientData("no trials".into()));
    }
    if successes > trials {
        return Err(Error::Validation(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Validation(format!(
            "confidence {confidence} outside (0, 1)"
        )));
    }
    let a = 0.5 * (1.0 - confidence);
    let (x, n) = (successes as f64, trials as f64);
    let beta = |p: f64, s: f64, f: f64| -> Result<f64> {
        Beta::new(s, f)
            .map(|b| b.inverse_cdf(p))
            .map_err(|e| Error::Numerical(format!("beta quantile: {e}")))
    };
    let lo = if successes == 0 {
        0.0
    } else {
        beta(a, x, n - x + 1.0)?
    };
    let hi = if successes == trials {
        1.0
    } else {
        beta(1.0 - a, x + 1.0, n - x)?
    };
    Ok((lo, hi))
}

/// Mean and (n-1)-normalized standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sided percentile interval of `xs` at `confidence` (sorts a copy).
pub fn percentile_interval(xs: &[f64], confidence: f64) -> (f64, f64) {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let (i, frac) = (pos.floor() as usize, pos - pos.floor());
        if i + 1 < v.len() {
            v[i] * (1.0 - frac) + v[i + 1] * frac
        } else {
            v[i]
        }
    };
    let a = 0.5 * (1.0 - confidence);
    (q(a), q(1.0 - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_edges() {
        let (lo, hi) = clopper_pearson(0, 10, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        // 1 - 0.025^{1/10}
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-10);
        let (lo, hi) = clopper_pearson(10, 10, 0.95).unwrap();
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-10);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn clopper_pearson_reference_value() {
        // 5 of 20: exact interval (0.0866, 0.4910).
        let (lo, hi) = clopper_pearson(5, 20, 0.95).unwrap();
        assert!((lo - 0.086_57).abs() < 1e-4);
        assert!((hi - 0.491_04).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(clopper_pearson(3, 2, 0.95).is_err());
        assert!(clopper_pearson(0, 0, 0.95).is_err());
    }

    #[test]
    fn percentiles() {
        let xs: Vec<f64> = (0..=100).map(f64::from).collect();
        let (lo, hi) = percentile_interval(&xs, 0.9);
        assert!((lo - 5.0).abs() < 1e-12 && (hi - 95.0).abs() < 1e-12);
    }
}
