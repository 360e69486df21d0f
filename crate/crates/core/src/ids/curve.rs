use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a curve came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub label: String,
    pub n_realizations: usize,
    /// Physical volume each count was divided by.
    pub volume: f64,
    pub bc: String,
    pub seed: Option<u64>,
}

/// `E ↦ N(E)` on a sorted energy grid, as an ensemble mean with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdsCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub ensemble: Ensemble,
    /// Per-realization curves, kept for admissibility rules and resampling.
    pub samples: Vec<Vec<f64>>,
}

impl IdsCurve {
    pub fn from_samples(
        energies: Vec<f64>,
        samples: Vec<Vec<f64>>,
        ensemble: Ensemble,
    ) -> Result<Self> {
        if energies.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Validation(
                "energy grid must be strictly increasing".into(),
            ));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData("no realizations".into()));
        }
        if samples.iter().any(|s| s.len() != energies.len()) {
            return Err(Error::Validation(
                "sample length differs from energy grid".into(),
            ));
        }
        let n = samples.len() as f64;
        let mut values = vec![0.0; energies.len()];
        let mut stderr = vec![0.0; energies.len()];
        for i in 0..energies.len() {
            let mean = samples.iter().map(|s| s[i]).sum::<f64>() / n;
            values[i] = mean;
            if samples.len() > 1 {
                let var = samples.iter().map(|s| (s[i] - mean).powi(2)).sum::<f64>() / (n - 1.0);
                stderr[i] = (var / n).sqrt();
            }
        }
        Ok(IdsCurve {
            energies,
            values,
            stderr,
            ensemble: Ensemble {
                n_realizations: samples.len(),
                ..ensemble
            },
            samples,
        })
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
            && self
                .samples
                .iter()
                .all(|s| s.windows(2).all(|w| w[0] <= w[1]))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0) && self.stderr.iter().all(|&s| s >= 0.0)
    }

    /// Grid index of `e` (relative match to 1e-12).
    pub fn index_of(&self, e: f64) -> Option<usize> {
        let tol = 1e-12 * e.abs().max(1.0);
        let i = self.energies.partition_point(|&x| x < e - tol);
        (i < self.energies.len() && (self.energies[i] - e).abs() <= tol).then_some(i)
    }

    pub fn value_at(&self, e: f64) -> Option<f64> {
        self.index_of(e).map(|i| self.values[i])
    }
}
