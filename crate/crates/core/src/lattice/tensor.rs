use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::geometry::MAX_DIM;

/// A `d × d` real matrix, intended symmetric, padded to `3 × 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    pub d: usize,
    pub a: [[f64; MAX_DIM]; MAX_DIM],
}

impl SymTensor {
    pub fn zeros(d: usize) -> Self {
        SymTensor {
            d,
            a: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn scalar(d: usize, s: f64) -> Self {
        let mut t = Self::zeros(d);
        for j in 0..d {
            t.a[j][j] = s;
        }
        t
    }

    pub fn identity(d: usize) -> Self {
        Self::scalar(d, 1.0)
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut t = Self::zeros(values.len());
        for (j, &v) in values.iter().enumerate() {
            t.a[j][j] = v;
        }
        t
    }

    /// From row-major entries; no symmetry is enforced here.
    pub fn from_rows(d: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), d * d);
        let mut t = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                t.a[i][j] = rows[i * d + j];
            }
        }
        t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.d {
            for j in 0..i {
                m = m.max((self.a[i][j] - self.a[j][i]).abs());
            }
        }
        m
    }

    pub fn add(&self, other: &SymTensor) -> SymTensor {
        let mut t = *self;
        for i in 0..self.d {
            for j in 0..self.d {
                t.a[i][j] += other.a[i][j];
            }
        }
        t
    }

    pub fn sub(&self, other: &SymTensor) -> SymTensor {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> SymTensor {
        let mut t = *self;
        for i in 0..self.d {
            for j in 0..self.d {
                t.a[i][j] *= s;
            }
        }
        t
    }

    /// Ascending eigenvalues of the symmetric part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.d {
            1 => vec![self.a[0][0]],
            d => {
                let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (self.a[i][j] + self.a[j][i]));
                let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }

    pub fn eigen_range(&self) -> (f64, f64) {
        let v = self.eigenvalues();
        (v[0], v[v.len() - 1])
    }

    /// Spectral norm of the symmetric part.
    pub fn norm(&self) -> f64 {
        let (lo, hi) = self.eigen_range();
        lo.abs().max(hi.abs())
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.eigen_range().0 >= -tol
    }
}
