use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{AssembledOperator, OperatorMatrix};
use crate::linalg::ldl::{count_below_shift, Envelope};
use crate::linalg::CsrMatrix;

/// Relative offset realizing the closed inequality `λ <= E`.
pub const COUNT_OFFSET: f64 = 1e-12;
/// Pivots below this (relative to `‖A‖₁`) count as breakdown.
pub const PIVOT_TOL: f64 = 1e-14;
pub const COUNT_RETRIES: usize = 10;

/// Reusable inertia counter: the ordering and envelope are computed once.
#[derive(Clone, Debug)]
pub struct InertiaCounter {
    matrix: Matrix,
    env: Envelope,
    norm: f64,
}

#[derive(Clone, Debug)]
enum Matrix {
    Real(CsrMatrix<f64>),
    Complex(CsrMatrix<Complex64>),
}

impl InertiaCounter {
    pub fn new(m: &OperatorMatrix) -> Self {
        let (matrix, env) = match m {
            OperatorMatrix::Real(a) => (Matrix::Real(a.clone()), Envelope::new(a)),
            OperatorMatrix::Complex(a) => (Matrix::Complex(a.clone()), Envelope::new(a)),
        };
        InertiaCounter {
            matrix,
            env,
            norm: m.norm1(),
        }
    }

    /// `#{λ_j <= e}`, realized as the negative inertia of
    /// `A - (e + η) I` with `η = 10⁻¹² ‖A‖₁`.
    pub fn count_below(&self, e: f64) -> Result<usize> {
        let scale = if self.norm > 0.0 { self.norm } else { 1.0 };
        let eta = COUNT_OFFSET * scale;
        let tol = PIVOT_TOL * scale;
        let (count, _) = match &self.matrix {
            Matrix::Real(a) => count_below_shift(a, &self.env, e, eta, tol, COUNT_RETRIES)?,
            Matrix::Complex(a) => count_below_shift(a, &self.env, e, eta, tol, COUNT_RETRIES)?,
        };
        Ok(count)
    }

    pub fn counts(&self, energies: &[f64]) -> Result<Vec<usize>> {
        energies.iter().map(|&e| self.count_below(e)).collect()
    }
}

pub fn count_eigenvalues_below(a: &AssembledOperator, e: f64) -> Result<usize> {
    count_matrix_below(&a.matrix, e)
}

pub fn count_matrix_below(m: &OperatorMatrix, e: f64) -> Result<usize> {
    InertiaCounter::new(m).count_below(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, t: Vec<(usize, usize, f64)>) -> OperatorMatrix {
        OperatorMatrix::Real(CsrMatrix::from_triplets(n, t))
    }

    #[test]
    fn diagonal_count() {
        let a = real(3, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]);
        assert_eq!(count_matrix_below(&a, 2.5).unwrap(), 2);
    }

    #[test]
    fn closed_inequality_at_exact_hit() {
        // 2 - sqrt 2, 2, 2 + sqrt 2
        let a = real(
            3,
            vec![
                (0, 0, 2.0),
                (1, 1, 2.0),
                (2, 2, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
            ],
        );
        assert_eq!(count_matrix_below(&a, 2.0).unwrap(), 2);
        assert_eq!(count_matrix_below(&a, 2.0 - 1e-9).unwrap(), 1);
    }

    #[test]
    fn zero_matrix() {
        let a = real(2, vec![(0, 0, 0.0), (1, 1, 0.0)]);
        assert_eq!(count_matrix_below(&a, 0.0).unwrap(), 2);
        assert_eq!(count_matrix_below(&a, -1.0).unwrap(), 0);
    }
}
