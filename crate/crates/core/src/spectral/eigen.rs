use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{AssembledOperator, OperatorMatrix};
use crate::linalg::subspace::{gershgorin_lower, nearest_eigenpairs, SubspaceOptions};
use crate::linalg::{dense, CsrMatrix, Scalar};

/// Dense diagonalization below this many unknowns, iteration above.
pub const DENSE_THRESHOLD: usize = 3000;
/// `distance_to_spectrum` goes dense below this size.
pub const DENSE_DISTANCE_THRESHOLD: usize = 800;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
    Inertia,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EigenVectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl EigenVectors {
    pub fn ncols(&self) -> usize {
        match self {
            EigenVectors::Real(v) => v.ncols(),
            EigenVectors::Complex(v) => v.ncols(),
        }
    }

    /// `|v_j(x)|²` for column `j`.
    pub fn density(&self, j: usize) -> Vec<f64> {
        match self {
            EigenVectors::Real(v) => v.column(j).iter().map(|x| x * x).collect(),
            EigenVectors::Complex(v) => v.column(j).iter().map(|x| x.norm_sqr()).collect(),
        }
    }
}

/// Sorted (possibly partial) spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    /// `true` when every eigenvalue of the operator is listed.
    pub complete: bool,
    pub vectors: Option<EigenVectors>,
}

impl SpectrumSummary {
    /// `#{λ <= e}`, or `None` when a partial list cannot decide it.
    pub fn count_below(&self, e: f64) -> Option<usize> {
        let c = dense::count_sorted(&self.eigenvalues, e);
        if self.complete || c < self.eigenvalues.len() {
            Some(c)
        } else {
            None
        }
    }
}

/// Every eigenvalue, ascending, by dense diagonalization.
pub fn all_eigenvalues(m: &OperatorMatrix) -> Vec<f64> {
    match m {
        OperatorMatrix::Real(a) => dense::csr_eigenvalues(a),
        OperatorMatrix::Complex(a) => dense::csr_eigenvalues(a),
    }
}

/// The `m` smallest eigenpairs with orthonormal vectors.
pub fn lowest_eigenpairs(a: &AssembledOperator, m: usize) -> Result<SpectrumSummary> {
    lowest_of_matrix(&a.matrix, m)
}

pub fn lowest_of_matrix(a: &OperatorMatrix, m: usize) -> Result<SpectrumSummary> {
    let n = a.dim();
    if m == 0 || m > n {
        return Err(Error::Validation(format!(
            "requested {m} eigenpairs of a {n}-dimensional operator"
        )));
    }
    match a {
        OperatorMatrix::Real(x) => lowest_generic(x, m).map(|(v, w, meth)| SpectrumSummary {
            complete: m == n,
            eigenvalues: v,
            method: meth,
            vectors: Some(EigenVectors::Real(w)),
        }),
        OperatorMatrix::Complex(x) => lowest_generic(x, m).map(|(v, w, meth)| SpectrumSummary {
            complete: m == n,
            eigenvalues: v,
            method: meth,
            vectors: Some(EigenVectors::Complex(w)),
        }),
    }
}

fn lowest_generic<T: Scalar>(a: &CsrMatrix<T>, m: usize) -> Result<(Vec<f64>, DMatrix<T>, Method)> {
    let n = a.dim();
    if n < DENSE_THRESHOLD {
        let (vals, vecs) = dense::eigenpairs(&a.to_dense());
        let w = vecs.columns(0, m).into_owned();
        return Ok((vals[..m].to_vec(), w, Method::Dense));
    }
    let norm = a.norm1().max(f64::MIN_POSITIVE);
    let sigma = gershgorin_lower(a) - 1e-6 * norm;
    let (vals, vecs) = nearest_eigenpairs(a, sigma, m, &SubspaceOptions::default())?;
    Ok((vals, vecs, Method::Iterative))
}

/// The `count` eigenvalues closest to `e`, ascending.
pub fn eigenvalues_near(a: &OperatorMatrix, e: f64, count: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    let count = count.min(n);
    if count == 0 {
        return Ok(Vec::new());
    }
    if n <= DENSE_DISTANCE_THRESHOLD {
        let all = all_eigenvalues(a);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| (all[i] - e).abs().total_cmp(&(all[j] - e).abs()));
        let mut v: Vec<f64> = idx[..count].iter().map(|&i| all[i]).collect();
        v.sort_by(f64::total_cmp);
        return Ok(v);
    }
    let opts = SubspaceOptions::default();
    match a {
        OperatorMatrix::Real(x) => nearest_eigenpairs(x, e, count, &opts).map(|r| r.0),
        OperatorMatrix::Complex(x) => nearest_eigenpairs(x, e, count, &opts).map(|r| r.0),
    }
}

/// `min_j |λ_j - e|`.
pub fn distance_to_spectrum(a: &AssembledOperator, e: f64) -> Result<f64> {
    distance_of_matrix(&a.matrix, e)
}

pub fn distance_of_matrix(a: &OperatorMatrix, e: f64) -> Result<f64> {
    let v = eigenvalues_near(a, e, 1)?;
    v.first()
        .map(|l| (l - e).abs())
        .ok_or_else(|| Error::Validation("empty operator".into()))
}
