//! Shift-invert block subspace iteration with Rayleigh–Ritz extraction.

use nalgebra::DMatrix;

use crate::disorder::rng::CounterStream;
use crate::error::{Error, Result};

use super::ldl::{Envelope, ProfileLdl};
use super::{dense, CsrMatrix, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct SubspaceOptions {
    /// Residual target relative to `‖A‖₁`.
    pub tol: f64,
    pub max_iter: usize,
    /// Guard vectors beyond the requested count.
    pub extra: usize,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            tol: 1e-8,
            max_iter: 1000,
            extra: 10,
            seed: 0x5eed,
        }
    }
}

/// The `want` eigenpairs of `a` closest to `sigma`, ascending by eigenvalue.
/// Vectors are orthonormal columns.
pub fn nearest_eigenpairs<T: Scalar>(
    a: &CsrMatrix<T>,
    sigma: f64,
    want: usize,
    opts: &SubspaceOptions,
) -> Result<(Vec<f64>, DMatrix<T>)> {
    let n = a.dim();
    if want == 0 || want > n {
        return Err(Error::Validation(format!(
            "requested {want} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let block = (want + opts.extra.max(want)).min(n);
    if block == n {
        let (vals, vecs) = dense::eigenpairs(&a.to_dense());
        return Ok(select_nearest(&vals, &vecs, sigma, want));
    }

    let norm = a.norm1().max(f64::MIN_POSITIVE);
    let env = Envelope::new(a);
    let mut shift = sigma;
    let mut nudge = 1e-10 * norm;
    let factor = loop {
        match ProfileLdl::factor_with(a, &env, shift, 1e-14 * norm) {
            Ok(f) => break f,
            Err(Error::Breakdown { .. }) if nudge < 1e-3 * norm => {
                shift = sigma + nudge;
                nudge *= 4.0;
            }
            Err(e) => return Err(e),
        }
    };

    let mut stream = CounterStream::new(opts.seed, n as u64);
    let mut x = DMatrix::from_fn(n, block, |_, _| T::lift(stream.range(-1.0, 1.0)));
    let mut best = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let mut y = DMatrix::zeros(n, block);
        for c in 0..block {
            let col: Vec<T> = x.column(c).iter().copied().collect();
            let s = factor.solve(&col);
            y.set_column(c, &nalgebra::DVector::from_vec(s));
        }
        let q = y.qr().q();
        let aq = a.mul_dense(&q);
        let mut h = q.adjoint() * &aq;
        let ht = h.adjoint();
        h = (h + ht) * T::lift(0.5);
        let (theta, w) = dense::eigenpairs(&h);
        x = &q * &w;
        let ax = &aq * &w;

        let sel = nearest_indices(&theta, sigma, want);
        let mut worst = 0.0f64;
        for &i in &sel {
            let r = ax.column(i) - x.column(i) * T::lift(theta[i]);
            worst = worst.max(r.norm());
        }
        best = best.min(worst);
        if worst <= opts.tol * norm {
            return Ok(select_nearest(&theta, &x, sigma, want));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: best / norm,
    })
}

fn nearest_indices(vals: &[f64], sigma: f64, want: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&i, &j| {
        (vals[i] - sigma)
            .abs()
            .total_cmp(&(vals[j] - sigma).abs())
            .then(i.cmp(&j))
    });
    idx.truncate(want);
    idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    idx
}

fn select_nearest<T: Scalar>(
    vals: &[f64],
    vecs: &DMatrix<T>,
    sigma: f64,
    want: usize,
) -> (Vec<f64>, DMatrix<T>) {
    let idx = nearest_indices(vals, sigma, want);
    let values = idx.iter().map(|&i| vals[i]).collect();
    let vectors = DMatrix::from_fn(vecs.nrows(), idx.len(), |r, c| vecs[(r, idx[c])]);
    (values, vectors)
}

/// Lower Gershgorin bound on the spectrum of a Hermitian matrix.
pub fn gershgorin_lower<T: Scalar>(a: &CsrMatrix<T>) -> f64 {
    (0..a.dim())
        .map(|i| {
            let mut diag = 0.0;
            let mut off = 0.0;
            for (j, v) in a.row(i) {
                if j == i {
                    diag = v.re();
                } else {
                    off += v.abs_val();
                }
            }
            diag - off
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn lowest_of_path_laplacian() {
        let n = 400;
        let a = laplacian(n);
        let (vals, vecs) = nearest_eigenpairs(&a, -1e-3, 4, &SubspaceOptions::default()).unwrap();
        for (j, v) in vals.iter().enumerate() {
            let exact = 4.0
                * ((j + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64))
                    .sin()
                    .powi(2);
            assert!((v - exact).abs() < 1e-10 * exact.max(1.0), "{v} vs {exact}");
        }
        let g = vecs.adjoint() * &vecs;
        assert!((g - DMatrix::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn interior_shift() {
        let n = 300;
        let a = laplacian(n);
        let exact: Vec<f64> = (1..=n)
            .map(|j| {
                4.0 * (j as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64))
                    .sin()
                    .powi(2)
            })
            .collect();
        let (vals, _) = nearest_eigenpairs(&a, 1.3, 1, &SubspaceOptions::default()).unwrap();
        let nearest = exact
            .iter()
            .copied()
            .min_by(|x, y| (x - 1.3).abs().total_cmp(&(y - 1.3).abs()))
            .unwrap();
        assert!((vals[0] - nearest).abs() < 1e-10);
    }

    #[test]
    fn gershgorin() {
        assert_eq!(gershgorin_lower(&laplacian(5)), 0.0);
    }
}
