//! Envelope (profile) `L D L^H` factorization of a shifted Hermitian matrix
//! without pivoting. By Sylvester's law of inertia the number of negative
//! pivots of `A - σI` equals the number of eigenvalues of `A` below `σ`.

use crate::error::{Error, Result};

use super::ordering::reverse_cuthill_mckee;
use super::{CsrMatrix, Scalar};

/// Factorization `P (A - σ I) P^T = L D L^H` with `L` unit lower triangular
/// stored row-wise over its envelope.
#[derive(Clone, Debug)]
pub struct ProfileLdl<T> {
    n: usize,
    shift: f64,
    perm: Vec<usize>,
    inv: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    l: Vec<T>,
    d: Vec<f64>,
}

/// Precomputed ordering and envelope shared by factorizations at many shifts.
#[derive(Clone, Debug)]
pub struct Envelope {
    perm: Vec<usize>,
    inv: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
}

impl Envelope {
    pub fn new<T: Scalar>(a: &CsrMatrix<T>) -> Envelope {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, _) in a.triplets() {
            let (ni, nj) = (inv[i], inv[j]);
            if nj < ni {
                first[ni] = first[ni].min(nj);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i]));
        }
        Envelope {
            perm,
            inv,
            first,
            start,
        }
    }

    /// Number of stored off-diagonal entries of `L`.
    pub fn size(&self) -> usize {
        *self.start.last().unwrap_or(&0)
    }
}

impl<T: Scalar> ProfileLdl<T> {
    /// Factors `A - shift I`; fails if a pivot has modulus `<= pivot_tol`.
    pub fn factor(a: &CsrMatrix<T>, shift: f64, pivot_tol: f64) -> Result<Self> {
        Self::factor_with(a, &Envelope::new(a), shift, pivot_tol)
    }

    pub fn factor_with(
        a: &CsrMatrix<T>,
        env: &Envelope,
        shift: f64,
        pivot_tol: f64,
    ) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![T::zero(); env.size()];
        let mut d = vec![0.0; n];
        let mut g: Vec<T> = Vec::new();
        for i in 0..n {
            let fi = env.first[i];
            g.clear();
            g.resize(i - fi, T::zero());
            let mut diag = -shift;
            for (jold, v) in a.row(env.perm[i]) {
                let j = env.inv[jold];
                if j < i {
                    g[j - fi] = v;
                } else if j == i {
                    diag += v.re();
                }
            }
            // g_j <- A_ij - sum_k g_k conj(L_jk), turning g into (L D)_i.
            for j in fi..i {
                let fj = env.first[j];
                let lo = fi.max(fj);
                let row_j = &l[env.start[j]..env.start[j + 1]];
                let mut s = T::zero();
                for k in lo..j {
                    s += g[k - fi] * row_j[k - fj].conj();
                }
                g[j - fi] -= s;
            }
            let row_i = &mut l[env.start[i]..env.start[i + 1]];
            for j in fi..i {
                let lij = g[j - fi] * T::lift(1.0 / d[j]);
                diag -= (g[j - fi] * lij.conj()).re();
                row_i[j - fi] = lij;
            }
            if !(diag.abs() > pivot_tol) {
                return Err(Error::Breakdown {
                    index: i,
                    pivot: diag,
                    attempts: 1,
                });
            }
            d[i] = diag;
        }
        Ok(ProfileLdl {
            n,
            shift,
            perm: env.perm.clone(),
            inv: env.inv.clone(),
            first: env.first.clone(),
            start: env.start.clone(),
            l,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Number of negative pivots, i.e. eigenvalues of `A` strictly below the shift.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Solves `(A - shift I) x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y: Vec<T> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            let mut s = T::zero();
            for (off, &lij) in row.iter().enumerate() {
                s += lij * y[fi + off];
            }
            y[i] -= s;
        }
        for i in 0..n {
            y[i] *= T::lift(1.0 / self.d[i]);
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            for (off, &lij) in row.iter().enumerate() {
                y[fi + off] -= lij.conj() * yi;
            }
        }
        (0..n).map(|old| y[self.inv[old]]).collect()
    }
}

/// `#{λ_j(A) < sigma + offset}` by inertia. On breakdown the offset is doubled
/// and the factorization retried, at most `retries` times. Returns the count and
/// the shift actually used.
pub fn count_below_shift<T: Scalar>(
    a: &CsrMatrix<T>,
    env: &Envelope,
    sigma: f64,
    offset: f64,
    pivot_tol: f64,
    retries: usize,
) -> Result<(usize, f64)> {
    let mut eta = offset;
    let mut last = None;
    for attempt in 0..=retries {
        let shift = sigma + eta;
        match ProfileLdl::factor_with(a, env, shift, pivot_tol) {
            Ok(f) => return Ok((f.negative_count(), shift)),
            Err(Error::Breakdown { index, pivot, .. }) => {
                last = Some((index, pivot, attempt + 1));
                eta *= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    let (index, pivot, attempts) = last.expect("at least one attempt");
    Err(Error::Breakdown {
        index,
        pivot,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

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
    fn inertia_of_diagonal() {
        let a = CsrMatrix::from_triplets(3, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]);
        let f = ProfileLdl::factor(&a, 2.5, 1e-14).unwrap();
        assert_eq!(f.negative_count(), 2);
    }

    #[test]
    fn exact_hit_breaks_down() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, 2.0)]);
        assert!(matches!(
            ProfileLdl::factor(&a, 2.0, 1e-14),
            Err(Error::Breakdown { .. })
        ));
    }

    #[test]
    fn solve_matches_product() {
        let a = laplacian(30);
        let f = ProfileLdl::factor(&a, 0.37, 1e-14).unwrap();
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = a.mul_vec(&x);
        for i in 0..30 {
            b[i] -= 0.37 * x[i];
        }
        let y = f.solve(&b);
        for i in 0..30 {
            assert!((y[i] - x[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_ring_solve_and_count() {
        let n = 12;
        let phase = Complex64::from_polar(1.0, 0.8);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Complex64::new(2.0, 0.0)));
            let j = (i + 1) % n;
            let w = if j == 0 {
                -phase
            } else {
                Complex64::new(-1.0, 0.0)
            };
            t.push((i, j, w));
            t.push((j, i, w.conj()));
        }
        let a = CsrMatrix::from_triplets(n, t);
        // Spectrum 2 - 2 cos((0.8 + 2πj)/n).
        let mut ev: Vec<f64> = (0..n)
            .map(|j| 2.0 - 2.0 * ((0.8 + 2.0 * std::f64::consts::PI * j as f64) / n as f64).cos())
            .collect();
        ev.sort_by(f64::total_cmp);
        let sigma = 0.5 * (ev[4] + ev[5]);
        let f = ProfileLdl::factor(&a, sigma, 1e-14).unwrap();
        assert_eq!(f.negative_count(), 5);
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut b = a.mul_vec(&x);
        for i in 0..n {
            b[i] -= x[i] * sigma;
        }
        let y = f.solve(&b);
        for i in 0..n {
            assert!((y[i] - x[i]).norm() < 1e-9);
        }
    }
}
