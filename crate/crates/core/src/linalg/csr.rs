use nalgebra::{DMatrix, DVector};

use super::Scalar;

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Sums duplicate triplets.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i},{j}) outside {n}x{n}");
            if last == Some((i, j)) {
                let tail = values.last_mut().expect("previous entry");
                *tail += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Like [`from_triplets`](Self::from_triplets), then forces exact Hermitian
    /// symmetry: the strict lower triangle is overwritten by the conjugated
    /// upper triangle and the diagonal is made real. The sparsity pattern of the
    /// triplets must be symmetric.
    pub fn from_triplets_hermitian(n: usize, triplets: Vec<(usize, usize, T)>) -> Self {
        let mut m = Self::from_triplets(n, triplets);
        for i in 0..n {
            for p in m.row_ptr[i]..m.row_ptr[i + 1] {
                let j = m.col_idx[p];
                if j == i {
                    m.values[p] = T::lift(m.values[p].re());
                } else if j < i {
                    let upper = m.get(j, i).unwrap_or_else(T::zero);
                    m.values[p] = upper.conj();
                }
            }
        }
        m
    }

    pub fn from_dense(a: &DMatrix<T>) -> Self {
        let n = a.nrows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)];
                if v != T::zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, T::one())).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .binary_search(&j)
            .ok()
            .map(|p| self.values[r.start + p])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Maximum absolute row sum (equals the 1-norm for Hermitian matrices).
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs_val()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|` over stored entries.
    pub fn hermitian_defect(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| {
                let w = self.get(j, i).unwrap_or_else(T::zero);
                (v - w.conj()).abs_val()
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).fold(T::zero(), |acc, (j, v)| acc + v * x[j]))
            .collect()
    }

    pub fn mul_dvec(&self, x: &DVector<T>) -> DVector<T> {
        DVector::from_vec(self.mul_vec(x.as_slice()))
    }

    /// `self * x` for a dense block of column vectors.
    pub fn mul_dense(&self, x: &DMatrix<T>) -> DMatrix<T> {
        let mut y = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            let col = x.column(c);
            for i in 0..self.n {
                y[(i, c)] = self.row(i).fold(T::zero(), |acc, (j, v)| acc + v * col[j]);
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            a[(i, j)] = v;
        }
        a
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &CsrMatrix<T>, alpha: f64) -> CsrMatrix<T> {
        assert_eq!(self.n, other.n);
        let a = T::lift(alpha);
        let t = self
            .triplets()
            .chain(other.triplets().map(|(i, j, v)| (i, j, v * a)))
            .collect();
        CsrMatrix::from_triplets(self.n, t)
    }

    /// Matrix with identical pattern and entries mapped through `f`.
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 1, 1.0), (0, 1, 2.0), (1, 0, 3.0)]);
        assert_eq!(m.get(0, 1), Some(3.0));
        assert_eq!(m.get(1, 0), Some(3.0));
        assert_eq!(m.get(0, 0), None);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn hermitian_constructor_is_exact() {
        let z = Complex64::new(0.1, 0.7);
        let m = CsrMatrix::from_triplets_hermitian(
            2,
            vec![
                (0, 0, Complex64::new(2.0, 1e-17)),
                (0, 1, z),
                (1, 0, z.conj() * 1.000000001),
                (1, 1, Complex64::new(1.0, 0.0)),
            ],
        );
        assert_eq!(m.hermitian_defect(), 0.0);
        assert_eq!(m.get(0, 0).unwrap().im, 0.0);
    }

    #[test]
    fn norm_and_product() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (2, 2, 5.0),
            ],
        );
        assert_eq!(m.norm1(), 5.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![1.0, 1.0, 5.0]);
    }
}
