use nalgebra::{DMatrix, DVector};

use super::{CsrMatrix, Scalar};

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues<T: Scalar>(a: &DMatrix<T>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let ev: DVector<f64> = a.clone().symmetric_eigenvalues();
    let mut v: Vec<f64> = ev.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// All eigenpairs of a Hermitian matrix, ascending; vectors are the columns.
pub fn eigenpairs<T: Scalar>(a: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn csr_eigenvalues<T: Scalar>(a: &CsrMatrix<T>) -> Vec<f64> {
    eigenvalues(&a.to_dense())
}

/// `#{λ <= e}` from a sorted spectrum.
pub fn count_sorted(sorted: &[f64], e: f64) -> usize {
    sorted.partition_point(|&l| l <= e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn sorted_pairs() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let (v, w) = eigenpairs(&a);
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        assert!((w[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((w[(2, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_complex() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one * 2.0, i, -i, one * 2.0]);
        let v = eigenvalues(&a);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn counting_is_closed() {
        assert_eq!(count_sorted(&[1.0, 2.0, 2.0, 3.0], 2.0), 3);
        assert_eq!(count_sorted(&[1.0], 0.5), 0);
    }
}
