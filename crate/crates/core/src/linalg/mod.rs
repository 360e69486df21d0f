//! Sparse Hermitian storage, profile LDL^H factorization and eigensolvers.

pub mod csr;
pub mod dense;
pub mod ldl;
pub mod ordering;
pub mod subspace;

use nalgebra::ComplexField;
use num_complex::Complex64;

pub use csr::CsrMatrix;
pub use ldl::ProfileLdl;

/// Entry type of a Hermitian matrix: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    fn re(self) -> f64 {
        ComplexField::real(self)
    }

    fn conj(self) -> Self {
        ComplexField::conjugate(self)
    }

    fn abs_val(self) -> f64 {
        ComplexField::modulus(self)
    }

    fn abs_sq(self) -> f64 {
        ComplexField::modulus_squared(self)
    }

    fn lift(x: f64) -> Self {
        <Self as ComplexField>::from_real(x)
    }
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}
