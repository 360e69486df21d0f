//! Eigenvalue counting, eigenpairs, Floquet bands and spectral gaps.

pub mod bands;
pub mod count;
pub mod eigen;
pub mod gaps;

pub use bands::{bands_on_grid, floquet_bands, periodic_ids_curve, BandStructure};
pub use count::{count_eigenvalues_below, count_matrix_below, InertiaCounter};
pub use eigen::{
    all_eigenvalues, distance_to_spectrum, lowest_eigenpairs, EigenVectors, Method, SpectrumSummary,
};
pub use gaps::{gaps_from_ranges, spectral_gaps, GapReport};
