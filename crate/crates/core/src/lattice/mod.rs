//! Boxes, coefficient fields and the discretized divergence-form operator.

pub mod assembly;
pub mod field;
pub mod geometry;
pub mod medium;
pub mod tensor;

pub use assembly::{assemble_grid, assemble_operator, AssembledOperator, OperatorMatrix};
pub use field::{check_ellipticity, sample_coefficient_field, CoefficientField, Provenance};
pub use geometry::{BoundaryCondition, BoxSpec, Grid, GridBoundary, LatticeCube, Site, MAX_DIM};
pub use medium::{PeriodicBackground, ProfileKind, SingleSiteProfile};
pub use tensor::SymTensor;
