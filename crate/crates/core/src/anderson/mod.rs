//! Discrete Anderson comparison model on `Z^d` with a long-range potential
//! `v_α = Σ_β ω_β (1 + |α - β|)^{-ν}`, and analytic probability bounds for the
//! small-potential events that drive the Lifshitz tail.

pub mod bounds;
pub mod model;
pub mod potential;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeCube;

pub use bounds::{
    chernoff_bound_p1, chernoff_bound_p2, product_bound_p_eps_alpha_1, product_bound_p_eps_alpha_2,
    BoundEvaluation, BoundName, OptimizerReport,
};
pub use model::{
    anderson_ids, assemble_anderson, eigenvalue_below_probability, AndersonInstance, AndersonModel,
};
pub use potential::{
    long_range_potential, potential_cutoff, potential_on_box, potential_tail_bound,
};

/// Relative slack when flooring radii such as `ζ^{-(1/2+α)}` that are integers
/// in exact arithmetic.
pub(crate) const FLOOR_SLACK: f64 = 1e-9;

pub(crate) fn floor_radius(r: f64) -> i64 {
    (r * (1.0 + FLOOR_SLACK)).floor() as i64
}

/// `Λ_α(ζ) = {γ ∈ Z^d : |γ_j| <= ζ^{-(1/2+α)} for all j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub d: usize,
    pub alpha: f64,
    pub zeta: f64,
    pub radius: i64,
}

impl LatticeWindow {
    pub fn new(d: usize, alpha: f64, zeta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("α = {alpha} outside (0, 1)")));
        }
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::Domain(format!("ζ = {zeta} must be positive")));
        }
        let radius = floor_radius(zeta.powf(-(0.5 + alpha)));
        Ok(LatticeWindow {
            d,
            alpha,
            zeta,
            radius,
        })
    }

    pub fn cardinality(&self) -> usize {
        ((2 * self.radius + 1) as usize).pow(self.d as u32)
    }

    pub fn cube(&self) -> LatticeCube {
        LatticeCube::centered(self.d, self.radius)
    }
}
