use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// A point of `Z^d`, padded with zeros beyond the active dimension.
pub type Site = [i64; MAX_DIM];

/// Boundary condition of a finite box.
///
/// Quasi-periodic conditions read `u(x + L e_j) = exp(i theta_j L) u(x)` where `L`
/// is the physical side of the box and `theta` is given per unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Periodic,
    Quasiperiodic { theta: Vec<f64> },
}

impl BoundaryCondition {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Quasiperiodic { .. } => "quasiperiodic",
        }
    }
}

/// The box `Λ_k` of side `2k + 1` unit cells centred at the origin, discretized
/// with `m` grid points per unit length along each axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub bc: BoundaryCondition,
}

impl BoxSpec {
    pub fn new(d: usize, k: usize, m: usize, bc: BoundaryCondition) -> Result<Self> {
        let spec = BoxSpec { d, k, m, bc };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_DIM {
            return Err(Error::Validation(format!(
                "dimension must be in 1..={MAX_DIM}, got {}",
                self.d
            )));
        }
        if self.m < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 grid points per unit cell, got {}",
                self.m
            )));
        }
        if let BoundaryCondition::Quasiperiodic { theta } = &self.bc {
            if theta.len() != self.d {
                return Err(Error::Validation(format!(
                    "quasimomentum has {} components, box dimension is {}",
                    theta.len(),
                    self.d
                )));
            }
            if let Some(t) = theta.iter().find(|t| !(0.0..2.0 * PI).contains(*t)) {
                return Err(Error::Validation(format!(
                    "quasimomentum component {t} outside [0, 2pi)"
                )));
            }
        }
        Ok(())
    }

    /// Physical side length `2k + 1`.
    pub fn side(&self) -> usize {
        2 * self.k + 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Lebesgue volume `(2k+1)^d`, independent of the mesh.
    pub fn volume(&self) -> f64 {
        (self.side() as f64).powi(self.d as i32)
    }

    pub fn grid(&self) -> Grid {
        let n = self.side() * self.m;
        let half = self.side() as f64 / 2.0;
        let mut cells = [1; MAX_DIM];
        let mut origin = [0.0; MAX_DIM];
        for j in 0..self.d {
            cells[j] = n;
            origin[j] = -half;
        }
        let boundary = match &self.bc {
            BoundaryCondition::Dirichlet => GridBoundary::Dirichlet,
            BoundaryCondition::Periodic => GridBoundary::Periodic {
                phase: [0.0; MAX_DIM],
            },
            BoundaryCondition::Quasiperiodic { theta } => {
                let mut phase = [0.0; MAX_DIM];
                for j in 0..self.d {
                    phase[j] = theta[j] * self.side() as f64;
                }
                GridBoundary::Periodic { phase }
            }
        };
        Grid {
            d: self.d,
            cells,
            h: self.h(),
            origin,
            boundary,
        }
    }

    /// All lattice sites `γ ∈ C_k ∩ Z^d`.
    pub fn sites(&self) -> LatticeCube {
        LatticeCube::centered(self.d, self.k as i64)
    }
}

/// Boundary handling at the level of a concrete grid. `phase` is the angle picked
/// up when crossing the seam of each axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridBoundary {
    Dirichlet,
    Periodic { phase: [f64; MAX_DIM] },
}

/// Uniform tensor grid of `cells[j]` cells of width `h` along axis `j`.
///
/// Unknowns sit on cell vertices; vertex `i` on axis `j` is at `origin[j] + i h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub d: usize,
    pub cells: [usize; MAX_DIM],
    pub h: f64,
    pub origin: [f64; MAX_DIM],
    pub boundary: GridBoundary,
}

impl Grid {
    /// Grid of `cells` cells per axis with the given width, no box attached.
    pub fn uniform(d: usize, cells: usize, h: f64, boundary: GridBoundary) -> Grid {
        let mut c = [1; MAX_DIM];
        let mut origin = [0.0; MAX_DIM];
        for j in 0..d {
            c[j] = cells;
            origin[j] = -(cells as f64) * h / 2.0;
        }
        Grid {
            d,
            cells: c,
            h,
            origin,
            boundary,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells[..self.d].iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.cells[..self.d]
            .iter()
            .map(|&n| n as f64 * self.h)
            .product()
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.boundary, GridBoundary::Periodic { .. })
    }

    /// Number of unknowns along axis `j`.
    pub fn vertices_along(&self, j: usize) -> usize {
        match self.boundary {
            GridBoundary::Dirichlet => self.cells[j].saturating_sub(1),
            GridBoundary::Periodic { .. } => self.cells[j],
        }
    }

    pub fn dof_count(&self) -> usize {
        (0..self.d).map(|j| self.vertices_along(j)).product()
    }

    /// Multi-index of cell `flat` (last axis fastest).
    pub fn cell_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        let mut rest = flat;
        for j in (0..self.d).rev() {
            idx[j] = rest % self.cells[j];
            rest /= self.cells[j];
        }
        idx
    }

    pub fn cell_center(&self, idx: &[usize; MAX_DIM]) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for j in 0..self.d {
            x[j] = self.origin[j] + (idx[j] as f64 + 0.5) * self.h;
        }
        x
    }

    /// Physical coordinates of every unknown, in dof order.
    pub fn dof_positions(&self) -> Vec<[f64; MAX_DIM]> {
        let n: Vec<usize> = (0..self.d).map(|j| self.vertices_along(j)).collect();
        let offset = match self.boundary {
            GridBoundary::Dirichlet => 1,
            GridBoundary::Periodic { .. } => 0,
        };
        let total: usize = n.iter().product();
        (0..total)
            .map(|flat| {
                let mut rest = flat;
                let mut x = [0.0; MAX_DIM];
                for j in (0..self.d).rev() {
                    let i = rest % n[j];
                    rest /= n[j];
                    x[j] = self.origin[j] + (i + offset) as f64 * self.h;
                }
                x
            })
            .collect()
    }

    /// Side lengths for minimum-image distances when the grid is periodic.
    pub fn period(&self) -> Option<[f64; MAX_DIM]> {
        if self.is_periodic() {
            let mut p = [0.0; MAX_DIM];
            for j in 0..self.d {
                p[j] = self.cells[j] as f64 * self.h;
            }
            Some(p)
        } else {
            None
        }
    }
}

/// Axis-aligned block `[lo, hi]` (inclusive) of lattice sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCube {
    pub d: usize,
    pub lo: Site,
    pub hi: Site,
}

impl LatticeCube {
    pub fn new(d: usize, lo: Site, hi: Site) -> Self {
        LatticeCube { d, lo, hi }
    }

    /// `{γ : |γ_j| <= r for all j}`.
    pub fn centered(d: usize, r: i64) -> Self {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for j in 0..d {
            lo[j] = -r;
            hi[j] = r;
        }
        LatticeCube { d, lo, hi }
    }

    pub fn extent(&self, j: usize) -> usize {
        if self.hi[j] < self.lo[j] {
            0
        } else {
            (self.hi[j] - self.lo[j] + 1) as usize
        }
    }

    pub fn len(&self) -> usize {
        (0..self.d).map(|j| self.extent(j)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, site: &Site) -> bool {
        (0..self.d).all(|j| site[j] >= self.lo[j] && site[j] <= self.hi[j])
    }

    pub fn contains_cube(&self, other: &LatticeCube) -> bool {
        other.is_empty()
            || (0..self.d).all(|j| other.lo[j] >= self.lo[j] && other.hi[j] <= self.hi[j])
    }

    /// Row-major offset of `site`, last axis fastest.
    pub fn offset(&self, site: &Site) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        let mut off = 0usize;
        for j in 0..self.d {
            off = off * self.extent(j) + (site[j] - self.lo[j]) as usize;
        }
        Some(off)
    }

    pub fn site_at(&self, offset: usize) -> Site {
        let mut site = [0; MAX_DIM];
        let mut rest = offset;
        for j in (0..self.d).rev() {
            let e = self.extent(j);
            site[j] = self.lo[j] + (rest % e) as i64;
            rest /= e;
        }
        site
    }

    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len()).map(move |o| self.site_at(o))
    }
}

/// Euclidean norm of the first `d` components.
pub fn norm(d: usize, x: &[f64; MAX_DIM]) -> f64 {
    x[..d].iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn site_norm(d: usize, s: &Site) -> f64 {
    s[..d].iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()
}

pub fn site_linf(d: usize, s: &Site) -> i64 {
    s[..d].iter().map(|v| v.abs()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_grid_counts() {
        let b = BoxSpec::new(1, 0, 2, BoundaryCondition::Dirichlet).unwrap();
        let g = b.grid();
        assert_eq!(g.dof_count(), 1);
        assert_eq!(b.volume(), 1.0);

        let b = BoxSpec::new(2, 1, 3, BoundaryCondition::Periodic).unwrap();
        assert_eq!(b.grid().dof_count(), 81);
        assert_eq!(b.volume(), 9.0);
    }

    #[test]
    fn box_validation() {
        assert!(BoxSpec::new(0, 1, 2, BoundaryCondition::Periodic).is_err());
        assert!(BoxSpec::new(1, 1, 1, BoundaryCondition::Periodic).is_err());
        assert!(BoxSpec::new(
            2,
            1,
            2,
            BoundaryCondition::Quasiperiodic { theta: vec![0.1] }
        )
        .is_err());
        assert!(BoxSpec::new(
            1,
            1,
            2,
            BoundaryCondition::Quasiperiodic { theta: vec![7.0] }
        )
        .is_err());
    }

    #[test]
    fn cell_centers_offset_by_half_width() {
        let b = BoxSpec::new(1, 1, 2, BoundaryCondition::Periodic).unwrap();
        let g = b.grid();
        assert_eq!(g.cell_center(&[0, 0, 0])[0], -1.25);
        assert_eq!(g.cell_center(&[5, 0, 0])[0], 1.25);
    }

    #[test]
    fn cube_offsets_round_trip() {
        let c = LatticeCube::new(2, [-1, 2, 0], [1, 4, 0]);
        assert_eq!(c.len(), 9);
        for (o, s) in c.iter().enumerate() {
            assert_eq!(c.offset(&s), Some(o));
        }
        assert_eq!(c.offset(&[2, 2, 0]), None);
    }
}
