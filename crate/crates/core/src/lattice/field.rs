use serde::{Deserialize, Serialize};

use crate::disorder::{coverage_error, SiteValues};
use crate::error::{Error, Result};

use super::geometry::{BoxSpec, Grid, Site, MAX_DIM};
use super::medium::{PeriodicBackground, SingleSiteProfile};
use super::tensor::SymTensor;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub background: String,
    pub profile: String,
    /// `(seed, index)` of the realization, if any.
    pub realization: Option<(u64, u64)>,
}

/// Cell-sampled coefficient matrix field `ρ_ω` on a box.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    pub bx: BoxSpec,
    pub grid: Grid,
    pub cells: Vec<SymTensor>,
    /// The periodic part alone; `cells - background_cells` is the disorder term.
    pub background_cells: Vec<SymTensor>,
    pub provenance: Provenance,
}

impl CoefficientField {
    /// Field given cell by cell, with no separate disorder term.
    pub fn from_cells(bx: &BoxSpec, cells: Vec<SymTensor>) -> Result<Self> {
        bx.validate()?;
        let grid = bx.grid();
        if cells.len() != grid.cell_count() {
            return Err(Error::Validation(format!(
                "{} cell matrices for {} cells",
                cells.len(),
                grid.cell_count()
            )));
        }
        Ok(CoefficientField {
            bx: bx.clone(),
            grid,
            background_cells: cells.clone(),
            cells,
            provenance: Provenance::default(),
        })
    }

    pub fn uniform(bx: &BoxSpec, t: SymTensor) -> Result<Self> {
        let n = bx.grid().cell_count();
        Self::from_cells(bx, vec![t; n])
    }

    /// The unperturbed field `ρ⁺` on the same box.
    pub fn background(&self) -> CoefficientField {
        CoefficientField {
            cells: self.background_cells.clone(),
            provenance: Provenance {
                realization: None,
                profile: String::new(),
                ..self.provenance.clone()
            },
            ..self.clone()
        }
    }

    /// Same cells on a box with another boundary condition.
    pub fn with_bc(&self, bc: super::geometry::BoundaryCondition) -> Result<Self> {
        let bx = BoxSpec::new(self.bx.d, self.bx.k, self.bx.m, bc)?;
        Ok(CoefficientField {
            grid: bx.grid(),
            bx,
            ..self.clone()
        })
    }

    /// Whether `cells - background_cells` is PSD in every cell.
    pub fn perturbation_is_psd(&self, tol: f64) -> bool {
        self.cells
            .iter()
            .zip(&self.background_cells)
            .all(|(c, b)| c.sub(b).is_psd(tol * c.norm().max(1.0)))
    }
}

/// `ρ_ω(x_c) = ρ⁺(x_c mod C₀) + Σ_γ ω_γ ρ⁰(x_c - γ)` at every cell centre of the
/// box, dropping sites beyond the profile's cutoff radius.
pub fn sample_coefficient_field(
    background: &PeriodicBackground,
    profile: &SingleSiteProfile,
    sites: &dyn SiteValues,
    bx: &BoxSpec,
) -> Result<CoefficientField> {
    bx.validate()?;
    background.validate()?;
    profile.validate(bx.d)?;
    if background.d != bx.d || background.m != bx.m {
        return Err(Error::Validation(format!(
            "background is sampled for d = {}, m = {} but the box has d = {}, m = {}",
            background.d, background.m, bx.d, bx.m
        )));
    }
    if sites.dimension() != bx.d {
        return Err(Error::Validation("realization has wrong dimension".into()));
    }
    let d = bx.d;
    let grid = bx.grid();
    let radius = profile.cutoff_radius();
    let sup_norm = profile.is_compact();

    let mut missing: Vec<Site> = Vec::new();
    let mut cells = Vec::with_capacity(grid.cell_count());
    let mut background_cells = Vec::with_capacity(grid.cell_count());
    for flat in 0..grid.cell_count() {
        let idx = grid.cell_index(flat);
        let x = grid.cell_center(&idx);
        let bg = *background.at(&idx);

        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for j in 0..d {
            lo[j] = (x[j] - radius).ceil() as i64;
            hi[j] = (x[j] + radius).floor() as i64;
        }
        let mut weight = 0.0;
        let mut g = lo;
        'sites: loop {
            let mut e2 = 0.0;
            let mut linf = 0.0f64;
            for j in 0..d {
                let t = x[j] - g[j] as f64;
                e2 += t * t;
                linf = linf.max(t.abs());
            }
            let inside = if sup_norm {
                linf <= radius
            } else {
                e2.sqrt() <= radius
            };
            if inside {
                match sites.value(&g) {
                    Some(w) => weight += w * profile.radial(e2.sqrt(), linf),
                    None => missing.push(g),
                }
            }
            // Odometer over the cube [lo, hi].
            let mut j = d;
            loop {
                if j == 0 {
                    break 'sites;
                }
                j -= 1;
                if g[j] < hi[j] {
                    g[j] += 1;
                    break;
                }
                g[j] = lo[j];
            }
        }
        cells.push(bg.add(&profile.shape.scale(weight)));
        background_cells.push(bg);
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(coverage_error(missing.into_iter()));
    }
    Ok(CoefficientField {
        bx: bx.clone(),
        grid,
        cells,
        background_cells,
        provenance: Provenance {
            background: background.label.clone(),
            profile: profile.label(),
            realization: None,
        },
    })
}

/// Smallest and largest eigenvalue over all cell matrices.
pub fn check_ellipticity(field: &CoefficientField) -> Result<(f64, f64)> {
    if field.cells.is_empty() {
        return Err(Error::Validation("empty coefficient field".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, c) in field.cells.iter().enumerate() {
        if c.asymmetry() > 1e-12 * c.norm().max(1.0) {
            return Err(Error::Validation(format!(
                "cell {i} matrix is not symmetric"
            )));
        }
        let (a, b) = c.eigen_range();
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{ConstantSites, Realization};
    use crate::lattice::geometry::{BoundaryCondition, LatticeCube};
    use crate::lattice::medium::ProfileKind;

    fn dirichlet(d: usize, k: usize, m: usize) -> BoxSpec {
        BoxSpec::new(d, k, m, BoundaryCondition::Dirichlet).unwrap()
    }

    #[test]
    fn zero_disorder_is_identity() {
        let bx = dirichlet(2, 1, 3);
        let bg = PeriodicBackground::identity(2, 3);
        let p = SingleSiteProfile::new(2, ProfileKind::ShortRange { nu: 5.0 }, 1.0).unwrap();
        let f =
            sample_coefficient_field(&bg, &p, &ConstantSites { d: 2, value: 0.0 }, &bx).unwrap();
        assert!(f.cells.iter().all(|c| *c == SymTensor::identity(2)));
        assert_eq!(check_ellipticity(&f).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn single_bump() {
        let bx = dirichlet(1, 2, 4);
        let bg = PeriodicBackground::identity(1, 4);
        let p = SingleSiteProfile::new(1, ProfileKind::Compact { radius: 0.5 }, 1.0).unwrap();
        let window = LatticeCube::centered(1, 3);
        let mut values = vec![0.0; window.len()];
        values[window.offset(&[0, 0, 0]).unwrap()] = 0.5;
        let r = Realization::from_values(window, values).unwrap();
        let f = sample_coefficient_field(&bg, &p, &r, &bx).unwrap();
        for (i, c) in f.cells.iter().enumerate() {
            let x = f.grid.cell_center(&f.grid.cell_index(i))[0];
            let want = if x.abs() <= 0.5 { 1.5 } else { 1.0 };
            assert_eq!(c.get(0, 0), want, "cell at {x}");
        }
        assert!(f.perturbation_is_psd(0.0));
    }

    #[test]
    fn coverage_error_names_sites() {
        let bx = dirichlet(1, 2, 2);
        let bg = PeriodicBackground::identity(1, 2);
        let p = SingleSiteProfile::new(1, ProfileKind::Compact { radius: 0.5 }, 1.0).unwrap();
        let r = Realization::constant(LatticeCube::centered(1, 1), 0.3).unwrap();
        match sample_coefficient_field(&bg, &p, &r, &bx) {
            Err(Error::Coverage { missing, .. }) => assert_eq!(missing, 2),
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_cell_rejected() {
        let bx = dirichlet(2, 0, 2);
        let bad = SymTensor::from_rows(2, &[1.0, 0.2, 0.0, 1.0]);
        let f = CoefficientField::from_cells(&bx, vec![bad; 4]).unwrap();
        assert!(check_ellipticity(&f).is_err());
    }

    #[test]
    fn scalar_cells_are_their_eigenvalues() {
        let bx = dirichlet(1, 0, 2);
        let f = CoefficientField::from_cells(
            &bx,
            vec![SymTensor::scalar(1, 0.5), SymTensor::scalar(1, 2.0)],
        )
        .unwrap();
        assert_eq!(check_ellipticity(&f).unwrap(), (0.5, 2.0));
    }
}
