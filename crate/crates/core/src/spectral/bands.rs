use std::f64::consts::PI;

use rayon::prelude::*;

use crate::disorder::PeriodicPattern;
use crate::error::Result;
use crate::ids::curve::{Ensemble, IdsCurve};
use crate::lattice::{
    assemble_grid, sample_coefficient_field, BoundaryCondition, BoxSpec, Grid, GridBoundary,
    PeriodicBackground, SingleSiteProfile, SymTensor, MAX_DIM,
};

use super::count::COUNT_OFFSET;
use super::eigen::all_eigenvalues;

/// Floquet eigenvalues `E_n(θ)` on a uniform grid of seam phases.
///
/// The phase `φ_j ∈ [0, 2π)` is picked up across one period `L`, so the
/// quasimomentum per unit length is `θ_j = φ_j / L`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandStructure {
    pub d: usize,
    /// Grid points per axis.
    pub n_theta: usize,
    pub period: f64,
    pub phases: Vec<[f64; MAX_DIM]>,
    /// Ascending eigenvalues per grid point.
    pub bands: Vec<Vec<f64>>,
    pub seam_lipschitz: [f64; MAX_DIM],
    /// Largest `‖A(θ)‖₁` over the grid.
    pub norm: f64,
}

impl BandStructure {
    pub fn theta(&self, i: usize) -> [f64; MAX_DIM] {
        let mut t = self.phases[i];
        for v in t.iter_mut() {
            *v /= self.period;
        }
        t
    }

    pub fn n_bands(&self) -> usize {
        self.bands.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn band(&self, n: usize) -> Vec<f64> {
        self.bands.iter().map(|b| b[n]).collect()
    }

    /// `[min_θ E_n, max_θ E_n]` per band.
    pub fn band_ranges(&self) -> Vec<(f64, f64)> {
        (0..self.n_bands())
            .map(|n| {
                self.bands
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
                        (lo.min(b[n]), hi.max(b[n]))
                    })
            })
            .collect()
    }

    fn neighbour(&self, i: usize, axis: usize) -> usize {
        let n = self.n_theta;
        let stride = n.pow((self.d - 1 - axis) as u32);
        let coord = (i / stride) % n;
        i - coord * stride + ((coord + 1) % n) * stride
    }

    /// `max |E_n(θ') - E_n(θ)| / |φ' - φ|` over grid neighbours.
    pub fn max_adjacent_slope(&self) -> f64 {
        if self.n_theta < 2 {
            return 0.0;
        }
        let step = 2.0 * PI / self.n_theta as f64;
        let mut worst = 0.0f64;
        for i in 0..self.bands.len() {
            for axis in 0..self.d {
                let j = self.neighbour(i, axis);
                for n in 0..self.n_bands() {
                    worst = worst.max((self.bands[j][n] - self.bands[i][n]).abs() / step);
                }
            }
        }
        worst
    }

    /// Grid edges `(point, axis, band)` where the jump exceeds the Weyl bound
    /// `L_axis · step`.
    pub fn continuity_violations(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        if self.n_theta < 2 {
            return out;
        }
        let step = 2.0 * PI / self.n_theta as f64;
        let slack = 1e-9 * self.norm.max(1.0);
        for i in 0..self.bands.len() {
            for axis in 0..self.d {
                let j = self.neighbour(i, axis);
                let bound = self.seam_lipschitz[axis] * step + slack;
                for n in 0..self.n_bands() {
                    if (self.bands[j][n] - self.bands[i][n]).abs() > bound {
                        out.push((i, axis, n));
                    }
                }
            }
        }
        out
    }

    /// `(1/|grid|) Σ_θ #{n : E_n(θ) <= e}` with the relative counting offset.
    pub fn mean_count(&self, e: f64) -> f64 {
        let eta = COUNT_OFFSET * self.norm.max(1.0);
        let total: usize = self
            .bands
            .iter()
            .map(|b| b.partition_point(|&l| l <= e + eta))
            .sum();
        total as f64 / self.bands.len() as f64
    }
}

/// `n^d` phases `φ_i = 2π i / n` per axis, last axis fastest.
pub fn phase_grid(d: usize, n: usize) -> Vec<[f64; MAX_DIM]> {
    let total = n.pow(d as u32);
    (0..total)
        .map(|flat| {
            let mut p = [0.0; MAX_DIM];
            let mut rest = flat;
            for j in (0..d).rev() {
                p[j] = 2.0 * PI * (rest % n) as f64 / n as f64;
                rest /= n;
            }
            p
        })
        .collect()
}

/// Bands of the real coefficient field `cells` on `grid`, whose boundary is
/// replaced by the seam phases of the grid. Because the coefficients are real,
/// `E_n(-φ) = E_n(φ)` and only one of each mirror pair is diagonalized.
pub fn bands_on_grid(
    grid: &Grid,
    cells: &[SymTensor],
    n_theta: usize,
    n_bands: Option<usize>,
) -> Result<BandStructure> {
    let d = grid.d;
    let n = n_theta.max(1);
    let phases = phase_grid(d, n);
    let mirror = |flat: usize| -> usize {
        let mut rest = flat;
        let mut out = 0;
        let mut stride = 1;
        for _ in 0..d {
            let c = rest % n;
            rest /= n;
            out += ((n - c) % n) * stride;
            stride *= n;
        }
        out
    };
    let solve: Vec<usize> = (0..phases.len()).filter(|&i| i <= mirror(i)).collect();
    let results: Vec<(Vec<f64>, f64, [f64; MAX_DIM])> = solve
        .par_iter()
        .map(|&i| {
            let mut g = *grid;
            g.boundary = GridBoundary::Periodic { phase: phases[i] };
            let op = assemble_grid(&g, cells);
            let mut ev = all_eigenvalues(&op.matrix);
            if let Some(k) = n_bands {
                ev.truncate(k);
            }
            (ev, op.norm1(), op.seam_lipschitz)
        })
        .collect();

    let mut bands = vec![Vec::new(); phases.len()];
    let mut norm = 0.0f64;
    let mut lip = [0.0f64; MAX_DIM];
    for (&i, (ev, nrm, l)) in solve.iter().zip(results) {
        norm = norm.max(nrm);
        for j in 0..MAX_DIM {
            lip[j] = lip[j].max(l[j]);
        }
        bands[mirror(i)] = ev.clone();
        bands[i] = ev;
    }
    let period = grid.cells[0] as f64 * grid.h;
    Ok(BandStructure {
        d,
        n_theta: n,
        period,
        phases,
        bands,
        seam_lipschitz: lip,
        norm,
    })
}

/// Floquet bands of `H₀ = -∇·ρ⁺∇` on the unit cell, or of the
/// `(2k+1)Z^d`-periodic operator built from a periodized disorder pattern.
pub fn floquet_bands(
    background: &PeriodicBackground,
    disorder: Option<(&SingleSiteProfile, &PeriodicPattern)>,
    n_theta: usize,
    n_bands: Option<usize>,
) -> Result<BandStructure> {
    let k = disorder.map_or(0, |(_, p)| p.k);
    let bx = BoxSpec::new(background.d, k, background.m, BoundaryCondition::Periodic)?;
    let cells = match disorder {
        Some((profile, pattern)) => {
            sample_coefficient_field(background, profile, pattern, &bx)?.cells
        }
        None => {
            let grid = bx.grid();
            (0..grid.cell_count())
                .map(|c| *background.at(&grid.cell_index(c)))
                .collect()
        }
    };
    bands_on_grid(&bx.grid(), &cells, n_theta, n_bands)
}

/// IDS of the periodic operator: `n(E) = (1/L^d) avg_θ #{n : E_n(θ) <= E}`.
pub fn periodic_ids_curve(bands: &BandStructure, energies: &[f64]) -> Result<IdsCurve> {
    let vol = bands.period.powi(bands.d as i32);
    let values: Vec<f64> = energies
        .iter()
        .map(|&e| bands.mean_count(e) / vol)
        .collect();
    IdsCurve::from_samples(
        energies.to_vec(),
        vec![values],
        Ensemble {
            label: format!("periodic, {}^{} quasimomenta", bands.n_theta, bands.d),
            n_realizations: 1,
            volume: vol,
            bc: "floquet".into(),
            seed: None,
        },
    )
}
