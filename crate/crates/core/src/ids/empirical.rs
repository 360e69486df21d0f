use crate::disorder::{sample_realization, DisorderSpec, PeriodicPattern, Realization};
use crate::error::{Error, Result};
use crate::lattice::{
    assemble_operator, sample_coefficient_field, AssembledOperator, BoxSpec, CoefficientField,
    LatticeCube, PeriodicBackground, SingleSiteProfile,
};
use crate::spectral::bands::{floquet_bands, periodic_ids_curve};
use crate::spectral::InertiaCounter;
use rayon::prelude::*;

use super::curve::{Ensemble, IdsCurve};

/// `ρ_ω = ρ⁺ + Σ_γ ω_γ ρ⁰(· - γ)` with i.i.d. couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomMedium {
    pub background: PeriodicBackground,
    pub profile: SingleSiteProfile,
    pub disorder: DisorderSpec,
}

impl RandomMedium {
    pub fn d(&self) -> usize {
        self.background.d
    }

    pub fn validate(&self) -> Result<()> {
        self.background.validate()?;
        self.profile.validate(self.d())?;
        self.disorder.validate()
    }

    pub fn label(&self) -> String {
        format!(
            "{} + {} x {:?}",
            self.background.label,
            self.profile.label(),
            self.disorder
        )
    }

    /// Realization over every site whose coupling reaches `bx`.
    pub fn realization(&self, bx: &BoxSpec, seed: u64, index: u64) -> Realization {
        sample_realization(
            &self.disorder,
            &self.profile.required_window(bx),
            seed,
            index,
        )
    }

    pub fn field(&self, bx: &BoxSpec, seed: u64, index: u64) -> Result<CoefficientField> {
        let r = self.realization(bx, seed, index);
        let mut f = sample_coefficient_field(&self.background, &self.profile, &r, bx)
            .map_err(|e| e.in_realization(index))?;
        f.provenance.realization = Some((seed, index));
        Ok(f)
    }

    pub fn operator(&self, bx: &BoxSpec, seed: u64, index: u64) -> Result<AssembledOperator> {
        Ok(assemble_operator(&self.field(bx, seed, index)?))
    }

    /// The disorder-free operator on `bx`.
    pub fn background_operator(&self, bx: &BoxSpec) -> Result<AssembledOperator> {
        let grid = bx.grid();
        let cells = (0..grid.cell_count())
            .map(|c| *self.background.at(&grid.cell_index(c)))
            .collect();
        Ok(assemble_operator(&CoefficientField::from_cells(bx, cells)?))
    }
}

/// `N_Λ(E) = #{λ <= E} / vol(Λ)` for one operator.
pub fn finite_volume_ids(a: &AssembledOperator, volume: f64, energies: &[f64]) -> Result<Vec<f64>> {
    let counts = InertiaCounter::new(&a.matrix).counts(energies)?;
    Ok(counts.into_iter().map(|c| c as f64 / volume).collect())
}

/// Ensemble mean of finite-volume IDS curves on `bx`.
pub fn empirical_ids(
    medium: &RandomMedium,
    bx: &BoxSpec,
    n_realizations: usize,
    seed: u64,
    energies: &[f64],
) -> Result<IdsCurve> {
    medium.validate()?;
    bx.validate()?;
    if n_realizations == 0 {
        return Err(Error::Validation("need at least one realization".into()));
    }
    let vol = bx.volume();
    let samples = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let a = medium.operator(bx, seed, i)?;
            finite_volume_ids(&a, vol, energies).map_err(|e| e.in_realization(i))
        })
        .collect::<Result<Vec<_>>>()?;
    IdsCurve::from_samples(
        energies.to_vec(),
        samples,
        Ensemble {
            label: medium.label(),
            n_realizations,
            volume: vol,
            bc: bx.bc.label().into(),
            seed: Some(seed),
        },
    )
}

/// `N_{ω,k}`: IDS of the `(2k+1)Z^d`-periodic operator built from the couplings
/// of `realization` on `C_k`, averaged over an `n_theta^d` quasimomentum grid.
pub fn periodic_approx_ids(
    medium: &RandomMedium,
    realization: &Realization,
    k: usize,
    n_theta: usize,
    energies: &[f64],
) -> Result<IdsCurve> {
    medium.validate()?;
    let pattern = PeriodicPattern::new(realization, k)?;
    let bands = floquet_bands(
        &medium.background,
        Some((&medium.profile, &pattern)),
        n_theta,
        None,
    )?;
    let mut c = periodic_ids_curve(&bands, energies)?;
    c.ensemble.label = medium.label();
    c.ensemble.bc = format!("periodized k={k}");
    c.ensemble.seed = Some(realization.seed);
    Ok(c)
}

/// `E[N_{ω,k}]` by Monte Carlo over `n_realizations` couplings on `C_k`.
pub fn expected_periodic_ids(
    medium: &RandomMedium,
    k: usize,
    n_realizations: usize,
    seed: u64,
    n_theta: usize,
    energies: &[f64],
) -> Result<IdsCurve> {
    if n_realizations < 2 {
        return Err(Error::Validation(
            "expected_periodic_ids needs at least 2 realizations".into(),
        ));
    }
    let cube = LatticeCube::centered(medium.d(), k as i64);
    let samples = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let r = sample_realization(&medium.disorder, &cube, seed, i);
            periodic_approx_ids(medium, &r, k, n_theta, energies)
                .map(|c| c.values)
                .map_err(|e| e.in_realization(i))
        })
        .collect::<Result<Vec<_>>>()?;
    IdsCurve::from_samples(
        energies.to_vec(),
        samples,
        Ensemble {
            label: medium.label(),
            n_realizations,
            volume: ((2 * k + 1) as f64).powi(medium.d() as i32),
            bc: format!("periodized k={k}, {n_theta} quasimomenta per axis"),
            seed: Some(seed),
        },
    )
}
