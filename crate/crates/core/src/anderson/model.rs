use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{sample_realization, DisorderSpec, SiteValues};
use crate::error::{Error, Result};
use crate::ids::curve::{Ensemble, IdsCurve};
use crate::ids::stats::Proportion;
use crate::lattice::{LatticeCube, OperatorMatrix};
use crate::linalg::{dense, CsrMatrix};
use crate::spectral::InertiaCounter;

use super::potential::{potential_on_box, potential_window};

/// `H^k_ω = H^k_0 + V^k_ω` on `C_k ∩ Z^d`, where `H^k_0` is the graph Laplacian
/// of the box (neighbours outside the box are dropped) plus `E₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct AndersonInstance {
    pub d: usize,
    pub k: usize,
    pub e_plus: f64,
    pub nu: Option<f64>,
    pub v: Vec<f64>,
    pub matrix: CsrMatrix<f64>,
}

impl AndersonInstance {
    pub fn sites(&self) -> LatticeCube {
        LatticeCube::centered(self.d, self.k as i64)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn operator(&self) -> OperatorMatrix {
        OperatorMatrix::Real(self.matrix.clone())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        dense::csr_eigenvalues(&self.matrix)
    }

    pub fn count_below(&self, e: f64) -> Result<usize> {
        InertiaCounter::new(&self.operator()).count_below(e)
    }
}

pub fn assemble_anderson(d: usize, k: usize, e_plus: f64, v: &[f64]) -> Result<AndersonInstance> {
    let sites = LatticeCube::centered(d, k as i64);
    if v.len() != sites.len() {
        return Err(Error::Validation(format!(
            "{} potential values for {} sites",
            v.len(),
            sites.len()
        )));
    }
    let mut t = Vec::with_capacity(sites.len() * (2 * d + 1));
    for (i, s) in sites.iter().enumerate() {
        let mut deg = 0.0;
        for j in 0..d {
            for step in [-1, 1] {
                let mut nb = s;
                nb[j] += step;
                if let Some(o) = sites.offset(&nb) {
                    t.push((i, o, -1.0));
                    deg += 1.0;
                }
            }
        }
        t.push((i, i, e_plus + deg + v[i]));
    }
    Ok(AndersonInstance {
        d,
        k,
        e_plus,
        nu: None,
        v: v.to_vec(),
        matrix: CsrMatrix::from_triplets(sites.len(), t),
    })
}

/// Ensemble description: `H^k_ω` with i.i.d. couplings of law `spec`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AndersonModel {
    pub d: usize,
    pub k: usize,
    pub e_plus: f64,
    pub nu: f64,
    pub spec: DisorderSpec,
    /// Truncation tolerance of the potential sum.
    pub tol: f64,
}

impl AndersonModel {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::Validation(format!(
                "dimension {} not in 1..=3",
                self.d
            )));
        }
        self.spec.validate()?;
        self.window().map(|_| ())
    }

    pub fn window(&self) -> Result<LatticeCube> {
        potential_window(self.d, self.k, self.nu, self.tol)
    }

    pub fn volume(&self) -> f64 {
        ((2 * self.k + 1) as f64).powi(self.d as i32)
    }

    pub fn instance(&self, values: &dyn SiteValues) -> Result<AndersonInstance> {
        let v = potential_on_box(values, self.k, self.nu, self.tol)?;
        let mut inst = assemble_anderson(self.d, self.k, self.e_plus, &v)?;
        inst.nu = Some(self.nu);
        Ok(inst)
    }

    pub fn sample(&self, seed: u64, index: u64) -> Result<AndersonInstance> {
        let r = sample_realization(&self.spec, &self.window()?, seed, index);
        self.instance(&r).map_err(|e| e.in_realization(index))
    }
}

/// `N^a_k(E) = (2k+1)^{-d} E[#{λ(H^k_ω) <= E}]`, by Monte Carlo.
pub fn anderson_ids(
    model: &AndersonModel,
    n_realizations: usize,
    seed: u64,
    energies: &[f64],
) -> Result<IdsCurve> {
    model.validate()?;
    let vol = model.volume();
    let samples = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let inst = model.sample(seed, i)?;
            let counter = InertiaCounter::new(&inst.operator());
            let c = counter.counts(energies).map_err(|e| e.in_realization(i))?;
            Ok(c.into_iter().map(|n| n as f64 / vol).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    IdsCurve::from_samples(
        energies.to_vec(),
        samples,
        Ensemble {
            label: format!("anderson d={} nu={} {:?}", model.d, model.nu, model.spec),
            n_realizations,
            volume: vol,
            bc: "neumann".into(),
            seed: Some(seed),
        },
    )
}

/// Frequency of `{λ_min(H^k_ω) <= E}` with a 95% Clopper–Pearson interval.
pub fn eigenvalue_below_probability(
    model: &AndersonModel,
    e: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Proportion> {
    model.validate()?;
    let hits = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let inst = model.sample(seed, i)?;
            Ok(u64::from(
                inst.count_below(e).map_err(|x| x.in_realization(i))? > 0,
            ))
        })
        .collect::<Result<Vec<u64>>>()?;
    Proportion::new(hits.iter().sum(), n_trials as u64, 0.95)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_site_laplacian() {
        let a = assemble_anderson(1, 1, 0.0, &[0.0; 3]).unwrap();
        let m = a.matrix.to_dense();
        let want = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[(i, j)], want[i][j]);
            }
        }
        assert!(a.eigenvalues()[0].abs() < 1e-14);
    }

    #[test]
    fn constant_shift() {
        let v: Vec<f64> = (0..9).map(|i| 0.1 * i as f64).collect();
        let a = assemble_anderson(2, 1, 0.5, &v).unwrap();
        let b =
            assemble_anderson(2, 1, 0.5, &v.iter().map(|x| x + 0.3).collect::<Vec<_>>()).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((y - x - 0.3).abs() < 1e-13);
        }
    }

    fn free_model(k: usize) -> AndersonModel {
        AndersonModel {
            d: 1,
            k,
            e_plus: 0.7,
            nu: 4.0,
            spec: DisorderSpec::Bernoulli { p: 0.0, a: 0.5 },
            tol: 1e-8,
        }
    }

    #[test]
    fn ids_of_the_free_box() {
        let m = free_model(3);
        let c = anderson_ids(&m, 3, 1, &[0.7, 100.0]).unwrap();
        assert!((c.values[0] - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(c.values[1], 1.0);
    }

    #[test]
    fn probability_at_and_below_the_shift() {
        let m = free_model(2);
        assert_eq!(
            eigenvalue_below_probability(&m, 0.7, 10, 0)
                .unwrap()
                .successes,
            10
        );
        assert_eq!(
            eigenvalue_below_probability(&m, 0.69, 10, 0)
                .unwrap()
                .successes,
            0
        );
    }
}
