use std::path::PathBuf;

use lifshitz_core::disorder::DisorderSpec;
use lifshitz_core::ids::{Edge, RandomMedium};
use lifshitz_core::lattice::{
    BoundaryCondition, BoxSpec, PeriodicBackground, ProfileKind, SingleSiteProfile, SymTensor,
};
use lifshitz_core::numerics::{lin_space, log_space};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A complete experiment description, as read from a single JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub background: BackgroundConfig,
    pub profile: ProfileConfig,
    pub disorder: DisorderSpec,
}

/// Periodic background `ρ⁺`, sampled at `geometry.m` points per unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundConfig {
    Identity,
    /// `value · I`.
    Uniform {
        value: f64,
    },
    /// `lo` on the left half of the unit cell, `hi` on the right half.
    TwoPhase {
        lo: f64,
        hi: f64,
    },
    /// One constant `d × d` matrix, row-major.
    Tensor {
        rows: Vec<f64>,
    },
    /// One row-major `d × d` matrix per cell of the unit cell, last axis fastest.
    Samples {
        samples: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub range: ProfileKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Row-major `d × d` shape matrix; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub d: usize,
    pub k: usize,
    pub m: usize,
    #[serde(default = "dirichlet")]
    pub bc: BoundaryCondition,
    /// Quasimomenta per axis for Floquet computations.
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
}

fn dirichlet() -> BoundaryCondition {
    BoundaryCondition::Dirichlet
}

fn default_n_theta() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default = "default_realizations")]
    pub n_realizations: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_realizations() -> usize {
    100
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_realizations: default_realizations(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Largest operator (unknowns) any single task may build.
    #[serde(default = "default_max_dofs")]
    pub max_dofs: usize,
}

fn default_max_dofs() -> usize {
    20_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_dofs: default_max_dofs(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Used when no directory is given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File name prefix; the experiment kind when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergyGrid {
    Values(Vec<f64>),
    Linspace { lo: f64, hi: f64, n: usize },
    Logspace { lo: f64, hi: f64, n: usize },
}

impl EnergyGrid {
    /// Sorted, without duplicates.
    pub fn resolve(&self) -> Vec<f64> {
        let mut v = match self {
            EnergyGrid::Values(v) => v.clone(),
            EnergyGrid::Linspace { lo, hi, n } => lin_space(*lo, *hi, *n),
            EnergyGrid::Logspace { lo, hi, n } => log_space(*lo, *hi, *n),
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Where the band edge comes from: an explicit energy, or the edge of a gap of
/// the background found by a Floquet scan (`gap_index` counts gaps from the
/// bottom). With neither, the bottom of the spectrum is used.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernoffConfig {
    pub k: usize,
    pub delta: f64,
    pub k_const: f64,
    pub c_const: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Floquet bands and gaps of the background.
    Bands {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_bands: Option<usize>,
    },
    /// Ensemble-averaged finite-volume IDS on the configured box.
    Ids { energies: EnergyGrid },
    /// Double-log exponent fit of the finite-volume IDS at a band edge.
    Lifshitz {
        #[serde(default)]
        edge: EdgeConfig,
        #[serde(default)]
        side: Edge,
        eps: EnergyGrid,
        #[serde(default = "five")]
        min_contributing: usize,
        #[serde(default = "thousand")]
        bootstrap: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<f64>,
    },
    /// Discrete Anderson model: IDS and, when `eps` is given, the exponent fit
    /// at `e_plus`.
    Anderson {
        d: usize,
        k: usize,
        #[serde(default)]
        e_plus: f64,
        nu: f64,
        disorder: DisorderSpec,
        #[serde(default = "potential_tol")]
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        energies: Option<EnergyGrid>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<EnergyGrid>,
        #[serde(default = "five")]
        min_contributing: usize,
        #[serde(default = "thousand")]
        bootstrap: usize,
    },
    /// Product and Chernoff bounds, optionally with Monte Carlo frequencies.
    Bounds {
        d: usize,
        alpha: f64,
        nu: f64,
        eps: Vec<f64>,
        disorder: DisorderSpec,
        #[serde(default = "one")]
        s: f64,
        /// Constant of the `P_{ε,α,2}` event; the sufficient `2 Σ (1+|γ|)^{-ν}`
        /// when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_const: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chernoff: Option<ChernoffConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mc_trials: Option<usize>,
        #[serde(default = "potential_tol")]
        tol: f64,
    },
    Wegner {
        energy: f64,
        k_values: Vec<usize>,
        eps: Vec<f64>,
    },
    Ile {
        #[serde(default)]
        edge: EdgeConfig,
        k: usize,
        alpha: f64,
        p: f64,
    },
    Decay {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_states: Option<usize>,
        #[serde(default)]
        realization: u64,
    },
    Sandwich {
        #[serde(default)]
        edge: EdgeConfig,
        eps: Vec<f64>,
        k: usize,
        k_large: usize,
        #[serde(default = "eta0")]
        eta0: f64,
        #[serde(default = "two")]
        sigmas: f64,
    },
}

fn five() -> usize {
    5
}
fn thousand() -> usize {
    1000
}
fn potential_tol() -> f64 {
    1e-6
}
fn eta0() -> f64 {
    1.5
}
fn two() -> f64 {
    2.0
}

pub const KINDS: [&str; 9] = [
    "bands", "ids", "lifshitz", "anderson", "bounds", "wegner", "ile", "decay", "sandwich",
];

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Bands { .. } => "bands",
            Experiment::Ids { .. } => "ids",
            Experiment::Lifshitz { .. } => "lifshitz",
            Experiment::Anderson { .. } => "anderson",
            Experiment::Bounds { .. } => "bounds",
            Experiment::Wegner { .. } => "wegner",
            Experiment::Ile { .. } => "ile",
            Experiment::Decay { .. } => "decay",
            Experiment::Sandwich { .. } => "sandwich",
        }
    }

    /// Whether the kind works on a continuum medium and box.
    pub fn needs_medium(&self) -> bool {
        !matches!(
            self,
            Experiment::Anderson { .. } | Experiment::Bounds { .. }
        )
    }
}

fn tensor(d: usize, rows: &[f64]) -> lifshitz_core::Result<SymTensor> {
    if rows.len() != d * d {
        return Err(lifshitz_core::Error::Validation(format!(
            "expected {} matrix entries, got {}",
            d * d,
            rows.len()
        )));
    }
    Ok(SymTensor::from_rows(d, rows))
}

impl MediumConfig {
    pub fn build(&self, d: usize, m: usize) -> lifshitz_core::Result<RandomMedium> {
        let background = match &self.background {
            BackgroundConfig::Identity => PeriodicBackground::identity(d, m),
            BackgroundConfig::Uniform { value } => {
                let mut bg = PeriodicBackground::uniform(d, m, SymTensor::scalar(d, *value))?;
                bg.label = format!("uniform({value})");
                bg
            }
            BackgroundConfig::TwoPhase { lo, hi } => PeriodicBackground::two_phase(d, m, *lo, *hi)?,
            BackgroundConfig::Tensor { rows } => {
                PeriodicBackground::uniform(d, m, tensor(d, rows)?)?
            }
            BackgroundConfig::Samples { samples } => PeriodicBackground::from_samples(
                d,
                m,
                samples
                    .iter()
                    .map(|r| tensor(d, r))
                    .collect::<lifshitz_core::Result<_>>()?,
            )?,
        };
        let mut profile = SingleSiteProfile::new(d, self.profile.range, self.profile.amplitude)?;
        if let Some(rows) = &self.profile.shape {
            profile = profile.with_shape(tensor(d, rows)?)?;
        }
        if let Some(t) = self.profile.tail_tol {
            profile = profile.with_tail_tol(t)?;
        }
        self.disorder.validate()?;
        Ok(RandomMedium {
            background,
            profile,
            disorder: self.disorder.clone(),
        })
    }
}

impl GeometryConfig {
    pub fn box_spec(&self) -> lifshitz_core::Result<BoxSpec> {
        BoxSpec::new(self.d, self.k, self.m, self.bc.clone())
    }

    /// Quasimomentum of the boundary condition (zero for periodic boxes).
    pub fn theta(&self) -> Vec<f64> {
        match &self.bc {
            BoundaryCondition::Quasiperiodic { theta } => theta.clone(),
            _ => vec![0.0; self.d],
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Canonical serialization of the resolved config (defaults filled in).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn prefix(&self) -> String {
        self.output
            .prefix
            .clone()
            .unwrap_or_else(|| self.experiment.kind().to_string())
    }
}
