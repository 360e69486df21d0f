use std::fmt;

use lifshitz_core::anderson::AndersonModel;
use lifshitz_core::lattice::{BoundaryCondition, ProfileKind};
use lifshitz_core::spectral::{floquet_bands, spectral_gaps, GapReport};
use serde::{Deserialize, Serialize};

use crate::config::{EdgeConfig, Experiment, ExperimentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Dotted path of the offending field.
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{s}: {}: {}", self.field, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

struct Sink(Vec<Diagnostic>);

impl Sink {
    fn error(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Error,
            field: field.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Warning,
            field: field.into(),
            message: message.into(),
        });
    }

    fn check(&mut self, field: &str, r: lifshitz_core::Result<()>) -> bool {
        match r {
            Ok(()) => true,
            Err(e) => {
                self.error(field, e.to_string());
                false
            }
        }
    }
}

/// Gaps of the configured background, or `None` if it cannot be built.
pub fn background_gaps(config: &ExperimentConfig) -> Option<GapReport> {
    let (medium, geom) = (config.medium.as_ref()?, config.geometry.as_ref()?);
    let m = medium.build(geom.d, geom.m).ok()?;
    let bands = floquet_bands(&m.background, None, geom.n_theta.max(8), None).ok()?;
    Some(spectral_gaps(&bands, None))
}

/// Resolves an edge request against the background gaps. `upper` selects the
/// upper edge of a band (lower end of the gap) instead of `E₊`.
pub fn resolve_edge(edge: &EdgeConfig, gaps: &GapReport, upper: bool) -> Result<f64, String> {
    if let Some(e) = edge.energy {
        return Ok(e);
    }
    match edge.gap_index {
        Some(i) => gaps
            .gaps
            .get(i)
            .map(|g| if upper { g.0 } else { g.1 })
            .ok_or_else(|| format!("gap {i} requested, the background has {}", gaps.gaps.len())),
        None if upper => Err("an upper edge needs an energy or a gap index".into()),
        None => gaps
            .bottom()
            .ok_or_else(|| "the background has an empty band structure".into()),
    }
}

/// Every problem found in `config`, errors and warnings alike. Nothing is run.
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut s = Sink(Vec::new());
    let exp = &config.experiment;

    if config.ensemble.n_realizations == 0 {
        s.error("ensemble.n_realizations", "must be at least 1");
    }

    let mut medium = None;
    if exp.needs_medium() {
        match (&config.medium, &config.geometry) {
            (None, _) => s.error("medium", format!("required for kind {}", exp.kind())),
            (_, None) => s.error("geometry", format!("required for kind {}", exp.kind())),
            (Some(mc), Some(g)) => {
                if let Ok(bx) = g.box_spec().map_err(|e| s.error("geometry", e.to_string())) {
                    let dofs = bx.grid().dof_count();
                    if dofs > config.solver.max_dofs && !matches!(exp, Experiment::Bands { .. }) {
                        s.error(
                            "geometry",
                            format!(
                                "box has {dofs} unknowns, budget is {}",
                                config.solver.max_dofs
                            ),
                        );
                    }
                }
                if let ProfileKind::LongRange { nu } = mc.profile.range {
                    let d = g.d as f64;
                    if !(nu > d && nu <= d + 2.0) {
                        s.error(
                            "medium.profile.range.nu",
                            format!(
                                "long range profiles need ν ∈ (d, d+2] = ({d}, {}], got {nu}",
                                d + 2.0
                            ),
                        );
                    }
                }
                match mc.build(g.d, g.m) {
                    Ok(m) => medium = Some(m),
                    Err(e) => s.error("medium", e.to_string()),
                }
            }
        }
    }

    let gaps = medium.as_ref().and_then(|_| background_gaps(config));
    let geom = config.geometry.as_ref();
    match exp {
        Experiment::Bands { n_bands } => {
            if *n_bands == Some(0) {
                s.error("experiment.n_bands", "must be positive");
            }
        }
        Experiment::Ids { energies } => {
            if energies.resolve().is_empty() {
                s.error("experiment.energies", "empty energy grid");
            }
        }
        Experiment::Lifshitz {
            edge, side, eps, ..
        } => {
            check_eps_grid(&mut s, &eps.resolve());
            if let Some(g) = &gaps {
                if let Err(e) = resolve_edge(edge, g, *side == lifshitz_core::ids::Edge::Upper) {
                    s.error("experiment.edge", e);
                }
            }
        }
        Experiment::Anderson {
            d,
            k,
            e_plus,
            nu,
            disorder,
            tol,
            energies,
            eps,
            ..
        } => {
            let model = AndersonModel {
                d: *d,
                k: *k,
                e_plus: *e_plus,
                nu: *nu,
                spec: disorder.clone(),
                tol: *tol,
            };
            s.check("experiment", model.validate());
            let n = (2 * k + 1).pow(*d as u32);
            if n > config.solver.max_dofs {
                s.error(
                    "experiment.k",
                    format!("{n} sites exceed the budget {}", config.solver.max_dofs),
                );
            }
            if energies.is_none() && eps.is_none() {
                s.error("experiment", "give energies, eps, or both");
            }
            if let Some(g) = eps {
                check_eps_grid(&mut s, &g.resolve());
            }
        }
        Experiment::Bounds {
            d,
            alpha,
            nu,
            eps,
            disorder,
            s: sexp,
            chernoff,
            ..
        } => {
            s.check("experiment.disorder", disorder.validate());
            if !(1..=3).contains(d) {
                s.error("experiment.d", format!("dimension {d} not in 1..=3"));
            }
            if !(*alpha > 0.0 && *alpha < 1.0) {
                s.error("experiment.alpha", format!("α = {alpha} outside (0, 1)"));
            }
            let dd = *d as f64;
            if !(*nu > dd && *nu <= dd + 2.0) {
                s.warn(
                    "experiment.nu",
                    format!("ν = {nu} outside (d, d+2]; the P_{{ε,α,1}} product bound is skipped"),
                );
            }
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
                s.error("experiment.eps", "need a non-empty list of ε in (0, 1]");
            }
            if !(*sexp > 0.0) {
                s.error("experiment.s", "must be positive");
            }
            if let Some(c) = chernoff {
                if !(c.delta > 0.0 && c.delta <= 1.0) {
                    s.error("experiment.chernoff.delta", "δ must be in (0, 1]");
                }
                if !(c.k_const > 0.0 && c.c_const > 0.0) {
                    s.error("experiment.chernoff", "K and C must be positive");
                }
            }
        }
        Experiment::Wegner { k_values, eps, .. } => {
            if let Some(mc) = &config.medium {
                if !matches!(mc.profile.range, ProfileKind::Compact { .. }) {
                    s.warn(
                        "medium.profile.range",
                        "the Wegner estimate is only hypothesized for a compactly supported single-site profile",
                    );
                }
            }
            if k_values.len() < 2 {
                s.error(
                    "experiment.k_values",
                    "need at least two box sizes to compare volumes",
                );
            }
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
                s.error("experiment.eps", "need a non-empty list of positive ε");
            }
            if let (Some(g), Some(&kmax)) = (geom, k_values.iter().max()) {
                let side = (2 * kmax + 1) * g.m;
                let dofs = side.pow(g.d as u32);
                if dofs > config.solver.max_dofs {
                    s.error(
                        "experiment.k_values",
                        format!("largest box has {dofs} unknowns"),
                    );
                }
            }
            check_phase_bc(&mut s, geom);
        }
        Experiment::Ile { edge, k, alpha, .. } => {
            check_phase_bc(&mut s, geom);
            if *k == 0 || !(*alpha > 0.0) {
                s.error("experiment", "need k >= 1 and α > 0");
            }
            match &gaps {
                Some(g) if g.gaps.is_empty() => s.error(
                    "medium.background",
                    "the background has no spectral gap at this resolution; the estimate assumes E₊ borders a gap",
                ),
                Some(g) => match resolve_edge(edge, g, false) {
                    Ok(e) => {
                        let in_gap = g.gap_containing(e).is_some();
                        let at_edge = g.gaps.iter().any(|&(_, r)| (r - e).abs() <= g.resolution);
                        if !in_gap && !at_edge {
                            s.warn("experiment.edge", format!("E = {e} lies inside a band"));
                        }
                    }
                    Err(e) => s.error("experiment.edge", e),
                },
                None => {}
            }
        }
        Experiment::Decay { lo, hi, .. } => {
            if !(lo < hi) {
                s.error("experiment", "need lo < hi");
            }
        }
        Experiment::Sandwich {
            edge,
            eps,
            k_large,
            eta0,
            ..
        } => {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
                s.error("experiment.eps", "need a non-empty list of positive ε");
            }
            if !(*eta0 > 1.0) {
                s.error("experiment.eta0", "η₀ must exceed 1");
            }
            if config.ensemble.n_realizations < 2 {
                s.error(
                    "ensemble.n_realizations",
                    "need at least 2 realizations for error bars",
                );
            }
            if let Some(g) = geom {
                let dofs = ((2 * k_large + 1) * g.m).pow(g.d as u32);
                if dofs > config.solver.max_dofs {
                    s.error(
                        "experiment.k_large",
                        format!("large box has {dofs} unknowns"),
                    );
                }
            }
            if let Some(g) = &gaps {
                if let Err(e) = resolve_edge(edge, g, false) {
                    s.error("experiment.edge", e);
                }
            }
        }
    }
    s.0.sort_by(|a, b| b.severity.cmp(&a.severity));
    s.0
}

fn check_eps_grid(s: &mut Sink, eps: &[f64]) {
    if eps.len() < 4 {
        s.error(
            "experiment.eps",
            "the exponent fit needs at least 4 ε values",
        );
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        s.error("experiment.eps", "ε values must be positive");
    }
}

fn check_phase_bc(s: &mut Sink, geom: Option<&crate::config::GeometryConfig>) {
    if let Some(g) = geom {
        if g.bc == BoundaryCondition::Dirichlet {
            s.error(
                "geometry.bc",
                "this check is defined with periodic or quasiperiodic boundary conditions",
            );
        }
    }
}
