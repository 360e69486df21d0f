use serde::{Deserialize, Serialize};

use crate::disorder::rng::CounterStream;
use crate::error::{Error, Result};
use crate::numerics::fit_line;

use super::curve::IdsCurve;
use super::stats::percentile_interval;

/// Which side of the gap the edge sits on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    /// Lower edge `E₊` of a band: `ΔN(ε) = N(E₊+ε) - N(E₊)`.
    #[default]
    Lower,
    /// Upper edge of a band, handled by reflecting energies:
    /// `ΔN(ε) = N(E) - N(E-ε)`.
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub edge: Edge,
    /// Realizations with `ΔN > 0` needed before a point is trusted.
    pub min_contributing: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub target: Option<f64>,
    pub nondegenerate: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            edge: Edge::Lower,
            min_contributing: 5,
            bootstrap: 1000,
            seed: 0,
            target: None,
            nondegenerate: true,
        }
    }
}

/// Least-squares fit of `log|log ΔN(ε)|` against `log ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub eps: Vec<f64>,
    pub delta_n: Vec<f64>,
    /// `log|log ΔN|`, NaN where undefined.
    pub y: Vec<f64>,
    pub admissible: Vec<bool>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub ci95: (f64, f64),
    pub target: Option<f64>,
    /// `s = 1` in the lower bound when the reference IDS is non-degenerate.
    pub nondegenerate: bool,
    /// `ΔN` agrees with `N(E+ε) - N(E-ε)` wherever both are on the grid.
    pub gap_identity: Option<bool>,
}

impl ExponentFit {
    pub fn n_used(&self) -> usize {
        self.admissible.iter().filter(|&&a| a).count()
    }

    pub fn ci_width(&self) -> f64 {
        self.ci95.1 - self.ci95.0
    }
}

/// Slope fit on `(log ε, log|log ΔN|)` given `log ΔN` directly, so that values far
/// below the smallest double are still usable. Every point is used.
pub fn fit_double_log(eps: &[f64], log_dn: &[f64], opts: &FitOptions) -> Result<ExponentFit> {
    if eps.len() != log_dn.len() {
        return Err(Error::Validation("ε grid and ΔN differ in length".into()));
    }
    let y: Vec<f64> = log_dn.iter().map(|l| l.abs().ln()).collect();
    let admissible: Vec<bool> = log_dn
        .iter()
        .map(|l| l.is_finite() && l.abs() > 1.0)
        .collect();
    finish(
        eps,
        log_dn.iter().map(|l| l.exp()).collect(),
        y,
        admissible,
        None,
        opts,
    )
}

/// Lifshitz-exponent fit at the band edge `e_edge` of `curve`.
///
/// A point `ε` enters when `ΔN > 10 u max(N(E₊), N(E₊+ε))` (`u` the unit
/// roundoff, i.e. `ΔN` is not cancellation noise), `|log ΔN| > 1`, and, for
/// ensembles, at least `min_contributing` realizations have `ΔN > 0`.
pub fn lifshitz_exponent(
    curve: &IdsCurve,
    e_edge: f64,
    eps_grid: &[f64],
    opts: &FitOptions,
) -> Result<ExponentFit> {
    let base = curve.index_of(e_edge).ok_or_else(|| {
        Error::Validation(format!("energy grid does not contain the edge {e_edge}"))
    })?;
    let sign = match opts.edge {
        Edge::Lower => 1.0,
        Edge::Upper => -1.0,
    };
    let mut dn = Vec::with_capacity(eps_grid.len());
    let mut y = Vec::with_capacity(eps_grid.len());
    let mut admissible = Vec::with_capacity(eps_grid.len());
    let mut identity: Option<bool> = None;
    let ensemble = curve.samples.len() > 1;
    for &eps in eps_grid {
        let i = curve.index_of(e_edge + sign * eps).ok_or_else(|| {
            Error::Validation(format!("energy grid does not contain E ± ε for ε = {eps}"))
        })?;
        let (near, far) = (curve.values[base], curve.values[i]);
        let d = sign * (far - near);
        let contributing = curve
            .samples
            .iter()
            .filter(|s| sign * (s[i] - s[base]) > 0.0)
            .count();
        let ok = d > 10.0 * f64::EPSILON * near.abs().max(far.abs())
            && d.ln().abs() > 1.0
            && (!ensemble || contributing >= opts.min_contributing);
        dn.push(d);
        y.push(if d > 0.0 { d.ln().abs().ln() } else { f64::NAN });
        admissible.push(ok);
        if let Some(j) = curve.index_of(e_edge - sign * eps) {
            let wide = sign * (far - curve.values[j]);
            let same = (wide - d).abs() <= 1e-12 * wide.abs().max(1e-300);
            identity = Some(identity.unwrap_or(true) && same);
        }
    }
    finish(eps_grid, dn, y, admissible, identity, opts)
}

fn finish(
    eps: &[f64],
    delta_n: Vec<f64>,
    y: Vec<f64>,
    admissible: Vec<bool>,
    gap_identity: Option<bool>,
    opts: &FitOptions,
) -> Result<ExponentFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = eps
        .iter()
        .zip(&y)
        .zip(&admissible)
        .filter(|(_, &a)| a)
        .map(|((e, y), _)| (e.ln(), *y))
        .unzip();
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} admissible ε points, need at least 4",
            xs.len()
        )));
    }
    let fit = fit_line(&xs, &ys)?;
    let ci95 = residual_bootstrap(&xs, &fit, opts.bootstrap, opts.seed)?;
    Ok(ExponentFit {
        eps: eps.to_vec(),
        delta_n,
        y,
        admissible,
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        ci95,
        target: opts.target,
        nondegenerate: opts.nondegenerate,
        gap_identity,
    })
}

fn residual_bootstrap(
    xs: &[f64],
    fit: &crate::numerics::LineFit,
    resamples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if resamples == 0 {
        return Ok((fit.slope, fit.slope));
    }
    let mut rng = CounterStream::new(seed, 0);
    let n = xs.len();
    let mut slopes = Vec::with_capacity(resamples);
    let mut yb = vec![0.0; n];
    for _ in 0..resamples {
        for i in 0..n {
            yb[i] = fit.slope * xs[i] + fit.intercept + fit.residuals[rng.below(n)];
        }
        slopes.push(fit_line(xs, &yb)?.slope);
    }
    let (lo, hi) = percentile_interval(&slopes, 0.95);
    Ok((lo.min(fit.slope), hi.max(fit.slope)))
}

/// Range class of the single-site profile, as far as the exponent is concerned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeKind {
    Short,
    Long,
    Compact,
}

/// Predicted `lim log|log ΔN(ε)| / log ε`, or `None` where no value is given.
///
/// Short range (and compact) with a non-degenerate edge: `-(d/2 + κ)`. Long
/// range: `-d/(ν-d)` when `κ + d/2 < d/(ν-d)` whatever the edge, otherwise
/// `-sup(d/2 + κ, d/(ν-d))` for a non-degenerate edge.
pub fn theoretical_exponent(
    d: usize,
    kappa: f64,
    nu: Option<f64>,
    kind: RangeKind,
    nondegenerate: bool,
) -> Result<Option<f64>> {
    let dd = d as f64;
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!(
            "κ = {kappa} must be finite and >= 0"
        )));
    }
    let quantum = dd / 2.0 + kappa;
    match kind {
        RangeKind::Short | RangeKind::Compact => {
            if kind == RangeKind::Short {
                match nu {
                    Some(nu) if nu > dd + 2.0 => {}
                    _ => {
                        return Err(Error::Domain(format!(
                            "short range needs ν > d + 2 = {}, got {nu:?}",
                            dd + 2.0
                        )))
                    }
                }
            }
            Ok(nondegenerate.then_some(-quantum))
        }
        RangeKind::Long => {
            let nu = match nu {
                Some(nu) if nu > dd && nu <= dd + 2.0 => nu,
                _ => {
                    return Err(Error::Domain(format!(
                        "long range needs ν in (d, d+2] = ({dd}, {}], got {nu:?}",
                        dd + 2.0
                    )))
                }
            };
            let classical = dd / (nu - dd);
            if quantum < classical {
                Ok(Some(-classical))
            } else if nondegenerate {
                Ok(Some(-quantum.max(classical)))
            } else {
                Ok(None)
            }
        }
    }
}
