use std::cell::RefCell;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{sample_realization, DisorderSpec};
use crate::error::{Error, Result};
use crate::ids::stats::Proportion;
use crate::lattice::{LatticeCube, MAX_DIM};
use crate::numerics::{golden_section, integrate};

use super::potential::{long_range_potential, potential_cutoff};
use super::{floor_radius, LatticeWindow, FLOOR_SLACK};

/// Search bracket for the Chernoff parameter `t`.
pub const T_BRACKET: (f64, f64) = (1e-6, 1e12);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundName {
    #[serde(rename = "P1_product")]
    P1Product,
    #[serde(rename = "P2_product")]
    P2Product,
    #[serde(rename = "chernoff_P1")]
    ChernoffP1,
    #[serde(rename = "chernoff_P2")]
    ChernoffP2,
}

impl BoundName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::P1Product => "P1_product",
            BoundName::P2Product => "P2_product",
            BoundName::ChernoffP1 => "chernoff_P1",
            BoundName::ChernoffP2 => "chernoff_P2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// `t*` sits on the bracket boundary: the objective is flat or monotone.
    pub at_edge: bool,
    /// Objective at `t*` before clipping at 0.
    pub unclipped: f64,
}

/// Value of one analytic bound on the logarithm of a probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub name: BoundName,
    pub d: usize,
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
    pub delta: Option<f64>,
    /// The constants `K` and `C` of the event.
    pub k_const: Option<f64>,
    pub c_const: Option<f64>,
    /// Box half-side.
    pub k: Option<usize>,
    pub t_star: Option<f64>,
    pub log_bound: f64,
    pub log_p1: Option<f64>,
    pub log_p2: Option<f64>,
    /// Number of independent factors in the bound.
    pub sites: u64,
    pub flags: Vec<String>,
    pub optimizer: Option<OptimizerReport>,
}

impl BoundEvaluation {
    fn new(name: BoundName, d: usize) -> Self {
        BoundEvaluation {
            name,
            d,
            eps: None,
            alpha: None,
            nu: None,
            delta: None,
            k_const: None,
            c_const: None,
            k: None,
            t_star: None,
            log_bound: 0.0,
            log_p1: None,
            log_p2: None,
            sites: 0,
            flags: Vec::new(),
            optimizer: None,
        }
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// `log E[e^{-s ω̃}]` for `ω̃ = min(ω, δ)`.
///
/// Integration by parts gives `E e^{-s ω̃} = e^{-sδ} + s ∫_0^δ e^{-sx} F(x) dx`;
/// after `y = s x` the integral is `∫_0^{sδ} e^{-y} F(y/s) dy`, split at the
/// atoms of the law and at powers of two.
pub fn log_truncated_mgf(spec: &DisorderSpec, delta: f64, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let top = (s * delta).min(800.0);
    let mut cuts = vec![0.0];
    for a in spec.atoms() {
        let y = s * a;
        if y > 0.0 && y < top {
            cuts.push(y);
        }
    }
    let mut y = 1.0;
    while y < top {
        cuts.push(y);
        y *= 2.0;
    }
    cuts.push(top);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut tail = 0.0;
    for w in cuts.windows(2) {
        tail += integrate(
            |y| (-y).exp() * spec.cdf_unchecked((y / s).min(1.0)),
            w[0],
            w[1],
            1e-300,
            1e-13,
        )?;
    }
    if !tail.is_finite() {
        return Err(Error::Numerical(format!(
            "moment integral at s = {s} is {tail}"
        )));
    }
    Ok(log_add_exp(-s * delta, tail.ln()))
}

struct Minimum {
    t: f64,
    value: f64,
    report: OptimizerReport,
}

/// Minimizes `objective(t)` over the log-scale bracket.
fn minimize_log_t(objective: impl Fn(f64) -> Result<f64>) -> Result<Minimum> {
    let failure = RefCell::new(None);
    let evaluations = RefCell::new(0usize);
    let (a, b) = (T_BRACKET.0.ln(), T_BRACKET.1.ln());
    let eval = |u: f64| -> f64 {
        *evaluations.borrow_mut() += 1;
        match objective(u.exp()) {
            Ok(v) if !v.is_nan() => v,
            Ok(_) => {
                failure.replace(Some(Error::Numerical("objective is NaN".into())));
                f64::INFINITY
            }
            Err(e) => {
                failure.replace(Some(e));
                f64::INFINITY
            }
        }
    };
    let (mut u, mut value) = golden_section(&eval, a, b, 1e-11);
    // Golden section never probes the end points themselves.
    for end in [a, b] {
        let v = eval(end);
        if v < value {
            (u, value) = (end, v);
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let at_edge = (u - a).abs() < 1e-6 * (b - a) || (b - u).abs() < 1e-6 * (b - a);
    Ok(Minimum {
        t: u.exp(),
        value,
        report: OptimizerReport {
            bracket: T_BRACKET,
            evaluations: evaluations.into_inner(),
            at_edge,
            unclipped: value,
        },
    })
}

fn check_constants(delta: f64, k_const: f64, c_const: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("δ = {delta} outside (0, 1]")));
    }
    if !(k_const > 0.0 && c_const > 0.0) {
        return Err(Error::Domain(format!(
            "constants K = {k_const}, C = {c_const} must be positive"
        )));
    }
    Ok(())
}

fn finish_chernoff(mut ev: BoundEvaluation, min: Minimum) -> BoundEvaluation {
    if min.report.at_edge {
        log::warn!(
            "{}: optimal t = {:.3e} sits on the search bracket",
            ev.name.as_str(),
            min.t
        );
        ev.flags.push("t_at_bracket_edge".into());
    }
    if min.value > 0.0 {
        ev.flags.push("vacuous".into());
    }
    ev.t_star = Some(min.t);
    ev.log_bound = min.value.min(0.0);
    ev.optimizer = Some(min.report);
    ev
}

/// Markov/Chernoff bound for
/// `P₁ = P{(C n)^{-1} Σ_{|β|_∞<=k} ω̃_β <= δ/K}`, `n = (2k+1)^d`:
/// `log P₁ <= min_t [t Cδ/K + n log E e^{-t ω̃₀ / n}]`.
pub fn chernoff_bound_p1(
    spec: &DisorderSpec,
    d: usize,
    k: usize,
    delta: f64,
    k_const: f64,
    c_const: f64,
) -> Result<BoundEvaluation> {
    spec.validate()?;
    check_constants(delta, k_const, c_const)?;
    let n = ((2 * k + 1) as f64).powi(d as i32);
    let tau = c_const * delta / k_const;
    let min = minimize_log_t(|t| Ok(t * tau + n * log_truncated_mgf(spec, delta, t / n)?))?;
    let mut ev = BoundEvaluation::new(BoundName::ChernoffP1, d);
    ev.delta = Some(delta);
    ev.k_const = Some(k_const);
    ev.c_const = Some(c_const);
    ev.k = Some(k);
    ev.sites = n as u64;
    Ok(finish_chernoff(ev, min))
}

/// Squared norms of `β ∈ Z^d` with `k < |β| <= r`, with multiplicities.
fn annulus_shells(d: usize, k: f64, r: f64) -> Result<BTreeMap<i64, u64>> {
    let rmax = floor_radius(r);
    if ((2 * rmax + 1) as f64).powi(d as i32) > 1e8 {
        return Err(Error::Validation(format!(
            "annulus of radius {r:.3e} in d = {d} is too large to enumerate"
        )));
    }
    let (k2, r2) = (k * k, r * r * (1.0 + FLOOR_SLACK));
    let mut shells = BTreeMap::new();
    for g in LatticeCube::centered(d, rmax).iter() {
        let n2: i64 = g[..d].iter().map(|c| c * c).sum();
        if (n2 as f64) > k2 && (n2 as f64) <= r2 {
            *shells.entry(n2).or_insert(0) += 1;
        }
    }
    Ok(shells)
}

/// Chernoff bound for
/// `P₂ = P{C^{-1} Σ_{k<|β|<=R} ω̃_β (1+|β|+k)^{-ν} <= δ/K}`,
/// `R = δ^{-(ν-d)(1-α)}`.
#[allow(clippy::too_many_arguments)]
pub fn chernoff_bound_p2(
    spec: &DisorderSpec,
    d: usize,
    k: usize,
    delta: f64,
    k_const: f64,
    c_const: f64,
    alpha: f64,
    nu: f64,
) -> Result<BoundEvaluation> {
    spec.validate()?;
    check_constants(delta, k_const, c_const)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("α = {alpha} outside (0, 1)")));
    }
    if !(nu > d as f64) {
        return Err(Error::Domain(format!("ν = {nu} must exceed d = {d}")));
    }
    let r = delta.powf(-(nu - d as f64) * (1.0 - alpha));
    let shells = annulus_shells(d, k as f64, r)?;
    let mut ev = BoundEvaluation::new(BoundName::ChernoffP2, d);
    ev.delta = Some(delta);
    ev.k_const = Some(k_const);
    ev.c_const = Some(c_const);
    ev.k = Some(k);
    ev.alpha = Some(alpha);
    ev.nu = Some(nu);
    ev.sites = shells.values().sum();
    if shells.is_empty() {
        ev.flags.push("empty_annulus".into());
        return Ok(ev);
    }
    let weights: Vec<(f64, f64)> = shells
        .iter()
        .map(|(&n2, &m)| ((1.0 + (n2 as f64).sqrt() + k as f64).powf(-nu), m as f64))
        .collect();
    let tau = c_const * delta / k_const;
    let min = minimize_log_t(|t| {
        let mut f = t * tau;
        for &(w, m) in &weights {
            f += m * log_truncated_mgf(spec, delta, t * w)?;
        }
        Ok(f)
    })?;
    Ok(finish_chernoff(ev, min))
}

fn check_eps_alpha(eps: f64, alpha: f64, closed: bool) -> Result<()> {
    let ok = eps > 0.0 && (eps < 1.0 || (closed && eps == 1.0));
    if !ok {
        return Err(Error::Domain(format!(
            "ε = {eps} outside the admissible range"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("α = {alpha} outside (0, 1)")));
    }
    Ok(())
}

fn log_cdf_clipped(spec: &DisorderSpec, x: f64) -> f64 {
    if x >= 1.0 {
        0.0
    } else {
        spec.log_cdf(x.max(0.0))
            .unwrap_or(f64::NEG_INFINITY)
            .min(0.0)
    }
}

/// Product lower bound for `P_{ε,α,1}`: the couplings are forced below
/// `ε^{1+α}` on the ball `|γ| <= ℓ = ε^{-(1-α)/2}` and below
/// `ε^{1+α} (1 + dist_∞(γ, C_{0,ℓ}))^{(ν-d)(1-α)}` on the annulus
/// `ℓ < |γ| <= ε^{-(1+2α)/(ν-d)}`. `C_{0,ℓ}` is the cube of side `2ℓ+1`.
pub fn product_bound_p_eps_alpha_1(
    spec: &DisorderSpec,
    eps: f64,
    alpha: f64,
    nu: f64,
    d: usize,
) -> Result<BoundEvaluation> {
    spec.validate()?;
    check_eps_alpha(eps, alpha, false)?;
    let dd = d as f64;
    if !(nu > dd && nu <= dd + 2.0) {
        return Err(Error::Domain(format!(
            "ν = {nu} outside (d, d+2] for d = {d}"
        )));
    }
    let ell = eps.powf(-(1.0 - alpha) / 2.0);
    let outer = eps.powf(-(1.0 + 2.0 * alpha) / (nu - dd));
    let level = eps.powf(1.0 + alpha);
    let expo = (nu - dd) * (1.0 - alpha);
    let half_side = ell + 0.5;

    let ell2 = ell * ell * (1.0 + FLOOR_SLACK);
    let rmax = floor_radius(ell.max(outer));
    if ((2 * rmax + 1) as f64).powi(d as i32) > 1e8 {
        return Err(Error::Validation(format!(
            "enumeration radius {rmax} in d = {d} is too large"
        )));
    }
    let outer2 = outer * outer * (1.0 + FLOOR_SLACK);
    let (mut inner, mut annulus) = (0u64, 0u64);
    let mut log_p2 = 0.0;
    for g in LatticeCube::centered(d, rmax).iter() {
        let n2 = g[..d].iter().map(|c| c * c).sum::<i64>() as f64;
        if n2 <= ell2 {
            inner += 1;
        } else if n2 <= outer2 {
            annulus += 1;
            let dist = g[..d]
                .iter()
                .map(|c| (c.abs() as f64 - half_side).max(0.0))
                .fold(0.0, f64::max);
            log_p2 += log_cdf_clipped(spec, level * (1.0 + dist).powf(expo));
        }
    }
    let log_p1 = inner as f64 * log_cdf_clipped(spec, level);
    let mut ev = BoundEvaluation::new(BoundName::P1Product, d);
    ev.eps = Some(eps);
    ev.alpha = Some(alpha);
    ev.nu = Some(nu);
    ev.log_p1 = Some(log_p1);
    ev.sites = inner + annulus;
    if annulus == 0 {
        ev.flags.push("empty_annulus".into());
        ev.log_bound = log_p1;
    } else {
        ev.log_p2 = Some(log_p2);
        ev.log_bound = log_p1 + log_p2;
    }
    Ok(ev)
}

/// Product lower bound for `P_{ε,α,2}`:
/// `|Λ_α(ε^s)| · log F(ε^{1+α} / C)`.
pub fn product_bound_p_eps_alpha_2(
    spec: &DisorderSpec,
    eps: f64,
    alpha: f64,
    nu: f64,
    d: usize,
    s: f64,
    c_const: f64,
) -> Result<BoundEvaluation> {
    spec.validate()?;
    check_eps_alpha(eps, alpha, true)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1]")));
    }
    if !(c_const > 0.0) {
        return Err(Error::Domain(format!("C = {c_const} must be positive")));
    }
    let w = LatticeWindow::new(d, alpha, eps.powf(s))?;
    let n = w.cardinality() as u64;
    let mut ev = BoundEvaluation::new(BoundName::P2Product, d);
    ev.eps = Some(eps);
    ev.alpha = Some(alpha);
    ev.nu = Some(nu);
    ev.c_const = Some(c_const);
    ev.sites = n;
    ev.log_bound = n as f64 * log_cdf_clipped(spec, eps.powf(1.0 + alpha) / c_const);
    Ok(ev)
}

/// Smallest `C` for which `ω_γ <= ε^{1+α}/C` on `Λ_α(ε^s)` forces the
/// `P_{ε,α,2}` event: `C = 2 Σ_{γ∈Λ} (1+|γ|)^{-ν}`.
pub fn p2_sufficient_constant(d: usize, eps: f64, alpha: f64, nu: f64, s: f64) -> Result<f64> {
    let w = LatticeWindow::new(d, alpha, eps.powf(s))?;
    Ok(2.0 * w.cube().iter().map(|g| weight(d, &g, nu)).sum::<f64>())
}

fn weight(d: usize, g: &[i64; MAX_DIM], nu: f64) -> f64 {
    let r = g[..d].iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
    (1.0 + r).powf(-nu)
}

fn frequency(n_trials: usize, event: impl Fn(u64) -> Result<bool> + Sync) -> Result<Proportion> {
    let hits = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| event(i).map(u64::from).map_err(|e| e.in_realization(i)))
        .collect::<Result<Vec<u64>>>()?;
    Proportion::new(hits.iter().sum(), n_trials as u64, 0.95)
}

/// Monte Carlo frequency of the `P₁` event of [`chernoff_bound_p1`].
#[allow(clippy::too_many_arguments)]
pub fn chernoff_p1_event(
    spec: &DisorderSpec,
    d: usize,
    k: usize,
    delta: f64,
    k_const: f64,
    c_const: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Proportion> {
    let cube = LatticeCube::centered(d, k as i64);
    let n = cube.len() as f64;
    frequency(n_trials, |i| {
        let r = sample_realization(spec, &cube, seed, i);
        let sum: f64 = r.values.iter().map(|w| w.min(delta)).sum();
        Ok(sum / (c_const * n) <= delta / k_const)
    })
}

/// Monte Carlo frequency of
/// `{∀ |β| <= ε^{-(1+α)/2} : Σ_γ ω_γ (1+|β-γ|)^{-ν} <= ε^{1+α}}`, the potential
/// summed with remainder at most `tol`.
#[allow(clippy::too_many_arguments)]
pub fn p_eps_alpha_1_event(
    spec: &DisorderSpec,
    d: usize,
    eps: f64,
    alpha: f64,
    nu: f64,
    tol: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Proportion> {
    let rb = eps.powf(-(1.0 + alpha) / 2.0);
    let rmax = floor_radius(rb);
    let rb2 = rb * rb * (1.0 + FLOOR_SLACK);
    let centres: Vec<[i64; MAX_DIM]> = LatticeCube::centered(d, rmax)
        .iter()
        .filter(|g| g[..d].iter().map(|c| c * c).sum::<i64>() as f64 <= rb2)
        .collect();
    let window = LatticeCube::centered(d, rmax + potential_cutoff(d, nu, tol)? as i64);
    let level = eps.powf(1.0 + alpha);
    frequency(n_trials, |i| {
        let r = sample_realization(spec, &window, seed, i);
        for c in &centres {
            if long_range_potential(&r, c, nu, tol)? > level {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// Monte Carlo frequency of
/// `{Σ_{γ∈Λ_α(ε^s)} ω_γ (1+|γ|)^{-ν} <= ε^{1+α}/2}`.
#[allow(clippy::too_many_arguments)]
pub fn p_eps_alpha_2_event(
    spec: &DisorderSpec,
    d: usize,
    eps: f64,
    alpha: f64,
    nu: f64,
    s: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Proportion> {
    let cube = LatticeWindow::new(d, alpha, eps.powf(s))?.cube();
    let w: Vec<f64> = cube.iter().map(|g| weight(d, &g, nu)).collect();
    let level = 0.5 * eps.powf(1.0 + alpha);
    frequency(n_trials, |i| {
        let r = sample_realization(spec, &cube, seed, i);
        Ok(r.values.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() <= level)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_10;

    #[test]
    fn worked_product_values() {
        let u = DisorderSpec::Uniform01;
        let b = product_bound_p_eps_alpha_1(&u, 0.1, 0.5, 2.0, 1).unwrap();
        assert!((b.log_p1.unwrap() + 4.5 * LN_10).abs() < 1e-12);
        let b = product_bound_p_eps_alpha_2(&u, 0.1, 0.25, 2.0, 1, 1.0, 1.0).unwrap();
        assert_eq!(b.sites, 11);
        assert!((b.log_bound - 13.75 * 0.1f64.ln()).abs() < 1e-12);
        let b = product_bound_p_eps_alpha_2(&u, 1.0, 0.3, 2.5, 2, 1.0, 1.0).unwrap();
        assert_eq!(b.sites, 9);
        assert_eq!(b.log_bound, 0.0);
    }

    #[test]
    fn certain_event_gives_zero() {
        // Mass at 0 only: every F(x) with x > 0 is 1.
        let spec = DisorderSpec::Bernoulli { p: 0.0, a: 0.5 };
        let b = product_bound_p_eps_alpha_1(&spec, 0.2, 0.5, 2.5, 1).unwrap();
        assert_eq!(b.log_bound, 0.0);
    }

    #[test]
    fn product_domain_errors() {
        let u = DisorderSpec::Uniform01;
        assert!(product_bound_p_eps_alpha_1(&u, 0.1, 0.5, 1.0, 1).is_err());
        assert!(product_bound_p_eps_alpha_1(&u, 0.1, 0.5, 3.5, 1).is_err());
        assert!(product_bound_p_eps_alpha_1(&u, 1.5, 0.5, 2.0, 1).is_err());
    }

    #[test]
    fn mgf_matches_closed_form() {
        // Uniform, δ = 1: E e^{-sω} = (1 - e^{-s}) / s.
        for s in [1e-8, 0.3, 2.0, 50.0, 1e4] {
            let exact = ((-(-s as f64).exp_m1()) / s).ln();
            let got = log_truncated_mgf(&DisorderSpec::Uniform01, 1.0, s).unwrap();
            assert!((got - exact).abs() < 1e-10 * exact.abs() + 1e-15, "s={s}");
        }
        // Bernoulli(p, a) truncated at δ >= a: (1-p) + p e^{-sa}.
        let b = DisorderSpec::Bernoulli { p: 0.3, a: 0.4 };
        let got = log_truncated_mgf(&b, 0.7, 3.0).unwrap();
        assert!((got - (0.7 + 0.3 * (-1.2f64).exp()).ln()).abs() < 1e-12);
    }

    fn grid_minimum(f: impl Fn(f64) -> f64) -> f64 {
        crate::numerics::log_space(T_BRACKET.0, T_BRACKET.1, 10_000)
            .into_iter()
            .map(f)
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn chernoff_against_grid_search() {
        let u = DisorderSpec::Uniform01;
        for (k_const, k) in [(1.0, 8usize), (4.0, 8), (8.0, 3)] {
            let ev = chernoff_bound_p1(&u, 1, k, 0.1, k_const, 1.0).unwrap();
            let n = (2 * k + 1) as f64;
            let tau = 0.1 / k_const;
            let grid = grid_minimum(|t| t * tau + n * log_truncated_mgf(&u, 0.1, t / n).unwrap());
            let got = ev.optimizer.as_ref().unwrap().unclipped;
            assert!(got <= grid + 1e-12 * grid.abs());
            assert!((got - grid).abs() <= 1e-6 * grid.abs(), "{got} vs {grid}");
        }
    }

    #[test]
    fn vacuous_and_impossible() {
        let u = DisorderSpec::Uniform01;
        // With C = K = 1 the truncated mean never exceeds δ.
        let ev = chernoff_bound_p1(&u, 1, 8, 0.1, 1.0, 1.0).unwrap();
        assert_eq!(ev.log_bound, 0.0);
        assert!(ev.optimizer.unwrap().at_edge);
        // ω ≡ 0.9 truncated at 0.5 is 0.5 > δ/K = 0.25: impossible event.
        let point = DisorderSpec::Bernoulli { p: 1.0, a: 0.9 };
        let ev = chernoff_bound_p1(&point, 1, 2, 0.5, 2.0, 1.0).unwrap();
        assert!(ev.log_bound < -1e10);
        assert!(ev.flags.iter().any(|f| f == "t_at_bracket_edge"));
    }

    #[test]
    fn p2_chernoff_runs() {
        let ev =
            chernoff_bound_p2(&DisorderSpec::Uniform01, 1, 2, 0.1, 50.0, 1.0, 0.5, 3.0).unwrap();
        assert!(ev.log_bound <= 0.0);
        assert!(ev.sites > 0);
    }
}
