//! I.i.d. single-site couplings `ω_γ ∈ [0, 1]` and their sampled realizations.

pub mod rng;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::geometry::{LatticeCube, Site, MAX_DIM};

/// Law of a single coupling `ω_0`.
///
/// `KappaTail` uses `F(ε) = exp(1 - ε^{-κ})`, which has
/// `log|log F(ε)| / log ε -> -κ` as `ε -> 0` and the explicit inverse
/// `F^{-1}(u) = (1 - log u)^{-1/κ}`. `Uniform01` plays the role of `κ = 0`.
/// `Bernoulli` puts mass `p` at `a` and `1 - p` at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DisorderSpec {
    Uniform01,
    KappaTail { kappa: f64 },
    Bernoulli { p: f64, a: f64 },
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DisorderSpec::Uniform01 => Ok(()),
            DisorderSpec::KappaTail { kappa } => {
                if kappa.is_finite() && kappa > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "kappa_tail needs a finite kappa > 0, got {kappa}"
                    )))
                }
            }
            DisorderSpec::Bernoulli { p, a } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Validation(format!("bernoulli p={p} outside [0,1]")));
                }
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::Validation(format!("bernoulli a={a} outside [0,1]")));
                }
                Ok(())
            }
        }
    }

    /// Tail exponent `κ` (zero for the uniform law).
    pub fn kappa(&self) -> f64 {
        match *self {
            DisorderSpec::KappaTail { kappa } => kappa,
            _ => 0.0,
        }
    }

    /// True when `ω_0` is almost surely constant.
    pub fn is_degenerate(&self) -> bool {
        match *self {
            DisorderSpec::Bernoulli { p, a } => p == 0.0 || p == 1.0 || a == 0.0,
            _ => false,
        }
    }

    /// Points where the CDF jumps.
    pub fn atoms(&self) -> Vec<f64> {
        match *self {
            DisorderSpec::Bernoulli { a, .. } => vec![0.0, a],
            _ => Vec::new(),
        }
    }

    /// `P(ω_0 <= ε)`.
    pub fn cdf(&self, eps: f64) -> Result<f64> {
        check_unit(eps)?;
        Ok(self.cdf_unchecked(eps))
    }

    pub(crate) fn cdf_unchecked(&self, eps: f64) -> f64 {
        match *self {
            DisorderSpec::Uniform01 => eps,
            DisorderSpec::KappaTail { kappa } => {
                if eps <= 0.0 {
                    0.0
                } else {
                    (1.0 - eps.powf(-kappa)).exp()
                }
            }
            DisorderSpec::Bernoulli { p, a } => {
                if eps >= a {
                    1.0
                } else {
                    1.0 - p
                }
            }
        }
    }

    /// `log P(ω_0 <= ε)`, evaluated without underflow for the κ-tail law.
    pub fn log_cdf(&self, eps: f64) -> Result<f64> {
        check_unit(eps)?;
        Ok(match *self {
            DisorderSpec::Uniform01 => eps.ln(),
            DisorderSpec::KappaTail { kappa } => {
                if eps <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    1.0 - eps.powf(-kappa)
                }
            }
            DisorderSpec::Bernoulli { .. } => self.cdf_unchecked(eps).ln(),
        })
    }

    /// Generalized inverse `inf{ε : F(ε) >= u}` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            DisorderSpec::Uniform01 => u,
            DisorderSpec::KappaTail { kappa } => (1.0 - u.ln()).powf(-1.0 / kappa),
            DisorderSpec::Bernoulli { p, a } => {
                if u <= 1.0 - p {
                    0.0
                } else {
                    a
                }
            }
        }
    }

    pub fn sample(&self, seed: u64, index: u64, coords: &[i64]) -> f64 {
        self.quantile(rng::site_uniform(seed, index, coords))
    }
}

fn check_unit(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::Domain(format!("ε = {eps} outside [0, 1]")))
    }
}

/// Anything that assigns a coupling to (some) lattice sites.
pub trait SiteValues: Sync {
    fn dimension(&self) -> usize;
    /// `None` when the site is not covered.
    fn value(&self, site: &Site) -> Option<f64>;
}

/// A concrete draw `{ω_γ}` over a finite window.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub window: LatticeCube,
    pub values: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

impl Realization {
    /// Realization with explicitly given values (row-major over `window`).
    pub fn from_values(window: LatticeCube, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::Validation(format!(
                "{} values for a window of {} sites",
                values.len(),
                window.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("coupling {v} outside [0, 1]")));
        }
        Ok(Realization {
            window,
            values,
            seed: 0,
            index: 0,
        })
    }

    pub fn constant(window: LatticeCube, value: f64) -> Result<Self> {
        let n = window.len();
        Realization::from_values(window, vec![value; n])
    }

    pub fn get(&self, site: &Site) -> Option<f64> {
        self.window.offset(site).map(|o| self.values[o])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        self.window.iter().zip(self.values.iter().copied())
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, window: &LatticeCube) -> Result<Realization> {
        let values = window
            .iter()
            .map(|s| self.get(&s))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| coverage_error(window.iter().filter(|s| self.get(s).is_none())))?;
        Ok(Realization {
            window: window.clone(),
            values,
            seed: self.seed,
            index: self.index,
        })
    }
}

impl SiteValues for Realization {
    fn dimension(&self) -> usize {
        self.window.d
    }

    fn value(&self, site: &Site) -> Option<f64> {
        self.get(site)
    }
}

/// Draws `ω_γ = F^{-1}(u_γ)` over `window`; a pure function of its arguments.
pub fn sample_realization(
    spec: &DisorderSpec,
    window: &LatticeCube,
    seed: u64,
    index: u64,
) -> Realization {
    let key = rng::stream_key(seed, index);
    let d = window.d;
    let values = window
        .iter()
        .map(|s| spec.quantile(rng::unit_open(rng::site_bits(key, &s[..d]))))
        .collect();
    Realization {
        window: window.clone(),
        values,
        seed,
        index,
    }
}

/// `ω̃_γ = min(ω_γ, δ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedRealization {
    pub base: Realization,
    pub delta: f64,
}

impl TruncatedRealization {
    pub fn get(&self, site: &Site) -> Option<f64> {
        self.base.get(site).map(|w| w.min(self.delta))
    }

    pub fn values(&self) -> Vec<f64> {
        self.base.values.iter().map(|w| w.min(self.delta)).collect()
    }

    pub fn to_realization(&self) -> Realization {
        Realization {
            values: self.values(),
            ..self.base.clone()
        }
    }
}

impl SiteValues for TruncatedRealization {
    fn dimension(&self) -> usize {
        self.base.window.d
    }

    fn value(&self, site: &Site) -> Option<f64> {
        self.get(site)
    }
}

pub fn truncate(r: &Realization, delta: f64) -> Result<TruncatedRealization> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!(
            "truncation level δ = {delta} outside (0, 1]"
        )));
    }
    Ok(TruncatedRealization {
        base: r.clone(),
        delta,
    })
}

/// Same coupling on every site of `Z^d`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantSites {
    pub d: usize,
    pub value: f64,
}

impl SiteValues for ConstantSites {
    fn dimension(&self) -> usize {
        self.d
    }

    fn value(&self, _site: &Site) -> Option<f64> {
        Some(self.value)
    }
}

/// The couplings on `C_k ∩ Z^d` repeated with period `2k + 1` along every axis.
#[derive(Clone, Debug)]
pub struct PeriodicPattern {
    pub k: usize,
    pub cell: Realization,
}

impl PeriodicPattern {
    pub fn new(source: &Realization, k: usize) -> Result<Self> {
        let cube = LatticeCube::centered(source.window.d, k as i64);
        Ok(PeriodicPattern {
            k,
            cell: source.restrict(&cube)?,
        })
    }

    pub fn period(&self) -> usize {
        2 * self.k + 1
    }
}

impl SiteValues for PeriodicPattern {
    fn dimension(&self) -> usize {
        self.cell.window.d
    }

    fn value(&self, site: &Site) -> Option<f64> {
        let p = self.period() as i64;
        let k = self.k as i64;
        let mut wrapped = [0; MAX_DIM];
        for j in 0..self.dimension() {
            wrapped[j] = (site[j] + k).rem_euclid(p) - k;
        }
        self.cell.get(&wrapped)
    }
}

pub(crate) fn coverage_error(missing: impl Iterator<Item = Site>) -> Error {
    let mut count = 0usize;
    let mut examples = Vec::new();
    for s in missing {
        if examples.len() < 4 {
            examples.push(format!("{s:?}"));
        }
        count += 1;
    }
    Error::Coverage {
        missing: count,
        examples: examples.join(", "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_closed_forms() {
        assert_eq!(DisorderSpec::Uniform01.cdf(0.25).unwrap(), 0.25);
        let k1 = DisorderSpec::KappaTail { kappa: 1.0 };
        assert!((k1.cdf(0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((k1.cdf(0.5).unwrap() - 0.367879).abs() < 1e-6);
        assert_eq!(k1.cdf(0.0).unwrap(), 0.0);
        assert_eq!(k1.cdf(1.0).unwrap(), 1.0);
        let b = DisorderSpec::Bernoulli { p: 0.3, a: 0.8 };
        assert!((b.cdf(0.5).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(b.cdf(0.8).unwrap(), 1.0);
    }

    #[test]
    fn cdf_rejects_out_of_range() {
        assert!(matches!(
            DisorderSpec::Uniform01.cdf(1.5),
            Err(Error::Domain(_))
        ));
        assert!(DisorderSpec::Uniform01.cdf(-0.1).is_err());
    }

    #[test]
    fn kappa_tail_double_log_limit() {
        let spec = DisorderSpec::KappaTail { kappa: 2.0 };
        let ratio = |j: i32| {
            let eps = 10f64.powi(-j);
            spec.log_cdf(eps).unwrap().abs().ln() / eps.ln()
        };
        // |log F| = ε^{-2} - 1, so the ratio approaches -2 like 1/(j ln 10).
        assert!((ratio(6) + 2.0).abs() < 0.05);
        let errors: Vec<f64> = (1..=6).map(|j| (ratio(j) + 2.0).abs()).collect();
        assert!(errors.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn quantile_inverts_cdf() {
        for spec in [
            DisorderSpec::Uniform01,
            DisorderSpec::KappaTail { kappa: 0.7 },
            DisorderSpec::KappaTail { kappa: 3.0 },
        ] {
            for &u in &[1e-9, 0.01, 0.3, 0.5, 0.99] {
                let w = spec.quantile(u);
                assert!((spec.cdf(w).unwrap() - u).abs() < 1e-12 * u.max(1e-3));
            }
        }
        let b = DisorderSpec::Bernoulli { p: 0.25, a: 0.6 };
        assert_eq!(b.quantile(0.5), 0.0);
        assert_eq!(b.quantile(0.9), 0.6);
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = LatticeCube::centered(2, 3);
        let spec = DisorderSpec::KappaTail { kappa: 1.0 };
        let a = sample_realization(&spec, &w, 11, 2);
        let b = sample_realization(&spec, &w, 11, 2);
        assert_eq!(a, b);
        let c = sample_realization(&spec, &w, 11, 3);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn sub_windows_see_the_same_values() {
        let spec = DisorderSpec::Uniform01;
        let big = sample_realization(&spec, &LatticeCube::centered(1, 10), 5, 1);
        let small = sample_realization(&spec, &LatticeCube::centered(1, 2), 5, 1);
        for (s, v) in small.iter() {
            assert_eq!(big.get(&s), Some(v));
        }
    }

    #[test]
    fn truncation_examples() {
        let r = Realization::from_values(LatticeCube::centered(1, 0).clone(), vec![0.9]).unwrap();
        let w = LatticeCube::new(1, [0, 0, 0], [1, 0, 0]);
        let r2 = Realization::from_values(w, vec![0.3, 0.9]).unwrap();
        assert_eq!(truncate(&r2, 0.5).unwrap().values(), vec![0.3, 0.5]);
        assert_eq!(truncate(&r, 1.0).unwrap().values(), r.values);
        assert!(matches!(truncate(&r, 0.0), Err(Error::Domain(_))));
        assert!(truncate(&r, -1.0).is_err());
    }

    #[test]
    fn truncation_of_random_realization() {
        let r = sample_realization(
            &DisorderSpec::Uniform01,
            &LatticeCube::new(1, [0, 0, 0], [99, 0, 0]),
            1,
            0,
        );
        let t = truncate(&r, 0.2).unwrap().values();
        let max_in = r.values.iter().cloned().fold(0.0, f64::max);
        let max_out = t.iter().cloned().fold(0.0, f64::max);
        assert_eq!(max_out, max_in.min(0.2));
        for (a, b) in r.values.iter().zip(&t) {
            if *a <= 0.2 {
                assert_eq!(a, b);
            } else {
                assert_eq!(*b, 0.2);
            }
        }
    }

    #[test]
    fn periodic_pattern_wraps() {
        let spec = DisorderSpec::Uniform01;
        let r = sample_realization(&spec, &LatticeCube::centered(1, 5), 2, 0);
        let p = PeriodicPattern::new(&r, 1).unwrap();
        assert_eq!(p.value(&[2, 0, 0]), r.get(&[-1, 0, 0]));
        assert_eq!(p.value(&[-4, 0, 0]), r.get(&[-1, 0, 0]));
        assert_eq!(p.value(&[0, 0, 0]), r.get(&[0, 0, 0]));
    }

    #[test]
    fn restrict_reports_missing_sites() {
        let r = Realization::constant(LatticeCube::centered(1, 1), 0.5).unwrap();
        match r.restrict(&LatticeCube::centered(1, 2)) {
            Err(Error::Coverage { missing, .. }) => assert_eq!(missing, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
