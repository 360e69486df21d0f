use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::geometry::{BoxSpec, LatticeCube, MAX_DIM};
use super::tensor::SymTensor;

/// `Z^d`-periodic elliptic background `ρ⁺`, sampled at the `m^d` cell centres of
/// the unit cell `C₀ = [-1/2, 1/2)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicBackground {
    pub d: usize,
    pub m: usize,
    /// Row-major over local cell indices, last axis fastest.
    pub samples: Vec<SymTensor>,
    /// Ellipticity constant: every sample has eigenvalues in `[1/ρ*, ρ*]`.
    pub rho_star: f64,
    pub label: String,
}

impl PeriodicBackground {
    pub fn new(d: usize, m: usize, samples: Vec<SymTensor>, rho_star: f64) -> Result<Self> {
        let bg = PeriodicBackground {
            d,
            m,
            samples,
            rho_star,
            label: "custom".into(),
        };
        bg.validate()?;
        Ok(bg)
    }

    /// Background with `ρ*` set to the tightest admissible value.
    pub fn from_samples(d: usize, m: usize, samples: Vec<SymTensor>) -> Result<Self> {
        let rho_star = samples
            .iter()
            .map(|s| {
                let (lo, hi) = s.eigen_range();
                hi.max(1.0 / lo)
            })
            .fold(1.0, f64::max);
        if !rho_star.is_finite() || rho_star <= 0.0 {
            return Err(Error::Validation(
                "background is not uniformly elliptic".into(),
            ));
        }
        Self::new(d, m, samples, rho_star)
    }

    /// Samples `f` at the cell centres of `C₀`.
    pub fn from_fn(d: usize, m: usize, f: impl Fn(&[f64; MAX_DIM]) -> SymTensor) -> Result<Self> {
        let n = m.pow(d as u32);
        let samples = (0..n).map(|flat| f(&local_center(d, m, flat))).collect();
        Self::from_samples(d, m, samples)
    }

    pub fn uniform(d: usize, m: usize, t: SymTensor) -> Result<Self> {
        Self::from_samples(d, m, vec![t; m.pow(d as u32)])
    }

    pub fn identity(d: usize, m: usize) -> Self {
        let mut bg = Self::uniform(d, m, SymTensor::identity(d)).expect("identity is elliptic");
        bg.label = "identity".into();
        bg
    }

    /// Scalar layered medium: `lo` where `x_1 < 0`, `hi` elsewhere.
    pub fn two_phase(d: usize, m: usize, lo: f64, hi: f64) -> Result<Self> {
        let mut bg = Self::from_fn(d, m, |x| {
            SymTensor::scalar(d, if x[0] < 0.0 { lo } else { hi })
        })?;
        bg.label = format!("two_phase({lo},{hi})");
        Ok(bg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_DIM || self.m < 2 {
            return Err(Error::Validation(format!(
                "background needs 1 <= d <= {MAX_DIM} and m >= 2, got d = {}, m = {}",
                self.d, self.m
            )));
        }
        let n = self.m.pow(self.d as u32);
        if self.samples.len() != n {
            return Err(Error::Validation(format!(
                "background has {} samples, expected m^d = {n}",
                self.samples.len()
            )));
        }
        if !(self.rho_star >= 1.0) {
            return Err(Error::Validation(format!(
                "ellipticity constant ρ* = {} must be >= 1",
                self.rho_star
            )));
        }
        let slack = 1e-12 * self.rho_star;
        for (i, s) in self.samples.iter().enumerate() {
            if s.d != self.d {
                return Err(Error::Validation(format!("sample {i} has wrong dimension")));
            }
            if s.asymmetry() > 1e-12 * s.norm().max(1.0) {
                return Err(Error::Validation(format!("sample {i} is not symmetric")));
            }
            let (lo, hi) = s.eigen_range();
            if lo < 1.0 / self.rho_star - slack || hi > self.rho_star + slack {
                return Err(Error::Validation(format!(
                    "sample {i} has eigenvalues [{lo}, {hi}] outside [1/ρ*, ρ*] = [{}, {}]",
                    1.0 / self.rho_star,
                    self.rho_star
                )));
            }
        }
        Ok(())
    }

    /// Sample at local cell index `idx` (each component taken mod `m`).
    pub fn at(&self, idx: &[usize; MAX_DIM]) -> &SymTensor {
        let mut flat = 0;
        for &i in idx.iter().take(self.d) {
            flat = flat * self.m + i % self.m;
        }
        &self.samples[flat]
    }
}

fn local_center(d: usize, m: usize, flat: usize) -> [f64; MAX_DIM] {
    let mut x = [0.0; MAX_DIM];
    let mut rest = flat;
    for j in (0..d).rev() {
        let i = rest % m;
        rest /= m;
        x[j] = (i as f64 + 0.5) / m as f64 - 0.5;
    }
    x
}

/// Decay class of the single-site profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `ν ∈ (d, d+2]`.
    LongRange { nu: f64 },
    /// `ν > d + 2`.
    ShortRange { nu: f64 },
    /// Indicator of the sup-norm ball of radius `radius`.
    Compact { radius: f64 },
}

impl ProfileKind {
    pub fn nu(&self) -> Option<f64> {
        match *self {
            ProfileKind::LongRange { nu } | ProfileKind::ShortRange { nu } => Some(nu),
            ProfileKind::Compact { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProfileKind::LongRange { .. } => "long_range",
            ProfileKind::ShortRange { .. } => "short_range",
            ProfileKind::Compact { .. } => "compact",
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let df = d as f64;
        match *self {
            ProfileKind::LongRange { nu } if !(nu > df && nu <= df + 2.0) => {
                Err(Error::Domain(format!(
                    "long-range profile needs ν in ({df}, {}], got {nu}",
                    df + 2.0
                )))
            }
            ProfileKind::ShortRange { nu } if !(nu > df + 2.0 && nu.is_finite()) => {
                Err(Error::Domain(format!(
                    "short-range profile needs ν > {}, got {nu}",
                    df + 2.0
                )))
            }
            ProfileKind::Compact { radius } if !(radius > 0.0 && radius.is_finite()) => {
                Err(Error::Domain(format!(
                    "compact profile needs a positive radius, got {radius}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Single-site bump `ρ⁰(x) = amplitude · φ(x) · S` with `S` symmetric PSD and
/// `φ(x) = (1 + |x|)^{-ν}` or the indicator of `{|x|_∞ <= R₀}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleSiteProfile {
    pub kind: ProfileKind,
    pub amplitude: f64,
    pub shape: SymTensor,
    /// Sites whose contribution falls below this are dropped.
    pub tail_tol: f64,
}

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

impl SingleSiteProfile {
    pub fn new(d: usize, kind: ProfileKind, amplitude: f64) -> Result<Self> {
        let p = SingleSiteProfile {
            kind,
            amplitude,
            shape: SymTensor::identity(d),
            tail_tol: DEFAULT_TAIL_TOL,
        };
        p.validate(d)?;
        Ok(p)
    }

    pub fn with_shape(mut self, shape: SymTensor) -> Result<Self> {
        self.shape = shape;
        self.validate(shape.d)?;
        Ok(self)
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Result<Self> {
        self.tail_tol = tol;
        self.validate(self.shape.d)?;
        Ok(self)
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        self.kind.validate(d)?;
        if self.shape.d != d {
            return Err(Error::Validation(
                "profile shape has wrong dimension".into(),
            ));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Validation(format!(
                "profile amplitude {} must be finite and >= 0",
                self.amplitude
            )));
        }
        if self.shape.asymmetry() > 0.0 || !self.shape.is_psd(1e-14) {
            return Err(Error::Validation(
                "profile shape must be symmetric positive semidefinite".into(),
            ));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::Validation("tail tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.kind {
            ProfileKind::LongRange { nu } | ProfileKind::ShortRange { nu } => {
                format!("{}(nu={nu},amp={})", self.kind.label(), self.amplitude)
            }
            ProfileKind::Compact { radius } => {
                format!("compact(R0={radius},amp={})", self.amplitude)
            }
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.kind, ProfileKind::Compact { .. })
    }

    /// Scalar factor `amplitude · φ` given the Euclidean and sup norms of `x`.
    pub fn radial(&self, euclid: f64, linf: f64) -> f64 {
        match self.kind {
            ProfileKind::LongRange { nu } | ProfileKind::ShortRange { nu } => {
                self.amplitude * (1.0 + euclid).powf(-nu)
            }
            ProfileKind::Compact { radius } => {
                if linf <= radius {
                    self.amplitude
                } else {
                    0.0
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64; MAX_DIM]) -> SymTensor {
        let d = self.shape.d;
        let e = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let l = x[..d].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        self.shape.scale(self.radial(e, l))
    }

    /// Distance beyond which a site contributes less than `tail_tol` (Euclidean
    /// for decaying profiles, sup-norm for compact ones).
    pub fn cutoff_radius(&self) -> f64 {
        match self.kind {
            ProfileKind::LongRange { nu } | ProfileKind::ShortRange { nu } => {
                let top = self.amplitude * self.shape.norm();
                if top <= self.tail_tol {
                    0.0
                } else {
                    ((top / self.tail_tol).powf(1.0 / nu) - 1.0).max(0.0)
                }
            }
            ProfileKind::Compact { radius } => radius,
        }
    }

    /// Lattice sites whose couplings enter a field on `bx`.
    pub fn required_window(&self, bx: &BoxSpec) -> LatticeCube {
        let reach = (bx.k as f64 + 0.5 + self.cutoff_radius()).floor() as i64;
        LatticeCube::centered(bx.d, reach)
    }

    /// Envelope constants `(g₋, g₊)` with
    /// `g₋ <= ρ⁰_ij(x - γ)(1 + |γ|)^ν <= g₊` for `x ∈ C₀` and entries with
    /// `S_ij > 0`. Compact profiles have `g₋ = 0`.
    pub fn envelope(&self) -> (f64, f64) {
        let d = self.shape.d;
        let mut smin = f64::INFINITY;
        let mut smax = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                smin = smin.min(self.shape.get(i, j));
                smax = smax.max(self.shape.get(i, j).abs());
            }
        }
        match self.kind {
            ProfileKind::LongRange { nu } | ProfileKind::ShortRange { nu } => {
                // (1 + |γ|) / (1 + |x - γ|) lies in [1/(1+c), 1+c], c = sup |x| on C₀.
                let c = 1.0 + (d as f64).sqrt() / 2.0;
                let lo = if smin > 0.0 {
                    self.amplitude * smin * c.powf(-nu)
                } else {
                    0.0
                };
                (lo, self.amplitude * smax * c.powf(nu))
            }
            ProfileKind::Compact { .. } => (0.0, self.amplitude * smax),
        }
    }

    /// Scalar `s` with `Σ_γ ρ⁰(x - γ) <= s · S` for all `x`.
    pub fn lattice_sum_bound(&self) -> f64 {
        let d = self.shape.d as i32;
        match self.kind {
            ProfileKind::Compact { radius } => {
                self.amplitude * ((2.0 * radius).floor() + 1.0).powi(d)
            }
            ProfileKind::LongRange { nu } | ProfileKind::ShortRange { nu } => {
                // Reduce x to C₀; a site on the sup-norm shell n is at Euclidean
                // distance >= n - sqrt(d)/2 from x.
                let c = (d as f64).sqrt() / 2.0;
                let shells = 1_000_000usize;
                let mut s = 0.0;
                for n in 0..=shells {
                    let count = if n == 0 {
                        1.0
                    } else {
                        ((2 * n + 1) as f64).powi(d) - ((2 * n - 1) as f64).powi(d)
                    };
                    s += count * (1.0 + (n as f64 - c).max(0.0)).powf(-nu);
                }
                // Beyond the last shell: count <= 2d (2n+1)^{d-1} <= 2d 3^{d-1} n^{d-1}
                // and 1 + n - c >= n / 2.
                let nf = shells as f64;
                let tail =
                    2.0 * d as f64 * 3f64.powi(d - 1) * 2f64.powf(nu) * nf.powf(d as f64 - nu)
                        / (nu - d as f64);
                self.amplitude * (s + tail)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn background_rejects_non_elliptic() {
        let bad = vec![SymTensor::scalar(1, 0.1), SymTensor::scalar(1, 1.0)];
        assert!(PeriodicBackground::new(1, 2, bad.clone(), 2.0).is_err());
        assert!(PeriodicBackground::new(1, 2, bad, 10.0).is_ok());
    }

    #[test]
    fn two_phase_layout() {
        let bg = PeriodicBackground::two_phase(1, 4, 1.0, 4.0).unwrap();
        let v: Vec<f64> = bg.samples.iter().map(|s| s.get(0, 0)).collect();
        assert_eq!(v, vec![1.0, 1.0, 4.0, 4.0]);
        assert_eq!(bg.rho_star, 4.0);
        assert_eq!(bg.at(&[6, 0, 0]).get(0, 0), 4.0);
    }

    #[test]
    fn profile_ranges() {
        assert!(SingleSiteProfile::new(1, ProfileKind::LongRange { nu: 1.0 }, 1.0).is_err());
        assert!(SingleSiteProfile::new(1, ProfileKind::LongRange { nu: 3.0 }, 1.0).is_ok());
        assert!(SingleSiteProfile::new(1, ProfileKind::ShortRange { nu: 3.0 }, 1.0).is_err());
        assert!(SingleSiteProfile::new(2, ProfileKind::ShortRange { nu: 4.5 }, 1.0).is_ok());
        assert!(SingleSiteProfile::new(2, ProfileKind::Compact { radius: 0.0 }, 1.0).is_err());
    }

    #[test]
    fn cutoff_matches_tolerance() {
        let p = SingleSiteProfile::new(1, ProfileKind::LongRange { nu: 2.0 }, 1.0)
            .unwrap()
            .with_tail_tol(1e-6)
            .unwrap();
        let r = p.cutoff_radius();
        assert!((p.radial(r, r) - 1e-6).abs() < 1e-15);
    }

    #[test]
    fn lattice_sum_bound_dominates_direct_sum() {
        let p = SingleSiteProfile::new(1, ProfileKind::LongRange { nu: 2.5 }, 1.0).unwrap();
        let bound = p.lattice_sum_bound();
        for &x in &[0.0, 0.3, -0.5] {
            let s: f64 = (-100_000i64..=100_000)
                .map(|g| p.radial((x - g as f64).abs(), 0.0))
                .sum();
            assert!(s <= bound);
        }
    }
}
