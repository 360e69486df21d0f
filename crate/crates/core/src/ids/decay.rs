use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{AssembledOperator, OperatorMatrix, MAX_DIM};
use crate::linalg::subspace::{nearest_eigenpairs, SubspaceOptions};
use crate::linalg::{dense, CsrMatrix, Scalar};
use crate::numerics::fit_line;
use crate::spectral::eigen::DENSE_THRESHOLD;
use crate::spectral::InertiaCounter;

/// Shells whose mass is below this are left out of the fit.
pub const SHELL_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub eigenvalue: f64,
    /// `-slope` of `log s_r` against `r`.
    pub decay_rate: f64,
    pub r2: f64,
    pub center: [f64; MAX_DIM],
    pub shells_used: usize,
}

/// Exponential decay of a density `|v(x)|²` away from its maximum.
///
/// `s_r` is the root-mean-square of `v` over the grid points of the shell
/// `{x : r <= |x - x₀|_∞ < r + 1}` (minimum-image distance when `period` is
/// given, in which case only complete shells count). Averaging rather than
/// summing keeps the shell volume `~ r^{d-1}` out of the slope.
pub fn shell_decay(
    d: usize,
    positions: &[[f64; MAX_DIM]],
    period: Option<[f64; MAX_DIM]>,
    density: &[f64],
) -> DecayReport {
    let argmax = density
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let c = positions[argmax];
    let mut mass: Vec<f64> = Vec::new();
    let mut points: Vec<usize> = Vec::new();
    for (x, &rho) in positions.iter().zip(density) {
        let mut r = 0.0f64;
        for j in 0..d {
            let mut t = x[j] - c[j];
            if let Some(p) = period {
                t -= p[j] * (t / p[j]).round();
            }
            r = r.max(t.abs());
        }
        let s = (r + 1e-9).floor() as usize;
        if s >= mass.len() {
            mass.resize(s + 1, 0.0);
            points.resize(s + 1, 0);
        }
        mass[s] += rho;
        points[s] += 1;
    }
    let complete = match period {
        Some(p) => {
            let half = (0..d).map(|j| p[j] / 2.0).fold(f64::INFINITY, f64::min);
            ((half + 1e-9).floor() as usize).min(mass.len())
        }
        None => mass.len(),
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = mass[..complete]
        .iter()
        .enumerate()
        .map(|(r, m)| (r as f64, (m / points[r].max(1) as f64).sqrt()))
        .filter(|(_, s)| *s > SHELL_FLOOR)
        .map(|(r, s)| (r, s.ln()))
        .unzip();
    let (rate, r2) = match fit_line(&xs, &ys) {
        Ok(f) => (-f.slope, f.r2),
        Err(_) => (0.0, 0.0),
    };
    DecayReport {
        eigenvalue: f64::NAN,
        decay_rate: rate,
        r2,
        center: c,
        shells_used: xs.len(),
    }
}

fn pairs_in_window<T: Scalar>(
    a: &CsrMatrix<T>,
    lo: f64,
    hi: f64,
    count: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = a.dim();
    let (vals, vecs) = if n < DENSE_THRESHOLD {
        dense::eigenpairs(&a.to_dense())
    } else {
        let want = (count + 4).min(n);
        nearest_eigenpairs(a, 0.5 * (lo + hi), want, &SubspaceOptions::default())?
    };
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > lo && l <= hi)
        .map(|(j, &l)| (l, vecs.column(j).iter().map(|x| x.abs_sq()).collect()))
        .collect())
}

/// Decay of every eigenfunction with eigenvalue in `(lo, hi]`, lowest first,
/// at most `max_states` of them.
pub fn decay_diagnostic(
    a: &AssembledOperator,
    lo: f64,
    hi: f64,
    max_states: Option<usize>,
) -> Result<Vec<DecayReport>> {
    let counter = InertiaCounter::new(&a.matrix);
    let count = counter
        .count_below(hi)?
        .saturating_sub(counter.count_below(lo)?);
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut pairs = match &a.matrix {
        OperatorMatrix::Real(m) => pairs_in_window(m, lo, hi, count)?,
        OperatorMatrix::Complex(m) => pairs_in_window(m, lo, hi, count)?,
    };
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    if let Some(k) = max_states {
        pairs.truncate(k);
    }
    let positions = a.positions();
    let period = a.grid.period();
    Ok(pairs
        .into_iter()
        .map(|(l, rho)| DecayReport {
            eigenvalue: l,
            ..shell_decay(a.grid.d, &positions, period, &rho)
        })
        .collect())
}
