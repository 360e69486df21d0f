use crate::disorder::{coverage_error, SiteValues};
use crate::error::{Error, Result};
use crate::lattice::{LatticeCube, Site, MAX_DIM};

/// Upper bound on `Σ_{|β|_∞ > n} (1 + |β|)^{-ν}` for couplings bounded by 1.
///
/// The ℓ∞ shell of radius `r` has at most `d 2^d (1 + r)^{d-1}` sites, each with
/// Euclidean norm at least `r`; comparing the shell sum with an integral gives
/// `d 2^d (1 + n)^{d-ν} / (ν - d)`.
pub fn potential_tail_bound(d: usize, nu: f64, n: usize) -> f64 {
    let dd = d as f64;
    dd * 2f64.powi(d as i32) * (1.0 + n as f64).powf(dd - nu) / (nu - dd)
}

/// Smallest ℓ∞ radius whose tail bound is at most `tol`.
pub fn potential_cutoff(d: usize, nu: f64, tol: f64) -> Result<usize> {
    let dd = d as f64;
    if !(nu > dd) {
        return Err(Error::Domain(format!("ν = {nu} must exceed d = {d}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let c = dd * 2f64.powi(d as i32) / (nu - dd);
    let guess = (c / tol).powf(1.0 / (nu - dd)) - 1.0;
    if guess > 1e8 {
        return Err(Error::Validation(format!(
            "tolerance {tol:e} needs a cutoff radius of {guess:.3e} at ν = {nu}"
        )));
    }
    let mut n = guess.max(0.0).floor() as usize;
    while n > 0 && potential_tail_bound(d, nu, n - 1) <= tol {
        n -= 1;
    }
    while potential_tail_bound(d, nu, n) > tol {
        n += 1;
    }
    Ok(n)
}

fn weights(d: usize, nu: f64, n: usize) -> (LatticeCube, Vec<f64>) {
    let cube = LatticeCube::centered(d, n as i64);
    let w = cube
        .iter()
        .map(|o| {
            let r = o[..d].iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
            (1.0 + r).powf(-nu)
        })
        .collect();
    (cube, w)
}

fn sum_at(values: &dyn SiteValues, site: &Site, cube: &LatticeCube, w: &[f64]) -> Result<f64> {
    let d = cube.d;
    let mut total = 0.0;
    for (i, o) in cube.iter().enumerate() {
        let mut s = [0; MAX_DIM];
        for j in 0..d {
            s[j] = site[j] + o[j];
        }
        match values.value(&s) {
            Some(v) => total += v * w[i],
            None => {
                let missing = cube.iter().filter_map(|o| {
                    let mut s = [0; MAX_DIM];
                    for j in 0..d {
                        s[j] = site[j] + o[j];
                    }
                    values.value(&s).is_none().then_some(s)
                });
                return Err(coverage_error(missing));
            }
        }
    }
    Ok(total)
}

/// `v_α = Σ_β ω_β (1 + |α - β|)^{-ν}` truncated to `|α - β|_∞ <= R(tol)`, so the
/// neglected remainder is at most `tol`.
pub fn long_range_potential(
    values: &dyn SiteValues,
    site: &Site,
    nu: f64,
    tol: f64,
) -> Result<f64> {
    let d = values.dimension();
    let n = potential_cutoff(d, nu, tol)?;
    let (cube, w) = weights(d, nu, n);
    sum_at(values, site, &cube, &w)
}

/// `v_α` on `C_k ∩ Z^d` (row-major). The realization must cover the centered
/// cube of radius `k + R(tol)`.
pub fn potential_on_box(values: &dyn SiteValues, k: usize, nu: f64, tol: f64) -> Result<Vec<f64>> {
    let d = values.dimension();
    let n = potential_cutoff(d, nu, tol)?;
    let (cube, w) = weights(d, nu, n);
    LatticeCube::centered(d, k as i64)
        .iter()
        .map(|s| sum_at(values, &s, &cube, &w))
        .collect()
}

/// Window a realization must cover for `potential_on_box`.
pub fn potential_window(d: usize, k: usize, nu: f64, tol: f64) -> Result<LatticeCube> {
    Ok(LatticeCube::centered(
        d,
        (k + potential_cutoff(d, nu, tol)?) as i64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{ConstantSites, Realization};

    #[test]
    fn single_site() {
        let mut vals = vec![0.0; 21];
        vals[10] = 1.0;
        let r = Realization::from_values(LatticeCube::centered(1, 10), vals).unwrap();
        // tol large enough that R stays inside the window.
        let tol = 0.25;
        assert!(potential_cutoff(1, 2.0, tol).unwrap() <= 9);
        assert_eq!(long_range_potential(&r, &[0, 0, 0], 2.0, tol).unwrap(), 1.0);
        assert_eq!(
            long_range_potential(&r, &[1, 0, 0], 2.0, tol).unwrap(),
            0.25
        );
    }

    #[test]
    fn zero_couplings() {
        let z = ConstantSites { d: 2, value: 0.0 };
        assert!(potential_on_box(&z, 2, 4.0, 1e-3)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn ones_against_wide_sum() {
        let ones = ConstantSites { d: 1, value: 1.0 };
        let v = long_range_potential(&ones, &[0, 0, 0], 3.0, 1e-8).unwrap();
        // Summed from the small terms up.
        let mut wide = 0.0;
        for b in (1..=10_000).rev() {
            wide += 2.0 * (1.0 + b as f64).powi(-3);
        }
        wide += 1.0;
        assert!((v - wide).abs() <= 1e-8);
    }

    #[test]
    fn cutoff_is_minimal() {
        for (d, nu, tol) in [
            (1, 3.0, 1e-8),
            (2, 4.0, 1e-3),
            (1, 1.5, 1e-2),
            (3, 5.0, 1e-2),
        ] {
            let n = potential_cutoff(d, nu, tol).unwrap();
            assert!(potential_tail_bound(d, nu, n) <= tol);
            assert!(n == 0 || potential_tail_bound(d, nu, n - 1) > tol);
        }
        assert!(matches!(
            potential_cutoff(2, 2.0, 1e-3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn small_window_is_a_coverage_error() {
        let r = Realization::constant(LatticeCube::centered(1, 3), 0.5).unwrap();
        assert!(matches!(
            long_range_potential(&r, &[0, 0, 0], 3.0, 1e-8),
            Err(Error::Coverage { .. })
        ));
    }
}
