use serde::{Deserialize, Serialize};

use super::bands::BandStructure;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandEdge {
    pub energy: f64,
    /// `true` for the lower edge `E₊` of a band sitting above a gap.
    pub lower_edge_above_gap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Disjoint, ascending `(E_left, E_right)`.
    pub gaps: Vec<(f64, f64)>,
    /// Merged spectral bands.
    pub bands: Vec<(f64, f64)>,
    pub edges: Vec<BandEdge>,
    pub resolution: f64,
}

impl GapReport {
    /// `E₊` of every gap, ascending.
    pub fn upper_edges(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| g.1).collect()
    }

    /// Bottom of the spectrum.
    pub fn bottom(&self) -> Option<f64> {
        self.bands.first().map(|b| b.0)
    }

    /// Gap containing `e` in its open interior.
    pub fn gap_containing(&self, e: f64) -> Option<(f64, f64)> {
        self.gaps.iter().copied().find(|&(l, r)| l < e && e < r)
    }
}

/// Gaps of the band structure longer than `resolution` (default: `10⁻³` times
/// the spectral width).
pub fn spectral_gaps(bands: &BandStructure, resolution: Option<f64>) -> GapReport {
    gaps_from_ranges(&bands.band_ranges(), resolution)
}

pub fn gaps_from_ranges(ranges: &[(f64, f64)], resolution: Option<f64>) -> GapReport {
    let mut r: Vec<(f64, f64)> = ranges.to_vec();
    r.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let width = match (r.first(), r.iter().map(|x| x.1).reduce(f64::max)) {
        (Some(lo), Some(hi)) => hi - lo.0,
        _ => 0.0,
    };
    let res = resolution.unwrap_or(1e-3 * width);
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in r {
        match merged.last_mut() {
            Some(last) if lo - last.1 <= res => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let gaps: Vec<(f64, f64)> = merged.windows(2).map(|w| (w[0].1, w[1].0)).collect();
    let mut edges = Vec::new();
    for (i, &(lo, hi)) in merged.iter().enumerate() {
        edges.push(BandEdge {
            energy: lo,
            lower_edge_above_gap: i > 0,
        });
        edges.push(BandEdge {
            energy: hi,
            lower_edge_above_gap: false,
        });
    }
    GapReport {
        gaps,
        bands: merged,
        edges,
        resolution: res,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_ranges() {
        let g = gaps_from_ranges(&[(0.0, 1.0), (2.0, 3.0)], None);
        assert_eq!(g.gaps, vec![(1.0, 2.0)]);
        assert_eq!(g.upper_edges(), vec![2.0]);
        assert!(g
            .edges
            .iter()
            .any(|e| e.energy == 2.0 && e.lower_edge_above_gap));
        assert!(!g
            .edges
            .iter()
            .any(|e| e.energy == 0.0 && e.lower_edge_above_gap));
    }

    #[test]
    fn overlapping_ranges() {
        assert!(gaps_from_ranges(&[(0.0, 2.0), (1.0, 3.0)], None)
            .gaps
            .is_empty());
    }

    #[test]
    fn tiny_gaps_are_ignored() {
        let g = gaps_from_ranges(&[(0.0, 1.0), (1.0005, 3.0)], None);
        assert!(g.gaps.is_empty());
        let g = gaps_from_ranges(&[(0.0, 1.0), (1.0005, 3.0)], Some(1e-4));
        assert_eq!(g.gaps.len(), 1);
    }
}
