//! Lowest-order conforming discretization of `-∇·ρ∇` with unknowns on the
//! vertices of a uniform tensor grid.
//!
//! On each cell the quadratic form is approximated by
//!
//! ```text
//! Σ_j ρ_jj mean_e (δ_e u)² + Σ_{i≠j} ρ_ij (a_i u)(a_j u),
//! ```
//!
//! where `δ_e` runs over the forward differences on the `2^{d-1}` cell edges along
//! axis `j` and `a_j u` is their mean. By Jensen this dominates `gᵀρg` with
//! `g_j = a_j u`, so every cell term is PSD. Dividing by `h²` (lumped vertex mass
//! `h^d`) yields the usual `2d`-point stencil when `ρ = I`.

use num_complex::Complex64;

use crate::linalg::{CsrMatrix, Scalar};

use super::field::CoefficientField;
use super::geometry::{BoundaryCondition, Grid, GridBoundary, MAX_DIM};
use super::tensor::SymTensor;

/// Real symmetric unless a nontrivial Floquet phase is present.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorMatrix {
    Real(CsrMatrix<f64>),
    Complex(CsrMatrix<Complex64>),
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        match self {
            OperatorMatrix::Real(a) => a.dim(),
            OperatorMatrix::Complex(a) => a.dim(),
        }
    }

    pub fn norm1(&self) -> f64 {
        match self {
            OperatorMatrix::Real(a) => a.norm1(),
            OperatorMatrix::Complex(a) => a.norm1(),
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        match self {
            OperatorMatrix::Real(a) => a.hermitian_defect(),
            OperatorMatrix::Complex(a) => a.hermitian_defect(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, OperatorMatrix::Real(_))
    }

    pub fn to_complex(&self) -> CsrMatrix<Complex64> {
        match self {
            OperatorMatrix::Real(a) => a.map(|v| Complex64::new(v, 0.0)),
            OperatorMatrix::Complex(a) => a.clone(),
        }
    }

    /// `self + alpha * other`, complex if either operand is.
    pub fn add_scaled(&self, other: &OperatorMatrix, alpha: f64) -> OperatorMatrix {
        match (self, other) {
            (OperatorMatrix::Real(a), OperatorMatrix::Real(b)) => {
                OperatorMatrix::Real(a.add_scaled(b, alpha))
            }
            _ => OperatorMatrix::Complex(self.to_complex().add_scaled(&other.to_complex(), alpha)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssembledOperator {
    pub matrix: OperatorMatrix,
    pub h: f64,
    pub bc: Option<BoundaryCondition>,
    pub grid: Grid,
    /// `L_j` with `‖A(φ) - A(φ')‖₂ <= Σ_j L_j |φ_j - φ'_j|` for seam phases `φ`.
    pub seam_lipschitz: [f64; MAX_DIM],
}

impl AssembledOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn norm1(&self) -> f64 {
        self.matrix.norm1()
    }

    /// Physical coordinates of the unknowns.
    pub fn positions(&self) -> Vec<[f64; MAX_DIM]> {
        self.grid.dof_positions()
    }

    /// Same grid and metadata, different matrix.
    pub fn with_matrix(&self, matrix: OperatorMatrix) -> AssembledOperator {
        AssembledOperator {
            matrix,
            ..self.clone()
        }
    }
}

pub fn assemble_operator(field: &CoefficientField) -> AssembledOperator {
    let mut op = assemble_grid(&field.grid, &field.cells);
    op.bc = Some(field.bx.bc.clone());
    op
}

/// Assembles on an arbitrary grid; `cells[c]` belongs to `grid.cell_index(c)`.
pub fn assemble_grid(grid: &Grid, cells: &[SymTensor]) -> AssembledOperator {
    assert_eq!(cells.len(), grid.cell_count(), "one tensor per cell");
    let phase = match grid.boundary {
        GridBoundary::Periodic { phase } => phase,
        GridBoundary::Dirichlet => [0.0; MAX_DIM],
    };
    let trivial = phase[..grid.d]
        .iter()
        .all(|&p| (p / (2.0 * std::f64::consts::PI)).fract() == 0.0);
    let (matrix, seam_lipschitz) = if trivial {
        let (a, l) = build(grid, cells, |_| 1.0);
        (OperatorMatrix::Real(a), l)
    } else {
        let (a, l) = build(grid, cells, |mask| {
            let angle: f64 = (0..grid.d)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| phase[j])
                .sum();
            Complex64::from_polar(1.0, angle)
        });
        (OperatorMatrix::Complex(a), l)
    };
    AssembledOperator {
        matrix,
        h: grid.h,
        bc: None,
        grid: *grid,
        seam_lipschitz,
    }
}

/// Local `2^d × 2^d` cell matrix (before division by `h²`). Local vertex `s`
/// sits at offset bit `j` of `s` along axis `j`.
pub fn local_matrix(d: usize, rho: &SymTensor) -> Vec<Vec<f64>> {
    let nv = 1usize << d;
    let w = 1.0 / (1usize << (d - 1)) as f64;
    let mut k = vec![vec![0.0; nv]; nv];
    let mut mean = vec![vec![0.0; nv]; d];
    for j in 0..d {
        let bit = 1 << j;
        for v0 in (0..nv).filter(|v| v & bit == 0) {
            let v1 = v0 | bit;
            let c = rho.a[j][j] * w;
            k[v0][v0] += c;
            k[v1][v1] += c;
            k[v0][v1] -= c;
            k[v1][v0] -= c;
            mean[j][v1] += w;
            mean[j][v0] -= w;
        }
    }
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let r = 0.5 * (rho.a[i][j] + rho.a[j][i]);
            if r == 0.0 {
                continue;
            }
            for s in 0..nv {
                for t in 0..nv {
                    k[s][t] += r * mean[i][s] * mean[j][t];
                }
            }
        }
    }
    k
}

fn build<T: Scalar>(
    grid: &Grid,
    cells: &[SymTensor],
    phase_of: impl Fn(usize) -> T,
) -> (CsrMatrix<T>, [f64; MAX_DIM]) {
    let d = grid.d;
    let nv = 1usize << d;
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let extent: Vec<usize> = (0..d).map(|j| grid.vertices_along(j)).collect();
    let n = grid.dof_count();
    let dirichlet = !grid.is_periodic();

    let mut triplets: Vec<(usize, usize, T)> = Vec::with_capacity(cells.len() * nv * nv);
    let mut seam_rows = vec![[0.0f64; MAX_DIM]; n];
    let mut dofs: Vec<Option<(usize, usize)>> = vec![None; nv];
    for (flat, rho) in cells.iter().enumerate() {
        let idx = grid.cell_index(flat);
        // Map local vertices to (dof, wrap mask).
        for (s, slot) in dofs.iter_mut().enumerate() {
            let mut dof = 0usize;
            let mut mask = 0usize;
            let mut alive = true;
            for j in 0..d {
                let mut v = idx[j] + ((s >> j) & 1);
                if dirichlet {
                    if v == 0 || v == grid.cells[j] {
                        alive = false;
                        break;
                    }
                    v -= 1;
                } else if v == grid.cells[j] {
                    v = 0;
                    mask |= 1 << j;
                }
                dof = dof * extent[j] + v;
            }
            *slot = alive.then_some((dof, mask));
        }
        let k = local_matrix(d, rho);
        for s in 0..nv {
            let Some((ds, ms)) = dofs[s] else { continue };
            for t in s..nv {
                let Some((dt, mt)) = dofs[t] else { continue };
                let kst = k[s][t] * inv_h2;
                if kst == 0.0 {
                    continue;
                }
                if s == t {
                    triplets.push((ds, ds, T::lift(kst)));
                    continue;
                }
                let v = phase_of(ms).conj() * T::lift(kst) * phase_of(mt);
                triplets.push((ds, dt, v));
                triplets.push((dt, ds, v.conj()));
                let crossed = ms ^ mt;
                for j in 0..d {
                    if crossed & (1 << j) != 0 {
                        seam_rows[ds][j] += kst.abs();
                        seam_rows[dt][j] += kst.abs();
                    }
                }
            }
        }
    }
    let mut lip = [0.0f64; MAX_DIM];
    for row in &seam_rows {
        for j in 0..d {
            lip[j] = lip[j].max(row[j]);
        }
    }
    (CsrMatrix::from_triplets_hermitian(n, triplets), lip)
}
