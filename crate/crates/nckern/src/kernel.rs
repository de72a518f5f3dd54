//! Graded kernels on a finite point set with matrix-algebra coefficients:
//! validation of the nc-kernel axioms, the adjoint kernel and the Hermitian
//! split.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cr, dagger, identity, kron, unvec, vec_col, zeros, CMatrix};
use crate::ncpoints::{intertwiner_basis, PointSet};

/// Coefficient spaces: A = ℂ^{a×a} (a = 1 encodes A = ℂ) and Y = ℂ^y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffSpaces {
    pub a: usize,
    pub y: usize,
}

impl CoeffSpaces {
    pub fn new(a: usize, y: usize) -> Result<Self> {
        if a == 0 || y == 0 {
            return Err(Error::DimensionMismatch("coefficient spaces need a, y ≥ 1".into()));
        }
        Ok(CoeffSpaces { a, y })
    }
}

/// Report of the nc-kernel axiom check.
#[derive(Debug, Clone, Copy)]
pub struct NcValidation {
    pub ok: bool,
    pub worst_residual: f64,
}

/// N×N grid of linear blocks K(Z_i, Z_j): A^{n_i×n_j} → L(Y)^{n_i×n_j}.
///
/// Each block is stored as its matrix on column-stacked vectorizations, of
/// shape (n_i·y·n_j·y) × (n_i·a·n_j·a).
#[derive(Debug, Clone)]
pub struct GradedKernel {
    omega: PointSet,
    spaces: CoeffSpaces,
    blocks: Vec<Vec<CMatrix>>,
}

impl GradedKernel {
    pub fn new(omega: PointSet, spaces: CoeffSpaces, blocks: Vec<Vec<CMatrix>>) -> Result<Self> {
        let n = omega.len();
        if blocks.len() != n || blocks.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("expected an {n}×{n} block grid")));
        }
        for (i, row) in blocks.iter().enumerate() {
            for (j, map) in row.iter().enumerate() {
                let (ni, nj) = (omega.size(i), omega.size(j));
                let want = (ni * spaces.y * nj * spaces.y, ni * spaces.a * nj * spaces.a);
                if (map.nrows(), map.ncols()) != want {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({i},{j}) is {}×{}, expected {}×{}",
                        map.nrows(),
                        map.ncols(),
                        want.0,
                        want.1
                    )));
                }
            }
        }
        Ok(GradedKernel { omega, spaces, blocks })
    }

    /// Zero kernel of the given grading.
    pub fn zero(omega: PointSet, spaces: CoeffSpaces) -> Self {
        let n = omega.len();
        let blocks = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (ni, nj) = (omega.size(i), omega.size(j));
                        zeros(ni * spaces.y * nj * spaces.y, ni * spaces.a * nj * spaces.a)
                    })
                    .collect()
            })
            .collect();
        GradedKernel { omega, spaces, blocks }
    }

    /// Build one block's map matrix by applying a closure to every basis
    /// element of A^{n_i×n_j}.
    pub fn map_from_fn(ni: usize, nj: usize, spaces: CoeffSpaces, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
        let (rin, cin) = (ni * spaces.a, nj * spaces.a);
        let mut map = zeros(ni * spaces.y * nj * spaces.y, rin * cin);
        for col in 0..rin * cin {
            let mut e = zeros(rin, cin);
            e[(col % rin, col / rin)] = cr(1.0);
            let out = f(&e);
            map.set_column(col, &vec_col(&out).column(0));
        }
        map
    }

    pub fn omega(&self) -> &PointSet {
        &self.omega
    }

    pub fn spaces(&self) -> CoeffSpaces {
        self.spaces
    }

    pub fn block(&self, i: usize, j: usize) -> &CMatrix {
        &self.blocks[i][j]
    }

    pub fn blocks(&self) -> &Vec<Vec<CMatrix>> {
        &self.blocks
    }

    /// Evaluate K(Z_i, Z_j)(P).
    pub fn apply(&self, i: usize, j: usize, p: &CMatrix) -> Result<CMatrix> {
        let (ni, nj) = (self.omega.size(i), self.omega.size(j));
        let (a, y) = (self.spaces.a, self.spaces.y);
        if p.nrows() != ni * a || p.ncols() != nj * a {
            return Err(Error::DimensionMismatch(format!(
                "argument is {}×{}, block ({i},{j}) expects {}×{}",
                p.nrows(),
                p.ncols(),
                ni * a,
                nj * a
            )));
        }
        let out = &self.blocks[i][j] * vec_col(p);
        Ok(unvec(&out, ni * y, nj * y))
    }

    /// Largest block norm, the scale used for relative residuals.
    pub fn max_block_norm(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|b| b.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> GradedKernel {
        let blocks = self
            .blocks
            .iter()
            .map(|row| row.iter().map(|b| b.map(|v| v * s)).collect())
            .collect();
        GradedKernel {
            omega: self.omega.clone(),
            spaces: self.spaces,
            blocks,
        }
    }

    pub fn add(&self, other: &GradedKernel) -> Result<GradedKernel> {
        if self.spaces != other.spaces || self.omega.len() != other.omega.len() {
            return Err(Error::DimensionMismatch("kernel sum needs identical grading".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a + b).collect())
            .collect();
        Ok(GradedKernel {
            omega: self.omega.clone(),
            spaces: self.spaces,
            blocks,
        })
    }

    /// Frobenius distance between the block maps of two kernels.
    pub fn distance(&self, other: &GradedKernel) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Check the "respects intertwinings" axiom against the computed
    /// intertwiner bases between all point pairs of Ω.
    ///
    /// For α ∈ I(Z_ĩ, Z_i), β ∈ I(Z_j̃, Z_j) and every basis P the residual
    /// ‖(α⊗I_y) K_{ij}(P) (β⊗I_y)* − K_{ĩj̃}((α⊗I_a) P (β⊗I_a)*)‖_F is
    /// recorded; ok iff the maximum stays below 1e−8·max(1, max block norm).
    pub fn validate_nc(&self) -> Result<NcValidation> {
        let n = self.omega.len();
        let (a, y) = (self.spaces.a, self.spaces.y);
        let mut bases = Vec::with_capacity(n * n);
        for ti in 0..n {
            for i in 0..n {
                bases.push(intertwiner_basis(self.omega.point(ti), self.omega.point(i))?);
            }
        }
        let scale = 1f64.max(self.max_block_norm());
        let mut worst = 0.0_f64;
        for i in 0..n {
            for ti in 0..n {
                let left = &bases[ti * n + i];
                if left.basis.is_empty() {
                    continue;
                }
                for j in 0..n {
                    for tj in 0..n {
                        let right = &bases[tj * n + j];
                        if right.basis.is_empty() {
                            continue;
                        }
                        let (ni, nj) = (self.omega.size(i), self.omega.size(j));
                        for alpha in &left.basis {
                            let la = kron(alpha, &identity(y));
                            let la_in = kron(alpha, &identity(a));
                            for beta in &right.basis {
                                let rb = kron(beta, &identity(y));
                                let rb_in = kron(beta, &identity(a));
                                for col in 0..ni * a * nj * a {
                                    let mut e = zeros(ni * a, nj * a);
                                    e[(col % (ni * a), col / (ni * a))] = cr(1.0);
                                    let lhs = &la * self.apply(i, j, &e)? * dagger(&rb);
                                    let rhs = self.apply(ti, tj, &(&la_in * e * dagger(&rb_in)))?;
                                    worst = worst.max((lhs - rhs).norm());
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(NcValidation {
            ok: worst <= 1e-8 * scale,
            worst_residual: worst,
        })
    }

    /// The adjoint kernel K*(Z,W)(P) = K(W,Z)(P*)*.
    pub fn adjoint(&self) -> GradedKernel {
        let n = self.omega.len();
        let blocks = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (ni, nj) = (self.omega.size(i), self.omega.size(j));
                        GradedKernel::map_from_fn(ni, nj, self.spaces, |p| {
                            let inner = self
                                .apply(j, i, &dagger(p))
                                .expect("grading checked at construction");
                            dagger(&inner)
                        })
                    })
                    .collect()
            })
            .collect();
        GradedKernel {
            omega: self.omega.clone(),
            spaces: self.spaces,
            blocks,
        }
    }

    /// Hermitian defect ‖K − K*‖ relative to max(1, max block norm).
    pub fn hermitian_defect(&self) -> f64 {
        self.distance(&self.adjoint()) / 1f64.max(self.max_block_norm())
    }

    /// K = K_R + iK_I with both parts Hermitian.
    pub fn hermitian_split(&self) -> (GradedKernel, GradedKernel) {
        let adj = self.adjoint();
        let kr = self.add(&adj).expect("same grading").scale(cr(0.5));
        let ki = self
            .add(&adj.scale(cr(-1.0)))
            .expect("same grading")
            .scale(Complex64::new(0.0, -0.5));
        (kr, ki)
    }
}
