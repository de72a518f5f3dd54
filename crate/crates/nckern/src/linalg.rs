//! Dense complex matrix kernel: Hermitian eigendecomposition, SVD-based
//! nullspace and rank, Kronecker products, column-stacking vectorization and
//! PSD projection.
//!
//! Conventions fixed here and used by every other module:
//! * `vec` stacks columns, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//! * Kronecker products put the first factor on the outer index:
//!   `(A ⊗ B)[(i·q + k), (j·q + l)] = A[i,j] B[k,l]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix. nalgebra stores column-major, which matches the
/// column-stacking `vec` convention.
pub type CMatrix = DMatrix<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Shorthand complex constructor.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real scalar as a complex number.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(r, cols)
}

/// Frobenius norm.
pub fn frob(a: &CMatrix) -> f64 {
    a.norm()
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Relative Hermitian defect ‖A − A*‖_F / max(1, ‖A‖_F).
pub fn herm_defect(a: &CMatrix) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    (a - a.adjoint()).norm() / 1f64.max(a.norm())
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    herm_defect(a) <= tol
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending real eigenvalues.
    pub eigenvalues: DVector<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: CMatrix,
}

impl HermEig {
    /// U diag(λ) U*.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&self.eigenvalues.map(cr));
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }

    pub fn eigmin(&self) -> f64 {
        if self.eigenvalues.is_empty() {
            0.0
        } else {
            self.eigenvalues[0]
        }
    }

    pub fn eigmax(&self) -> f64 {
        if self.eigenvalues.is_empty() {
            0.0
        } else {
            self.eigenvalues[self.eigenvalues.len() - 1]
        }
    }

    /// Spectral norm max |λ|.
    pub fn norm2(&self) -> f64 {
        self.eigmin().abs().max(self.eigmax().abs())
    }
}

const HERM_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with `NotHermitian` when ‖A − A*‖_F > 1e−10·max(1, ‖A‖_F) and with
/// `NoConvergence` when the QR iteration budget is exhausted.
pub fn herm_eig(a: &CMatrix) -> Result<HermEig> {
    let defect = herm_defect(a);
    if defect > HERM_TOL {
        return Err(Error::NotHermitian { residual: defect });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(HermEig {
            eigenvalues: DVector::zeros(0),
            eigenvectors: zeros(0, 0),
        });
    }
    // Work on the exactly Hermitian part so eigenvalues come out real.
    let h = (a + a.adjoint()).scale(0.5);
    let se = h
        .try_symmetric_eigen(f64::EPSILON, 10_000 * n.max(8))
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let eigenvectors =
        CMatrix::from_columns(&order.iter().map(|&i| se.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn eigmin_hermitian(a: &CMatrix) -> Result<f64> {
    Ok(herm_eig(a)?.eigmin())
}

/// Singular values of `a`, descending, together with the full set of right
/// singular vectors (columns, orthonormal basis of the input space).
fn full_right_singular(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (m, n) = (a.nrows(), a.ncols());
    // Pad with zero rows so the thin SVD still yields all n right vectors.
    let b = if m < n {
        let mut b = zeros(n, n);
        b.view_mut((0, 0), (m, n)).copy_from(a);
        b
    } else {
        a.clone()
    };
    let svd = b.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..vt.nrows()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let sigma: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let v = CMatrix::from_columns(
        &idx.iter().map(|&i| vt.row(i).adjoint()).collect::<Vec<_>>(),
    );
    (sigma, v)
}

/// Orthonormal basis of {x : ‖Ax‖ ≤ rel_tol·σ_max·‖x‖}, as column vectors.
///
/// The tolerance is relative to the largest singular value, so the result is
/// invariant under rescaling of `a`. An empty list means trivial nullspace.
pub fn nullspace(a: &CMatrix, rel_tol: f64) -> Vec<CMatrix> {
    let (sigma, v) = full_right_singular(a);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cut = rel_tol * smax;
    (0..sigma.len())
        .filter(|&k| sigma[k] <= cut)
        .map(|k| v.column(k).into_owned().reshape_generic(nalgebra::Dyn(a.ncols()), nalgebra::Dyn(1)))
        .collect()
}

/// Default relative rank tolerance used throughout.
pub const RANK_TOL: f64 = 1e-10;

/// Numerical rank with relative tolerance σ > rel_tol·σ_max.
pub fn rank(a: &CMatrix, rel_tol: f64) -> usize {
    let (sigma, _) = full_right_singular(a);
    let smax = sigma.first().copied().unwrap_or(0.0);
    sigma.iter().filter(|&&s| s > rel_tol * smax && s > 0.0).count()
}

/// Kronecker product A ⊗ B, first factor on the outer index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization, returned as an (r·c)×1 matrix.
pub fn vec_col(a: &CMatrix) -> CMatrix {
    CMatrix::from_column_slice(a.nrows() * a.ncols(), 1, a.as_slice())
}

/// Inverse of `vec_col`.
pub fn unvec(v: &CMatrix, rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.nrows() * v.ncols(), rows * cols, "unvec size mismatch");
    CMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Projection onto the PSD cone: negative eigenvalues clipped to zero.
pub fn psd_project(a: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(a)?;
    Ok(clip_spectrum(&eig, |l| l.max(0.0)))
}

/// U diag(f(λ)) U* for an already computed eigendecomposition.
pub fn clip_spectrum(eig: &HermEig, f: impl Fn(f64) -> f64) -> CMatrix {
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| cr(f(l))));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Reorder a Kronecker-structured matrix from (outer a, inner b) indexing to
/// (outer b, inner a) indexing on rows, and likewise (c, d) → (d, c) on
/// columns. Used to move between coefficient-outer and point-outer layouts.
pub fn swap_kron_layout(m: &CMatrix, a: usize, b: usize, c_dim: usize, d_dim: usize) -> CMatrix {
    assert_eq!(m.nrows(), a * b, "row layout mismatch");
    assert_eq!(m.ncols(), c_dim * d_dim, "column layout mismatch");
    let mut out = zeros(a * b, c_dim * d_dim);
    for i in 0..a {
        for k in 0..b {
            for j in 0..c_dim {
                for l in 0..d_dim {
                    out[(k * a + i, l * c_dim + j)] = m[(i * b + k, j * d_dim + l)];
                }
            }
        }
    }
    out
}

/// Orthonormal basis (columns) of the column space of `a`, σ > rel_tol·σ_max.
pub fn column_space(a: &CMatrix, rel_tol: f64) -> CMatrix {
    if a.ncols() == 0 || a.nrows() == 0 {
        return zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested u");
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let cols: Vec<_> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > rel_tol * smax && svd.singular_values[k] > 0.0)
        .map(|k| u.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        zeros(a.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub fn random_matrix(rng: &mut StdRng, r: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(r, cols, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn random_hermitian(rng: &mut StdRng, n: usize) -> CMatrix {
        let g = random_matrix(rng, n, n);
        (&g + g.adjoint()).scale(0.5)
    }

    #[test]
    fn herm_eig_diagonal() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![cr(3.0), cr(1.0)]));
        let eig = herm_eig(&a).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_off_diagonal() {
        // [[0,1],[1,0]] has characteristic polynomial λ² − 1.
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let eig = herm_eig(&a).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_identity() {
        for n in [1, 3, 7] {
            let eig = herm_eig(&identity(n)).unwrap();
            assert!(eig.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(herm_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn herm_eig_reconstruction_and_unitarity() {
        let mut rng = StdRng::seed_from_u64(1);
        for n in [2usize, 5, 9, 12] {
            let a = random_hermitian(&mut rng, n);
            let eig = herm_eig(&a).unwrap();
            let rec = (eig.reconstruct() - &a).norm();
            assert!(rec <= 1e-10 * 1f64.max(a.norm()), "rec {rec}");
            let uni = (eig.eigenvectors.adjoint() * &eig.eigenvectors - identity(n)).norm();
            assert!(uni <= 1e-10, "unitary {uni}");
            assert!(eig.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&zeros(2, 2), RANK_TOL).len(), 2);
        assert!(nullspace(&identity(2), RANK_TOL).is_empty());
        let a = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let ns = nullspace(&a, RANK_TOL);
        assert_eq!(ns.len(), 1);
        // Direction ∝ (1, −1)/√2 up to phase.
        let v = &ns[0];
        assert!((v[(0, 0)] + v[(1, 0)]).norm() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let mut rng = StdRng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 2, 5);
        let ns = nullspace(&a, RANK_TOL);
        assert_eq!(ns.len(), 3);
        for v in &ns {
            assert!((&a * v).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_plus_nullity() {
        let mut rng = StdRng::seed_from_u64(3);
        for (r, cols) in [(3, 3), (4, 2), (2, 6), (5, 5)] {
            let a = random_matrix(&mut rng, r, cols);
            assert_eq!(rank(&a, RANK_TOL) + nullspace(&a, RANK_TOL).len(), cols);
        }
        // Rank-deficient case.
        let b = random_matrix(&mut rng, 4, 2) * random_matrix(&mut rng, 2, 4);
        assert_eq!(rank(&b, RANK_TOL), 2);
        assert_eq!(nullspace(&b, RANK_TOL).len(), 2);
    }

    #[test]
    fn psd_project_examples() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![cr(2.0), cr(-1.0)]));
        let p = psd_project(&a).unwrap();
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-12 && p[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn vec_convention() {
        // vec reads columns: [[a,c],[b,d]] ↦ (a,b,c,d).
        let m = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(3.0), cr(2.0), cr(4.0)]);
        let v = vec_col(&m);
        for (k, want) in [1.0, 2.0, 3.0, 4.0].iter().enumerate() {
            assert_eq!(v[(k, 0)].re, *want);
        }
        assert_eq!(unvec(&v, 2, 2), m);
    }

    #[test]
    fn kron_nilpotent_blocks() {
        let n = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let k = kron(&identity(2), &n);
        assert_eq!(k[(0, 1)], ONE);
        assert_eq!(k[(2, 3)], ONE);
        assert_eq!(k.map(|z| z.norm()).sum(), 2.0);
    }

    #[test]
    fn swap_kron_layout_roundtrip() {
        let mut rng = StdRng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 2, 3);
        let b = random_matrix(&mut rng, 4, 2);
        let swapped = swap_kron_layout(&kron(&a, &b), 2, 4, 3, 2);
        assert!((swapped - kron(&b, &a)).norm() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn vec_of_product_identity(seed in 0u64..1u64 << 48) {
            let mut rng = StdRng::seed_from_u64(seed);
            let (m, k, n, p) = (
                rng.random_range(1..4usize),
                rng.random_range(1..4usize),
                rng.random_range(1..4usize),
                rng.random_range(1..4usize),
            );
            let a = random_matrix(&mut rng, m, k);
            let x = random_matrix(&mut rng, k, n);
            let b = random_matrix(&mut rng, n, p);
            let lhs = vec_col(&(&a * &x * &b));
            let rhs = kron(&b.transpose(), &a) * vec_col(&x);
            prop_assert!((lhs - rhs).norm() <= 1e-10);
        }

        #[test]
        fn psd_split_reconstructs(seed in 0u64..1u64 << 48) {
            let mut rng = StdRng::seed_from_u64(seed);
            let n = rng.random_range(1..=12usize);
            let a = {
                let g = random_matrix(&mut rng, n, n);
                (&g + g.adjoint()).scale(0.5)
            };
            let plus = psd_project(&a).unwrap();
            let minus = psd_project(&(-&a)).unwrap();
            prop_assert!(eigmin_hermitian(&plus).unwrap() >= -1e-12);
            prop_assert!((&plus - &minus - &a).norm() <= 1e-10 * 1f64.max(a.norm()));
        }
    }
}
