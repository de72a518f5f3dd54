//! Seeded fixture generators used by the test suites and exposed through the
//! CLI `fixture-gen` subcommand so runs are reproducible outside the tests.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::encoding::{encode, ChoiMap};
use crate::error::Result;
use crate::kernel::{CoeffSpaces, GradedKernel};
use crate::linalg::{c, cr, dagger, identity, kron, swap_kron_layout, zeros, CMatrix};
use crate::ncpoints::{NcPoint, NcPoly, PointSet};

pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Standard complex Gaussian-ish matrix (uniform real/imag parts, centred).
pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

pub fn random_hermitian(rng: &mut StdRng, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_unitary(rng: &mut StdRng, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    let qr = g.qr();
    qr.q()
}

pub fn random_invertible(rng: &mut StdRng, n: usize) -> CMatrix {
    loop {
        let m = random_matrix(rng, n, n) + identity(n).scale(0.5);
        if m.clone().try_inverse().is_some() {
            return m;
        }
    }
}

/// Normal matrix U diag(λ) U*.
pub fn random_normal_matrix(rng: &mut StdRng, n: usize) -> CMatrix {
    let u = random_unitary(rng, n);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    }));
    &u * d * u.adjoint()
}

/// Matrix with a deliberately nonzero self-commutator.
pub fn random_nonnormal_matrix(rng: &mut StdRng, n: usize) -> CMatrix {
    loop {
        let mut m = random_matrix(rng, n, n);
        m[(0, n - 1)] += cr(2.0);
        let comm = (&m * dagger(&m) - dagger(&m) * &m).norm();
        if comm > 1e-4 * m.norm().powi(2) {
            return m;
        }
    }
}

pub fn random_point(rng: &mut StdRng, n: usize, d: usize) -> NcPoint {
    NcPoint::new((0..d).map(|_| random_matrix(rng, n, n)).collect()).unwrap()
}

pub fn random_pointset(rng: &mut StdRng, sizes: &[usize], d: usize) -> PointSet {
    PointSet::new(sizes.iter().map(|&n| random_point(rng, n, d)).collect()).unwrap()
}

/// Two distinct random scalar points; S is then the diagonal C*-algebra.
pub fn two_scalar_pointset(rng: &mut StdRng, d: usize) -> PointSet {
    let a = random_point(rng, 1, d);
    let b = random_point(rng, 1, d);
    PointSet::new(vec![a, b]).unwrap()
}

/// Admissible two-point set with 2×2 normal first point (d = 1), used where
/// nontrivial intertwiners are wanted alongside admissibility.
pub fn admissible_two_point_set(rng: &mut StdRng) -> PointSet {
    let z1 = NcPoint::new(vec![random_normal_matrix(rng, 2)]).unwrap();
    let z2 = NcPoint::new(vec![random_normal_matrix(rng, 1)]).unwrap();
    PointSet::new(vec![z1, z2]).unwrap()
}

/// Non-admissible set containing a Jordan block point (d = 1).
pub fn jordan_block_pointset(rng: &mut StdRng) -> PointSet {
    let lambda = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let mut j = identity(2).map(|v| v * lambda);
    j[(0, 1)] = cr(1.0);
    let z1 = NcPoint::new(vec![j]).unwrap();
    let z2 = NcPoint::new(vec![random_matrix(rng, 1, 1)]).unwrap();
    PointSet::new(vec![z1, z2]).unwrap()
}

/// Random nc polynomial with words up to `max_len` over d letters.
pub fn random_poly(rng: &mut StdRng, d: usize, max_len: usize, rows: usize, cols: usize) -> NcPoly {
    let mut terms: Vec<(Vec<usize>, CMatrix)> = vec![(vec![], random_matrix(rng, rows, cols))];
    let mut words = vec![vec![]];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for w in words.iter().filter(|w| w.len() == len - 1) {
            for letter in 0..d {
                let mut w2 = w.clone();
                w2.push(letter);
                next.push(w2);
            }
        }
        for w in &next {
            if rng.random::<f64>() < 0.6 {
                let scale = 1.0 / (1.0 + len as f64);
                terms.push((w.clone(), random_matrix(rng, rows, cols).scale(scale)));
            }
        }
        words.extend(next);
    }
    NcPoly::new(terms).unwrap()
}

/// Evaluate a matrix-coefficient polynomial in the point-outer layout used by
/// kernel values: shape (n·rows)×(n·cols).
pub fn eval_poly_point_outer(poly: &NcPoly, z: &NcPoint) -> Result<CMatrix> {
    let (r, s) = poly.coeff_shape();
    let n = z.size();
    let coeff_outer = crate::ncpoints::nc_poly_eval(poly, z)?;
    Ok(swap_kron_layout(&coeff_outer, r, n, s, n))
}

/// The nc-function values H(Z_i) of a random polynomial H with coefficients
/// in ℂ^{y×(r·a)}, arranged block-compatibly for Kolmogorov kernels: H_i has
/// shape (n_i·y)×(n_i·r·a).
pub fn random_nc_function(
    rng: &mut StdRng,
    omega: &PointSet,
    y: usize,
    ra: usize,
    max_len: usize,
) -> Result<Vec<CMatrix>> {
    let poly = random_poly(rng, omega.d(), max_len, y, ra);
    omega.points().iter().map(|z| eval_poly_point_outer(&poly, z)).collect()
}

/// (id_{n_i×n_j} ⊗ π)(P) for π(x) = I_r ⊗ x: block (u,v) equals I_r ⊗ P_uv.
pub fn ampliate(p: &CMatrix, ni: usize, nj: usize, a: usize, r: usize) -> CMatrix {
    assert_eq!(p.nrows(), ni * a);
    assert_eq!(p.ncols(), nj * a);
    let mut out = zeros(ni * r * a, nj * r * a);
    for u in 0..ni {
        for v in 0..nj {
            let blk = p.view((u * a, v * a), (a, a)).into_owned();
            out.view_mut((u * r * a, v * r * a), (r * a, r * a))
                .copy_from(&kron(&identity(r), &blk));
        }
    }
    out
}

/// A cp nc kernel from a Kolmogorov construction with a polynomial H:
/// K(Z_i, Z_j)(P) = H_i (id ⊗ π)(P) H_j*.
pub fn kolmogorov_kernel(
    rng: &mut StdRng,
    omega: &PointSet,
    spaces: CoeffSpaces,
    multiplicity: usize,
) -> Result<GradedKernel> {
    let h = random_nc_function(rng, omega, spaces.y, multiplicity * spaces.a, 2)?;
    kernel_from_h(omega, spaces, multiplicity, &h)
}

/// Materialize the kernel blocks of K(Z_i,Z_j)(P) = H_i (id⊗π)(P) H_j*.
pub fn kernel_from_h(
    omega: &PointSet,
    spaces: CoeffSpaces,
    multiplicity: usize,
    h: &[CMatrix],
) -> Result<GradedKernel> {
    let (a, _y) = (spaces.a, spaces.y);
    let n = omega.len();
    let mut blocks = Vec::with_capacity(n);
    for i in 0..n {
        let ni = omega.size(i);
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let nj = omega.size(j);
            let map = GradedKernel::map_from_fn(ni, nj, spaces, |p| {
                &h[i] * ampliate(p, ni, nj, a, multiplicity) * dagger(&h[j])
            });
            row.push(map);
        }
        blocks.push(row);
    }
    GradedKernel::new(omega.clone(), spaces, blocks)
}

/// Random linear combination over ℂ of cp kernels: a generic nc kernel that
/// respects intertwinings but has no positivity.
pub fn random_nc_kernel(rng: &mut StdRng, omega: &PointSet, spaces: CoeffSpaces) -> Result<GradedKernel> {
    let k1 = kolmogorov_kernel(rng, omega, spaces, 1)?;
    let k2 = kolmogorov_kernel(rng, omega, spaces, 2)?;
    let z1 = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5).scale(2.0);
    let z2 = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5).scale(2.0);
    Ok(k1.scale(z1).add(&k2.scale(z2))?)
}

/// Random Hermitian bimodule map built as cp₁ − cp₂, returned as kernels.
pub fn hermitian_kernel_pair(
    rng: &mut StdRng,
    omega: &PointSet,
    spaces: CoeffSpaces,
) -> Result<(GradedKernel, GradedKernel, GradedKernel)> {
    let k1 = kolmogorov_kernel(rng, omega, spaces, 1)?;
    let k2 = kolmogorov_kernel(rng, omega, spaces, 2)?;
    let diff = k1.add(&k2.scale(cr(-1.0)))?;
    Ok((diff, k1, k2))
}

/// Hermitian bimodule Choi matrix built as cp₁ − cp₂.
pub fn hermitian_bimodule_choi(rng: &mut StdRng, omega: &PointSet, spaces: CoeffSpaces) -> Result<ChoiMap> {
    let (diff, _, _) = hermitian_kernel_pair(rng, omega, spaces)?;
    encode(&diff)
}

/// cp kernel whose H vanishes on every point of Ω by Cayley–Hamilton: for
/// d = 1 the characteristic polynomial of Z⁰ kills each block, so
/// K(Z,Z)(I) = 0 up to rounding while the construction is a genuine
/// Kolmogorov kernel.
pub fn vanishing_cp_kernel(rng: &mut StdRng, omega: &PointSet, spaces: CoeffSpaces) -> Result<GradedKernel> {
    assert_eq!(omega.d(), 1, "Cayley–Hamilton trick needs d = 1");
    let n0 = omega.n0();
    // Characteristic polynomial coefficients of Z⁰ via Faddeev–LeVerrier:
    // M₁ = I, c_k = −tr(Z M_k)/k, M_{k+1} = Z M_k + c_k I.
    let z0 = omega.z0().coord(0).clone();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut mk = identity(n0);
    for k in 1..=n0 {
        let am = &z0 * &mk;
        let ck = -am.trace() / cr(k as f64);
        coeffs.push(ck);
        mk = am + identity(n0).map(|v| v * ck);
    }
    // q(x) = Σ_k coeffs[k] x^{n0−k}; q(Z_i) = 0 for every block of Z⁰.
    let r = 1usize;
    let mut terms = Vec::new();
    let base = random_matrix(rng, spaces.y, r * spaces.a);
    for (k, &co) in coeffs.iter().enumerate() {
        let word = vec![0usize; n0 - k];
        terms.push((word, base.map(|v| v * co)));
    }
    let poly = NcPoly::new(terms)?;
    let h: Vec<CMatrix> = omega
        .points()
        .iter()
        .map(|z| eval_poly_point_outer(&poly, z))
        .collect::<Result<_>>()?;
    kernel_from_h(omega, spaces, r, &h)
}

trait ScaleExt {
    fn scale(self, s: f64) -> Complex64;
}

impl ScaleExt for Complex64 {
    fn scale(self, s: f64) -> Complex64 {
        Complex64::new(self.re * s, self.im * s)
    }
}
