//! The kernel ↔ bimodule-map dictionary: assemble φ_K and its Choi matrix,
//! decode a bimodule map back to a kernel, and materialize the bimodule
//! conditions as homogeneous linear constraints on Choi matrices.
//!
//! Choi convention: C = Σ_{r,s} E_rs ⊗ φ(E_rs) with the first tensor factor
//! indexing the input space ℂ^p, so block (r,s) of C is φ(E_rs).

use crate::error::{Error, Result};
use crate::kernel::{CoeffSpaces, GradedKernel};
use crate::linalg::{
    column_space, herm_defect, identity, kron, zeros, CMatrix, RANK_TOL,
};
use crate::ncpoints::{IntertwiningAlgebra, PointSet};

/// Relative tolerance for the decode support-pattern check and the bimodule
/// predicate.
pub const BIMODULE_TOL: f64 = 1e-8;

/// A linear map ℂ^{p×p} → ℂ^{q×q} stored through its Choi matrix.
#[derive(Debug, Clone)]
pub struct ChoiMap {
    p: usize,
    q: usize,
    choi: CMatrix,
}

impl ChoiMap {
    pub fn new(p: usize, q: usize, choi: CMatrix) -> Result<Self> {
        if choi.nrows() != p * q || choi.ncols() != p * q {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix is {}×{}, expected {}×{}",
                choi.nrows(),
                choi.ncols(),
                p * q,
                p * q
            )));
        }
        Ok(ChoiMap { p, q, choi })
    }

    pub fn zero(p: usize, q: usize) -> Self {
        ChoiMap {
            p,
            q,
            choi: zeros(p * q, p * q),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// Block (r,s) of the Choi matrix, i.e. φ(E_rs).
    pub fn block(&self, r: usize, s: usize) -> CMatrix {
        self.choi.view((r * self.q, s * self.q), (self.q, self.q)).into_owned()
    }

    /// Apply the encoded map: φ(P) = Σ_rs P_rs · block(r,s).
    pub fn apply(&self, p_arg: &CMatrix) -> Result<CMatrix> {
        if p_arg.nrows() != self.p || p_arg.ncols() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "argument is {}×{}, map expects {}×{}",
                p_arg.nrows(),
                p_arg.ncols(),
                self.p,
                self.p
            )));
        }
        let mut out = zeros(self.q, self.q);
        for r in 0..self.p {
            for s in 0..self.p {
                let coeff = p_arg[(r, s)];
                if coeff.norm_sqr() != 0.0 {
                    out += self.block(r, s).map(|v| v * coeff);
                }
            }
        }
        Ok(out)
    }

    /// Hermitian defect of the Choi matrix; φ is a Hermitian map iff this
    /// vanishes.
    pub fn hermitian_defect(&self) -> f64 {
        herm_defect(&self.choi)
    }

    pub fn add(&self, other: &ChoiMap) -> Result<ChoiMap> {
        if self.p != other.p || self.q != other.q {
            return Err(Error::DimensionMismatch("Choi sum needs identical dimensions".into()));
        }
        ChoiMap::new(self.p, self.q, &self.choi + &other.choi)
    }

    pub fn scale(&self, s: f64) -> ChoiMap {
        ChoiMap {
            p: self.p,
            q: self.q,
            choi: self.choi.scale(s),
        }
    }
}

/// Input/output block offsets of Ω inside ℂ^p and ℂ^q.
pub(crate) fn in_offset(omega: &PointSet, spaces: CoeffSpaces, i: usize) -> usize {
    omega.offset(i) * spaces.a
}

pub(crate) fn out_offset(omega: &PointSet, spaces: CoeffSpaces, i: usize) -> usize {
    omega.offset(i) * spaces.y
}

/// Which point block a global input index belongs to.
fn in_block(omega: &PointSet, spaces: CoeffSpaces, r: usize) -> usize {
    let w = r / spaces.a;
    (0..omega.len())
        .rev()
        .find(|&i| omega.offset(i) <= w)
        .expect("index inside N0·a")
}

fn out_block(omega: &PointSet, spaces: CoeffSpaces, u: usize) -> usize {
    let w = u / spaces.y;
    (0..omega.len())
        .rev()
        .find(|&i| omega.offset(i) <= w)
        .expect("index inside N0·y")
}

/// Indicator of "diagonal-class" Choi coordinates: index (r,u) participates
/// in the support pattern iff the input block of r matches the output block
/// of u. encode() produces mass only on pattern × pattern positions.
pub fn support_indicator(omega: &PointSet, spaces: CoeffSpaces) -> Vec<bool> {
    let (p, q) = (omega.n0() * spaces.a, omega.n0() * spaces.y);
    let mut ind = vec![false; p * q];
    for r in 0..p {
        let bi = in_block(omega, spaces, r);
        for u in 0..q {
            ind[r * q + u] = bi == out_block(omega, spaces, u);
        }
    }
    ind
}

/// Assemble the Choi matrix of φ_K: P ↦ [K_{ij}(P_ij)].
pub fn encode(k: &GradedKernel) -> Result<ChoiMap> {
    let omega = k.omega();
    let spaces = k.spaces();
    let (a, y) = (spaces.a, spaces.y);
    let (p, q) = (omega.n0() * a, omega.n0() * y);
    let mut choi = zeros(p * q, p * q);
    for i in 0..omega.len() {
        let (ni, oi_in, oi_out) = (omega.size(i), in_offset(omega, spaces, i), out_offset(omega, spaces, i));
        for j in 0..omega.len() {
            let (nj, oj_in, oj_out) = (omega.size(j), in_offset(omega, spaces, j), out_offset(omega, spaces, j));
            let map = k.block(i, j);
            // Column (s'·n_i·a + r') of the block map is vec(K_ij(E_{r's'})).
            for rp in 0..ni * a {
                for sp in 0..nj * a {
                    let col = map.column(sp * ni * a + rp);
                    let (r, s) = (oi_in + rp, oj_in + sp);
                    for up in 0..ni * y {
                        for vp in 0..nj * y {
                            let val = col[vp * ni * y + up];
                            if val.norm_sqr() != 0.0 {
                                choi[(r * q + oi_out + up, s * q + oj_out + vp)] = val;
                            }
                        }
                    }
                }
            }
        }
    }
    ChoiMap::new(p, q, choi)
}

/// Off-pattern Frobenius mass of a Choi matrix, relative to max(1, ‖C‖_F).
pub fn off_pattern_mass(c: &ChoiMap, omega: &PointSet, spaces: CoeffSpaces) -> f64 {
    let ind = support_indicator(omega, spaces);
    let q = c.q();
    let mut mass = 0.0;
    for r in 0..c.p() {
        for u in 0..q {
            for s in 0..c.p() {
                for v in 0..q {
                    if !(ind[r * q + u] && ind[s * q + v]) {
                        mass += c.choi()[(r * q + u, s * q + v)].norm_sqr();
                    }
                }
            }
        }
    }
    mass.sqrt() / 1f64.max(c.choi().norm())
}

/// Recover the graded kernel from a Choi matrix supported on the pattern.
pub fn decode(c: &ChoiMap, omega: &PointSet, spaces: CoeffSpaces) -> Result<GradedKernel> {
    let (a, y) = (spaces.a, spaces.y);
    let (p, q) = (omega.n0() * a, omega.n0() * y);
    if c.p() != p || c.q() != q {
        return Err(Error::DimensionMismatch(format!(
            "Choi map is {}→{}, point set expects {p}→{q}",
            c.p(),
            c.q()
        )));
    }
    let mass = off_pattern_mass(c, omega, spaces);
    if mass > BIMODULE_TOL {
        return Err(Error::PatternViolation { mass });
    }
    let n = omega.len();
    let mut blocks = Vec::with_capacity(n);
    for i in 0..n {
        let (ni, oi_in, oi_out) = (omega.size(i), in_offset(omega, spaces, i), out_offset(omega, spaces, i));
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let (nj, oj_in, oj_out) = (omega.size(j), in_offset(omega, spaces, j), out_offset(omega, spaces, j));
            let mut map = zeros(ni * y * nj * y, ni * a * nj * a);
            for rp in 0..ni * a {
                for sp in 0..nj * a {
                    let (r, s) = (oi_in + rp, oj_in + sp);
                    for up in 0..ni * y {
                        for vp in 0..nj * y {
                            map[(vp * ni * y + up, sp * ni * a + rp)] =
                                c.choi()[(r * q + oi_out + up, s * q + oj_out + vp)];
                        }
                    }
                }
            }
            row.push(map);
        }
        blocks.push(row);
    }
    GradedKernel::new(omega.clone(), spaces, blocks)
}

/// The bimodule conditions recast on Choi matrices: for every basis α of S,
/// N_α C = 0 (left action) and C N_α* = 0 (right action), where
/// N_α = (α⊗I_a)ᵀ ⊗ I_q − I_p ⊗ (α⊗I_y).
#[derive(Debug, Clone)]
pub struct BimoduleConstraints {
    p: usize,
    q: usize,
    generators: Vec<CMatrix>,
}

impl BimoduleConstraints {
    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Worst relative violation max_α max(‖N_α C‖_F, ‖C N_α*‖_F) / max(1, ‖C‖_F).
    pub fn residual(&self, c: &ChoiMap) -> f64 {
        let scale = 1f64.max(c.choi().norm());
        let mut worst = 0.0_f64;
        for n_alpha in &self.generators {
            worst = worst.max((n_alpha * c.choi()).norm());
            worst = worst.max((c.choi() * n_alpha.adjoint()).norm());
        }
        worst / scale
    }

    /// The predicate holds(C) at the working tolerance.
    pub fn holds(&self, c: &ChoiMap) -> bool {
        self.residual(c) <= BIMODULE_TOL
    }

    /// Orthogonal projector onto W = ∩_α ker N_α. The bimodule maps are
    /// exactly the C with C = P_W C P_W, which is how feasibility problems
    /// impose the constraint cheaply.
    pub fn kernel_space_projector(&self) -> CMatrix {
        let dim = self.p * self.q;
        let mut basis = identity(dim);
        for n_alpha in &self.generators {
            if basis.ncols() == 0 {
                break;
            }
            let image = n_alpha * &basis;
            let ns = crate::linalg::nullspace(&image, RANK_TOL);
            if ns.is_empty() {
                basis = zeros(dim, 0);
                break;
            }
            let coeff = CMatrix::from_columns(&ns.iter().map(|v| v.column(0).into_owned()).collect::<Vec<_>>());
            basis = &basis * coeff;
        }
        if basis.ncols() == 0 {
            return zeros(dim, dim);
        }
        // Columns stay orthonormal (each step multiplies by orthonormal
        // coefficients), so P = BB*.
        let ortho = column_space(&basis, RANK_TOL);
        &ortho * ortho.adjoint()
    }
}

/// Build the constraint generators from the intertwining algebra basis.
pub fn bimodule_constraints(s: &IntertwiningAlgebra, spaces: CoeffSpaces) -> BimoduleConstraints {
    let n0 = s.n0();
    let (p, q) = (n0 * spaces.a, n0 * spaces.y);
    let generators = s
        .basis()
        .iter()
        .map(|alpha| {
            let a_in = kron(alpha, &identity(spaces.a));
            let a_out = kron(alpha, &identity(spaces.y));
            kron(&a_in.transpose(), &identity(q)) - kron(&identity(p), &a_out)
        })
        .collect();
    BimoduleConstraints { p, q, generators }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::cr;
    use crate::ncpoints::intertwining_algebra;

    #[test]
    fn zero_kernel_encodes_to_zero() {
        let mut rng = fixtures::rng_from_seed(50);
        let omega = fixtures::random_pointset(&mut rng, &[2, 1], 2);
        let k = GradedKernel::zero(omega, CoeffSpaces { a: 2, y: 1 });
        assert_eq!(encode(&k).unwrap().choi().norm(), 0.0);
    }

    #[test]
    fn scalar_kernel_choi_is_the_scalar() {
        let mut rng = fixtures::rng_from_seed(51);
        let omega = fixtures::random_pointset(&mut rng, &[1], 1);
        let spaces = CoeffSpaces { a: 1, y: 1 };
        let c_val = cr(2.5);
        let blocks = vec![vec![CMatrix::from_element(1, 1, c_val)]];
        let k = GradedKernel::new(omega, spaces, blocks).unwrap();
        let choi = encode(&k).unwrap();
        assert_eq!(choi.choi()[(0, 0)], c_val);
    }

    #[test]
    fn kolmogorov_choi_is_psd() {
        let mut rng = fixtures::rng_from_seed(52);
        let omega = fixtures::admissible_two_point_set(&mut rng);
        let k = fixtures::kolmogorov_kernel(&mut rng, &omega, CoeffSpaces { a: 2, y: 2 }, 2).unwrap();
        let choi = encode(&k).unwrap();
        let eigmin = crate::linalg::eigmin_hermitian(choi.choi()).unwrap();
        assert!(eigmin >= -1e-10 * 1f64.max(choi.choi().norm()));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let mut rng = fixtures::rng_from_seed(53);
        let omega = fixtures::random_pointset(&mut rng, &[2, 1], 2);
        let spaces = CoeffSpaces { a: 2, y: 2 };
        let k = fixtures::random_nc_kernel(&mut rng, &omega, spaces).unwrap();
        let back = decode(&encode(&k).unwrap(), &omega, spaces).unwrap();
        assert!(back.distance(&k) <= 1e-12 * 1f64.max(k.max_block_norm()));
        // And encode∘decode is the identity on the supported pattern.
        let c1 = encode(&k).unwrap();
        let c2 = encode(&back).unwrap();
        assert!((c1.choi() - c2.choi()).norm() <= 1e-12 * 1f64.max(c1.choi().norm()));
    }

    #[test]
    fn decode_rejects_cross_block_mass() {
        let mut rng = fixtures::rng_from_seed(54);
        let omega = fixtures::random_pointset(&mut rng, &[1, 1], 1);
        let spaces = CoeffSpaces { a: 1, y: 1 };
        let ind = support_indicator(&omega, spaces);
        let off = ind.iter().position(|&b| !b).unwrap();
        let mut m = zeros(4, 4);
        m[(off, off)] = cr(1.0);
        let c = ChoiMap::new(2, 2, m).unwrap();
        assert!(matches!(
            decode(&c, &omega, spaces),
            Err(Error::PatternViolation { .. })
        ));
    }

    #[test]
    fn decode_zero_gives_zero_kernel() {
        let mut rng = fixtures::rng_from_seed(55);
        let omega = fixtures::random_pointset(&mut rng, &[2, 1], 2);
        let spaces = CoeffSpaces { a: 1, y: 2 };
        let k = decode(&ChoiMap::zero(omega.n0(), omega.n0() * 2), &omega, spaces).unwrap();
        assert_eq!(k.max_block_norm(), 0.0);
    }

    #[test]
    fn choi_apply_matches_kernel_blocks() {
        let mut rng = fixtures::rng_from_seed(56);
        let omega = fixtures::random_pointset(&mut rng, &[2, 1], 2);
        let spaces = CoeffSpaces { a: 2, y: 1 };
        let k = fixtures::random_nc_kernel(&mut rng, &omega, spaces).unwrap();
        let choi = encode(&k).unwrap();
        // φ acts entrywise: φ(embed(P)) at block (i,j) equals K_ij(P).
        let p_arg = fixtures::random_matrix(&mut rng, choi.p(), choi.p());
        let full = choi.apply(&p_arg).unwrap();
        for i in 0..omega.len() {
            for j in 0..omega.len() {
                let (ni, nj) = (omega.size(i), omega.size(j));
                let sub = p_arg
                    .view((in_offset(&omega, spaces, i), in_offset(&omega, spaces, j)), (ni * spaces.a, nj * spaces.a))
                    .into_owned();
                let want = k.apply(i, j, &sub).unwrap();
                let got = full
                    .view((out_offset(&omega, spaces, i), out_offset(&omega, spaces, j)), (ni * spaces.y, nj * spaces.y))
                    .into_owned();
                assert!((want - got).norm() <= 1e-10 * 1f64.max(full.norm()));
            }
        }
    }

    #[test]
    fn bimodule_predicate_on_valid_and_random() {
        let mut rng = fixtures::rng_from_seed(57);
        let omega = fixtures::admissible_two_point_set(&mut rng);
        let spaces = CoeffSpaces { a: 1, y: 2 };
        let alg = intertwining_algebra(&omega).unwrap();
        let cons = bimodule_constraints(&alg, spaces);
        assert!(alg.dim() > 1, "need nontrivial S for this test");

        let k = fixtures::kolmogorov_kernel(&mut rng, &omega, spaces, 2).unwrap();
        let c_good = encode(&k).unwrap();
        assert!(cons.holds(&c_good), "residual {}", cons.residual(&c_good));

        let dim = omega.n0() * spaces.a * omega.n0() * spaces.y;
        let c_bad = ChoiMap::new(omega.n0() * spaces.a, omega.n0() * spaces.y, fixtures::random_matrix(&mut rng, dim, dim)).unwrap();
        assert!(!cons.holds(&c_bad));
    }

    #[test]
    fn scalar_algebra_constraints_vacuous() {
        let mut rng = fixtures::rng_from_seed(58);
        let omega = fixtures::random_pointset(&mut rng, &[2], 2);
        let alg = intertwining_algebra(&omega).unwrap();
        assert_eq!(alg.dim(), 1);
        let spaces = CoeffSpaces { a: 1, y: 1 };
        let cons = bimodule_constraints(&alg, spaces);
        // N_I = 0 so any Choi matrix satisfies the predicate.
        let c = ChoiMap::new(2, 2, fixtures::random_matrix(&mut rng, 4, 4)).unwrap();
        assert!(cons.holds(&c));
    }

    #[test]
    fn choi_recast_matches_direct_bimodule_identity() {
        // ‖φ(α·P) − L_α φ(P)‖ small ⇔ N_α C ≈ 0, checked both ways.
        let mut rng = fixtures::rng_from_seed(59);
        let omega = fixtures::admissible_two_point_set(&mut rng);
        let spaces = CoeffSpaces { a: 2, y: 1 };
        let alg = intertwining_algebra(&omega).unwrap();
        let cons = bimodule_constraints(&alg, spaces);
        let k = fixtures::kolmogorov_kernel(&mut rng, &omega, spaces, 1).unwrap();
        let c = encode(&k).unwrap();

        for alpha in alg.basis() {
            let a_in = kron(alpha, &identity(spaces.a));
            let a_out = kron(alpha, &identity(spaces.y));
            for _ in 0..3 {
                let p_arg = fixtures::random_matrix(&mut rng, c.p(), c.p());
                let lhs = c.apply(&(&a_in * &p_arg)).unwrap();
                let rhs = &a_out * c.apply(&p_arg).unwrap();
                assert!((lhs - rhs).norm() <= 1e-10 * 1f64.max(p_arg.norm()));
            }
        }

        // Conversely an exactly-bimodule map has N_α C = 0 to rounding.
        for n_alpha in cons.generators() {
            assert!((n_alpha * c.choi()).norm() <= 1e-10 * 1f64.max(c.choi().norm()));
        }
    }

    #[test]
    fn kernel_space_projector_reproduces_bimodule_maps() {
        let mut rng = fixtures::rng_from_seed(60);
        let omega = fixtures::admissible_two_point_set(&mut rng);
        let spaces = CoeffSpaces { a: 1, y: 2 };
        let alg = intertwining_algebra(&omega).unwrap();
        let cons = bimodule_constraints(&alg, spaces);
        let proj = cons.kernel_space_projector();
        // Projector fixes the Choi matrix of a valid kernel…
        let k = fixtures::kolmogorov_kernel(&mut rng, &omega, spaces, 2).unwrap();
        let c = encode(&k).unwrap();
        let fixed = &proj * c.choi() * &proj;
        assert!((fixed - c.choi()).norm() <= 1e-8 * 1f64.max(c.choi().norm()));
        // …and the sandwich of anything satisfies the constraints.
        let dim = cons.p() * cons.q();
        let raw = fixtures::random_matrix(&mut rng, dim, dim);
        let sandwiched = ChoiMap::new(cons.p(), cons.q(), &proj * raw * &proj).unwrap();
        assert!(cons.residual(&sandwiched) <= 1e-9);
    }

    #[test]
    fn dictionary_equivalence_both_directions() {
        let mut rng = fixtures::rng_from_seed(61);
        let omega = fixtures::admissible_two_point_set(&mut rng);
        let spaces = CoeffSpaces { a: 1, y: 2 };
        let alg = intertwining_algebra(&omega).unwrap();
        let cons = bimodule_constraints(&alg, spaces);
        let proj = cons.kernel_space_projector();
        let (p, q) = (cons.p(), cons.q());

        for trial in 0..20 {
            // Forward: a valid kernel satisfies the Choi constraints.
            let k = fixtures::kolmogorov_kernel(&mut rng, &omega, spaces, 1 + trial % 2).unwrap();
            assert!(k.validate_nc().unwrap().ok);
            assert!(cons.holds(&encode(&k).unwrap()));

            // Reverse: a constraint-projected random Choi decodes to a
            // kernel that passes validate_nc.
            let raw = fixtures::random_matrix(&mut rng, p * q, p * q);
            let c = ChoiMap::new(p, q, &proj * raw * &proj).unwrap();
            let k2 = decode(&c, &omega, spaces).unwrap();
            let rep = k2.validate_nc().unwrap();
            assert!(rep.ok, "trial {trial}: residual {}", rep.worst_residual);
        }
    }

    #[test]
    fn encode_columns_match_apply() {
        let mut rng = fixtures::rng_from_seed(62);
        let omega = fixtures::random_pointset(&mut rng, &[2, 1], 2);
        let spaces = CoeffSpaces { a: 1, y: 2 };
        let k = fixtures::random_nc_kernel(&mut rng, &omega, spaces).unwrap();
        let c = encode(&k).unwrap();
        // apply/choi consistency: φ(E_rs) equals block (r,s).
        for r in 0..c.p() {
            for s in 0..c.p() {
                let mut e = zeros(c.p(), c.p());
                e[(r, s)] = cr(1.0);
                let via_apply = c.apply(&e).unwrap();
                assert!((via_apply - c.block(r, s)).norm() <= 1e-12 * 1f64.max(c.choi().norm()));
            }
        }
    }
}
