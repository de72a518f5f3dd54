//! Noncommutative points, finite point sets and their direct-sum point,
//! intertwiner spaces, the intertwining algebra and admissibility, plus
//! nc-polynomial evaluation for fixture construction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, identity, kron, nullspace, unvec, vec_col, zeros, CMatrix, RANK_TOL,
};

/// Span-membership residuals absorb more accumulated error than rank cuts.
pub const SPAN_TOL: f64 = 1e-8;

const INTERTWINE_TOL: f64 = 1e-10;

/// A d-tuple of n×n complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct NcPoint {
    n: usize,
    coords: Vec<CMatrix>,
}

impl NcPoint {
    pub fn new(coords: Vec<CMatrix>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch("a point needs d ≥ 1 coordinates".into()));
        }
        let n = coords[0].nrows();
        if n == 0 {
            return Err(Error::DimensionMismatch("point size must be ≥ 1".into()));
        }
        for (k, z) in coords.iter().enumerate() {
            if z.nrows() != n || z.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate {k} is {}×{}, expected {n}×{n}",
                    z.nrows(),
                    z.ncols()
                )));
            }
            if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::DimensionMismatch(format!("coordinate {k} has non-finite entries")));
            }
        }
        Ok(NcPoint { n, coords })
    }

    /// Scalar point (n = 1) from a d-tuple of complex numbers.
    pub fn scalar(values: &[Complex64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| CMatrix::from_element(1, 1, v)).collect())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[CMatrix] {
        &self.coords
    }

    pub fn coord(&self, k: usize) -> &CMatrix {
        &self.coords[k]
    }
}

/// Coordinatewise block-diagonal direct sum.
pub fn direct_sum(p: &NcPoint, q: &NcPoint) -> Result<NcPoint> {
    if p.d() != q.d() {
        return Err(Error::DimensionMismatch(format!(
            "direct sum needs matching d: {} vs {}",
            p.d(),
            q.d()
        )));
    }
    let n = p.size() + q.size();
    let coords = p
        .coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| {
            let mut m = zeros(n, n);
            m.view_mut((0, 0), (p.size(), p.size())).copy_from(a);
            m.view_mut((p.size(), p.size()), (q.size(), q.size())).copy_from(b);
            m
        })
        .collect();
    NcPoint::new(coords)
}

/// A finite list of nc points sharing d, with the derived direct-sum point.
///
/// Repeated points are allowed; duplication only enlarges the intertwining
/// algebra consistently.
#[derive(Debug, Clone)]
pub struct PointSet {
    d: usize,
    points: Vec<NcPoint>,
    z0: NcPoint,
    /// Row offset of each point's block inside the N0×N0 direct sum.
    offsets: Vec<usize>,
    n0: usize,
}

impl PointSet {
    pub fn new(points: Vec<NcPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DimensionMismatch("point set must be nonempty".into()));
        }
        let d = points[0].d();
        let mut z0 = points[0].clone();
        for p in &points[1..] {
            z0 = direct_sum(&z0, p)?;
        }
        let mut offsets = Vec::with_capacity(points.len());
        let mut acc = 0;
        for p in &points {
            offsets.push(acc);
            acc += p.size();
        }
        Ok(PointSet {
            d,
            points,
            z0,
            offsets,
            n0: acc,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &NcPoint {
        &self.points[i]
    }

    pub fn points(&self) -> &[NcPoint] {
        &self.points
    }

    /// The direct-sum point Z⁰.
    pub fn z0(&self) -> &NcPoint {
        &self.z0
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn size(&self, i: usize) -> usize {
        self.points[i].size()
    }
}

/// Orthonormal (Frobenius) basis of I(Z_i, Z_j) = {α : Z_i α = α Z_j}.
#[derive(Debug, Clone)]
pub struct IntertwinerBasis {
    pub shape: (usize, usize),
    pub basis: Vec<CMatrix>,
}

impl IntertwinerBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Joint nullspace of the stacked Sylvester operators α ↦ Z_{i,k}α − αZ_{j,k}.
pub fn intertwiner_basis(zi: &NcPoint, zj: &NcPoint) -> Result<IntertwinerBasis> {
    if zi.d() != zj.d() {
        return Err(Error::DimensionMismatch(format!(
            "intertwiner basis needs matching d: {} vs {}",
            zi.d(),
            zj.d()
        )));
    }
    let (ni, nj) = (zi.size(), zj.size());
    let d = zi.d();
    // vec(Aα − αB) = (I ⊗ A − Bᵀ ⊗ I) vec(α), stacked over coordinates.
    let mut stack = zeros(d * ni * nj, ni * nj);
    for k in 0..d {
        let op = kron(&identity(nj), zi.coord(k)) - kron(&zj.coord(k).transpose(), &identity(ni));
        stack.view_mut((k * ni * nj, 0), (ni * nj, ni * nj)).copy_from(&op);
    }
    let basis = nullspace(&stack, RANK_TOL)
        .into_iter()
        .map(|v| unvec(&v, ni, nj))
        .collect();
    Ok(IntertwinerBasis {
        shape: (ni, nj),
        basis,
    })
}

/// The algebra S of self-intertwiners of Z⁰, with the admissibility flag.
#[derive(Debug, Clone)]
pub struct IntertwiningAlgebra {
    n0: usize,
    basis: Vec<CMatrix>,
    admissible: bool,
}

impl IntertwiningAlgebra {
    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// True iff the basis is closed under adjoints (S is a C*-algebra).
    pub fn admissible(&self) -> bool {
        self.admissible
    }

    /// Distance from `m` to the span of the basis ( Frobenius).
    pub fn span_residual(&self, m: &CMatrix) -> f64 {
        let mut residual = m.clone();
        for b in &self.basis {
            let coeff: Complex64 = b.iter().zip(m.iter()).map(|(x, y)| x.conj() * y).sum();
            residual -= b.scale_complex(coeff);
        }
        residual.norm()
    }

    /// Span membership at the working tolerance, relative to ‖m‖.
    pub fn contains(&self, m: &CMatrix) -> bool {
        self.span_residual(m) <= SPAN_TOL * 1f64.max(m.norm())
    }

    /// Worst intertwining residual max_k ‖αZ⁰_k − Z⁰_kα‖_F over the basis.
    pub fn worst_intertwining_residual(&self, omega: &PointSet) -> f64 {
        let mut worst = 0.0_f64;
        for alpha in &self.basis {
            for zk in omega.z0().coords() {
                worst = worst.max((alpha * zk - zk * alpha).norm());
            }
        }
        worst
    }
}

trait ScaleComplex {
    fn scale_complex(&self, s: Complex64) -> CMatrix;
}

impl ScaleComplex for CMatrix {
    fn scale_complex(&self, s: Complex64) -> CMatrix {
        self.map(|v| v * s)
    }
}

/// Compute S = {α : αZ⁰ = Z⁰α} together with the admissibility verdict.
pub fn intertwining_algebra(omega: &PointSet) -> Result<IntertwiningAlgebra> {
    let basis = intertwiner_basis(omega.z0(), omega.z0())?.basis;
    let mut alg = IntertwiningAlgebra {
        n0: omega.n0(),
        basis,
        admissible: true,
    };
    alg.admissible = alg.basis.iter().all(|b| {
        let adj = b.adjoint();
        alg.span_residual(&adj) <= SPAN_TOL * 1f64.max(adj.norm())
    });
    debug_assert!(alg.worst_intertwining_residual(omega) <= INTERTWINE_TOL);
    Ok(alg)
}

/// A noncommutative polynomial with r×s matrix coefficients: Σ_w C_w ⊗ Z^w.
///
/// Words are given over 0-based coordinate letters; the empty word is the
/// constant term acting as C_∅ ⊗ I_n.
#[derive(Debug, Clone)]
pub struct NcPoly {
    terms: Vec<(Vec<usize>, CMatrix)>,
    rows: usize,
    cols: usize,
}

impl NcPoly {
    pub fn new(terms: Vec<(Vec<usize>, CMatrix)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::DimensionMismatch("polynomial needs at least one term".into()));
        }
        let (rows, cols) = (terms[0].1.nrows(), terms[0].1.ncols());
        for (w, cm) in &terms {
            if cm.nrows() != rows || cm.ncols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient for word {w:?} is {}×{}, expected {rows}×{cols}",
                    cm.nrows(),
                    cm.ncols()
                )));
            }
        }
        Ok(NcPoly { terms, rows, cols })
    }

    pub fn coeff_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn terms(&self) -> &[(Vec<usize>, CMatrix)] {
        &self.terms
    }
}

/// Evaluate Σ_w C_w ⊗ (Z_{w₁}···Z_{w_k}) with the coefficient factor outer,
/// so the result has shape (r·n)×(s·n).
///
/// With this placement any α with αZ = Z̃α satisfies
/// (I_r⊗α)p(Z) = p(Z̃)(I_s⊗α).
pub fn nc_poly_eval(poly: &NcPoly, z: &NcPoint) -> Result<CMatrix> {
    let n = z.size();
    let (r, s) = poly.coeff_shape();
    let mut acc = zeros(r * n, s * n);
    for (word, cm) in poly.terms() {
        let mut zw = identity(n);
        for &letter in word {
            if letter >= z.d() {
                return Err(Error::DimensionMismatch(format!(
                    "word letter {} out of range for d = {}",
                    letter + 1,
                    z.d()
                )));
            }
            zw = zw * z.coord(letter);
        }
        acc += kron(cm, &zw);
    }
    Ok(acc)
}

/// Number of index pairs (i, j) with Z_i entrywise equal to Z_j; for a set of
/// pairwise distinct points this is N.
pub fn identification_count(omega: &PointSet) -> usize {
    let n = omega.len();
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            let same = omega.point(i).size() == omega.point(j).size()
                && omega
                    .point(i)
                    .coords()
                    .iter()
                    .zip(omega.point(j).coords())
                    .all(|(a, b)| (a - b).norm() == 0.0);
            if same {
                count += 1;
            }
        }
    }
    count
}
