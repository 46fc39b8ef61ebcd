//! Dense linear-algebra kernel: orthonormal subspace bases, nullspaces of
//! linear constraint systems, joint fixed subspaces, smallest invariant
//! extensions and the splitting of an invariant subspace into minimal
//! invariant pieces with irreducibility certificates.
//!
//! Rank decisions use a relative singular-value cutoff (`Tolerances::rank_tol`);
//! irreducibility is certified through the symmetric commutant: a piece is
//! accepted as minimal when every symmetric matrix commuting with the restricted
//! operators is scalar within `Tolerances::cert_tol`. Using the symmetric (rather
//! than full) commutant keeps irreducible pieces of complex or quaternionic type
//! in one block.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{HoloError, Result};

/// Dense square matrix acting on the ambient space.
pub type Operator = DMatrix<f64>;

/// Numerical thresholds used by the kernel.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Comparison tolerance for transport results.
    pub ode_tol: f64,
    /// Eigenvalue-separation threshold for irreducibility certificates.
    pub cert_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            ode_tol: 1e-7,
            cert_tol: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(HoloError::InvalidTolerance(format!(
                "rank_tol must lie in (0, 1), got {}",
                self.rank_tol
            )));
        }
        if !(self.ode_tol > 0.0 && self.cert_tol > 0.0) {
            return Err(HoloError::InvalidTolerance(
                "ode_tol and cert_tol must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// An orthonormal basis of a linear subspace of R^n. May be empty.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<DVector<f64>>,
}

impl SubspaceBasis {
    /// The zero subspace of R^n.
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: Vec::new(),
        }
    }

    /// All of R^n, spanned by the standard basis.
    pub fn full(ambient_dim: usize) -> Self {
        let vectors = (0..ambient_dim)
            .map(|i| DVector::from_fn(ambient_dim, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Self {
            ambient_dim,
            vectors,
        }
    }

    /// Wraps vectors that are already orthonormal; fails if the Gram matrix
    /// deviates from the identity by more than `tol`.
    pub fn from_orthonormal(
        ambient_dim: usize,
        vectors: Vec<DVector<f64>>,
        tol: f64,
    ) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(HoloError::DimensionMismatch {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
        }
        let basis = Self {
            ambient_dim,
            vectors,
        };
        let defect = basis.orthonormality_defect();
        if defect > tol {
            return Err(HoloError::ConstructionFailure(format!(
                "vectors are not orthonormal (Gram defect {defect:.3e})"
            )));
        }
        Ok(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// Basis vectors as the columns of an `ambient_dim x dim` matrix.
    pub fn as_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.ambient_dim, self.dim());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        let b = self.as_matrix();
        &b * b.transpose()
    }

    /// Component of `v` orthogonal to the subspace.
    pub fn project_off(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for b in &self.vectors {
            let c = b.dot(v);
            out.axpy(-c, b, 1.0);
        }
        out
    }

    /// Max-norm deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((u.dot(v) - target).abs());
            }
        }
        defect
    }

    /// Largest residual of the other basis off this subspace; `sin` of the
    /// largest principal angle when the two spans have equal dimension.
    pub fn residual_of(&self, other: &SubspaceBasis) -> f64 {
        other
            .vectors
            .iter()
            .map(|v| self.project_off(v).norm())
            .fold(0.0, f64::max)
    }

    /// Subspace equality through principal angles: equal dimensions and both
    /// mutual residuals below `angle_tol`.
    pub fn coincides_with(&self, other: &SubspaceBasis, angle_tol: f64) -> bool {
        self.dim() == other.dim()
            && self.residual_of(other) < angle_tol
            && other.residual_of(self) < angle_tol
    }

    /// True when every basis vector of `other` lies in this subspace.
    pub fn contains(&self, other: &SubspaceBasis, angle_tol: f64) -> bool {
        self.residual_of(other) < angle_tol
    }

    /// Orthogonal complement.
    pub fn complement(&self, tols: &Tolerances) -> SubspaceBasis {
        let rows: Vec<DVector<f64>> = self.vectors.clone();
        nullspace(&rows, self.ambient_dim, tols).expect("complement rows share ambient dimension")
    }

    /// Row-major entries, used for serialization.
    pub fn row_major(&self) -> Vec<Vec<f64>> {
        self.vectors.iter().map(|v| v.iter().cloned().collect()).collect()
    }
}

/// Orthonormal basis of the span of the input vectors. Linearly dependent
/// inputs are dropped by the relative singular-value test.
pub fn orthonormalize(vectors: &[DVector<f64>], tols: &Tolerances) -> Result<SubspaceBasis> {
    let Some(first) = vectors.first() else {
        return Err(HoloError::ConstructionFailure(
            "cannot infer ambient dimension from an empty vector list".into(),
        ));
    };
    let dim = first.len();
    orthonormalize_in(vectors, dim, tols)
}

/// As [`orthonormalize`] with an explicit ambient dimension, so an empty input
/// yields the zero subspace.
pub fn orthonormalize_in(
    vectors: &[DVector<f64>],
    ambient_dim: usize,
    tols: &Tolerances,
) -> Result<SubspaceBasis> {
    for v in vectors {
        if v.len() != ambient_dim {
            return Err(HoloError::DimensionMismatch {
                expected: ambient_dim,
                got: v.len(),
            });
        }
    }
    if vectors.is_empty() {
        return Ok(SubspaceBasis::empty(ambient_dim));
    }
    let mut m = DMatrix::zeros(ambient_dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if smax > 0.0 && s > tols.rank_tol * smax {
            basis.push(u.column(i).into_owned());
        }
    }
    Ok(SubspaceBasis {
        ambient_dim,
        vectors: basis,
    })
}

/// Orthonormal basis of `{c : <row, c> = 0 for every constraint row}` over an
/// m-dimensional coefficient space.
pub fn nullspace(
    rows: &[DVector<f64>],
    coeff_dim: usize,
    tols: &Tolerances,
) -> Result<SubspaceBasis> {
    for r in rows {
        if r.len() != coeff_dim {
            return Err(HoloError::DimensionMismatch {
                expected: coeff_dim,
                got: r.len(),
            });
        }
    }
    if rows.is_empty() || coeff_dim == 0 {
        return Ok(SubspaceBasis::full(coeff_dim));
    }
    // Pad with zero rows so the thin SVD still produces all of V^T.
    let nrows = rows.len().max(coeff_dim);
    let mut c = DMatrix::zeros(nrows, coeff_dim);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            c[(i, j)] = x;
        }
    }
    let svd = c.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for i in 0..v_t.nrows() {
        let s = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if smax == 0.0 || s <= tols.rank_tol * smax {
            basis.push(v_t.row(i).transpose());
        }
    }
    Ok(SubspaceBasis {
        ambient_dim: coeff_dim,
        vectors: basis,
    })
}

/// Orthonormal basis of `{v : A v = 0 for all A}`. An empty operator list
/// fixes the whole space.
pub fn fixed_subspace(
    operators: &[Operator],
    ambient_dim: usize,
    tols: &Tolerances,
) -> Result<SubspaceBasis> {
    let mut rows = Vec::new();
    for a in operators {
        if a.nrows() != ambient_dim || a.ncols() != ambient_dim {
            return Err(HoloError::DimensionMismatch {
                expected: ambient_dim,
                got: a.nrows(),
            });
        }
        for i in 0..ambient_dim {
            rows.push(a.row(i).transpose());
        }
    }
    nullspace(&rows, ambient_dim, tols)
}

/// Smallest subspace containing `seed` that is mapped into itself by every
/// operator, obtained by iterating operator images until the dimension is
/// stable. Closure is reached in at most `ambient_dim` enlargement rounds.
pub fn smallest_invariant_extension(
    seed: &SubspaceBasis,
    operators: &[Operator],
    tols: &Tolerances,
) -> Result<SubspaceBasis> {
    let dim = seed.ambient_dim();
    for a in operators {
        if a.nrows() != dim || a.ncols() != dim {
            return Err(HoloError::DimensionMismatch {
                expected: dim,
                got: a.nrows(),
            });
        }
    }
    let mut current = seed.clone();
    for _ in 0..=dim {
        let mut extended: Vec<DVector<f64>> = current.vectors().to_vec();
        for a in operators {
            for v in current.vectors() {
                extended.push(a * v);
            }
        }
        let next = orthonormalize_in(&extended, dim, tols)?;
        if next.dim() == current.dim() {
            return Ok(current);
        }
        current = next;
    }
    Ok(current)
}

/// One minimal invariant piece of a decomposition, together with its
/// irreducibility certificate: the largest eigenvalue spread over the
/// Frobenius-normalized symmetric commutant of the restricted operators.
#[derive(Debug, Clone)]
pub struct SplitPiece {
    pub basis: SubspaceBasis,
    pub certificate: f64,
}

/// Decomposes an invariant subspace into minimal invariant pieces.
///
/// The symmetric commutant of the restricted operators is computed as a
/// nullspace; if it is scalar the space is irreducible, otherwise the space is
/// split along the eigenvalue clusters of a random (seeded) commutant element
/// and the pieces are processed recursively. Pieces are returned sorted by
/// dimension, then lexicographically on rounded basis entries.
pub fn invariant_complement_split<R: Rng>(
    space: &SubspaceBasis,
    operators: &[Operator],
    tols: &Tolerances,
    rng: &mut R,
) -> Result<Vec<SplitPiece>> {
    let dim = space.ambient_dim();
    for (index, a) in operators.iter().enumerate() {
        if a.nrows() != dim || a.ncols() != dim {
            return Err(HoloError::DimensionMismatch {
                expected: dim,
                got: a.nrows(),
            });
        }
        let scale = a.norm().max(1.0);
        let mut residual: f64 = 0.0;
        for v in space.vectors() {
            residual = residual.max(space.project_off(&(a * v)).norm());
        }
        if residual > 1e3 * tols.rank_tol * scale {
            return Err(HoloError::NotInvariant { index, residual });
        }
    }
    let mut pieces = Vec::new();
    split_recursive(space, operators, tols, rng, &mut pieces)?;
    pieces.sort_by(|a, b| {
        a.basis
            .dim()
            .cmp(&b.basis.dim())
            .then_with(|| compare_rounded(&a.basis, &b.basis))
    });
    Ok(pieces)
}

fn split_recursive<R: Rng>(
    space: &SubspaceBasis,
    operators: &[Operator],
    tols: &Tolerances,
    rng: &mut R,
    out: &mut Vec<SplitPiece>,
) -> Result<()> {
    let s = space.dim();
    if s == 0 {
        return Ok(());
    }
    if s == 1 {
        out.push(SplitPiece {
            basis: space.clone(),
            certificate: 0.0,
        });
        return Ok(());
    }

    let commutant = symmetric_commutant(space, operators, tols)?;
    // A random combination of commutant elements; its eigenvalue clusters are
    // the candidate invariant pieces. The identity is always in the commutant,
    // so a scalar random element certifies irreducibility.
    let mut combo = DMatrix::zeros(s, s);
    for c in &commutant {
        let weight: f64 = rng.random_range(-1.0..1.0);
        combo += c * weight;
    }
    let norm = combo.norm();
    if norm > 0.0 {
        combo /= norm;
    }
    combo = (&combo + combo.transpose()) * 0.5;

    let eig = nalgebra::SymmetricEigen::new(combo);
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let spread = eig.eigenvalues[order[s - 1]] - eig.eigenvalues[order[0]];
    if spread < tols.cert_tol || commutant.len() == 1 {
        out.push(SplitPiece {
            basis: space.clone(),
            certificate: spread.abs(),
        });
        return Ok(());
    }

    // Cluster the sorted eigenvalues at gaps above the certificate threshold.
    let b = space.as_matrix();
    let mut cluster: Vec<usize> = vec![order[0]];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for w in order.windows(2) {
        let gap = eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]];
        if gap > tols.cert_tol {
            clusters.push(std::mem::take(&mut cluster));
        }
        cluster.push(w[1]);
    }
    clusters.push(cluster);
    if clusters.len() == 1 {
        // Spread above threshold but no usable gap; split at the median gap.
        out.push(SplitPiece {
            basis: space.clone(),
            certificate: spread.abs(),
        });
        return Ok(());
    }
    for indices in clusters {
        let vectors: Vec<DVector<f64>> = indices
            .iter()
            .map(|&i| &b * eig.eigenvectors.column(i).into_owned())
            .collect();
        let sub = orthonormalize_in(&vectors, space.ambient_dim(), tols)?;
        split_recursive(&sub, operators, tols, rng, out)?;
    }
    Ok(())
}

/// Basis of the symmetric matrices commuting with every operator restricted to
/// `space`, expressed in the coordinates of the given basis.
fn symmetric_commutant(
    space: &SubspaceBasis,
    operators: &[Operator],
    tols: &Tolerances,
) -> Result<Vec<DMatrix<f64>>> {
    let s = space.dim();
    let b = space.as_matrix();
    let restricted: Vec<DMatrix<f64>> = operators.iter().map(|a| b.transpose() * a * &b).collect();
    let sym_basis = symmetric_coordinate_basis(s);
    let mut rows: Vec<DVector<f64>> = Vec::new();
    // Row block per operator: vec([S, M]) as a linear function of the
    // symmetric coordinates of S.
    for m in &restricted {
        let mut block = DMatrix::zeros(s * s, sym_basis.len());
        for (k, e) in sym_basis.iter().enumerate() {
            let c = e * m - m * e;
            for (idx, &x) in c.iter().enumerate() {
                block[(idx, k)] = x;
            }
        }
        for i in 0..s * s {
            rows.push(block.row(i).transpose());
        }
    }
    let null = nullspace(&rows, sym_basis.len(), tols)?;
    Ok(null
        .vectors()
        .iter()
        .map(|c| {
            let mut m = DMatrix::zeros(s, s);
            for (k, e) in sym_basis.iter().enumerate() {
                m += e * c[k];
            }
            m
        })
        .collect())
}

/// Orthonormal (Frobenius) basis of the symmetric s x s matrices.
fn symmetric_coordinate_basis(s: usize) -> Vec<DMatrix<f64>> {
    let mut basis = Vec::with_capacity(s * (s + 1) / 2);
    for i in 0..s {
        for j in i..s {
            let mut e = DMatrix::zeros(s, s);
            if i == j {
                e[(i, i)] = 1.0;
            } else {
                let v = 1.0 / f64::sqrt(2.0);
                e[(i, j)] = v;
                e[(j, i)] = v;
            }
            basis.push(e);
        }
    }
    basis
}

fn compare_rounded(a: &SubspaceBasis, b: &SubspaceBasis) -> std::cmp::Ordering {
    let key = |basis: &SubspaceBasis| -> Vec<i64> {
        basis
            .vectors()
            .iter()
            .flat_map(|v| v.iter().map(|x| (x * 1e9).round() as i64))
            .collect()
    };
    key(a).cmp(&key(b))
}

/// Haar-style random m-frame in R^d: Gaussian entries, then orthonormalized.
pub fn random_frame<R: Rng>(
    rng: &mut R,
    ambient_dim: usize,
    m: usize,
    tols: &Tolerances,
) -> SubspaceBasis {
    use rand_distr::StandardNormal;
    loop {
        let vectors: Vec<DVector<f64>> = (0..m)
            .map(|_| DVector::from_fn(ambient_dim, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let basis = orthonormalize_in(&vectors, ambient_dim, tols)
            .expect("gaussian vectors share the ambient dimension");
        if basis.dim() == m {
            return basis;
        }
    }
}

/// Random unit vector in R^d.
pub fn random_unit<R: Rng>(rng: &mut R, ambient_dim: usize) -> DVector<f64> {
    use rand_distr::StandardNormal;
    loop {
        let v = DVector::from_fn(ambient_dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(dim: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(dim, |j, _| if j == i { 1.0 } else { 0.0 })
    }

    fn rotation_generator(dim: usize, i: usize, j: usize) -> Operator {
        let mut a = DMatrix::zeros(dim, dim);
        a[(j, i)] = 1.0;
        a[(i, j)] = -1.0;
        a
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_pair() {
        let tols = Tolerances::default();
        let basis = orthonormalize(&[e(3, 0), e(3, 1)], &tols).unwrap();
        assert_eq!(basis.dim(), 2);
        let plane = SubspaceBasis::from_orthonormal(3, vec![e(3, 0), e(3, 1)], 1e-12).unwrap();
        assert!(basis.coincides_with(&plane, 1e-12));
    }

    #[test]
    fn orthonormalize_drops_dependent_vector() {
        let tols = Tolerances::default();
        let basis = orthonormalize(&[e(3, 0), 2.0 * e(3, 0)], &tols).unwrap();
        assert_eq!(basis.dim(), 1);
        assert_relative_eq!(basis.vectors()[0][0].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn orthonormalize_rejects_mixed_dimensions() {
        let tols = Tolerances::default();
        assert!(orthonormalize(&[e(3, 0), e(4, 0)], &tols).is_err());
    }

    #[test]
    fn small_circle_initial_vectors_are_orthogonal() {
        // X0 and Y0 of the 6-sphere loop at r = 0.6; their span is a plane.
        let r: f64 = 0.6;
        let s = (1.0 - r * r).sqrt();
        let x0 = DVector::from_vec(vec![0.0, r, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let y0 = DVector::from_vec(vec![0.0, 0.0, r * r, 0.0, 0.0, -r * s, 0.0]);
        assert_relative_eq!(x0.dot(&y0), 0.0, epsilon = 1e-15);
        let tols = Tolerances::default();
        let basis = orthonormalize(&[x0, y0], &tols).unwrap();
        assert_eq!(basis.dim(), 2);
    }

    #[test]
    fn nullspace_of_zero_constraints_is_full() {
        let tols = Tolerances::default();
        let basis = nullspace(&[DVector::zeros(4), DVector::zeros(4)], 4, &tols).unwrap();
        assert_eq!(basis.dim(), 4);
        let empty: Vec<DVector<f64>> = Vec::new();
        assert_eq!(nullspace(&empty, 4, &tols).unwrap().dim(), 4);
    }

    #[test]
    fn nullspace_of_two_coordinate_rows() {
        let tols = Tolerances::default();
        let basis = nullspace(&[e(3, 0), e(3, 1)], 3, &tols).unwrap();
        assert_eq!(basis.dim(), 1);
        assert_relative_eq!(basis.vectors()[0][2].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn commuting_with_complex_structure_cuts_so4_to_u2() {
        // Antisymmetric 4x4 matrices with [A, I] = 0 form a 4-dimensional
        // space; the constraint rows live over the 6 antisymmetric coordinates.
        let tols = Tolerances::default();
        let i_mat = {
            let mut m = DMatrix::zeros(4, 4);
            m[(1, 0)] = 1.0;
            m[(0, 1)] = -1.0;
            m[(3, 2)] = 1.0;
            m[(2, 3)] = -1.0;
            m
        };
        let pairs: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
            .collect();
        let mut rows = vec![DVector::zeros(pairs.len()); 16];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let a = rotation_generator(4, i, j);
            let c = &a * &i_mat - &i_mat * &a;
            for (idx, &x) in c.iter().enumerate() {
                rows[idx][k] = x;
            }
        }
        let basis = nullspace(&rows, pairs.len(), &tols).unwrap();
        assert_eq!(basis.dim(), 4);
    }

    #[test]
    fn fixed_subspace_of_empty_list_is_everything() {
        let tols = Tolerances::default();
        assert_eq!(fixed_subspace(&[], 3, &tols).unwrap().dim(), 3);
    }

    #[test]
    fn fixed_subspace_of_plane_rotation() {
        let tols = Tolerances::default();
        let basis = fixed_subspace(&[rotation_generator(3, 0, 1)], 3, &tols).unwrap();
        assert_eq!(basis.dim(), 1);
        assert_relative_eq!(basis.vectors()[0][2].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn fixed_subspace_is_maximal() {
        let tols = Tolerances::default();
        let ops = vec![rotation_generator(4, 0, 1)];
        let fixed = fixed_subspace(&ops, 4, &tols).unwrap();
        assert_eq!(fixed.dim(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let candidate = fixed.project_off(&random_unit(&mut rng, 4));
            if candidate.norm() < 1e-6 {
                continue;
            }
            let unit = candidate.normalize();
            let worst = ops.iter().map(|a| (a * &unit).norm()).fold(0.0, f64::max);
            assert!(worst > 1e-8, "appending a complement vector must break the kernel test");
        }
    }

    #[test]
    fn invariant_extension_fixed_point() {
        let tols = Tolerances::default();
        let op = rotation_generator(3, 0, 1);
        let seed = SubspaceBasis::from_orthonormal(3, vec![e(3, 2)], 1e-12).unwrap();
        let ext = smallest_invariant_extension(&seed, &[op], &tols).unwrap();
        assert_eq!(ext.dim(), 1);
    }

    #[test]
    fn invariant_extension_grows_to_rotation_plane() {
        let tols = Tolerances::default();
        let op = rotation_generator(3, 0, 1);
        let seed = SubspaceBasis::from_orthonormal(3, vec![e(3, 0)], 1e-12).unwrap();
        let ext = smallest_invariant_extension(&seed, &[op], &tols).unwrap();
        assert_eq!(ext.dim(), 2);
        assert!(ext.contains(&seed, 1e-10));
        let plane = SubspaceBasis::from_orthonormal(3, vec![e(3, 0), e(3, 1)], 1e-12).unwrap();
        assert!(ext.coincides_with(&plane, 1e-10));
    }

    #[test]
    fn invariant_extension_of_line_under_full_rotation_algebra() {
        // Every line generates the whole space under so(n).
        let tols = Tolerances::default();
        let ops: Vec<Operator> = (0..4)
            .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
            .map(|(i, j)| rotation_generator(4, i, j))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let seed_vec = random_unit(&mut rng, 4);
        let seed = SubspaceBasis::from_orthonormal(4, vec![seed_vec], 1e-9).unwrap();
        let ext = smallest_invariant_extension(&seed, &ops, &tols).unwrap();
        assert_eq!(ext.dim(), 4);
    }

    #[test]
    fn split_with_no_operators_gives_lines() {
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let space = SubspaceBasis::full(2);
        let pieces = invariant_complement_split(&space, &[], &tols, &mut rng).unwrap();
        let dims: Vec<usize> = pieces.iter().map(|p| p.basis.dim()).collect();
        assert_eq!(dims, vec![1, 1]);
    }

    #[test]
    fn split_rejects_non_invariant_space() {
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let space = SubspaceBasis::from_orthonormal(3, vec![e(3, 0)], 1e-12).unwrap();
        let res = invariant_complement_split(&space, &[rotation_generator(3, 0, 1)], &tols, &mut rng);
        assert!(matches!(res, Err(HoloError::NotInvariant { .. })));
    }

    #[test]
    fn split_certifies_rotation_plane_irreducible() {
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = SubspaceBasis::full(2);
        let pieces =
            invariant_complement_split(&space, &[rotation_generator(2, 0, 1)], &tols, &mut rng)
                .unwrap();
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].certificate < tols.cert_tol);
    }

    #[test]
    fn split_separates_block_rotations() {
        // Two plane rotations with different speeds on R^4.
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = DMatrix::zeros(4, 4);
        a[(1, 0)] = 1.0;
        a[(0, 1)] = -1.0;
        a[(3, 2)] = 2.0;
        a[(2, 3)] = -2.0;
        let pieces = invariant_complement_split(&SubspaceBasis::full(4), &[a], &tols, &mut rng).unwrap();
        let dims: Vec<usize> = pieces.iter().map(|p| p.basis.dim()).collect();
        assert_eq!(dims, vec![2, 2]);
        for p in &pieces {
            assert!(p.certificate < tols.cert_tol);
        }
    }

    #[test]
    fn split_dimension_multiset_reproducible() {
        let tols = Tolerances::default();
        let run = |seed: u64| -> Vec<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pieces =
                invariant_complement_split(&SubspaceBasis::full(3), &[], &tols, &mut rng).unwrap();
            pieces.iter().map(|p| p.basis.dim()).collect()
        };
        assert_eq!(run(42), run(42));
    }
}
