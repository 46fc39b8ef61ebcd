//! Invariant structures of the nine transitive sphere groups and the
//! membership predicate characterizing each group inside `SO(n)`.
//!
//! Conventions. `C^n ~ R^{2n}` interleaves real and imaginary parts
//! (`z_j = x_{2j-1} + i x_{2j}`); `H^n ~ R^{4n}` interleaves quaternion
//! coordinates (`q_j = x_{4j-3} + i x_{4j-2} + j x_{4j-1} + k x_{4j}`).
//! On `H^n` the operators `I`, `J`, `K` are right multiplication by `-i`,
//! `-j`, `-k`, which makes them block-diagonal with 4x4 integer blocks and
//! commutes them with every quaternion-linear map. The nine `Spin(9)`
//! generators on `R^16` are built from the three anticommuting real 2x2
//! templates (the two symmetric involutions and the rotation by pi/2)
//! tensored four deep.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{HoloError, Result};
use crate::linalg::Operator;

/// The nine families of connected Lie groups acting transitively and
/// effectively on a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupFamily {
    SO,
    U,
    SU,
    Sp,
    SpU1,
    SpSp1,
    G2,
    Spin7,
    Spin9,
}

impl GroupFamily {
    pub const ALL: [GroupFamily; 9] = [
        GroupFamily::SO,
        GroupFamily::U,
        GroupFamily::SU,
        GroupFamily::Sp,
        GroupFamily::SpU1,
        GroupFamily::SpSp1,
        GroupFamily::G2,
        GroupFamily::Spin7,
        GroupFamily::Spin9,
    ];

    /// Lowercase CLI token.
    pub fn token(&self) -> &'static str {
        match self {
            GroupFamily::SO => "so",
            GroupFamily::U => "u",
            GroupFamily::SU => "su",
            GroupFamily::Sp => "sp",
            GroupFamily::SpU1 => "spu1",
            GroupFamily::SpSp1 => "spsp1",
            GroupFamily::G2 => "g2",
            GroupFamily::Spin7 => "spin7",
            GroupFamily::Spin9 => "spin9",
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        GroupFamily::ALL
            .iter()
            .copied()
            .find(|f| f.token() == token)
            .ok_or_else(|| HoloError::InvalidGroup(format!("unknown group token '{token}'")))
    }

    /// True for the families whose parameter `n` is fixed by the family.
    pub fn is_exceptional(&self) -> bool {
        matches!(self, GroupFamily::G2 | GroupFamily::Spin7 | GroupFamily::Spin9)
    }

    fn min_n(&self) -> usize {
        match self {
            GroupFamily::SO | GroupFamily::Sp => 1,
            GroupFamily::U | GroupFamily::SpU1 | GroupFamily::SpSp1 => 2,
            GroupFamily::SU => 3,
            _ => 0,
        }
    }
}

impl std::fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            GroupFamily::SO => "SO",
            GroupFamily::U => "U",
            GroupFamily::SU => "SU",
            GroupFamily::Sp => "Sp",
            GroupFamily::SpU1 => "Sp(n)U(1)",
            GroupFamily::SpSp1 => "Sp(n)Sp(1)",
            GroupFamily::G2 => "G2",
            GroupFamily::Spin7 => "Spin(7)",
            GroupFamily::Spin9 => "Spin(9)",
        };
        write!(f, "{name}")
    }
}

/// One concrete group instance: a family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    pub family: GroupFamily,
    /// Parameter of the classical families; 0 for G2 / Spin(7) / Spin(9).
    pub n: usize,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, n: usize) -> Result<Self> {
        if family.is_exceptional() {
            return Ok(Self { family, n: 0 });
        }
        if n < family.min_n() {
            return Err(HoloError::InvalidGroup(format!(
                "{family} requires n >= {}, got n = {n}",
                family.min_n()
            )));
        }
        Ok(Self { family, n })
    }

    pub fn so(n: usize) -> Self {
        Self::new(GroupFamily::SO, n).unwrap()
    }
    pub fn u(n: usize) -> Self {
        Self::new(GroupFamily::U, n).unwrap()
    }
    pub fn su(n: usize) -> Self {
        Self::new(GroupFamily::SU, n).unwrap()
    }
    pub fn sp(n: usize) -> Self {
        Self::new(GroupFamily::Sp, n).unwrap()
    }
    pub fn sp_u1(n: usize) -> Self {
        Self::new(GroupFamily::SpU1, n).unwrap()
    }
    pub fn sp_sp1(n: usize) -> Self {
        Self::new(GroupFamily::SpSp1, n).unwrap()
    }
    pub fn g2() -> Self {
        Self::new(GroupFamily::G2, 0).unwrap()
    }
    pub fn spin7() -> Self {
        Self::new(GroupFamily::Spin7, 0).unwrap()
    }
    pub fn spin9() -> Self {
        Self::new(GroupFamily::Spin9, 0).unwrap()
    }

    /// Dimension of the standard real representation.
    pub fn ambient_dim(&self) -> usize {
        match self.family {
            GroupFamily::SO => self.n,
            GroupFamily::U | GroupFamily::SU => 2 * self.n,
            GroupFamily::Sp | GroupFamily::SpU1 | GroupFamily::SpSp1 => 4 * self.n,
            GroupFamily::G2 => 7,
            GroupFamily::Spin7 => 8,
            GroupFamily::Spin9 => 16,
        }
    }

    /// Classical Lie algebra dimension of the group.
    pub fn algebra_dim(&self) -> usize {
        let n = self.n;
        match self.family {
            GroupFamily::SO => n * (n - 1) / 2,
            GroupFamily::U => n * n,
            GroupFamily::SU => n * n - 1,
            GroupFamily::Sp => n * (2 * n + 1),
            GroupFamily::SpU1 => n * (2 * n + 1) + 1,
            GroupFamily::SpSp1 => n * (2 * n + 1) + 3,
            GroupFamily::G2 => 14,
            GroupFamily::Spin7 => 21,
            GroupFamily::Spin9 => 36,
        }
    }
}

impl std::fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            GroupFamily::SO => write!(f, "SO({})", self.n),
            GroupFamily::U => write!(f, "U({})", self.n),
            GroupFamily::SU => write!(f, "SU({})", self.n),
            GroupFamily::Sp => write!(f, "Sp({})", self.n),
            GroupFamily::SpU1 => write!(f, "Sp({})U(1)", self.n),
            GroupFamily::SpSp1 => write!(f, "Sp({})Sp(1)", self.n),
            GroupFamily::G2 => write!(f, "G2"),
            GroupFamily::Spin7 => write!(f, "Spin(7)"),
            GroupFamily::Spin9 => write!(f, "Spin(9)"),
        }
    }
}

/// A k-form on R^n stored as signed coefficients on strictly increasing index
/// tuples.
#[derive(Debug, Clone)]
pub struct AlternatingForm {
    pub ambient_dim: usize,
    pub degree: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl AlternatingForm {
    pub fn new(ambient_dim: usize, degree: usize, mut terms: Vec<(Vec<usize>, f64)>) -> Self {
        for (idx, _) in &terms {
            assert_eq!(idx.len(), degree, "index tuple length must equal the degree");
            assert!(
                idx.windows(2).all(|w| w[0] < w[1]),
                "index tuples must be strictly increasing"
            );
            assert!(idx.iter().all(|&i| i < ambient_dim));
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Self {
            ambient_dim,
            degree,
            terms,
        }
    }

    pub fn terms(&self) -> &[(Vec<usize>, f64)] {
        &self.terms
    }

    /// Full alternating evaluation on `degree` vectors: each coefficient
    /// weighs the corresponding minor determinant.
    pub fn evaluate(&self, vectors: &[&DVector<f64>]) -> f64 {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        let k = self.degree;
        let mut total = 0.0;
        let mut minor = DMatrix::zeros(k, k);
        for (idx, coeff) in &self.terms {
            for (row, &i) in idx.iter().enumerate() {
                for (col, v) in vectors.iter().enumerate() {
                    minor[(row, col)] = v[i];
                }
            }
            total += coeff * minor.clone().determinant();
        }
        total
    }

    /// Coefficient on a strictly increasing basis tuple (0 when absent).
    pub fn coefficient(&self, idx: &[usize]) -> f64 {
        self.terms
            .iter()
            .find(|(t, _)| t.as_slice() == idx)
            .map(|(_, c)| *c)
            .unwrap_or(0.0)
    }

    /// Largest deviation of `g`-pullback coefficients from the original ones,
    /// over all strictly increasing basis tuples.
    pub fn pullback_residual(&self, g: &Operator) -> f64 {
        let cols: Vec<DVector<f64>> = (0..self.ambient_dim)
            .map(|j| g.column(j).into_owned())
            .collect();
        let mut worst: f64 = 0.0;
        let mut tuple: Vec<usize> = (0..self.degree).collect();
        loop {
            let args: Vec<&DVector<f64>> = tuple.iter().map(|&i| &cols[i]).collect();
            let transformed = self.evaluate(&args);
            worst = worst.max((transformed - self.coefficient(&tuple)).abs());
            if !next_increasing(&mut tuple, self.ambient_dim) {
                break;
            }
        }
        worst
    }

    /// Derivation action of an antisymmetric operator:
    /// `(A . w)(v_1, ..., v_k) = -sum_i w(v_1, ..., A v_i, ..., v_k)`,
    /// the infinitesimal version of the pullback by `exp(-tA)`.
    pub fn derivation(&self, a: &Operator) -> AlternatingForm {
        let n = self.ambient_dim;
        let mut tuple: Vec<usize> = (0..self.degree).collect();
        let basis: Vec<DVector<f64>> = (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        let mut terms = Vec::new();
        loop {
            let mut value = 0.0;
            for slot in 0..self.degree {
                let mut args: Vec<&DVector<f64>> =
                    tuple.iter().map(|&i| &basis[i]).collect();
                let moved = a * &basis[tuple[slot]];
                args[slot] = &moved;
                value -= self.evaluate(&args);
            }
            if value.abs() > 0.0 {
                terms.push((tuple.clone(), value));
            }
            if !next_increasing(&mut tuple, n) {
                break;
            }
        }
        AlternatingForm::new(n, self.degree, terms)
    }
}

/// Advances a strictly increasing tuple to its successor; false at the end.
pub(crate) fn next_increasing(tuple: &mut [usize], n: usize) -> bool {
    let k = tuple.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if tuple[i] < n - (k - i) {
            tuple[i] += 1;
            for j in i + 1..k {
                tuple[j] = tuple[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All strictly increasing tuples of the given length.
pub(crate) fn increasing_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut tuple: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    loop {
        out.push(tuple.clone());
        if !next_increasing(&mut tuple, n) {
            break;
        }
    }
    out
}

/// Defining invariant data of one group: named operator matrices and/or named
/// alternating forms. Empty for `SO(n)`.
#[derive(Debug, Clone)]
pub struct StructurePack {
    pub spec: GroupSpec,
    pub operators: Vec<(String, Operator)>,
    pub forms: Vec<(String, AlternatingForm)>,
}

/// One structure relation with its numerical residual (exact zero for the
/// integer-matrix relations).
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub kind: RelationKind,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Square,
    Symmetry,
    Antisymmetry,
    Anticommutator,
    Product,
    FormTable,
    SpanRank,
}

impl StructurePack {
    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }

    pub fn form(&self, name: &str) -> Option<&AlternatingForm> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Structure operators whose span characterizes the group, when there is
    /// one: `{I}` for U/SU, `{I,J,K}` for the quaternionic families,
    /// `{I_1..I_9}` for Spin(9).
    pub fn span_operators(&self) -> Vec<&Operator> {
        self.operators.iter().map(|(_, m)| m).collect()
    }

    /// Verifies every defining relation of the family and returns one entry
    /// per relation.
    pub fn relation_checks(&self) -> Vec<RelationCheck> {
        let mut checks = Vec::new();
        let d = self.spec.ambient_dim();
        let id = DMatrix::<f64>::identity(d, d);
        match self.spec.family {
            GroupFamily::SO => {}
            GroupFamily::U | GroupFamily::SU => {
                let i = self.operator("I").expect("complex structure present");
                checks.push(RelationCheck {
                    name: "I^2 + Id".into(),
                    kind: RelationKind::Square,
                    residual: (i * i + &id).norm(),
                });
                checks.push(RelationCheck {
                    name: "I antisymmetric".into(),
                    kind: RelationKind::Antisymmetry,
                    residual: (i + i.transpose()).norm(),
                });
            }
            GroupFamily::Sp | GroupFamily::SpU1 | GroupFamily::SpSp1 => {
                let i = self.operator("I").unwrap();
                let j = self.operator("J").unwrap();
                let k = self.operator("K").unwrap();
                for (name, m) in [("I", i), ("J", j), ("K", k)] {
                    checks.push(RelationCheck {
                        name: format!("{name}^2 + Id"),
                        kind: RelationKind::Square,
                        residual: (m * m + &id).norm(),
                    });
                    checks.push(RelationCheck {
                        name: format!("{name} antisymmetric"),
                        kind: RelationKind::Antisymmetry,
                        residual: (m + m.transpose()).norm(),
                    });
                }
                for (name, left, right, expect) in
                    [("IJ - K", i, j, k), ("JK - I", j, k, i), ("KI - J", k, i, j)]
                {
                    checks.push(RelationCheck {
                        name: name.into(),
                        kind: RelationKind::Product,
                        residual: (left * right - expect).norm(),
                    });
                }
            }
            GroupFamily::G2 => {
                let phi = self.form("phi").unwrap();
                checks.push(form_table_check("phi coefficient table", phi));
            }
            GroupFamily::Spin7 => {
                let theta = self.form("theta").unwrap();
                checks.push(form_table_check("theta coefficient table", theta));
            }
            GroupFamily::Spin9 => {
                let gens: Vec<&Operator> = self.operators.iter().map(|(_, m)| m).collect();
                for (a, m) in gens.iter().enumerate() {
                    checks.push(RelationCheck {
                        name: format!("I{}^2 - Id", a + 1),
                        kind: RelationKind::Square,
                        residual: (*m * *m - &id).norm(),
                    });
                    checks.push(RelationCheck {
                        name: format!("I{} symmetric", a + 1),
                        kind: RelationKind::Symmetry,
                        residual: (*m - m.transpose()).norm(),
                    });
                }
                for a in 0..9 {
                    for b in (a + 1)..9 {
                        checks.push(RelationCheck {
                            name: format!("I{} I{} + I{} I{}", a + 1, b + 1, b + 1, a + 1),
                            kind: RelationKind::Anticommutator,
                            residual: (gens[a] * gens[b] + gens[b] * gens[a]).norm(),
                        });
                    }
                }
                // The nine generators must span a 9-dimensional space.
                let mut gram = DMatrix::zeros(9, 9);
                for a in 0..9 {
                    for b in 0..9 {
                        gram[(a, b)] = frobenius_dot(gens[a], gens[b]);
                    }
                }
                let rank_defect = if gram.determinant().abs() > 1.0 { 0.0 } else { 1.0 };
                checks.push(RelationCheck {
                    name: "span{I1..I9} has dimension 9".into(),
                    kind: RelationKind::SpanRank,
                    residual: rank_defect,
                });
            }
        }
        checks
    }
}

fn form_table_check(name: &str, form: &AlternatingForm) -> RelationCheck {
    let n = form.ambient_dim;
    let basis: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect();
    let mut worst: f64 = 0.0;
    for tuple in increasing_tuples(form.degree, n) {
        let args: Vec<&DVector<f64>> = tuple.iter().map(|&i| &basis[i]).collect();
        worst = worst.max((form.evaluate(&args) - form.coefficient(&tuple)).abs());
    }
    RelationCheck {
        name: name.into(),
        kind: RelationKind::FormTable,
        residual: worst,
    }
}

pub(crate) fn frobenius_dot(a: &Operator, b: &Operator) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Quaternion arithmetic (interleaved coordinates).
// ---------------------------------------------------------------------------

/// Quaternion as (re, i, j, k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quat(pub [f64; 4]);

impl Quat {
    pub const ONE: Quat = Quat([1.0, 0.0, 0.0, 0.0]);

    pub fn conj(self) -> Quat {
        let [a, b, c, d] = self.0;
        Quat([a, -b, -c, -d])
    }

    pub fn mul(self, other: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = other.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    pub fn scale(self, s: f64) -> Quat {
        Quat([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn add(self, other: Quat) -> Quat {
        Quat([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
            self.0[3] + other.0[3],
        ])
    }

    pub fn sub(self, other: Quat) -> Quat {
        self.add(other.scale(-1.0))
    }

    pub fn norm_sq(self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

/// 4x4 matrix of left multiplication q -> pq.
pub(crate) fn left_mult_block(p: Quat) -> DMatrix<f64> {
    let [a, b, c, d] = p.0;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            a, -b, -c, -d, //
            b, a, -d, c, //
            c, d, a, -b, //
            d, -c, b, a,
        ],
    )
}

/// 4x4 matrix of right multiplication q -> qp.
pub(crate) fn right_mult_block(p: Quat) -> DMatrix<f64> {
    let [a, b, c, d] = p.0;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            a, -b, -c, -d, //
            b, a, d, -c, //
            c, -d, a, b, //
            d, c, -b, a,
        ],
    )
}

/// Reads `R^{4n}` coordinates as a quaternion vector.
pub(crate) fn to_quat_vector(v: &DVector<f64>) -> Vec<Quat> {
    assert_eq!(v.len() % 4, 0);
    (0..v.len() / 4)
        .map(|s| Quat([v[4 * s], v[4 * s + 1], v[4 * s + 2], v[4 * s + 3]]))
        .collect()
}

/// Real `4n x 4n` matrix of the quaternion-linear map given by left matrix
/// multiplication with entries `m[(row, col)]`.
pub(crate) fn quat_matrix_to_real(m: &[Vec<Quat>]) -> DMatrix<f64> {
    let n = m.len();
    let mut out = DMatrix::zeros(4 * n, 4 * n);
    for (row, row_entries) in m.iter().enumerate() {
        for (col, &q) in row_entries.iter().enumerate() {
            let block = left_mult_block(q);
            for a in 0..4 {
                for b in 0..4 {
                    out[(4 * row + a, 4 * col + b)] = block[(a, b)];
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Structure constructors.
// ---------------------------------------------------------------------------

/// Multiplication by `i` on `C^n ~ R^{2n}`.
pub fn complex_structure(n: usize) -> Operator {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for s in 0..n {
        m[(2 * s + 1, 2 * s)] = 1.0;
        m[(2 * s, 2 * s + 1)] = -1.0;
    }
    m
}

/// Right multiplication by `-i`, `-j`, `-k` on `H^n ~ R^{4n}`.
pub fn quaternion_structures(n: usize) -> (Operator, Operator, Operator) {
    let blocks = [
        right_mult_block(Quat([0.0, -1.0, 0.0, 0.0])),
        right_mult_block(Quat([0.0, 0.0, -1.0, 0.0])),
        right_mult_block(Quat([0.0, 0.0, 0.0, -1.0])),
    ];
    let mut out = Vec::new();
    for block in &blocks {
        let mut m = DMatrix::zeros(4 * n, 4 * n);
        for s in 0..n {
            for a in 0..4 {
                for b in 0..4 {
                    m[(4 * s + a, 4 * s + b)] = block[(a, b)];
                }
            }
        }
        out.push(m);
    }
    let k = out.pop().unwrap();
    let j = out.pop().unwrap();
    let i = out.pop().unwrap();
    (i, j, k)
}

/// The invariant 3-form on R^7 with coefficients
/// `e123 + e145 - e167 + e246 + e257 + e347 - e356`.
pub fn g2_three_form() -> AlternatingForm {
    let terms = vec![
        (vec![0, 1, 2], 1.0),
        (vec![0, 3, 4], 1.0),
        (vec![0, 5, 6], -1.0),
        (vec![1, 3, 5], 1.0),
        (vec![1, 4, 6], 1.0),
        (vec![2, 3, 6], 1.0),
        (vec![2, 4, 5], -1.0),
    ];
    AlternatingForm::new(7, 3, terms)
}

/// The invariant 4-form on R^8 with coefficients
/// `e1234 + e1256 - e1278 + e1357 + e1368 + e1458 - e1467
///  + e5678 - e3456 + e2457 - e2358 + e2367 + e3478 + e2468`.
pub fn spin7_four_form() -> AlternatingForm {
    let terms = vec![
        (vec![0, 1, 2, 3], 1.0),
        (vec![0, 1, 4, 5], 1.0),
        (vec![0, 1, 6, 7], -1.0),
        (vec![0, 2, 4, 6], 1.0),
        (vec![0, 2, 5, 7], 1.0),
        (vec![0, 3, 4, 7], 1.0),
        (vec![0, 3, 5, 6], -1.0),
        (vec![4, 5, 6, 7], 1.0),
        (vec![2, 3, 4, 5], -1.0),
        (vec![1, 3, 4, 6], 1.0),
        (vec![1, 2, 4, 7], -1.0),
        (vec![1, 2, 5, 6], 1.0),
        (vec![2, 3, 6, 7], 1.0),
        (vec![1, 3, 5, 7], 1.0),
    ];
    AlternatingForm::new(8, 4, terms)
}

/// Nine pairwise anticommuting symmetric involutions on R^16, as fourfold
/// tensor products of the real 2x2 templates `X = [[0,1],[1,0]]`,
/// `Z = [[1,0],[0,-1]]` and `E = [[0,-1],[1,0]]`.
pub fn clifford_generators() -> Vec<Operator> {
    #[derive(Clone, Copy)]
    enum T {
        One,
        X,
        Z,
        E,
    }
    fn template(t: T) -> DMatrix<f64> {
        match t {
            T::One => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            T::X => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            T::Z => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            T::E => DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
        }
    }
    use T::*;
    let strings: [[T; 4]; 9] = [
        [X, One, One, One],
        [Z, One, One, One],
        [E, E, One, One],
        [E, X, E, One],
        [E, X, X, E],
        [E, X, Z, E],
        [E, Z, One, E],
        [E, Z, E, X],
        [E, Z, E, Z],
    ];
    strings
        .iter()
        .map(|s| {
            s.iter()
                .map(|&t| template(t))
                .reduce(|acc, m| acc.kronecker(&m))
                .unwrap()
        })
        .collect()
}

/// Builds the invariant structure data of a group instance. All operator
/// entries and form coefficients are exact integers.
pub fn build_structures(spec: &GroupSpec) -> StructurePack {
    let mut operators = Vec::new();
    let mut forms = Vec::new();
    match spec.family {
        GroupFamily::SO => {}
        GroupFamily::U | GroupFamily::SU => {
            operators.push(("I".to_string(), complex_structure(spec.n)));
        }
        GroupFamily::Sp | GroupFamily::SpU1 | GroupFamily::SpSp1 => {
            let (i, j, k) = quaternion_structures(spec.n);
            operators.push(("I".to_string(), i));
            operators.push(("J".to_string(), j));
            operators.push(("K".to_string(), k));
        }
        GroupFamily::G2 => forms.push(("phi".to_string(), g2_three_form())),
        GroupFamily::Spin7 => forms.push(("theta".to_string(), spin7_four_form())),
        GroupFamily::Spin9 => {
            for (a, m) in clifford_generators().into_iter().enumerate() {
                operators.push((format!("I{}", a + 1), m));
            }
        }
    }
    StructurePack {
        spec: *spec,
        operators,
        forms,
    }
}

/// The vector cross product on R^7: `<cross(x, y), z> = phi(x, y, z)`.
pub fn cross_product(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    assert_eq!(x.len(), 7);
    assert_eq!(y.len(), 7);
    let phi = g2_three_form();
    contract_last(&phi, &[x, y])
}

/// The triple cross product on R^8: `<triple(x, y, z), w> = theta(x, y, z, w)`.
pub fn triple_cross(x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
    assert_eq!(x.len(), 8);
    assert_eq!(y.len(), 8);
    assert_eq!(z.len(), 8);
    let theta = spin7_four_form();
    contract_last(&theta, &[x, y, z])
}

/// The base-point cross product of the 7-sphere: triple cross with the base
/// point in the first slot. Requires a unit base point.
pub fn theta_point_cross(
    base: &DVector<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> DVector<f64> {
    assert!(
        (base.norm() - 1.0).abs() < 1e-9,
        "base point must lie on the unit sphere"
    );
    triple_cross(base, x, y)
}

fn contract_last(form: &AlternatingForm, fixed: &[&DVector<f64>]) -> DVector<f64> {
    let n = form.ambient_dim;
    let basis: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect();
    DVector::from_fn(n, |k, _| {
        let mut args: Vec<&DVector<f64>> = fixed.to_vec();
        args.push(&basis[k]);
        form.evaluate(&args)
    })
}

// ---------------------------------------------------------------------------
// Membership.
// ---------------------------------------------------------------------------

/// Largest residual of the family's defining conditions on `g` (orthogonality,
/// orientation and structure preservation). Membership holds when this is
/// below the caller's tolerance.
pub fn membership_residual(spec: &GroupSpec, g: &Operator) -> Result<f64> {
    let d = spec.ambient_dim();
    if g.nrows() != d || g.ncols() != d {
        return Err(HoloError::DimensionMismatch {
            expected: d,
            got: g.nrows(),
        });
    }
    let id = DMatrix::<f64>::identity(d, d);
    let mut residual = (g.transpose() * g - &id).norm();
    // Orthogonal matrices have determinant +-1; reject the orientation flip.
    if g.determinant() < 0.0 {
        residual = residual.max(2.0);
    }
    let pack = build_structures(spec);
    match spec.family {
        GroupFamily::SO => {}
        GroupFamily::U => {
            let i = pack.operator("I").unwrap();
            residual = residual.max(commutation_residual(g, i));
        }
        GroupFamily::SU => {
            let i = pack.operator("I").unwrap();
            residual = residual.max(commutation_residual(g, i));
            let det = complex_matrix(g).determinant();
            residual = residual.max((det - Complex::new(1.0, 0.0)).norm());
        }
        GroupFamily::Sp => {
            for name in ["I", "J", "K"] {
                residual = residual.max(commutation_residual(g, pack.operator(name).unwrap()));
            }
        }
        GroupFamily::SpU1 => {
            let i = pack.operator("I").unwrap();
            residual = residual.max(commutation_residual(g, i));
            let span: Vec<&Operator> = vec![pack.operator("J").unwrap(), pack.operator("K").unwrap()];
            for l in &span {
                residual = residual.max(span_preservation_residual(g, l, &span));
            }
        }
        GroupFamily::SpSp1 => {
            let span: Vec<&Operator> = ["I", "J", "K"]
                .iter()
                .map(|n| pack.operator(n).unwrap())
                .collect();
            for l in &span {
                residual = residual.max(span_preservation_residual(g, l, &span));
            }
        }
        GroupFamily::G2 => {
            residual = residual.max(pack.form("phi").unwrap().pullback_residual(g));
        }
        GroupFamily::Spin7 => {
            residual = residual.max(pack.form("theta").unwrap().pullback_residual(g));
        }
        GroupFamily::Spin9 => {
            let span: Vec<&Operator> = pack.operators.iter().map(|(_, m)| m).collect();
            for l in &span {
                residual = residual.max(span_preservation_residual(g, l, &span));
            }
        }
    }
    Ok(residual)
}

/// True when `g` is orthogonal and satisfies the family's structure
/// conditions within `tol`.
pub fn is_member(spec: &GroupSpec, g: &Operator, tol: f64) -> Result<bool> {
    Ok(membership_residual(spec, g)? < tol)
}

fn commutation_residual(g: &Operator, l: &Operator) -> f64 {
    (g * l - l * g).norm() / l.norm()
}

/// Residual of `g L g^T` off the Frobenius span of the structure operators,
/// relative to the norm of `L`.
fn span_preservation_residual(g: &Operator, l: &Operator, span: &[&Operator]) -> f64 {
    let transformed = g * l * g.transpose();
    let mut off = transformed.clone();
    for s in span {
        let coeff = frobenius_dot(&transformed, s) / frobenius_dot(s, s);
        off -= *s * coeff;
    }
    off.norm() / l.norm()
}

/// The complex `n x n` matrix of a real `2n x 2n` matrix that commutes with
/// the standard complex structure.
pub fn complex_matrix(g: &Operator) -> DMatrix<Complex<f64>> {
    let n = g.nrows() / 2;
    DMatrix::from_fn(n, n, |r, c| {
        Complex::new(
            0.5 * (g[(2 * r, 2 * c)] + g[(2 * r + 1, 2 * c + 1)]),
            0.5 * (g[(2 * r + 1, 2 * c)] - g[(2 * r, 2 * c + 1)]),
        )
    })
}

// ---------------------------------------------------------------------------
// Serialization table (exact integers).
// ---------------------------------------------------------------------------

/// Golden-file form of a structure pack: operator entries and form
/// coefficients as exact integers.
#[derive(Debug, Serialize)]
pub struct StructureTable {
    pub group: String,
    pub ambient_dim: usize,
    pub operators: Vec<OperatorTable>,
    pub forms: Vec<FormTable>,
}

#[derive(Debug, Serialize)]
pub struct OperatorTable {
    pub name: String,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Debug, Serialize)]
pub struct FormTable {
    pub name: String,
    pub degree: usize,
    pub terms: Vec<FormTerm>,
}

#[derive(Debug, Serialize)]
pub struct FormTerm {
    /// 1-based strictly increasing indices.
    pub indices: Vec<usize>,
    pub coeff: i64,
}

impl StructurePack {
    pub fn table(&self) -> StructureTable {
        StructureTable {
            group: self.spec.to_string(),
            ambient_dim: self.spec.ambient_dim(),
            operators: self
                .operators
                .iter()
                .map(|(name, m)| OperatorTable {
                    name: name.clone(),
                    entries: (0..m.nrows())
                        .map(|r| {
                            (0..m.ncols())
                                .map(|c| {
                                    let x = m[(r, c)];
                                    debug_assert_eq!(x, x.round());
                                    x.round() as i64
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
            forms: self
                .forms
                .iter()
                .map(|(name, f)| FormTable {
                    name: name.clone(),
                    degree: f.degree,
                    terms: f
                        .terms()
                        .iter()
                        .map(|(idx, c)| FormTerm {
                            indices: idx.iter().map(|&i| i + 1).collect(),
                            coeff: c.round() as i64,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
