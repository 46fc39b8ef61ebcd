//! Lie algebra bases of the nine groups, computed as nullspaces of linear
//! constraint systems over the antisymmetric coordinate space of `so(n)`,
//! together with pointwise and setwise stabilizer subalgebras of arbitrary
//! subspaces.
//!
//! Every group lies in `SO(n)`, so all computations happen in the
//! `n(n-1)/2`-dimensional space of antisymmetric matrices. The linearized
//! membership conditions are:
//!
//! * `so(n)`: none
//! * `u(n)`: `[A, I] = 0`
//! * `su(n)`: `[A, I] = 0` and `tr(I A) = 0`
//! * `sp(n)`: `[A, L] = 0` for `L` in `{I, J, K}`
//! * `sp(n) + u(1)`: `[A, I] = 0` and `[A, J]` in `span{J, K}`
//! * `sp(n) + sp(1)`: `[A, L]` in `span{I, J, K}` for `L` in `{I, J, K}`
//! * `g2`: the derivation action on the 3-form vanishes
//! * `spin(7)`: the derivation action on the 4-form vanishes
//! * `spin(9)`: `[A, I_a]` in `span{I_1..I_9}` for all `a`

use nalgebra::{DMatrix, DVector};

use crate::error::{HoloError, Result};
use crate::linalg::{nullspace, Operator, SubspaceBasis, Tolerances};
use crate::structures::{build_structures, frobenius_dot, GroupFamily, GroupSpec};

/// A list of antisymmetric operators spanning a Lie subalgebra of `so(n)`.
///
/// Elements are pairwise Frobenius-orthogonal with common norm `sqrt(2)`,
/// which makes span projections cheap.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub spec: GroupSpec,
    elements: Vec<Operator>,
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn ambient_dim(&self) -> usize {
        self.spec.ambient_dim()
    }

    /// Frobenius projection of `m` onto the span of the basis elements.
    pub fn project(&self, m: &Operator) -> Operator {
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for a in &self.elements {
            let coeff = frobenius_dot(m, a) / frobenius_dot(a, a);
            out += a * coeff;
        }
        out
    }

    /// Residual of `m` off the span of the basis elements.
    pub fn span_residual(&self, m: &Operator) -> f64 {
        (m - self.project(m)).norm()
    }

    /// Largest projection residual of any bracket `[A_i, A_j]` off the span.
    pub fn bracket_closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for b in self.elements.iter().skip(i + 1) {
                let bracket = a * b - b * a;
                worst = worst.max(self.span_residual(&bracket));
            }
        }
        worst
    }

    /// Largest antisymmetry defect over the basis elements.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.elements
            .iter()
            .map(|a| (a + a.transpose()).norm())
            .fold(0.0, f64::max)
    }

    /// Random element of the algebra with the given coefficient vector.
    pub fn combination(&self, coeffs: &[f64]) -> Operator {
        assert_eq!(coeffs.len(), self.elements.len());
        let d = self.ambient_dim();
        let mut out = DMatrix::zeros(d, d);
        for (a, &c) in self.elements.iter().zip(coeffs) {
            out += a * c;
        }
        out
    }

    /// Row-major matrices, used for serialization.
    pub fn matrices(&self) -> Vec<Vec<Vec<f64>>> {
        self.elements
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
                    .collect()
            })
            .collect()
    }
}

/// Strictly upper index pairs for the antisymmetric coordinate space.
pub(crate) fn antisym_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .collect()
}

/// The antisymmetric unit generator rotating `e_i` toward `e_j`.
pub(crate) fn antisym_unit(d: usize, i: usize, j: usize) -> Operator {
    let mut a = DMatrix::zeros(d, d);
    a[(j, i)] = 1.0;
    a[(i, j)] = -1.0;
    a
}

fn off_span(m: &Operator, span: &[&Operator]) -> Operator {
    let mut out = m.clone();
    for s in span {
        let coeff = frobenius_dot(m, s) / frobenius_dot(s, s);
        out -= *s * coeff;
    }
    out
}

/// Constraint rows of the linearized membership condition, as functions on the
/// antisymmetric coordinate space.
fn family_constraint_rows(spec: &GroupSpec) -> Vec<DVector<f64>> {
    let d = spec.ambient_dim();
    let pairs = antisym_pairs(d);
    let pack = build_structures(spec);
    // Image of one antisymmetric basis element under the constraint map.
    let image = |a: &Operator| -> Vec<f64> {
        match spec.family {
            GroupFamily::SO => Vec::new(),
            GroupFamily::U => {
                let i = pack.operator("I").unwrap();
                (a * i - i * a).iter().cloned().collect()
            }
            GroupFamily::SU => {
                let i = pack.operator("I").unwrap();
                let mut v: Vec<f64> = (a * i - i * a).iter().cloned().collect();
                v.push((i * a).trace());
                v
            }
            GroupFamily::Sp => {
                let mut v = Vec::new();
                for name in ["I", "J", "K"] {
                    let l = pack.operator(name).unwrap();
                    v.extend((a * l - l * a).iter().cloned());
                }
                v
            }
            GroupFamily::SpU1 => {
                let i = pack.operator("I").unwrap();
                let j = pack.operator("J").unwrap();
                let k = pack.operator("K").unwrap();
                let mut v: Vec<f64> = (a * i - i * a).iter().cloned().collect();
                let bracket = a * j - j * a;
                v.extend(off_span(&bracket, &[j, k]).iter().cloned());
                v
            }
            GroupFamily::SpSp1 => {
                let span: Vec<&Operator> = ["I", "J", "K"]
                    .iter()
                    .map(|n| pack.operator(n).unwrap())
                    .collect();
                let mut v = Vec::new();
                for l in &span {
                    let bracket = a * *l - *l * a;
                    v.extend(off_span(&bracket, &span).iter().cloned());
                }
                v
            }
            GroupFamily::G2 => {
                let phi = pack.form("phi").unwrap();
                let action = phi.derivation(a);
                crate::structures::increasing_tuples(3, 7)
                    .iter()
                    .map(|t| action.coefficient(t))
                    .collect()
            }
            GroupFamily::Spin7 => {
                let theta = pack.form("theta").unwrap();
                let action = theta.derivation(a);
                crate::structures::increasing_tuples(4, 8)
                    .iter()
                    .map(|t| action.coefficient(t))
                    .collect()
            }
            GroupFamily::Spin9 => {
                let span: Vec<&Operator> = pack.operators.iter().map(|(_, m)| m).collect();
                let mut v = Vec::new();
                for l in &span {
                    let bracket = a * *l - *l * a;
                    v.extend(off_span(&bracket, &span).iter().cloned());
                }
                v
            }
        }
    };

    let columns: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| image(&antisym_unit(d, i, j)))
        .collect();
    let nrows = columns.first().map(|c| c.len()).unwrap_or(0);
    (0..nrows)
        .map(|r| DVector::from_fn(pairs.len(), |k, _| columns[k][r]))
        .collect()
}

/// Basis of the Lie algebra of the group, solved over the antisymmetric
/// coordinate space.
pub fn algebra_basis(spec: &GroupSpec, tols: &Tolerances) -> Result<AlgebraBasis> {
    let d = spec.ambient_dim();
    let pairs = antisym_pairs(d);
    let rows = family_constraint_rows(spec);
    let coeffs = nullspace(&rows, pairs.len(), tols)?;
    let elements = coeffs
        .vectors()
        .iter()
        .map(|c| {
            let mut a = DMatrix::zeros(d, d);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                a[(j, i)] += c[k];
                a[(i, j)] -= c[k];
            }
            a
        })
        .collect();
    Ok(AlgebraBasis {
        spec: *spec,
        elements,
    })
}

/// Antisymmetric matrices commuting with every given structure operator; the
/// ambient unitary-type algebra of a complex or quaternionic structure.
pub fn commutant_algebra(
    structures: &[&Operator],
    ambient_dim: usize,
    tols: &Tolerances,
) -> Result<AlgebraBasis> {
    let pairs = antisym_pairs(ambient_dim);
    let columns: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| {
            let a = antisym_unit(ambient_dim, i, j);
            let mut v = Vec::new();
            for l in structures {
                v.extend((&a * *l - *l * &a).iter().cloned());
            }
            v
        })
        .collect();
    let nrows = columns.first().map(|c| c.len()).unwrap_or(0);
    let rows: Vec<DVector<f64>> = (0..nrows)
        .map(|r| DVector::from_fn(pairs.len(), |k, _| columns[k][r]))
        .collect();
    let coeffs = nullspace(&rows, pairs.len(), tols)?;
    let elements = coeffs
        .vectors()
        .iter()
        .map(|c| {
            let mut a = DMatrix::zeros(ambient_dim, ambient_dim);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                a[(j, i)] += c[k];
                a[(i, j)] -= c[k];
            }
            a
        })
        .collect();
    Ok(AlgebraBasis {
        spec: GroupSpec::so(ambient_dim),
        elements,
    })
}

/// Subalgebra annihilating every vector of `p`: `{A : A v = 0 for v in p}`.
pub fn pointwise_stabilizer_of(
    algebra: &AlgebraBasis,
    p: &SubspaceBasis,
    tols: &Tolerances,
) -> Result<AlgebraBasis> {
    stabilizer_of(algebra, p, false, tols)
}

/// Subalgebra mapping `p` into itself: `{A : A v in span(p) for v in p}`.
pub fn setwise_stabilizer_of(
    algebra: &AlgebraBasis,
    p: &SubspaceBasis,
    tols: &Tolerances,
) -> Result<AlgebraBasis> {
    stabilizer_of(algebra, p, true, tols)
}

fn stabilizer_of(
    algebra: &AlgebraBasis,
    p: &SubspaceBasis,
    setwise: bool,
    tols: &Tolerances,
) -> Result<AlgebraBasis> {
    let d = algebra.ambient_dim();
    if p.ambient_dim() != d {
        return Err(HoloError::DimensionMismatch {
            expected: d,
            got: p.ambient_dim(),
        });
    }
    let r = algebra.dim();
    let mut rows = Vec::with_capacity(p.dim() * d);
    for v in p.vectors() {
        let images: Vec<DVector<f64>> = algebra
            .elements
            .iter()
            .map(|a| {
                let image = a * v;
                if setwise {
                    p.project_off(&image)
                } else {
                    image
                }
            })
            .collect();
        rows.extend((0..d).map(|i| DVector::from_fn(r, |k, _| images[k][i])));
    }
    let coeffs = nullspace(&rows, r, tols)?;
    let elements = coeffs
        .vectors()
        .iter()
        .map(|c| algebra.combination(c.as_slice()))
        .collect();
    Ok(AlgebraBasis {
        spec: algebra.spec,
        elements,
    })
}

/// Pointwise stabilizer computed from scratch for one group instance.
pub fn pointwise_stabilizer_algebra(
    spec: &GroupSpec,
    p: &SubspaceBasis,
    tols: &Tolerances,
) -> Result<AlgebraBasis> {
    let algebra = algebra_basis(spec, tols)?;
    pointwise_stabilizer_of(&algebra, p, tols)
}

/// Setwise stabilizer computed from scratch for one group instance.
pub fn setwise_stabilizer_algebra(
    spec: &GroupSpec,
    p: &SubspaceBasis,
    tols: &Tolerances,
) -> Result<AlgebraBasis> {
    let algebra = algebra_basis(spec, tols)?;
    setwise_stabilizer_of(&algebra, p, tols)
}

/// Matrix exponential of `t A` for antisymmetric `A`; the result is orthogonal
/// to machine precision.
pub fn exp_element(a: &Operator, t: f64) -> Result<Operator> {
    let defect = (a + a.transpose()).norm();
    let scale = a.norm().max(1.0);
    if defect > 1e-10 * scale {
        return Err(HoloError::NotAntisymmetric { defect });
    }
    Ok((a * t).exp())
}
