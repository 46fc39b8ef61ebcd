//! Special subspaces generated by a given subspace under the two
//! non-equivalent definitions, and the randomized search for the minimal
//! special dimension of each group.
//!
//! Definition 1 realizes a special subspace as the maximal subspace on which
//! the pointwise stabilizer of the generator acts trivially (a joint kernel),
//! accepted only when it strictly contains the generator. Definition 2 builds
//! `P = P' + V` where `V` runs over the minimal invariant pieces of the
//! orthogonal complement of `P'` under the setwise stabilizer.
//!
//! Stabilizers are computed at the Lie algebra level. Where the group-level
//! stabilizer is disconnected, both entry points accept extra group-element
//! generators that refine the invariance; the search auto-supplies the
//! quaternionic-unit swap component for the `Sp(n)Sp(1)` and `Sp(n)U(1)`
//! definition-2 runs and validates it before use.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HoloError, Result};
use crate::liealg::{
    algebra_basis, pointwise_stabilizer_of, setwise_stabilizer_of, AlgebraBasis,
};
use crate::linalg::{
    fixed_subspace, invariant_complement_split, orthonormalize_in, random_frame, random_unit,
    Operator, SubspaceBasis, Tolerances,
};
use crate::structures::{build_structures, GroupFamily, GroupSpec};

/// Subspace-equality threshold (sine of the largest principal angle).
pub const SUBSPACE_EQ_TOL: f64 = 1e-7;

/// Which notion of special subspace is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Definition {
    One,
    Two,
}

impl Definition {
    pub fn as_u8(&self) -> u8 {
        match self {
            Definition::One => 1,
            Definition::Two => 2,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Definition::One),
            2 => Ok(Definition::Two),
            other => Err(HoloError::OutOfRange(format!(
                "definition must be 1 or 2, got {other}"
            ))),
        }
    }
}

impl Serialize for Definition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl std::fmt::Display for Definition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// One candidate special subspace.
#[derive(Debug, Clone)]
pub struct CandidateSpecial {
    /// The special subspace `P`.
    pub subspace: SubspaceBasis,
    /// The irreducible summand `V` with `P = P' + V` (definition 2 only).
    pub summand: Option<SubspaceBasis>,
    /// Irreducibility certificate of `V`: the eigenvalue spread of the
    /// normalized symmetric commutant witness (definition 2 only).
    pub certificate: Option<f64>,
}

/// Result of generating special subspaces from one generator.
#[derive(Debug, Clone)]
pub struct SpecialSubspaceReport {
    pub spec: GroupSpec,
    pub definition: Definition,
    pub generator: SubspaceBasis,
    /// Candidates sorted by dimension; empty when the generator produces no
    /// special subspace.
    pub candidates: Vec<CandidateSpecial>,
    /// Number of extra group-element generators that passed validation and
    /// refined the invariance.
    pub extras_used: usize,
    /// True when the extra generators changed the decomposition.
    pub refinement_changed: bool,
}

impl SpecialSubspaceReport {
    pub fn minimal(&self) -> Option<&CandidateSpecial> {
        self.candidates.first()
    }

    pub fn minimal_dim(&self) -> Option<usize> {
        self.minimal().map(|c| c.subspace.dim())
    }
}

fn check_proper(p: &SubspaceBasis, ambient: usize) -> Result<()> {
    if p.ambient_dim() != ambient {
        return Err(HoloError::DimensionMismatch {
            expected: ambient,
            got: p.ambient_dim(),
        });
    }
    if p.dim() >= ambient {
        return Err(HoloError::NotProper {
            dim: p.dim(),
            ambient,
        });
    }
    Ok(())
}

/// Definition-1 special subspace generated by `p`: the joint kernel of the
/// pointwise stabilizer (refined by `(g - Id)` conditions for the extras),
/// when it strictly contains `p`.
pub fn def1_special(
    spec: &GroupSpec,
    p: &SubspaceBasis,
    extras: &[Operator],
    tols: &Tolerances,
) -> Result<SpecialSubspaceReport> {
    let algebra = algebra_basis(spec, tols)?;
    def1_special_with(&algebra, p, extras, tols)
}

/// As [`def1_special`] with a precomputed parent algebra.
pub fn def1_special_with(
    algebra: &AlgebraBasis,
    p: &SubspaceBasis,
    extras: &[Operator],
    tols: &Tolerances,
) -> Result<SpecialSubspaceReport> {
    let d = algebra.ambient_dim();
    check_proper(p, d)?;
    let stabilizer = pointwise_stabilizer_of(algebra, p, tols)?;
    let mut conditions: Vec<Operator> = stabilizer.elements().to_vec();
    let id = DMatrix::<f64>::identity(d, d);
    let mut extras_used = 0;
    for g in extras {
        // Only elements fixing p pointwise keep the kernel above p.
        let fixes_p = p
            .vectors()
            .iter()
            .all(|v| (g * v - v).norm() < SUBSPACE_EQ_TOL);
        if fixes_p {
            conditions.push(g - &id);
            extras_used += 1;
        }
    }
    let fixed = fixed_subspace(&conditions, d, tols)?;
    let mut candidates = Vec::new();
    if fixed.dim() > p.dim() && fixed.contains(p, SUBSPACE_EQ_TOL) {
        candidates.push(CandidateSpecial {
            subspace: fixed,
            summand: None,
            certificate: None,
        });
    }
    Ok(SpecialSubspaceReport {
        spec: algebra.spec,
        definition: Definition::One,
        generator: p.clone(),
        candidates,
        extras_used,
        refinement_changed: false,
    })
}

/// Definition-2 special subspaces generated by `p`: one candidate `P = P' + V`
/// per minimal invariant piece `V` of the orthogonal complement under the
/// setwise stabilizer, sorted by dimension.
pub fn def2_special(
    spec: &GroupSpec,
    p: &SubspaceBasis,
    extras: &[Operator],
    tols: &Tolerances,
    split_seed: u64,
) -> Result<SpecialSubspaceReport> {
    let algebra = algebra_basis(spec, tols)?;
    def2_special_with(&algebra, p, extras, tols, split_seed)
}

/// As [`def2_special`] with a precomputed parent algebra.
pub fn def2_special_with(
    algebra: &AlgebraBasis,
    p: &SubspaceBasis,
    extras: &[Operator],
    tols: &Tolerances,
    split_seed: u64,
) -> Result<SpecialSubspaceReport> {
    let d = algebra.ambient_dim();
    check_proper(p, d)?;
    let stabilizer = setwise_stabilizer_of(algebra, p, tols)?;
    let complement = p.complement(tols);

    // Validate the extra group elements: orthogonal members of the ambient
    // group that map p onto itself.
    let id = DMatrix::<f64>::identity(d, d);
    let valid_extras: Vec<Operator> = extras
        .iter()
        .filter(|g| {
            let orthogonal = (g.transpose() * *g - &id).norm() < 1e-8;
            let member = crate::structures::is_member(&algebra.spec, g, 1e-8).unwrap_or(false);
            let stabilizes = p
                .vectors()
                .iter()
                .all(|v| p.project_off(&(*g * v)).norm() < SUBSPACE_EQ_TOL);
            orthogonal && member && stabilizes
        })
        .cloned()
        .collect();

    let base_ops: Vec<Operator> = stabilizer.elements().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    let base_pieces = invariant_complement_split(&complement, &base_ops, tols, &mut rng)?;

    let (pieces, refinement_changed) = if valid_extras.is_empty() {
        (base_pieces, false)
    } else {
        let mut refined_ops = base_ops.clone();
        refined_ops.extend(valid_extras.iter().cloned());
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
        let refined = invariant_complement_split(&complement, &refined_ops, tols, &mut rng)?;
        let dims = |pieces: &[crate::linalg::SplitPiece]| -> Vec<usize> {
            pieces.iter().map(|p| p.basis.dim()).collect()
        };
        let changed = dims(&refined) != dims(&base_pieces);
        (refined, changed)
    };

    let mut candidates = Vec::new();
    for piece in &pieces {
        let mut vectors: Vec<DVector<f64>> = p.vectors().to_vec();
        vectors.extend(piece.basis.vectors().iter().cloned());
        let subspace = orthonormalize_in(&vectors, d, tols)?;
        candidates.push(CandidateSpecial {
            subspace,
            summand: Some(piece.basis.clone()),
            certificate: Some(piece.certificate),
        });
    }
    candidates.sort_by_key(|c| c.subspace.dim());
    Ok(SpecialSubspaceReport {
        spec: algebra.spec,
        definition: Definition::Two,
        generator: p.clone(),
        candidates,
        extras_used: valid_extras.len(),
        refinement_changed,
    })
}

/// The known minimal special dimension of a group under a definition. The two
/// definitions agree except for `Sp(n)`, where definition 1 gives 4 and
/// definition 2 gives 2.
pub fn expected_minimal_dimension(spec: &GroupSpec, definition: Definition) -> usize {
    match spec.family {
        GroupFamily::SO => spec.ambient_dim(),
        GroupFamily::U | GroupFamily::SU | GroupFamily::SpU1 => 2,
        GroupFamily::Sp => match definition {
            Definition::One => 4,
            Definition::Two => 2,
        },
        GroupFamily::SpSp1 => 4,
        GroupFamily::G2 => 3,
        GroupFamily::Spin7 | GroupFamily::Spin9 => 4,
    }
}

/// Outcome of the randomized minimal-dimension search.
#[derive(Debug, Clone)]
pub struct MinimalSearch {
    pub spec: GroupSpec,
    pub definition: Definition,
    /// Smallest special dimension found.
    pub dim: usize,
    /// First minimal witness in deterministic sort order.
    pub witness: SpecialSubspaceReport,
    /// All distinct minimal witnesses found (bounded).
    pub witnesses: Vec<SpecialSubspaceReport>,
    pub generators_tried: usize,
}

const MAX_WITNESSES: usize = 16;
const MAX_WITNESSES_PER_GENERATOR_DIM: usize = 4;

/// Randomized search for the minimal special dimension: for each generator
/// dimension `m = 1, 2, ...` the search draws `trials` Haar-random frames plus
/// the structured generator families of the group (quaternionic lines, mixed
/// `y = lambda L x + y2` vectors, Clifford eigenspace splittings), records the
/// smallest special subspace found, and stops when `m` reaches the best-found
/// dimension.
pub fn minimal_special_dimension(
    spec: &GroupSpec,
    definition: Definition,
    trials: usize,
    sampler_seed: u64,
    tols: &Tolerances,
) -> Result<MinimalSearch> {
    if trials == 0 {
        return Err(HoloError::OutOfRange("trials must be at least 1".into()));
    }
    let d = spec.ambient_dim();
    if d < 2 {
        return Err(HoloError::InvalidGroup(format!(
            "search needs ambient dimension >= 2, got {d}"
        )));
    }
    let algebra = algebra_basis(spec, tols)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sampler_seed);
    let mut best: Option<usize> = None;
    let mut witnesses: Vec<SpecialSubspaceReport> = Vec::new();
    let mut generators_tried = 0;
    let mut split_counter: u64 = 0;

    for m in 1..d {
        if let Some(b) = best {
            if m >= b {
                break;
            }
        }
        let mut generators = structured_generators(spec, m, &mut rng, tols);
        for _ in 0..trials {
            generators.push(Generator {
                frame: random_frame(&mut rng, d, m, tols),
                swap_frame: None,
            });
        }
        for generator in generators {
            generators_tried += 1;
            let extras = match (definition, &generator.swap_frame) {
                (Definition::Two, Some(frame)) => auto_refinement_extras(spec, frame),
                _ => Vec::new(),
            };
            split_counter += 1;
            let split_seed = sampler_seed ^ split_counter.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let report = match definition {
                Definition::One => {
                    def1_special_with(&algebra, &generator.frame, &extras, tols)?
                }
                Definition::Two => {
                    def2_special_with(&algebra, &generator.frame, &extras, tols, split_seed)?
                }
            };
            let Some(dim) = report.minimal_dim() else {
                continue;
            };
            match best {
                None => {
                    best = Some(dim);
                    witnesses = vec![report];
                }
                Some(b) if dim < b => {
                    best = Some(dim);
                    witnesses = vec![report];
                }
                Some(b) if dim == b => {
                    let minimal = &report.minimal().unwrap().subspace;
                    let duplicate = witnesses.iter().any(|w| {
                        w.minimal()
                            .map(|c| c.subspace.coincides_with(minimal, SUBSPACE_EQ_TOL))
                            .unwrap_or(false)
                    });
                    // Witnesses are kept per generator dimension, so shapes
                    // that only arise from larger generators survive.
                    let same_m = witnesses
                        .iter()
                        .filter(|w| w.generator.dim() == report.generator.dim())
                        .count();
                    if !duplicate
                        && witnesses.len() < MAX_WITNESSES
                        && same_m < MAX_WITNESSES_PER_GENERATOR_DIM
                    {
                        witnesses.push(report);
                    }
                }
                _ => {}
            }
        }
    }

    let dim = best.expect("every proper generator dimension was searched");
    // Deterministic witness order: rounded basis entries of the minimal
    // candidate subspace.
    witnesses.sort_by(|a, b| {
        let key = |r: &SpecialSubspaceReport| -> Vec<i64> {
            r.minimal()
                .unwrap()
                .subspace
                .vectors()
                .iter()
                .flat_map(|v| v.iter().map(|x| (x * 1e9).round() as i64))
                .collect()
        };
        key(a).cmp(&key(b))
    });
    Ok(MinimalSearch {
        spec: *spec,
        definition,
        dim,
        witness: witnesses[0].clone(),
        witnesses,
        generators_tried,
    })
}

/// A generator frame, plus the quaternionic frame data needed to build the
/// disconnected-component swap when the frame came from the mixed family.
struct Generator {
    frame: SubspaceBasis,
    swap_frame: Option<SwapFrame>,
}

/// Mixed-generator frame of the quaternionic families: `x` and the
/// quaternion-line complement direction `y2`.
struct SwapFrame {
    x: DVector<f64>,
    y2: DVector<f64>,
}

fn frame_from(vectors: Vec<DVector<f64>>, d: usize, tols: &Tolerances) -> Option<SubspaceBasis> {
    let expected = vectors.len();
    let basis = orthonormalize_in(&vectors, d, tols).ok()?;
    (basis.dim() == expected).then_some(basis)
}

/// Structured generator families mirroring the case analysis of each group:
/// quaternionic lines and mixed `y = lambda L x + y2` splits, Clifford
/// plus/minus eigenspace components, cross-product frames.
fn structured_generators<R: Rng>(
    spec: &GroupSpec,
    m: usize,
    rng: &mut R,
    tols: &Tolerances,
) -> Vec<Generator> {
    let d = spec.ambient_dim();
    let mut out: Vec<Generator> = Vec::new();
    let push_plain = |vectors: Vec<DVector<f64>>, out: &mut Vec<Generator>, tols: &Tolerances| {
        if let Some(frame) = frame_from(vectors, d, tols) {
            out.push(Generator {
                frame,
                swap_frame: None,
            });
        }
    };
    match spec.family {
        GroupFamily::U | GroupFamily::SU => {
            if m == 2 {
                let pack = build_structures(spec);
                let i_op = pack.operator("I").unwrap();
                for _ in 0..4 {
                    let x = random_unit(rng, d);
                    push_plain(vec![x.clone(), i_op * &x], &mut out, tols);
                }
            }
        }
        GroupFamily::Sp | GroupFamily::SpU1 | GroupFamily::SpSp1 => {
            let pack = build_structures(spec);
            let i_op = pack.operator("I").unwrap().clone();
            let j_op = pack.operator("J").unwrap().clone();
            let k_op = pack.operator("K").unwrap().clone();
            let random_l = |rng: &mut R| -> Operator {
                let v = random_unit(rng, 3);
                &i_op * v[0] + &j_op * v[1] + &k_op * v[2]
            };
            let quat_complement_unit = |rng: &mut R, x: &DVector<f64>| -> DVector<f64> {
                loop {
                    let mut y = random_unit(rng, d);
                    for l in [&i_op, &j_op, &k_op] {
                        let lx = l * x;
                        y.axpy(-lx.dot(&y), &lx, 1.0);
                    }
                    y.axpy(-x.dot(&y), x, 1.0);
                    let n = y.norm();
                    if n > 1e-6 {
                        return y / n;
                    }
                }
            };
            match m {
                2 => {
                    for _ in 0..3 {
                        // (a) second vector inside span{Ix, Jx, Kx}
                        let x = random_unit(rng, d);
                        push_plain(vec![x.clone(), &i_op * &x], &mut out, tols);
                        let l = random_l(rng);
                        push_plain(vec![x.clone(), &l * &x], &mut out, tols);
                        // (b) second vector orthogonal to the quaternion line
                        let y2 = quat_complement_unit(rng, &x);
                        push_plain(vec![x.clone(), y2.clone()], &mut out, tols);
                        // (c) mixed vector y = lambda I x + y2, lambda
                        // log-uniform in [0.1, 10]
                        let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
                        let mixed = (&i_op * &x) * lambda + &y2;
                        if let Some(frame) =
                            frame_from(vec![x.clone(), mixed.normalize()], d, tols)
                        {
                            out.push(Generator {
                                frame,
                                swap_frame: Some(SwapFrame {
                                    x: x.clone(),
                                    y2: y2.clone(),
                                }),
                            });
                        }
                        let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
                        let l = random_l(rng);
                        let mixed = (&l * &x) * lambda + &y2;
                        push_plain(vec![x, mixed.normalize()], &mut out, tols);
                    }
                }
                3 => {
                    for _ in 0..3 {
                        let x = random_unit(rng, d);
                        push_plain(vec![x.clone(), &i_op * &x, &j_op * &x], &mut out, tols);
                        let y2 = quat_complement_unit(rng, &x);
                        push_plain(vec![x.clone(), &i_op * &x, y2], &mut out, tols);
                    }
                }
                4 => {
                    for _ in 0..3 {
                        let x = random_unit(rng, d);
                        push_plain(
                            vec![x.clone(), &i_op * &x, &j_op * &x, &k_op * &x],
                            &mut out,
                            tols,
                        );
                    }
                }
                _ => {}
            }
        }
        GroupFamily::Spin9 => {
            let gens: Vec<Operator> = build_structures(spec)
                .operators
                .into_iter()
                .map(|(_, m)| m)
                .collect();
            let canonical = |x: &DVector<f64>| -> Operator {
                // The unit structure with I x = x: sum of <I_a x, x> I_a.
                let mut i_x = DMatrix::zeros(16, 16);
                for g in &gens {
                    i_x += g * (g * x).dot(x);
                }
                i_x
            };
            if (2..=4).contains(&m) {
                for _ in 0..3 {
                    let x = random_unit(rng, 16);
                    let i_x = canonical(&x);
                    let plus_part = |v: &DVector<f64>| -> DVector<f64> {
                        let mut u = (v + &i_x * v) * 0.5;
                        u.axpy(-x.dot(&u), &x, 1.0);
                        u
                    };
                    let minus_part = |v: &DVector<f64>| (v - &i_x * v) * 0.5;
                    let raw = random_unit(rng, 16);
                    let u = plus_part(&raw);
                    let v = minus_part(&raw);
                    if u.norm() < 1e-6 || v.norm() < 1e-6 {
                        continue;
                    }
                    let u = u.normalize();
                    let v = v.normalize();
                    match m {
                        2 => {
                            // (a) inside the plus eigenspace, (b) inside the
                            // minus eigenspace, (c) mixed with log-uniform
                            // weight
                            push_plain(vec![x.clone(), u.clone()], &mut out, tols);
                            push_plain(vec![x.clone(), v.clone()], &mut out, tols);
                            let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
                            let mixed = &u * lambda + &v;
                            push_plain(vec![x.clone(), mixed.normalize()], &mut out, tols);
                        }
                        3 => {
                            push_plain(vec![x.clone(), u.clone(), v.clone()], &mut out, tols);
                            let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
                            let mixed = &u * lambda + &v;
                            let raw2 = random_unit(rng, 16);
                            let u2 = plus_part(&raw2);
                            if u2.norm() > 1e-6 {
                                push_plain(
                                    vec![x.clone(), mixed.normalize(), u2.normalize()],
                                    &mut out,
                                    tols,
                                );
                            }
                        }
                        4 => {
                            let jx = v;
                            let ju = {
                                // A second independent direction in the minus
                                // eigenspace.
                                let mut w = minus_part(&random_unit(rng, 16));
                                w.axpy(-jx.dot(&w), &jx, 1.0);
                                if w.norm() < 1e-6 {
                                    continue;
                                }
                                w.normalize()
                            };
                            push_plain(vec![x.clone(), u.clone(), jx, ju], &mut out, tols);
                        }
                        _ => {}
                    }
                }
            }
        }
        GroupFamily::G2 => {
            if m == 3 {
                for _ in 0..3 {
                    let x = random_unit(rng, 7);
                    let y = random_unit(rng, 7);
                    let z = crate::structures::cross_product(&x, &y);
                    if z.norm() > 1e-6 {
                        push_plain(vec![x, y, z.normalize()], &mut out, tols);
                    }
                }
            }
        }
        GroupFamily::Spin7 => {
            if m == 4 {
                for _ in 0..3 {
                    let x = random_unit(rng, 8);
                    let y = random_unit(rng, 8);
                    let z = random_unit(rng, 8);
                    let w = crate::structures::triple_cross(&x, &y, &z);
                    if w.norm() > 1e-6 {
                        push_plain(vec![x, y, z, w.normalize()], &mut out, tols);
                    }
                }
            }
        }
        GroupFamily::SO => {}
    }
    out
}

/// Disconnected-component representatives supplied to the definition-2 runs of
/// the quaternionic families: the quaternionic-unit swap (right multiplication
/// by `j` combined with the compensating `Sp(n)` factor), conjugated to the
/// generator frame. Validation against membership and setwise stabilization
/// happens inside [`def2_special_with`].
fn auto_refinement_extras(spec: &GroupSpec, frame: &SwapFrame) -> Vec<Operator> {
    if !matches!(spec.family, GroupFamily::SpSp1 | GroupFamily::SpU1) {
        return Vec::new();
    }
    match quaternionic_unit_swap(spec.n, &frame.x, &frame.y2) {
        Ok(g) => vec![g],
        Err(_) => Vec::new(),
    }
}

/// The element acting as `q -> A q j^{-1}` with `A = diag(j, -j, 1, ..., 1)`
/// in the quaternionic frame `(x, y2, completion)`. It fixes `x`, negates
/// every mixed vector `lambda I x + y2`, and glues the two 2-dimensional
/// pieces of the mixed-case complement decomposition.
pub fn quaternionic_unit_swap(
    n: usize,
    x: &DVector<f64>,
    y2: &DVector<f64>,
) -> Result<Operator> {
    use crate::structures::{
        left_mult_block, quat_matrix_to_real, right_mult_block, to_quat_vector, Quat,
    };
    let d = 4 * n;
    if x.len() != d || y2.len() != d {
        return Err(HoloError::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    // Quaternionic Gram-Schmidt completing (x, y2) to a unitary frame.
    let mut columns: Vec<Vec<Quat>> = Vec::new();
    let push_column = |candidate: Vec<Quat>, columns: &mut Vec<Vec<Quat>>| -> bool {
        let mut v = candidate;
        for col in columns.iter() {
            let mut coeff = Quat([0.0; 4]);
            for (a, b) in col.iter().zip(v.iter()) {
                coeff = coeff.add(a.conj().mul(*b));
            }
            for (slot, a) in col.iter().enumerate() {
                v[slot] = v[slot].sub(a.mul(coeff));
            }
        }
        let norm = v.iter().map(|q| q.norm_sq()).sum::<f64>().sqrt();
        if norm < 1e-9 {
            return false;
        }
        for q in v.iter_mut() {
            *q = q.scale(1.0 / norm);
        }
        columns.push(v);
        true
    };
    if !push_column(to_quat_vector(x), &mut columns) {
        return Err(HoloError::ConstructionFailure("x has zero norm".into()));
    }
    if !push_column(to_quat_vector(y2), &mut columns) {
        return Err(HoloError::ConstructionFailure(
            "y2 lies in the quaternion line of x".into(),
        ));
    }
    for s in 0..n {
        if columns.len() == n {
            break;
        }
        let mut cand = vec![Quat([0.0; 4]); n];
        cand[s] = Quat::ONE;
        push_column(cand, &mut columns);
    }
    if columns.len() != n {
        return Err(HoloError::ConstructionFailure(
            "quaternionic frame completion failed".into(),
        ));
    }
    // F maps the standard frame to (x, y2, ...).
    let mut f_quat = vec![vec![Quat([0.0; 4]); n]; n];
    for (col, column) in columns.iter().enumerate() {
        for (row, &q) in column.iter().enumerate() {
            f_quat[row][col] = q;
        }
    }
    let f = quat_matrix_to_real(&f_quat);

    // Standard-frame swap: left multiplication by diag(j, -j, 1, ...) composed
    // with right multiplication by j^{-1} = -j.
    let qj = Quat([0.0, 0.0, 1.0, 0.0]);
    let mut left = DMatrix::zeros(d, d);
    for s in 0..n {
        let block = match s {
            0 => left_mult_block(qj),
            1 => left_mult_block(qj.scale(-1.0)),
            _ => DMatrix::identity(4, 4),
        };
        for a in 0..4 {
            for b in 0..4 {
                left[(4 * s + a, 4 * s + b)] = block[(a, b)];
            }
        }
    }
    let mut right = DMatrix::zeros(d, d);
    let rblock = right_mult_block(qj.scale(-1.0));
    for s in 0..n {
        for a in 0..4 {
            for b in 0..4 {
                right[(4 * s + a, 4 * s + b)] = rblock[(a, b)];
            }
        }
    }
    let swap0 = &left * &right;
    Ok(&f * swap0 * f.transpose())
}
