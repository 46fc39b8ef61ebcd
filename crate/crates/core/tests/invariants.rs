//! Cross-module invariants: witness shapes of the minimal special subspaces,
//! stabilizer vanishing on generated subspaces, decomposition completeness,
//! group closure of the membership predicate, and the closed-form transport
//! identity across the radius range.

use holonomy_forge::liealg::{algebra_basis, exp_element, pointwise_stabilizer_algebra};
use holonomy_forge::linalg::{orthonormalize, random_frame, random_unit, Operator, SubspaceBasis, Tolerances};
use holonomy_forge::special::{
    def1_special, def2_special, minimal_special_dimension, Definition, SUBSPACE_EQ_TOL,
};
use holonomy_forge::structures::{
    build_structures, cross_product, is_member, GroupSpec,
};
use holonomy_forge::transport::closed_form_x;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tols() -> Tolerances {
    Tolerances::default()
}

fn line(v: DVector<f64>) -> SubspaceBasis {
    let d = v.len();
    SubspaceBasis::from_orthonormal(d, vec![v.normalize()], 1e-9).unwrap()
}

/// True when the subspace is mapped into itself by the operator.
fn invariant_under(p: &SubspaceBasis, op: &Operator) -> bool {
    p.vectors()
        .iter()
        .all(|v| p.project_off(&(op * v)).norm() < 1e-7)
}

#[test]
fn def1_sp_witness_is_quaternion_line() {
    let spec = GroupSpec::sp(2);
    let pack = build_structures(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_unit(&mut rng, 8);
    let report = def1_special(&spec, &line(x.clone()), &[], &tols()).unwrap();
    let p = &report.minimal().unwrap().subspace;
    assert_eq!(p.dim(), 4);
    let mut expected = vec![x.clone()];
    for name in ["I", "J", "K"] {
        expected.push(pack.operator(name).unwrap() * &x);
    }
    let expected = orthonormalize(&expected, &tols()).unwrap();
    assert!(p.coincides_with(&expected, SUBSPACE_EQ_TOL));
}

#[test]
fn def1_spu1_witness_is_complex_line() {
    let spec = GroupSpec::sp_u1(2);
    let pack = build_structures(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_unit(&mut rng, 8);
    let report = def1_special(&spec, &line(x.clone()), &[], &tols()).unwrap();
    let p = &report.minimal().unwrap().subspace;
    assert_eq!(p.dim(), 2);
    let i_op = pack.operator("I").unwrap();
    let expected = orthonormalize(&[x.clone(), i_op * &x], &tols()).unwrap();
    assert!(p.coincides_with(&expected, SUBSPACE_EQ_TOL));
}

#[test]
fn def1_g2_witness_is_cross_product_triple() {
    let spec = GroupSpec::g2();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let frame = random_frame(&mut rng, 7, 2, &tols());
    let report = def1_special(&spec, &frame, &[], &tols()).unwrap();
    let p = &report.minimal().unwrap().subspace;
    assert_eq!(p.dim(), 3);
    let vs = frame.vectors();
    let mut expected = vs.to_vec();
    expected.push(cross_product(&vs[0], &vs[1]).normalize());
    let expected = orthonormalize(&expected, &tols()).unwrap();
    assert!(p.coincides_with(&expected, 1e-6));
}

#[test]
fn def1_spin9_mixed_witness_shape() {
    // Mixed generator y = lambda y1 + y2 with y1 in the plus eigenspace of
    // the canonical structure at x and y2 = J x in the minus eigenspace; the
    // generated subspace is span{x, y1, y2, J y1}.
    let spec = GroupSpec::spin9();
    let gens: Vec<Operator> = build_structures(&spec)
        .operators
        .into_iter()
        .map(|(_, m)| m)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = random_unit(&mut rng, 16);
    let mut i_x = DMatrix::zeros(16, 16);
    for g in &gens {
        i_x += g * (g * &x).dot(&x);
    }
    let raw = random_unit(&mut rng, 16);
    let mut u = (&raw + &i_x * &raw) * 0.5;
    u.axpy(-x.dot(&u), &x, 1.0);
    let u = u.normalize();
    let v = ((&raw - &i_x * &raw) * 0.5).normalize();
    // J is the structure-span element with J x = v.
    let mut j_op = DMatrix::zeros(16, 16);
    for g in &gens {
        j_op += g * (g * &x).dot(&v);
    }
    assert!((&j_op * &x - &v).norm() < 1e-10, "J x = y2");

    let lambda = 1.7;
    let y = (&u * lambda + &v).normalize();
    let generator = orthonormalize(&[x.clone(), y], &tols()).unwrap();
    let report = def1_special(&spec, &generator, &[], &tols()).unwrap();
    let p = &report.minimal().unwrap().subspace;
    assert_eq!(p.dim(), 4);
    let expected =
        orthonormalize(&[x.clone(), u.clone(), v.clone(), &j_op * &u], &tols()).unwrap();
    assert!(p.coincides_with(&expected, 1e-6));
}

#[test]
fn spsp1_search_finds_both_minimal_shapes() {
    // The 4-dimensional minimal witnesses come in two shapes: the quaternion
    // line span{x, Ix, Jx, Kx} (invariant under all three structures) and the
    // mixed shape span{x, Lx, y2, Ly2} (invariant under none of them in
    // general). The search must find both.
    let spec = GroupSpec::sp_sp1(2);
    let pack = build_structures(&spec);
    let ops: Vec<&Operator> = ["I", "J", "K"]
        .iter()
        .map(|n| pack.operator(n).unwrap())
        .collect();
    let search =
        minimal_special_dimension(&spec, Definition::One, 20, 97, &tols()).unwrap();
    assert_eq!(search.dim, 4);
    let mut quaternion_line = false;
    let mut mixed = false;
    for witness in &search.witnesses {
        let p = &witness.minimal().unwrap().subspace;
        if ops.iter().all(|op| invariant_under(p, op)) {
            quaternion_line = true;
        } else {
            mixed = true;
        }
    }
    assert!(quaternion_line, "quaternion-line witness found");
    assert!(mixed, "mixed-shape witness found");
}

#[test]
fn def1_stabilizer_vanishes_on_generated_subspace() {
    let t = tols();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for spec in [GroupSpec::u(3), GroupSpec::spin7()] {
        let m = if spec.family == holonomy_forge::GroupFamily::Spin7 { 3 } else { 1 };
        let generator = random_frame(&mut rng, spec.ambient_dim(), m, &t);
        let report = def1_special(&spec, &generator, &[], &t).unwrap();
        let p = &report.minimal().unwrap().subspace;
        let stab = pointwise_stabilizer_algebra(&spec, &generator, &t).unwrap();
        for a in stab.elements() {
            for v in p.vectors() {
                assert!((a * v).norm() < 1e-8, "{spec}: stabilizer acts on P");
            }
        }
    }
}

#[test]
fn def2_summands_tile_the_complement() {
    let t = tols();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = GroupSpec::sp(2);
    let x = random_unit(&mut rng, 8);
    let p = line(x);
    let report = def2_special(&spec, &p, &[], &t, 1234).unwrap();
    let summands: Vec<&SubspaceBasis> = report
        .candidates
        .iter()
        .map(|c| c.summand.as_ref().unwrap())
        .collect();
    let total: usize = summands.iter().map(|s| s.dim()).sum();
    assert_eq!(total, 7, "summand dimensions tile the complement");
    for (i, a) in summands.iter().enumerate() {
        for b in summands.iter().skip(i + 1) {
            for va in a.vectors() {
                for vb in b.vectors() {
                    assert!(va.dot(vb).abs() < 1e-8, "summands pairwise orthogonal");
                }
            }
        }
        for c in &report.candidates {
            assert!(c.certificate.unwrap() < t.cert_tol, "certificates valid");
        }
    }
}

#[test]
fn complement_splits_under_line_stabilizers() {
    // The complement of span{x, Ix} under the pointwise stabilizer of
    // span{x} in u(3) is one irreducible 4-dimensional piece; the complement
    // of span{x} under the setwise stabilizer of span{x} in the Sp(2)U(1)
    // algebra splits into pieces of dimensions {1, 2, 4}.
    let t = tols();
    let mut rng = ChaCha8Rng::seed_from_u64(12);

    let spec = GroupSpec::u(3);
    let x = random_unit(&mut rng, 6);
    let i_op = build_structures(&spec).operator("I").unwrap().clone();
    let p_line = line(x.clone());
    let stab = pointwise_stabilizer_algebra(&spec, &p_line, &t).unwrap();
    let complex_line = orthonormalize(&[x.clone(), &i_op * &x], &t).unwrap();
    let complement = complex_line.complement(&t);
    let pieces = holonomy_forge::linalg::invariant_complement_split(
        &complement,
        stab.elements(),
        &t,
        &mut rng,
    )
    .unwrap();
    let dims: Vec<usize> = pieces.iter().map(|p| p.basis.dim()).collect();
    assert_eq!(dims, vec![4]);

    let spec = GroupSpec::sp_u1(2);
    let x = random_unit(&mut rng, 8);
    let p_line = line(x);
    let stab =
        holonomy_forge::liealg::setwise_stabilizer_algebra(&spec, &p_line, &t).unwrap();
    let complement = p_line.complement(&t);
    let pieces = holonomy_forge::linalg::invariant_complement_split(
        &complement,
        stab.elements(),
        &t,
        &mut rng,
    )
    .unwrap();
    let dims: Vec<usize> = pieces.iter().map(|p| p.basis.dim()).collect();
    assert_eq!(dims, vec![1, 2, 4]);
}

#[test]
fn membership_closed_under_products() {
    let t = tols();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let specs = [
        GroupSpec::u(3),
        GroupSpec::sp(2),
        GroupSpec::sp_sp1(2),
        GroupSpec::g2(),
        GroupSpec::spin9(),
    ];
    for spec in specs {
        let alg = algebra_basis(&spec, &t).unwrap();
        for _ in 0..20 {
            let mut element = || {
                let coeffs: Vec<f64> =
                    (0..alg.dim()).map(|_| rng.random_range(-0.7..0.7)).collect();
                exp_element(&alg.combination(&coeffs), 1.0).unwrap()
            };
            let g1 = element();
            let g2 = element();
            assert!(is_member(&spec, &g1, 1e-8).unwrap());
            assert!(is_member(&spec, &g2, 1e-8).unwrap());
            assert!(is_member(&spec, &(&g1 * &g2), 1e-7).unwrap(), "{spec}");
        }
    }
}

#[test]
fn closed_form_second_coordinate_identity_across_radii() {
    // The transported velocity's second coordinate at 2*pi equals
    // r cos(2 pi sqrt(1-r^2)) for every radius.
    for k in 1..20 {
        let r = k as f64 / 20.0;
        let s = (1.0 - r * r).sqrt();
        let x = closed_form_x(r, 2.0 * std::f64::consts::PI, 6).unwrap();
        let expected = r * (2.0 * std::f64::consts::PI * s).cos();
        assert!((x[1] - expected).abs() < 1e-12, "r = {r}");
    }
}
