//! Property tests of the kernel contracts: orthonormality of produced bases,
//! nullspace correctness, transport isometry, cross-product identities.

use holonomy_forge::linalg::{nullspace, orthonormalize, Tolerances};
use holonomy_forge::structures::cross_product;
use holonomy_forge::transport::{transport_many, LoopSpec};
use nalgebra::DVector;
use proptest::prelude::*;

fn vector(dim: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-3.0f64..3.0, dim).prop_map(DVector::from_vec)
}

fn vectors(dim: usize, max_count: usize) -> impl Strategy<Value = Vec<DVector<f64>>> {
    prop::collection::vec(vector(dim), 1..=max_count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthonormalize_output_is_orthonormal(inputs in vectors(6, 8)) {
        let tols = Tolerances::default();
        let basis = orthonormalize(&inputs, &tols).unwrap();
        prop_assert!(basis.orthonormality_defect() < 10.0 * tols.rank_tol);
        prop_assert!(basis.dim() <= inputs.len().min(6));
        // Every input lies in the produced span.
        for v in &inputs {
            let residual = basis.project_off(v).norm();
            prop_assert!(residual < 1e-7 * v.norm().max(1.0));
        }
    }

    #[test]
    fn nullspace_annihilates_rows(rows in vectors(5, 4)) {
        let tols = Tolerances::default();
        let null = nullspace(&rows, 5, &tols).unwrap();
        prop_assert!(null.orthonormality_defect() < 10.0 * tols.rank_tol);
        for row in &rows {
            for v in null.vectors() {
                prop_assert!(row.dot(v).abs() < 1e-7 * row.norm().max(1.0));
            }
        }
        // Generic random rows are independent: rank-nullity fixes the size.
        let span = orthonormalize(&rows, &tols).unwrap();
        prop_assert_eq!(null.dim(), 5 - span.dim());
    }

    #[test]
    fn cross_product_is_alternating_and_normed(a in vector(7), b in vector(7)) {
        let out = cross_product(&a, &b);
        prop_assert!(out.dot(&a).abs() < 1e-9 * (1.0 + a.norm_squared()) * (1.0 + b.norm()));
        prop_assert!(out.dot(&b).abs() < 1e-9 * (1.0 + b.norm_squared()) * (1.0 + a.norm()));
        let lhs = out.norm_squared();
        let rhs = a.norm_squared() * b.norm_squared() - a.dot(&b).powi(2);
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transport_preserves_inner_products(
        r in 0.15f64..0.9,
        raw_a in vector(7),
        raw_b in vector(7),
    ) {
        let loop_spec = LoopSpec::small_circle(r, 6).unwrap();
        let base = loop_spec.position(0.0);
        let tangent = |raw: &DVector<f64>| {
            let mut v = raw.clone();
            v.axpy(-v.dot(&base), &base, 1.0);
            v
        };
        let a = tangent(&raw_a);
        let b = tangent(&raw_b);
        let runs = transport_many(&loop_spec, &[a.clone(), b.clone()], 4000).unwrap();
        let before = a.dot(&b);
        let after = runs[0].vector.dot(&runs[1].vector);
        prop_assert!((before - after).abs() < 1e-6 * (1.0 + before.abs()));
        prop_assert!(runs[0].norm_drift < 1e-7 * (1.0 + a.norm()));
    }
}
