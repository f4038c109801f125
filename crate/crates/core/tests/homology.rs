use dnormal_core::homology::{
    build_named_complex, interval, point, projective, sphere, surface, swap_quotient, torus,
    CellComplex, ComplexKind,
};
use proptest::prelude::*;

fn named(s: &str) -> CellComplex {
    build_named_complex(&s.parse::<ComplexKind>().unwrap()).unwrap()
}

fn total(c: &CellComplex) -> usize {
    c.betti_z2().unwrap().total
}

/// The complexes whose quotient identity is checked exhaustively.
const QUOTIENT_SUITE: &[&str] = &[
    "sphere(1)",
    "sphere(2)",
    "torus(2)",
    "torus(3)",
    "surface(2)",
    "projective(2)",
    "projective(3)",
];

fn small_kind() -> impl Strategy<Value = ComplexKind> {
    prop_oneof![
        (0i64..=4).prop_map(ComplexKind::Sphere),
        (0i64..=3).prop_map(ComplexKind::Torus),
        (0i64..=3).prop_map(ComplexKind::Surface),
        (0i64..=4).prop_map(ComplexKind::Projective),
        Just(ComplexKind::Point),
        Just(ComplexKind::Interval),
    ]
}

#[test]
fn builder_examples() {
    let s2 = named("sphere(2)");
    assert_eq!(s2.cell_counts(), &[1, 0, 1]);
    assert_eq!(s2.betti_z2().unwrap().b, vec![1, 0, 1]);
    assert_eq!(total(&s2), 2);

    let rp3 = named("projective(3)");
    assert_eq!(rp3.cell_counts(), &[1, 1, 1, 1]);
    assert_eq!(rp3.betti_z2().unwrap().b, vec![1, 1, 1, 1]);

    let s = named("surface(2)");
    assert_eq!(s.cell_counts(), &[1, 4, 1]);
    assert_eq!(total(&s), 6);

    assert_eq!(interval().betti_z2().unwrap().b, vec![1, 0]);
}

#[test]
fn product_examples() {
    let t2 = sphere(1).unwrap().product(&sphere(1).unwrap()).unwrap();
    assert_eq!(t2.cell_counts(), &[1, 2, 1]);
    assert_eq!(total(&t2), 4);

    let s1s2 = sphere(1).unwrap().product(&sphere(2).unwrap()).unwrap();
    assert_eq!(s1s2.cell_counts(), &[1, 1, 1, 1]);
    assert_eq!(total(&s1s2), 4);

    let x = surface(1).unwrap();
    let px = point().product(&x).unwrap();
    assert_eq!(px.cell_counts(), x.cell_counts());
    assert_eq!(px.betti_z2().unwrap(), x.betti_z2().unwrap());
}

#[test]
fn torsion_examples() {
    assert_eq!(projective(2).unwrap().torsion_generators().unwrap().q, vec![0, 1, 0]);
    assert_eq!(projective(3).unwrap().torsion_generators().unwrap().q, vec![0, 1, 0, 0]);
    for n in 0..=6 {
        let q = sphere(n).unwrap().torsion_generators().unwrap().q;
        assert!(q.iter().all(|&v| v == 0), "sphere({n}): {q:?}");
    }
}

#[test]
fn projective_torsion_sits_in_odd_degrees_below_the_top() {
    for n in 1..=8usize {
        let q = projective(n).unwrap().torsion_generators().unwrap().q;
        for (d, &v) in q.iter().enumerate() {
            let expect = usize::from(d % 2 == 1 && d < n);
            assert_eq!(v, expect, "projective({n}) degree {d}");
        }
    }
}

#[test]
fn quotient_examples() {
    for n in 1..=6 {
        let q = swap_quotient(&point(), n).unwrap();
        assert_eq!(total(&q.complex), n + 1, "point, N = {n}");
    }
    assert_eq!(total(&swap_quotient(&sphere(1).unwrap(), 2).unwrap().complex), 8);
    assert_eq!(total(&swap_quotient(&torus(2).unwrap(), 3).unwrap().complex), 28);
    assert!(swap_quotient(&surface(2).unwrap(), 4).unwrap().complex.verify_boundary_squared());
    assert!(swap_quotient(&sphere(1).unwrap(), 0).is_err());
}

#[test]
fn quotient_identity_on_the_suite() {
    for s in QUOTIENT_SUITE {
        let m = named(s);
        let b = total(&m);
        for n in 1..=4 {
            let q = swap_quotient(&m, n).unwrap();
            assert!(q.complex.verify_boundary_squared());
            assert_eq!(total(&q.complex), b * b + n * b, "{s}, N = {n}");
        }
    }
}

#[test]
fn quotient_sphere_grades_for_zero_boundary() {
    // every suite complex has vanishing boundary over GF(2), so the grading
    // by sphere-cell dimension splits the homology
    for s in QUOTIENT_SUITE {
        let m = named(s);
        let b = total(&m);
        for n in 1..=4 {
            let graded = swap_quotient(&m, n).unwrap().sphere_graded_betti().unwrap();
            assert_eq!(graded.len(), n + 1);
            assert_eq!(graded[n], (b * b + b) / 2, "{s}, N = {n}: top grade");
            for (k, &v) in graded.iter().enumerate().take(n).skip(1) {
                assert_eq!(v, b, "{s}, N = {n}: grade {k}");
            }
            assert_eq!(graded.iter().sum::<usize>(), b * b + n * b);
        }
    }
    let q = swap_quotient(&sphere(1).unwrap(), 2).unwrap();
    assert_eq!(q.sphere_graded_betti().unwrap()[2], 3);
}

#[test]
fn sphere_grading_refuses_nonzero_boundary() {
    let q = swap_quotient(&interval(), 2).unwrap();
    assert!(q.sphere_graded_betti().is_err());
}

#[test]
fn complex_json_roundtrip() {
    for s in QUOTIENT_SUITE {
        let c = named(s);
        assert_eq!(CellComplex::from_json(&c.to_json()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn builders_square_to_zero(kind in small_kind()) {
        prop_assert!(kind.build().unwrap().verify_boundary_squared());
    }

    #[test]
    fn kunneth_over_gf2(a in small_kind(), b in small_kind()) {
        let (ca, cb) = (a.build().unwrap(), b.build().unwrap());
        let prod = ca.product(&cb).unwrap();
        prop_assert!(prod.verify_boundary_squared());
        prop_assert_eq!(total(&prod), total(&ca) * total(&cb));
    }

    #[test]
    fn trivial_bundles_over_projective_and_sphere_fibres(base in small_kind(), k in 0usize..=4) {
        let b = base.build().unwrap();
        let bt = total(&b);
        let over_rp = b.product(&projective(k).unwrap()).unwrap();
        prop_assert_eq!(total(&over_rp), (k + 1) * bt);
        if k >= 1 {
            let over_s = b.product(&sphere(k).unwrap()).unwrap();
            prop_assert_eq!(total(&over_s), 2 * bt);
        }
    }

    #[test]
    fn quotient_identity(kind in small_kind(), n in 1usize..=5) {
        let m = kind.build().unwrap();
        let b = total(&m);
        let q = swap_quotient(&m, n).unwrap();
        prop_assert!(q.complex.verify_boundary_squared());
        prop_assert_eq!(total(&q.complex), b * b + n * b);
    }

    #[test]
    fn betti_numbers_bounded_by_cell_counts(kind in small_kind()) {
        let c = kind.build().unwrap();
        let betti = c.betti_z2().unwrap();
        prop_assert_eq!(betti.total, betti.b.iter().sum::<usize>());
        for (d, &v) in betti.b.iter().enumerate() {
            prop_assert!(v <= c.cell_count(d));
        }
    }

    #[test]
    fn products_with_spheres_add_no_torsion(n in 0usize..=4, m in 0usize..=3) {
        let c = sphere(n).unwrap().product(&torus(m).unwrap()).unwrap();
        let q = c.torsion_generators().unwrap().q;
        prop_assert!(q.iter().all(|&v| v == 0));
    }
}
