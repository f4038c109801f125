use std::f64::consts::PI;

use dnormal_core::bounds::diameter_bound;
use dnormal_core::geometry::{build_shape, ChartPoint, Immersion, ShapeSpec};
use dnormal_core::homology::{sphere, torus};
use dnormal_core::solver::search::seed_pairs;
use dnormal_core::solver::{
    brute_force_oracle, critical_residual, find_double_normals, find_double_normals_from_seeds,
    newton_refine, NewtonStatus, OracleConfig, PassingClass, SolveResult, SolverConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ELLIPSOID: &str = "ellipsoid(1,1.3,1.7)";
const PERTURBED_TUBE: &str = "tube(n=1,k=1,r=0.5)+perturb(a=0.01,w=3,seed=42)";

fn shape(s: &str) -> Immersion {
    build_shape(&s.parse::<ShapeSpec>().unwrap()).unwrap()
}

fn config(seeds: usize) -> SolverConfig {
    SolverConfig {
        seed_count: seeds,
        ..SolverConfig::default()
    }
}

fn assert_perpendicular(imm: &Immersion, result: &SolveResult) {
    for d in &result.diameters {
        let u = nalgebra::DVector::from_vec(d.direction());
        for (chart, xi) in [(d.chart1, &d.xi1), (d.chart2, &d.xi2)] {
            let jac = imm.jet(chart, xi).unwrap().jac;
            for col in jac.column_iter() {
                let c = col.normalize().dot(&u);
                assert!(c.abs() < 1e-8, "{}: <t, u> = {c:e}", result.shape);
            }
        }
    }
}

#[test]
fn residual_examples() {
    let ell = shape(ELLIPSOID);
    let top = ell.chart_point_of(&[vec![0.0, 0.0, 1.0]]);
    let bottom = ell.chart_point_of(&[vec![0.0, 0.0, -1.0]]);
    assert!(critical_residual(&ell, &top, &bottom).unwrap().amax() < 1e-14);

    let tube = shape("tube(n=1,k=1,r=0.5)");
    let a = ChartPoint { chart: 0, xi: vec![0.0, 0.0] };
    let b = ChartPoint { chart: 0, xi: vec![PI, 0.0] };
    assert!(critical_residual(&tube, &a, &b).unwrap().amax() < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (p, q) = (ell.sample(&mut rng), ell.sample(&mut rng));
        assert!(critical_residual(&ell, &p, &q).unwrap().norm() > 1e-3);
    }
}

#[test]
fn newton_examples() {
    let ell = shape(ELLIPSOID);
    let cfg = SolverConfig::default();
    let top = ell.chart_point_of(&[vec![0.0, 0.0, 1.0]]);
    let bottom = ell.chart_point_of(&[vec![0.0, 0.0, -1.0]]);
    let exact = newton_refine(&ell, (top.clone(), bottom), &cfg);
    assert_eq!(exact.status, NewtonStatus::Converged);
    assert_eq!((exact.iterations, exact.last_step), (1, 0.0));

    let near = ChartPoint { chart: bottom_chart(&ell), xi: vec![0.006, -0.004] };
    let start = ChartPoint { chart: top.chart, xi: vec![0.005, 0.008] };
    let r = newton_refine(&ell, (start, near), &cfg);
    assert_eq!(r.status, NewtonStatus::Converged);
    let h = &r.residual_history;
    let (r0, r1) = (h[h.len() - 3], h[h.len() - 2]);
    assert!(r1 <= 10.0 * r0 * r0, "not quadratic: {h:?}");

    let diag = newton_refine(&ell, (top.clone(), top), &cfg);
    assert_eq!(diag.status, NewtonStatus::ExcludedDiagonal);
}

fn bottom_chart(imm: &Immersion) -> usize {
    imm.chart_point_of(&[vec![0.0, 0.0, -1.0]]).chart
}

#[test]
fn ellipsoid_principal_axes() {
    let imm = shape(ELLIPSOID);
    let result = find_double_normals(&imm, &SolverConfig::default()).unwrap();
    let lengths: Vec<f64> = result.diameters.iter().map(|d| d.length).collect();
    assert_eq!(lengths.len(), 3, "{lengths:?}");
    for (l, expect) in lengths.iter().zip([2.0, 2.6, 3.4]) {
        assert!((l - expect).abs() < 1e-8);
    }
    let indices: Vec<Option<usize>> = result.diameters.iter().map(|d| d.index).collect();
    assert_eq!(indices, vec![Some(2), Some(3), Some(4)]);
    for d in &result.diameters {
        assert_eq!(d.class, PassingClass::Counterpassing);
        // endpoints on a coordinate axis
        let off_axis = d.p1.iter().filter(|v| v.abs() > 1e-8).count();
        assert_eq!(off_axis, 1, "{:?}", d.p1);
    }
    assert!(result.bott_clusters.is_empty());
    assert_perpendicular(&imm, &result);
    let bound = diameter_bound(sphere(2).unwrap().betti_z2().unwrap().total as u64, 2);
    assert!(result.diameters.len() as u64 >= bound.count());
}

#[test]
fn higher_dimensional_ellipsoid_meets_the_sphere_bound() {
    let imm = shape("ellipsoid(1,1.2,1.4,1.6)");
    let result = find_double_normals(&imm, &config(4000)).unwrap();
    assert_eq!(result.diameters.len(), 4);
    assert_eq!(diameter_bound(2, 3).count(), 4);
    assert_perpendicular(&imm, &result);
}

#[test]
fn solver_is_deterministic() {
    let imm = shape(PERTURBED_TUBE);
    let a = find_double_normals(&imm, &config(3000)).unwrap();
    let b = find_double_normals(&imm, &config(3000)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn swapping_seed_endpoints_changes_nothing() {
    for s in [ELLIPSOID, PERTURBED_TUBE] {
        let imm = shape(s);
        let cfg = config(3000);
        let seeds = seed_pairs(&imm, cfg.seed_count, 7);
        let swapped: Vec<_> = seeds.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        let a = find_double_normals_from_seeds(&imm, &cfg, &seeds).unwrap();
        let b = find_double_normals_from_seeds(&imm, &cfg, &swapped).unwrap();
        assert_eq!(a.diameters, b.diameters, "{s}");
        assert_eq!(a.diagnostics, b.diagnostics, "{s}");
    }
}

#[test]
fn diameters_are_canonical_and_separated() {
    let imm = shape(PERTURBED_TUBE);
    let result = find_double_normals(&imm, &config(6000)).unwrap();
    let cfg = &result.config;
    for (i, d) in result.diameters.iter().enumerate() {
        assert!(d.residual < cfg.residual_tol);
        assert!(d.length > cfg.diagonal_exclusion_for(imm.extent()));
        assert!(d.p1 <= d.p2, "not in canonical order");
        for e in &result.diameters[..i] {
            assert!(d.endpoint_distance(e) >= cfg.dedup_radius);
        }
    }
    assert_perpendicular(&imm, &result);
    let b = torus(2).unwrap().betti_z2().unwrap().total as u64;
    assert!(result.diameters.len() as u64 >= diameter_bound(b, 2).count());
}

#[test]
fn round_sphere_is_one_degenerate_family() {
    let imm = shape("sphere(n=2,r=1)");
    let result = find_double_normals(&imm, &config(2000)).unwrap();
    assert!(result.diameters.is_empty(), "{:#?}", result.diameters);
    assert_eq!(result.bott_clusters.len(), 1, "{:?}", result.bott_clusters);
    assert!((result.bott_clusters[0].length - 2.0).abs() < 1e-8);
    assert_eq!(result.bott_clusters[0].members, result.diagnostics.degenerate_solutions);
}

#[test]
fn unperturbed_tube_has_only_degenerate_families() {
    let imm = shape("tube(n=1,k=1,r=0.5)");
    let result = find_double_normals(&imm, &config(2000)).unwrap();
    assert!(result.diameters.is_empty(), "{:#?}", result.diameters);
    // tube diameters, inner equator, inner-to-outer and outer equator chords
    let lengths: Vec<f64> = result.bott_clusters.iter().map(|c| c.length).collect();
    assert_eq!(lengths.len(), 4, "{:?}", result.bott_clusters);
    for (l, expect) in lengths.iter().zip([1.0, 1.0, 2.0, 3.0]) {
        assert!((l - expect).abs() < 1e-8, "{lengths:?}");
    }
}

#[test]
fn json_layout() {
    let imm = shape(ELLIPSOID);
    let result = find_double_normals(&imm, &config(500)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&result.to_json()).unwrap();
    for key in ["shape", "config", "diameters", "bott_clusters", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let d = &v["diameters"][0];
    for key in ["xi1", "xi2", "p1", "p2", "length", "residual", "index", "nondegenerate", "class"] {
        assert!(d.get(key).is_some(), "missing diameter field {key}");
    }
    assert_eq!(v["shape"], ELLIPSOID);
    let csv = result.to_csv();
    assert_eq!(csv.lines().count(), 1 + result.diameters.len());
}

#[test]
fn invalid_config_is_rejected() {
    let imm = shape(ELLIPSOID);
    assert!(find_double_normals(&imm, &config(0)).is_err());
}

#[test]
fn oracle_agrees_with_the_solver_on_an_ellipse() {
    let imm = shape("ellipsoid(1,1.5)");
    let oracle = brute_force_oracle(&imm, &OracleConfig { density: 150, ..OracleConfig::default() }).unwrap();
    let solved = find_double_normals(&imm, &config(2000)).unwrap();
    assert_eq!(oracle.count, solved.diameters.len());
    assert_eq!(oracle.four_to_one(), Some(true));
}

#[test]
fn oracle_rejects_three_manifolds() {
    let imm = shape("ellipsoid(1,1.2,1.4,1.6)");
    assert!(brute_force_oracle(&imm, &OracleConfig::default()).is_err());
}
