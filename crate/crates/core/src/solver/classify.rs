//! Passing/counterpassing classification and Morse data of double normals.

use nalgebra::DMatrix;

use super::newton::sorted_eigenvalues;
use super::residual::pair_system;
use super::{DoubleNormal, PassingClass};
use crate::geometry::{ChartPoint, Immersion};
use crate::{Error, Result};

/// Below this, a co-orientation counts as perpendicular to the chord.
const PARALLEL_TOL: f64 = 1e-10;

/// Compares the co-orientations at both endpoints along `u = (p1 - p2) / l`.
pub fn classify_passing(imm: &Immersion, dn: &DoubleNormal) -> Result<PassingClass> {
    if !imm.is_co_oriented() {
        return Ok(PassingClass::Unclassified);
    }
    let u = dn.direction();
    let along = |chart: usize, xi: &[f64]| -> Result<f64> {
        let nu = imm.co_orientation(chart, xi)?;
        let s: f64 = nu.iter().zip(&u).map(|(a, b)| a * b).sum();
        if s.abs() < PARALLEL_TOL {
            return Err(Error::InconsistentDoubleNormal(s));
        }
        Ok(s)
    };
    let s1 = along(dn.chart1, &dn.xi1)?;
    let s2 = along(dn.chart2, &dn.xi2)?;
    Ok(if s1 * s2 > 0.0 {
        PassingClass::Passing
    } else {
        PassingClass::Counterpassing
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseData {
    /// Number of negative eigenvalues of the Hessian of `g`.
    pub index: usize,
    pub nondegenerate: bool,
    pub min_abs_eigenvalue: f64,
    pub hessian_norm: f64,
}

/// Morse data of a symmetric Hessian with relative degeneracy threshold `eta`.
pub fn morse_data_of(hessian: &DMatrix<f64>, eta: f64) -> MorseData {
    let ev = sorted_eigenvalues(hessian);
    let norm = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_abs = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    MorseData {
        index: ev.iter().filter(|&&v| v < 0.0).count(),
        nondegenerate: min_abs >= eta * norm && norm > 0.0,
        min_abs_eigenvalue: min_abs,
        hessian_norm: norm,
    }
}

/// Morse data of `g` at the double normal `dn`.
pub fn morse_data(imm: &Immersion, dn: &DoubleNormal, eta: f64) -> Result<MorseData> {
    let a = ChartPoint { chart: dn.chart1, xi: dn.xi1.clone() };
    let b = ChartPoint { chart: dn.chart2, xi: dn.xi2.clone() };
    Ok(morse_data_of(&pair_system(imm, &a, &b)?.hessian, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;
    use std::f64::consts::PI;

    fn normal(imm: &Immersion, a: ChartPoint, b: ChartPoint) -> DoubleNormal {
        let (p1, p2) = (imm.point(a.chart, &a.xi).unwrap(), imm.point(b.chart, &b.xi).unwrap());
        DoubleNormal {
            chart1: a.chart,
            xi1: a.xi,
            chart2: b.chart,
            xi2: b.xi,
            length: (&p1 - &p2).norm(),
            p1: p1.iter().copied().collect(),
            p2: p2.iter().copied().collect(),
            residual: 0.0,
            index: None,
            nondegenerate: false,
            class: PassingClass::Unclassified,
        }
    }

    #[test]
    fn tube_outer_antipodes_counterpass_and_inner_outer_pass() {
        let imm = Immersion::new(&"tube(n=1,k=1,r=0.5)".parse::<ShapeSpec>().unwrap()).unwrap();
        let outer = normal(
            &imm,
            ChartPoint { chart: 0, xi: vec![0.0, 0.0] },
            ChartPoint { chart: 0, xi: vec![PI, 0.0] },
        );
        assert_eq!(classify_passing(&imm, &outer).unwrap(), PassingClass::Counterpassing);
        // p1 = (0.5, 0, 0) on the inner equator, p2 = (-1.5, 0, 0) on the outer one
        let mixed = normal(
            &imm,
            ChartPoint { chart: 0, xi: vec![0.0, PI] },
            ChartPoint { chart: 0, xi: vec![PI, 0.0] },
        );
        assert!((mixed.p1[0] - 0.5).abs() < 1e-15 && (mixed.p2[0] + 1.5).abs() < 1e-15);
        assert_eq!(classify_passing(&imm, &mixed).unwrap(), PassingClass::Passing);
    }

    #[test]
    fn clifford_is_unclassified() {
        let imm = Immersion::new(&"clifford(r1=1,r2=1.5)".parse::<ShapeSpec>().unwrap()).unwrap();
        let dn = normal(
            &imm,
            ChartPoint { chart: 0, xi: vec![0.0, 0.0] },
            ChartPoint { chart: 0, xi: vec![PI, PI] },
        );
        assert_eq!(classify_passing(&imm, &dn).unwrap(), PassingClass::Unclassified);
    }

    #[test]
    fn tangent_chord_is_inconsistent() {
        let imm = Immersion::new(&"tube(n=1,k=1,r=0.5)".parse::<ShapeSpec>().unwrap()).unwrap();
        // top circle points: normals (0,0,1) are perpendicular to the chord
        let dn = normal(
            &imm,
            ChartPoint { chart: 0, xi: vec![0.0, PI / 2.0] },
            ChartPoint { chart: 0, xi: vec![PI, PI / 2.0] },
        );
        assert!(matches!(
            classify_passing(&imm, &dn),
            Err(Error::InconsistentDoubleNormal(_))
        ));
    }

    #[test]
    fn ellipsoid_long_axis_is_a_maximum_and_sphere_is_degenerate() {
        let imm = Immersion::new(&"ellipsoid(1,1.3,1.7)".parse::<ShapeSpec>().unwrap()).unwrap();
        let dn = normal(
            &imm,
            imm.chart_point_of(&[vec![0.0, 0.0, -1.0]]),
            imm.chart_point_of(&[vec![0.0, 0.0, 1.0]]),
        );
        let m = morse_data(&imm, &dn, 1e-6).unwrap();
        assert_eq!(m.index, 4);
        assert!(m.nondegenerate);

        let sphere = Immersion::new(&"sphere(n=2,r=1)".parse::<ShapeSpec>().unwrap()).unwrap();
        let dn = normal(
            &sphere,
            sphere.chart_point_of(&[vec![0.6, 0.0, 0.8]]),
            sphere.chart_point_of(&[vec![-0.6, 0.0, -0.8]]),
        );
        assert!(!morse_data(&sphere, &dn, 1e-6).unwrap().nondegenerate);
    }
}
