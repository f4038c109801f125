//! Which cell complexes describe the topology of which shapes.
//!
//! The table is explicit: a shape kind lists the complexes accepted as its
//! homology source, the first being the default. Any other pairing is
//! rejected rather than guessed.

use dnormal_core::geometry::{ShapeKind, ShapeSpec};
use dnormal_core::homology::ComplexKind;

use crate::CliError;

fn sphere(n: usize) -> ComplexKind {
    ComplexKind::Sphere(n as i64)
}

/// Accepted homology sources for `shape`, default first.
pub fn accepted_complexes(shape: &ShapeSpec) -> Vec<ComplexKind> {
    match &shape.kind {
        ShapeKind::Ellipsoid { semiaxes } => vec![sphere(semiaxes.len() - 1)],
        ShapeKind::RoundSphere { n, .. } => vec![sphere(*n)],
        ShapeKind::TorusOfRevolution { .. } | ShapeKind::CliffordTorus { .. } => vec![
            ComplexKind::Torus(2),
            ComplexKind::Product(Box::new(sphere(1)), Box::new(sphere(1))),
        ],
        ShapeKind::TubeAroundSphere { n, k, .. } => {
            let mut v = vec![ComplexKind::Product(Box::new(sphere(*n)), Box::new(sphere(*k)))];
            if (*n, *k) == (1, 1) {
                v.push(ComplexKind::Torus(2));
            }
            v
        }
    }
}

/// The declared source if the table accepts it, otherwise the default.
pub fn resolve_homology(shape: &ShapeSpec, declared: Option<&ComplexKind>) -> Result<ComplexKind, CliError> {
    let accepted = accepted_complexes(shape);
    match declared {
        None => Ok(accepted[0].clone()),
        Some(c) if accepted.contains(c) => Ok(c.clone()),
        Some(c) => Err(CliError::Incompatible {
            shape: shape.to_string(),
            complex: c.to_string(),
            accepted: accepted.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "),
        }),
    }
}

/// Total Z2 Betti number of the submanifold `L` when the shape is the
/// boundary of a tubular neighbourhood of `L`, i.e. the front of its unit
/// conormal bundle. Tubes and tori of revolution surround a sphere (`B_L = 2`).
pub fn front_core_betti(shape: &ShapeSpec) -> Option<u64> {
    match shape.kind {
        ShapeKind::TubeAroundSphere { .. } | ShapeKind::TorusOfRevolution { .. } => Some(2),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> ShapeSpec {
        s.parse().unwrap()
    }

    #[test]
    fn table_entries() {
        let c = |s: &str| s.parse::<ComplexKind>().unwrap();
        assert_eq!(resolve_homology(&spec("ellipsoid(1,1.3,1.7)"), None).unwrap(), c("sphere(2)"));
        assert_eq!(resolve_homology(&spec("ellipsoid(1,2,3,4)"), None).unwrap(), c("sphere(3)"));
        let tube = spec("tube(n=1,k=1,r=0.5)+perturb(a=0.01,w=3,seed=42)");
        assert_eq!(resolve_homology(&tube, None).unwrap(), c("sphere(1)*sphere(1)"));
        assert!(resolve_homology(&tube, Some(&c("torus(2)"))).is_ok());
        assert!(resolve_homology(&spec("tube(n=2,k=1)"), Some(&c("torus(2)"))).is_err());
        assert_eq!(resolve_homology(&spec("torus(R=2,r=1)"), None).unwrap(), c("torus(2)"));
        assert!(resolve_homology(&spec("sphere(n=2)"), Some(&c("projective(2)"))).is_err());
    }

    #[test]
    fn front_cores() {
        assert_eq!(front_core_betti(&spec("tube(n=1,k=1)")), Some(2));
        assert_eq!(front_core_betti(&spec("ellipsoid(1,2,3)")), None);
        assert_eq!(front_core_betti(&spec("clifford(1,1)")), None);
    }
}
