//! Exact cellular homology over GF(2) and Z.

pub mod complex;
pub mod gf2;
pub mod quotient;
pub mod snf;

pub use complex::{
    interval, point, projective, sphere, surface, torus, BettiVector, CellComplex, ComplexDocument,
    ComplexKind, TorsionVector,
};
pub use gf2::BitMatrix;
pub use quotient::{swap_quotient, SwapQuotient};
pub use snf::IntMatrix;

/// Builds one of the named minimal CW complexes.
pub fn build_named_complex(kind: &ComplexKind) -> crate::Result<CellComplex> {
    kind.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_examples() {
        let s2 = sphere(2).unwrap();
        assert_eq!(s2.cell_counts(), &[1, 0, 1]);
        assert_eq!(s2.betti_z2().unwrap().b, vec![1, 0, 1]);

        let rp3 = projective(3).unwrap();
        assert_eq!(rp3.cell_counts(), &[1, 1, 1, 1]);
        assert!((1..=3).all(|d| rp3.boundary_z2(d).unwrap().is_zero()));
        assert_eq!(rp3.betti_z2().unwrap().total, 4);

        let s = surface(2).unwrap();
        assert_eq!(s.cell_counts(), &[1, 4, 1]);
        assert_eq!(s.betti_z2().unwrap().total, 6);

        assert_eq!(interval().betti_z2().unwrap().b, vec![1, 0]);
    }

    #[test]
    fn negative_parameters_rejected() {
        for kind in [
            ComplexKind::Sphere(-1),
            ComplexKind::Torus(-2),
            ComplexKind::Surface(-1),
            ComplexKind::Projective(-3),
        ] {
            assert!(matches!(kind.build(), Err(crate::Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["sphere(2)", "torus(3)", "point", "interval", "sphere(1)*sphere(2)"] {
            let k: ComplexKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("klein(2)".parse::<ComplexKind>().is_err());
        assert!("sphere(x)".parse::<ComplexKind>().is_err());
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(projective(2).unwrap().torsion_generators().unwrap().q, vec![0, 1, 0]);
        assert_eq!(projective(3).unwrap().torsion_generators().unwrap().q, vec![0, 1, 0, 0]);
        for n in 0..=6 {
            let q = sphere(n).unwrap().torsion_generators().unwrap().q;
            assert!(q.iter().all(|&v| v == 0));
        }
        let q = swap_quotient(&point(), 2).unwrap().complex;
        assert!(matches!(
            q.torsion_generators(),
            Err(crate::Error::Unsupported(_))
        ));
    }

    #[test]
    fn corrupted_boundary_detected() {
        let mut c = torus(2).unwrap();
        assert!(c.verify_boundary_squared());
        // T^2 has d1 = 0 and d2 = 0; making both nonzero breaks d1 d2 = 0.
        c.boundary_z2_mut(1).unwrap().set(0, 0, true);
        c.boundary_z2_mut(2).unwrap().set(0, 0, true);
        assert!(!c.verify_boundary_squared());
        assert!(c.betti_z2().is_err());
    }

    #[test]
    fn json_roundtrip_and_shape_errors() {
        let c = projective(3).unwrap().product(&interval()).unwrap();
        let back = CellComplex::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"top_dim":1,"cell_counts":[1,1],"boundaries_z2":[[[1],[0]]]}"#;
        assert!(matches!(
            CellComplex::from_json(bad),
            Err(crate::Error::InvalidComplex(_))
        ));
    }
}
