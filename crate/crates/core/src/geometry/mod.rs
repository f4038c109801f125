//! Parametric immersed manifolds with analytic jets.

pub mod contact;
pub mod immersion;
pub mod jet;
pub mod perturb;
pub mod shape;
pub mod sphere;

pub use contact::{j1_sphere_chart, j1_sphere_inverse, ContactElement};
pub use immersion::{orthogonal_complement, Chart, ChartPoint, Immersion};
pub use jet::{ScalarJet, VectorJet};
pub use shape::{PerturbSpec, ShapeKind, ShapeSpec};

/// Builds the immersion described by `spec`.
pub fn build_shape(spec: &ShapeSpec) -> crate::Result<Immersion> {
    Immersion::new(spec)
}
