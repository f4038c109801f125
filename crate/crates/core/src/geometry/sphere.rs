//! Coordinate patches on unit spheres `S^d ⊂ R^{d+1}`.
//!
//! `S^1` uses a single periodic angle. `S^d` for `d >= 2` uses two
//! stereographic caps centred at the poles `±e_{d+1}`; each cap covers the
//! whole sphere except the opposite pole, and a point is canonically held in
//! the cap where its coordinate has norm at most one.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::jet::VectorJet;

/// Half-width of the stereographic coordinate box.
pub const STEREO_BOX: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Patch {
    /// `(cos t, sin t)`, period `2π`.
    Angle,
    /// Stereographic cap centred at `+e_{d+1}` (`north = true`) or `-e_{d+1}`.
    Stereo { north: bool },
}

impl Patch {
    pub fn options(dim: usize) -> Vec<Patch> {
        if dim == 1 {
            vec![Patch::Angle]
        } else {
            vec![Patch::Stereo { north: true }, Patch::Stereo { north: false }]
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Patch::Angle)
    }
}

/// Jet of the unit-sphere embedding for `patch` at coordinates `w`.
pub fn unit_sphere_jet(patch: Patch, w: &[f64]) -> VectorJet {
    match patch {
        Patch::Angle => {
            let (s, c) = w[0].sin_cos();
            VectorJet {
                value: DVector::from_vec(vec![c, s]),
                jac: DMatrix::from_column_slice(2, 1, &[-s, c]),
                second: vec![DVector::from_vec(vec![-c, -s])],
            }
        }
        Patch::Stereo { north } => {
            let d = w.len();
            let sign = if north { 1.0 } else { -1.0 };
            let r2: f64 = w.iter().map(|x| x * x).sum();
            let q = 1.0 + r2;
            let (iq, iq2, iq3) = (1.0 / q, 1.0 / (q * q), 1.0 / (q * q * q));

            let mut value = DVector::zeros(d + 1);
            for a in 0..d {
                value[a] = 2.0 * w[a] * iq;
            }
            value[d] = sign * (2.0 * iq - 1.0);

            let mut jac = DMatrix::zeros(d + 1, d);
            for b in 0..d {
                for a in 0..d {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    jac[(a, b)] = 2.0 * delta * iq - 4.0 * w[a] * w[b] * iq2;
                }
                jac[(d, b)] = -4.0 * sign * w[b] * iq2;
            }

            let mut second = Vec::with_capacity(d * d);
            for b in 0..d {
                for c in 0..d {
                    let dbc = if b == c { 1.0 } else { 0.0 };
                    // d_b d_c (1/q) = -2 delta_bc / q^2 + 8 w_b w_c / q^3
                    let inv_bc = -2.0 * dbc * iq2 + 8.0 * w[b] * w[c] * iq3;
                    let mut v = DVector::zeros(d + 1);
                    for a in 0..d {
                        let dab = if a == b { 1.0 } else { 0.0 };
                        let dac = if a == c { 1.0 } else { 0.0 };
                        v[a] = -4.0 * dab * w[c] * iq2 - 4.0 * dac * w[b] * iq2 + 2.0 * w[a] * inv_bc;
                    }
                    v[d] = 2.0 * sign * inv_bc;
                    second.push(v);
                }
            }
            VectorJet { value, jac, second }
        }
    }
}

/// Canonical patch and coordinates of a unit vector `x ∈ S^d`.
pub fn coordinates_of(dim: usize, x: &[f64]) -> (Patch, Vec<f64>) {
    if dim == 1 {
        return (Patch::Angle, vec![x[1].atan2(x[0]).rem_euclid(TAU)]);
    }
    let z = x[dim];
    let north = z >= 0.0;
    let denom = if north { 1.0 + z } else { 1.0 - z };
    (Patch::Stereo { north }, x[..dim].iter().map(|y| y / denom).collect())
}

/// Moves coordinates into the canonical patch: angles wrap into `[0, 2π)`,
/// stereographic coordinates with `|w| > 1` switch to the opposite cap
/// (`w -> w / |w|^2`).
pub fn recenter(patch: Patch, w: &mut [f64]) -> Patch {
    match patch {
        Patch::Angle => {
            w[0] = w[0].rem_euclid(TAU);
            patch
        }
        Patch::Stereo { north } => {
            let r2: f64 = w.iter().map(|x| x * x).sum();
            if r2 > 1.0 {
                for x in w.iter_mut() {
                    *x /= r2;
                }
                Patch::Stereo { north: !north }
            } else {
                patch
            }
        }
    }
}
