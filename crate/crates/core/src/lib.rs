//! Double normals (diameters) of parametrically immersed closed manifolds.
//!
//! The crate is split into four layers:
//!
//! * [`homology`]: exact cellular chain complexes over GF(2) and Z, product
//!   complexes, the swap-involution quotient `(S^N x M x M)/iota`, and integer
//!   torsion through Smith normal form.
//! * [`geometry`]: built-in parametric shapes with analytic first and second
//!   derivatives, normal frames, co-orientations, seeded normal perturbations
//!   and the `J^1 S^n = ST^* R^{n+1}` coordinate map.
//! * [`solver`]: multi-start damped Newton search for the critical points of
//!   `g(x, y) = |f(x) - f(y)|^2 / 2`, deduplication modulo the swap involution,
//!   Morse data, passing/counterpassing classification, Bott-family clustering
//!   and an independent brute-force grid oracle.
//! * [`bounds`]: closed-form lower bounds on the number of double normals
//!   in terms of Betti numbers.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod homology;
pub mod solver;

pub use error::{Error, Result};
