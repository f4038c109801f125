//! The identification of `J^1 S^n` with co-oriented contact elements of
//! `R^{n+1}`.
//!
//! A 1-jet `(u, q, p)` with `q ∈ S^n` and cotangent vector `p ⊥ q` becomes
//! the hyperplane orthogonal to `q` placed at `u q + p`, co-oriented by `q`.

use nalgebra::DVector;

use crate::{Error, Result};

const TOL: f64 = 1e-12;

/// A co-oriented contact element: base point and unit conormal.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactElement {
    pub point: DVector<f64>,
    pub conormal: DVector<f64>,
}

/// `(u, q, p) -> (u q + p, q)`.
pub fn j1_sphere_chart(u: f64, q: &DVector<f64>, p: &DVector<f64>) -> Result<ContactElement> {
    if q.len() != p.len() {
        return Err(Error::InvalidArgument("q and p must have equal length".into()));
    }
    if (q.norm() - 1.0).abs() > TOL {
        return Err(Error::InvalidArgument(format!("|q| = {} is not 1", q.norm())));
    }
    let pq = p.dot(q);
    if pq.abs() > TOL {
        return Err(Error::InvalidCotangentVector(pq));
    }
    Ok(ContactElement {
        point: q * u + p,
        conormal: q.clone(),
    })
}

/// Inverse map `(x, nu) -> (u = <x, nu>, q = nu, p = x - u nu)`.
pub fn j1_sphere_inverse(element: &ContactElement) -> Result<(f64, DVector<f64>, DVector<f64>)> {
    let nu = &element.conormal;
    if (nu.norm() - 1.0).abs() > TOL {
        return Err(Error::InvalidArgument("conormal must be a unit vector".into()));
    }
    let u = element.point.dot(nu);
    let p = &element.point - nu * u;
    Ok((u, nu.clone(), p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_elements() {
        let q = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let zero = DVector::zeros(3);
        let e = j1_sphere_chart(0.0, &q, &zero).unwrap();
        assert_eq!(e.point, zero);
        assert_eq!(e.conormal, q);
        let e = j1_sphere_chart(1.0, &q, &zero).unwrap();
        assert_eq!(e.point, q);
    }

    #[test]
    fn rejects_non_cotangent() {
        let q = DVector::from_vec(vec![0.0, 1.0]);
        let p = DVector::from_vec(vec![0.5, 1e-6]);
        assert!(matches!(
            j1_sphere_chart(0.3, &q, &p),
            Err(Error::InvalidCotangentVector(_))
        ));
    }
}
