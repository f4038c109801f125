//! Gradient and Hessian of `g(x, y) = |f(x) - f(y)|^2 / 2`.
//!
//! With `d = f(x) - f(y)`, the gradient is `[J_xᵀ d; -J_yᵀ d]`. Its zeros off
//! the diagonal are exactly the pairs whose chord is perpendicular to both
//! tangent spaces. The residual used throughout is `[J_xᵀ d; J_yᵀ d]`, which
//! has the same zeros; the Hessian below is that of `g`.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{ChartPoint, Immersion};
use crate::Result;

/// Endpoints, residual and Hessian of `g` at a parameter pair.
#[derive(Debug, Clone)]
pub struct PairSystem {
    pub p1: DVector<f64>,
    pub p2: DVector<f64>,
    /// `[J_1ᵀ d; J_2ᵀ d]`, `d = p1 - p2`.
    pub residual: DVector<f64>,
    /// Gradient of `g`: `[J_1ᵀ d; -J_2ᵀ d]`.
    pub gradient: DVector<f64>,
    /// `2n x 2n` Hessian of `g`.
    pub hessian: DMatrix<f64>,
}

impl PairSystem {
    pub fn length(&self) -> f64 {
        (&self.p1 - &self.p2).norm()
    }
}

/// `[J(xi_1)ᵀ (f(xi_1) - f(xi_2)); J(xi_2)ᵀ (f(xi_1) - f(xi_2))]`.
pub fn critical_residual(imm: &Immersion, a: &ChartPoint, b: &ChartPoint) -> Result<DVector<f64>> {
    let ja = imm.jet(a.chart, &a.xi)?;
    let jb = imm.jet(b.chart, &b.xi)?;
    let d = &ja.value - &jb.value;
    let ra = ja.jac.tr_mul(&d);
    let rb = jb.jac.tr_mul(&d);
    let n = ra.len();
    Ok(DVector::from_fn(2 * n, |i, _| if i < n { ra[i] } else { rb[i - n] }))
}

/// Everything Newton and the Morse analysis need at one pair.
pub fn pair_system(imm: &Immersion, a: &ChartPoint, b: &ChartPoint) -> Result<PairSystem> {
    let ja = imm.jet(a.chart, &a.xi)?;
    let jb = imm.jet(b.chart, &b.xi)?;
    let n = imm.intrinsic_dim();
    let d = &ja.value - &jb.value;
    let ra = ja.jac.tr_mul(&d);
    let rb = jb.jac.tr_mul(&d);
    let residual = DVector::from_fn(2 * n, |i, _| if i < n { ra[i] } else { rb[i - n] });
    let gradient = DVector::from_fn(2 * n, |i, _| if i < n { ra[i] } else { -rb[i - n] });

    let mut hessian = DMatrix::zeros(2 * n, 2 * n);
    let h11 = ja.jac.tr_mul(&ja.jac);
    let h22 = jb.jac.tr_mul(&jb.jac);
    let h12 = -ja.jac.tr_mul(&jb.jac);
    for i in 0..n {
        for j in 0..n {
            hessian[(i, j)] = h11[(i, j)] + ja.d2(i, j).dot(&d);
            hessian[(n + i, n + j)] = h22[(i, j)] - jb.d2(i, j).dot(&d);
            hessian[(i, n + j)] = h12[(i, j)];
            hessian[(n + j, i)] = h12[(i, j)];
        }
    }
    Ok(PairSystem {
        p1: ja.value,
        p2: jb.value,
        residual,
        gradient,
        hessian,
    })
}
