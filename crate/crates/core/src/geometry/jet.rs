//! Second-order jets of scalar and vector valued maps on `R^n`.

use nalgebra::{DMatrix, DVector};

/// Value, gradient and Hessian of `h: R^n -> R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

/// Value `f`, Jacobian `J` (`m x n`) and second derivatives of `f: R^n -> R^m`.
///
/// `second[a * n + b]` holds `d^2 f / d xi_a d xi_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorJet {
    pub value: DVector<f64>,
    pub jac: DMatrix<f64>,
    pub second: Vec<DVector<f64>>,
}

impl ScalarJet {
    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            value,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
        }
    }

    pub fn vars(&self) -> usize {
        self.grad.len()
    }

    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            value: scale * self.value + shift,
            grad: &self.grad * scale,
            hess: &self.hess * scale,
        }
    }

    /// `phi(h)` given `phi, phi', phi''` at `h`.
    pub fn compose(&self, phi: f64, dphi: f64, ddphi: f64) -> Self {
        let hess = &self.hess * dphi + (&self.grad * self.grad.transpose()) * ddphi;
        Self {
            value: phi,
            grad: &self.grad * dphi,
            hess,
        }
    }

    pub fn add(&self, other: &ScalarJet) -> Self {
        Self {
            value: self.value + other.value,
            grad: &self.grad + &other.grad,
            hess: &self.hess + &other.hess,
        }
    }
}

impl VectorJet {
    pub fn dims(&self) -> (usize, usize) {
        (self.value.len(), self.jac.ncols())
    }

    #[inline]
    pub fn d2(&self, a: usize, b: usize) -> &DVector<f64> {
        &self.second[a * self.jac.ncols() + b]
    }

    /// Identity map on `R^n`.
    pub fn identity(xi: &[f64]) -> Self {
        let n = xi.len();
        Self {
            value: DVector::from_column_slice(xi),
            jac: DMatrix::identity(n, n),
            second: vec![DVector::zeros(n); n * n],
        }
    }

    /// Component `i` as a scalar jet.
    pub fn component(&self, i: usize) -> ScalarJet {
        let n = self.jac.ncols();
        ScalarJet {
            value: self.value[i],
            grad: self.jac.row(i).transpose(),
            hess: DMatrix::from_fn(n, n, |a, b| self.d2(a, b)[i]),
        }
    }

    /// Components `range` as a new vector jet.
    pub fn rows(&self, start: usize, len: usize) -> Self {
        Self {
            value: self.value.rows(start, len).into_owned(),
            jac: self.jac.rows(start, len).into_owned(),
            second: self.second.iter().map(|v| v.rows(start, len).into_owned()).collect(),
        }
    }

    /// Re-expresses a jet in `k` variables as one in `total` variables, the
    /// original variables occupying `offset..offset + k`.
    pub fn embed_vars(&self, offset: usize, total: usize) -> Self {
        let (m, k) = self.dims();
        let mut jac = DMatrix::zeros(m, total);
        jac.columns_mut(offset, k).copy_from(&self.jac);
        let mut second = vec![DVector::zeros(m); total * total];
        for a in 0..k {
            for b in 0..k {
                second[(offset + a) * total + offset + b] = self.d2(a, b).clone();
            }
        }
        Self {
            value: self.value.clone(),
            jac,
            second,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            value: &self.value * s,
            jac: &self.jac * s,
            second: self.second.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &VectorJet) -> Self {
        Self {
            value: &self.value + &other.value,
            jac: &self.jac + &other.jac,
            second: self.second.iter().zip(&other.second).map(|(a, b)| a + b).collect(),
        }
    }

    /// Row-wise linear map `diag(weights) * f`.
    pub fn scale_rows(&self, weights: &[f64]) -> Self {
        let w = DVector::from_column_slice(weights);
        let mut jac = self.jac.clone();
        for (i, mut row) in jac.row_iter_mut().enumerate() {
            row *= weights[i];
        }
        Self {
            value: self.value.component_mul(&w),
            jac,
            second: self.second.iter().map(|v| v.component_mul(&w)).collect(),
        }
    }

    /// Product rule for `h * f`.
    pub fn times_scalar(&self, h: &ScalarJet) -> Self {
        let n = self.jac.ncols();
        let mut jac = &self.jac * h.value;
        for a in 0..n {
            let mut col = jac.column_mut(a);
            col.axpy(h.grad[a], &self.value, 1.0);
        }
        let mut second = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut v = self.d2(a, b) * h.value;
                v.axpy(h.hess[(a, b)], &self.value, 1.0);
                v.axpy(h.grad[a], &self.jac.column(b), 1.0);
                v.axpy(h.grad[b], &self.jac.column(a), 1.0);
                second.push(v);
            }
        }
        Self {
            value: &self.value * h.value,
            jac,
            second,
        }
    }

    /// Stacks the components of `self` above those of `other`.
    pub fn concat(&self, other: &VectorJet) -> Self {
        let (m1, n) = self.dims();
        let m2 = other.value.len();
        let mut value = DVector::zeros(m1 + m2);
        value.rows_mut(0, m1).copy_from(&self.value);
        value.rows_mut(m1, m2).copy_from(&other.value);
        let mut jac = DMatrix::zeros(m1 + m2, n);
        jac.rows_mut(0, m1).copy_from(&self.jac);
        jac.rows_mut(m1, m2).copy_from(&other.jac);
        let second = self
            .second
            .iter()
            .zip(&other.second)
            .map(|(a, b)| {
                let mut v = DVector::zeros(m1 + m2);
                v.rows_mut(0, m1).copy_from(a);
                v.rows_mut(m1, m2).copy_from(b);
                v
            })
            .collect();
        Self { value, jac, second }
    }

    /// Appends `extra` zero components.
    pub fn pad(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let n = self.jac.ncols();
        let zero = VectorJet {
            value: DVector::zeros(extra),
            jac: DMatrix::zeros(extra, n),
            second: vec![DVector::zeros(extra); n * n],
        };
        self.concat(&zero)
    }

    /// Inner product `<f, f>` as a scalar jet.
    pub fn norm_squared(&self) -> ScalarJet {
        let n = self.jac.ncols();
        let grad = self.jac.transpose() * &self.value * 2.0;
        let hess = DMatrix::from_fn(n, n, |a, b| {
            2.0 * (self.jac.column(a).dot(&self.jac.column(b)) + self.value.dot(self.d2(a, b)))
        });
        ScalarJet {
            value: self.value.norm_squared(),
            grad,
            hess,
        }
    }

    /// `f / |f|`.
    pub fn normalized(&self) -> Self {
        let rho = self.norm_squared();
        let r = rho.value;
        let inv = rho.compose(r.powf(-0.5), -0.5 * r.powf(-1.5), 0.75 * r.powf(-2.5));
        self.times_scalar(&inv)
    }

    /// Composition `f(phi(xi))` where `self` is the jet of `f` at `phi(xi)`
    /// and `inner` is the jet of `phi` at `xi`.
    pub fn compose(&self, inner: &VectorJet) -> Self {
        let (m, k) = self.dims();
        let n = inner.jac.ncols();
        let jac = &self.jac * &inner.jac;
        let mut second = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut v = DVector::zeros(m);
                for i in 0..k {
                    let pa = inner.jac[(i, a)];
                    if pa != 0.0 {
                        for j in 0..k {
                            let pb = inner.jac[(j, b)];
                            if pb != 0.0 {
                                v.axpy(pa * pb, self.d2(i, j), 1.0);
                            }
                        }
                    }
                    let pab = inner.d2(a, b)[i];
                    if pab != 0.0 {
                        v.axpy(pab, &self.jac.column(i), 1.0);
                    }
                }
                second.push(v);
            }
        }
        Self {
            value: self.value.clone(),
            jac,
            second,
        }
    }
}
