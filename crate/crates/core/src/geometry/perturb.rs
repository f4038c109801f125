//! Seeded trigonometric polynomials used as normal perturbation profiles.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::jet::VectorJet;

/// Ratio between the spectral weights of consecutive `|k|_1` shells.
pub const SPECTRAL_DECAY: f64 = 0.2;

/// `T(y) = sum_k w(k) (c_k cos<k, y> + s_k sin<k, y>)` over integer frequency
/// vectors with `max |k_i| <= frequency`, one representative per `±k`.
/// Coefficients `c_k, s_k` are uniform in `[-1, 1]`; the fixed spectral weight
/// `w(k) = 5^{-(|k|_1 - 1)}` makes the lowest harmonics dominate, so that a
/// small perturbation breaks symmetric critical families into few points.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    freq: Vec<f64>,
    cos: f64,
    sin: f64,
}

impl TrigPolynomial {
    pub fn seeded(dim: usize, frequency: u32, seed: u64) -> Self {
        Self::with_decay(dim, frequency, seed, SPECTRAL_DECAY)
    }

    /// As [`TrigPolynomial::seeded`] with weight `decay^{|k|_1 - 1}`.
    pub fn with_decay(dim: usize, frequency: u32, seed: u64, decay: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = frequency as i64;
        let side = (2 * w + 1) as usize;
        let total = side.pow(dim as u32);
        let mut terms = Vec::new();
        for idx in 0..total {
            let mut rem = idx;
            let mut k = vec![0i64; dim];
            for slot in k.iter_mut() {
                *slot = (rem % side) as i64 - w;
                rem /= side;
            }
            // keep k with first nonzero component positive
            match k.iter().find(|&&v| v != 0) {
                Some(&first) if first > 0 => {}
                _ => continue,
            }
            let l1: i64 = k.iter().map(|v| v.abs()).sum();
            let weight = decay.powi((l1 - 1) as i32);
            let cos = rng.random_range(-1.0..=1.0) * weight;
            let sin = rng.random_range(-1.0..=1.0) * weight;
            terms.push(Term {
                freq: k.iter().map(|&v| v as f64).collect(),
                cos,
                sin,
            });
        }
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sum |c_k| + |s_k|`, an upper bound on `|T|`.
    pub fn abs_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.cos.abs() + t.sin.abs()).sum()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let phase: f64 = t.freq.iter().zip(y).map(|(k, v)| k * v).sum();
                t.cos * phase.cos() + t.sin * phase.sin()
            })
            .sum()
    }

    /// Jet of `T` at `y` as a one-component vector jet in `dim` variables.
    pub fn jet(&self, y: &[f64]) -> VectorJet {
        let d = self.dim;
        let mut value = 0.0;
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        for t in &self.terms {
            let phase: f64 = t.freq.iter().zip(y).map(|(k, v)| k * v).sum();
            let (s, c) = phase.sin_cos();
            let v0 = t.cos * c + t.sin * s;
            let v1 = -t.cos * s + t.sin * c;
            value += v0;
            for a in 0..d {
                grad[a] += v1 * t.freq[a];
                for b in 0..d {
                    hess[(a, b)] -= v0 * t.freq[a] * t.freq[b];
                }
            }
        }
        VectorJet {
            value: DVector::from_element(1, value),
            jac: DMatrix::from_row_slice(1, d, grad.as_slice()),
            second: (0..d * d)
                .map(|i| DVector::from_element(1, hess[(i / d, i % d)]))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_is_deterministic() {
        let a = TrigPolynomial::seeded(2, 3, 42);
        let b = TrigPolynomial::seeded(2, 3, 42);
        assert_eq!(a, b);
        assert_ne!(a, TrigPolynomial::seeded(2, 3, 43));
        // (7^2 - 1) / 2 half-space frequencies
        assert_eq!(a.terms.len(), 24);
    }

    #[test]
    fn jet_matches_differences() {
        let p = TrigPolynomial::seeded(2, 3, 7);
        let y = [0.4, 2.1];
        let j = p.jet(&y);
        let h = 1e-6;
        let dx = (p.eval(&[y[0] + h, y[1]]) - p.eval(&[y[0] - h, y[1]])) / (2.0 * h);
        assert!((j.jac[(0, 0)] - dx).abs() < 1e-8);
        assert!((j.value[0] - p.eval(&y)).abs() < 1e-15);
    }
}
