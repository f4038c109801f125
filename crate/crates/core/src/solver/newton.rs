//! Damped Newton iteration on the gradient of `g`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use super::residual::{pair_system, PairSystem};
use super::SolverConfig;
use crate::geometry::{ChartPoint, Immersion};

/// Maximum number of step halvings per iteration.
const MAX_HALVINGS: usize = 30;
/// Singular values below `RCOND * sigma_max` are dropped from the step.
const RCOND: f64 = 1e-12;
/// Longest step accepted in parameter space.
const MAX_STEP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonStatus {
    Converged,
    /// Iteration budget exhausted or no decrease after all halvings.
    Diverged,
    /// The Hessian vanished or produced a non-finite step.
    Singular,
    /// The seed or an iterate came closer to the diagonal than the exclusion radius.
    ExcludedDiagonal,
}

#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub a: ChartPoint,
    pub b: ChartPoint,
    pub status: NewtonStatus,
    /// Number of residual evaluations along the accepted path; the seed counts as one.
    pub iterations: usize,
    /// Residual norm after each accepted iterate, starting with the seed.
    pub residual_history: Vec<f64>,
    /// Parameter-space length of the last accepted step (0 if none was taken).
    pub last_step: f64,
    /// Final system, when the last iterate could be evaluated.
    pub system: Option<PairSystem>,
}

pub(crate) fn lex_slice_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub(crate) fn lex_greater(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    lex_slice_cmp(a.as_slice(), b.as_slice()) == Ordering::Greater
}

/// Orders the pair so that `f(a) <= f(b)` lexicographically.
pub(crate) fn canonical_order(
    imm: &Immersion,
    a: ChartPoint,
    b: ChartPoint,
) -> crate::Result<(ChartPoint, ChartPoint)> {
    let (pa, pb) = (imm.point(a.chart, &a.xi)?, imm.point(b.chart, &b.xi)?);
    Ok(if lex_greater(&pa, &pb) {
        (b, a)
    } else {
        (a, b)
    })
}

/// Minimum-norm solution of `H s = -grad` through the SVD.
fn newton_step(sys: &PairSystem) -> Option<DVector<f64>> {
    let svd = sys.hessian.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax.is_finite() && smax > 0.0) {
        return None;
    }
    let (u, vt) = (svd.u.as_ref()?, svd.v_t.as_ref()?);
    let utg = u.tr_mul(&sys.gradient);
    let scaled = DVector::from_fn(utg.len(), |i, _| {
        let s = svd.singular_values[i];
        if s > RCOND * smax {
            -utg[i] / s
        } else {
            0.0
        }
    });
    let step: DVector<f64> = vt.tr_mul(&scaled);
    step.iter().all(|v| v.is_finite()).then_some(step)
}

fn displaced(p: &ChartPoint, step: &[f64]) -> ChartPoint {
    ChartPoint {
        chart: p.chart,
        xi: p.xi.iter().zip(step).map(|(x, s)| x + s).collect(),
    }
}

fn report(
    a: ChartPoint,
    b: ChartPoint,
    status: NewtonStatus,
    history: Vec<f64>,
    last_step: f64,
    system: Option<PairSystem>,
) -> NewtonReport {
    NewtonReport {
        a,
        b,
        status,
        iterations: history.len(),
        residual_history: history,
        last_step,
        system,
    }
}

/// Refines a seed pair to a critical point of `g`. The pair is first put in
/// canonical order, so swapped seeds follow bit-identical paths.
pub fn newton_refine(
    imm: &Immersion,
    seed: (ChartPoint, ChartPoint),
    cfg: &SolverConfig,
) -> NewtonReport {
    let exclusion = cfg.diagonal_exclusion_for(imm.extent());
    let n = imm.intrinsic_dim();
    let (a, b) = match canonical_order(imm, imm.recenter(&seed.0), imm.recenter(&seed.1)) {
        Ok(pair) => pair,
        Err(_) => return report(seed.0, seed.1, NewtonStatus::Singular, Vec::new(), 0.0, None),
    };
    let mut sys = match pair_system(imm, &a, &b) {
        Ok(s) => s,
        Err(_) => return report(a, b, NewtonStatus::Singular, Vec::new(), 0.0, None),
    };
    let (mut a, mut b) = (a, b);
    let mut history = vec![sys.residual.norm()];
    let mut last_step = 0.0;
    loop {
        if sys.length() < exclusion {
            return report(a, b, NewtonStatus::ExcludedDiagonal, history, last_step, Some(sys));
        }
        let current = *history.last().unwrap();
        if current < cfg.residual_tol {
            return report(a, b, NewtonStatus::Converged, history, last_step, Some(sys));
        }
        if history.len() >= cfg.newton_max_iter {
            return report(a, b, NewtonStatus::Diverged, history, last_step, Some(sys));
        }
        let Some(mut step) = newton_step(&sys) else {
            return report(a, b, NewtonStatus::Singular, history, last_step, Some(sys));
        };
        let norm = step.norm();
        if norm > MAX_STEP {
            step *= MAX_STEP / norm;
        }
        let mut accepted = None;
        let mut t = 1.0;
        for _ in 0..=MAX_HALVINGS {
            let s = &step * t;
            let (ta, tb) = (displaced(&a, &s.as_slice()[..n]), displaced(&b, &s.as_slice()[n..]));
            if let Ok(trial) = pair_system(imm, &ta, &tb) {
                if trial.residual.norm() < current {
                    accepted = Some((ta, tb, s.norm()));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((ta, tb, len)) = accepted else {
            return report(a, b, NewtonStatus::Diverged, history, last_step, Some(sys));
        };
        a = imm.recenter(&ta);
        b = imm.recenter(&tb);
        last_step = len;
        // recentering may change charts, which rescales the residual
        sys = match pair_system(imm, &a, &b) {
            Ok(s) => s,
            Err(_) => return report(a, b, NewtonStatus::Singular, history, last_step, None),
        };
        history.push(sys.residual.norm());
    }
}

/// Hessian eigenvalues in ascending order.
pub(crate) fn sorted_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Hessian eigenpairs in ascending order of eigenvalue.
pub(crate) fn sorted_eigenpairs(h: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let eig = h.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&v, c)| (v, c.into_owned()))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;

    fn ellipsoid() -> Immersion {
        Immersion::new(&"ellipsoid(1,1.3,1.7)".parse::<ShapeSpec>().unwrap()).unwrap()
    }

    #[test]
    fn exact_seed_converges_without_a_step() {
        let imm = ellipsoid();
        let a = imm.chart_point_of(&[vec![0.0, 0.0, 1.0]]);
        let b = imm.chart_point_of(&[vec![0.0, 0.0, -1.0]]);
        let r = newton_refine(&imm, (a, b), &SolverConfig::default());
        assert_eq!(r.status, NewtonStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.last_step, 0.0);
    }

    #[test]
    fn near_seed_converges_quadratically() {
        let imm = ellipsoid();
        let a = ChartPoint { chart: 0, xi: vec![0.01, -0.008] };
        let b = ChartPoint { chart: 1, xi: vec![-0.007, 0.009] };
        let r = newton_refine(&imm, (a, b), &SolverConfig::default());
        assert_eq!(r.status, NewtonStatus::Converged);
        let h = &r.residual_history;
        assert!(h.len() >= 3, "{h:?}");
        let (r0, r1) = (h[h.len() - 3], h[h.len() - 2]);
        assert!(r1 <= 10.0 * r0 * r0, "{h:?}");
        let len = r.system.unwrap().length();
        assert!((len - 3.4).abs() < 1e-10);
    }

    #[test]
    fn diagonal_seed_is_excluded() {
        let imm = ellipsoid();
        let a = ChartPoint { chart: 0, xi: vec![0.2, 0.1] };
        let r = newton_refine(&imm, (a.clone(), a), &SolverConfig::default());
        assert_eq!(r.status, NewtonStatus::ExcludedDiagonal);
        assert_eq!(r.iterations, 1);
    }
}
