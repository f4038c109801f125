//! Parametric immersions built from products of unit-sphere patches.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::jet::VectorJet;
use super::perturb::TrigPolynomial;
use super::shape::{ShapeKind, ShapeSpec};
use super::sphere::{self, Patch, STEREO_BOX};
use crate::{Error, Result};

/// One coordinate chart: a patch on every sphere factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub patches: Vec<Patch>,
    /// Per-coordinate lower/upper bounds; periodic coordinates have period `2π`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

/// A chart index together with coordinates in that chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub chart: usize,
    pub xi: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Perturbation {
    amplitude: f64,
    profile: TrigPolynomial,
    /// Profile evaluated on chart angles (true) or on the unperturbed point.
    on_angles: bool,
}

/// An immersion `f: M -> R^m` with `M` a product of spheres, given by an atlas
/// of patch-product charts with analytic jets.
#[derive(Debug, Clone)]
pub struct Immersion {
    spec: ShapeSpec,
    factors: Vec<usize>,
    charts: Vec<Chart>,
    n: usize,
    m: usize,
    perturbation: Option<Perturbation>,
    orientation: f64,
}

/// Samples per coordinate used by the construction-time immersion check.
const CHECK_SAMPLES: usize = 12;

impl Immersion {
    pub fn new(spec: &ShapeSpec) -> Result<Self> {
        spec.validate()?;
        let (factors, m) = match &spec.kind {
            ShapeKind::Ellipsoid { semiaxes } => (vec![semiaxes.len() - 1], semiaxes.len()),
            ShapeKind::TorusOfRevolution { .. } => (vec![1, 1], 3),
            ShapeKind::CliffordTorus { .. } => (vec![1, 1], 4),
            ShapeKind::TubeAroundSphere { n, k, .. } => (vec![*n, *k], n + k + 1),
            ShapeKind::RoundSphere { n, ambient, .. } => (vec![*n], *ambient),
        };
        let n = factors.iter().sum();

        let mut charts = vec![Vec::<Patch>::new()];
        for &d in &factors {
            charts = charts
                .into_iter()
                .flat_map(|prefix| {
                    Patch::options(d).into_iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.push(p);
                        v
                    })
                })
                .collect();
        }
        let charts = charts
            .into_iter()
            .map(|patches| {
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                let mut periodic = Vec::new();
                for (p, &d) in patches.iter().zip(&factors) {
                    for _ in 0..d {
                        let per = p.is_periodic();
                        lower.push(if per { 0.0 } else { -STEREO_BOX });
                        upper.push(if per { TAU } else { STEREO_BOX });
                        periodic.push(per);
                    }
                }
                Chart {
                    patches,
                    lower,
                    upper,
                    periodic,
                }
            })
            .collect::<Vec<_>>();

        let mut imm = Immersion {
            spec: spec.clone(),
            factors,
            charts,
            n,
            m,
            perturbation: None,
            orientation: if spec.flip_orientation { -1.0 } else { 1.0 },
        };
        imm.check_immersion(CHECK_SAMPLES)
            .map_err(|_| Error::InvalidArgument("shape is not an immersion".into()))?;

        if let Some(p) = spec.perturbation {
            imm = imm.perturb(p.amplitude, p.frequency, p.seed)?;
        }
        Ok(imm)
    }

    /// Adds `a P(xi) nu(xi)` along the co-orientation normal.
    pub fn perturb(&self, amplitude: f64, frequency: u32, seed: u64) -> Result<Self> {
        if self.codim() != 1 {
            return Err(Error::UnsupportedCodimension(self.codim()));
        }
        if !(amplitude.is_finite() && amplitude >= 0.0) || frequency < 1 {
            return Err(Error::InvalidArgument("bad perturbation parameters".into()));
        }
        if self.perturbation.is_some() {
            return Err(Error::InvalidArgument("shape is already perturbed".into()));
        }
        let on_angles = self.charts.iter().all(|c| c.periodic.iter().all(|&p| p));
        let dim = if on_angles { self.n } else { self.m };
        let mut out = self.clone();
        out.perturbation = Some(Perturbation {
            amplitude,
            profile: TrigPolynomial::seeded(dim, frequency, seed),
            on_angles,
        });
        out.spec = self.spec.clone().perturbed(amplitude, frequency, seed);
        if amplitude > 0.0 {
            out.check_immersion(CHECK_SAMPLES)
                .map_err(|_| Error::AmplitudeTooLarge(amplitude))?;
            // a fold between grid samples shows up as a sign change of the
            // transversality determinant, which the rank test cannot see
            for (ci, xi) in self.sample_grid(CHECK_SAMPLES) {
                let before = self.transversality(ci, &xi)?;
                let after = out.transversality(ci, &xi)?;
                if !(after * before.signum() > 1e-9 * before.abs()) {
                    return Err(Error::AmplitudeTooLarge(amplitude));
                }
            }
        }
        Ok(out)
    }

    pub fn spec(&self) -> &ShapeSpec {
        &self.spec
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn codim(&self) -> usize {
        self.m - self.n
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn is_co_oriented(&self) -> bool {
        self.codim() == 1
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbation.as_ref().is_some_and(|p| p.amplitude > 0.0)
    }

    /// Twice an upper bound on `|f|`; an upper bound on the diameter of the image.
    pub fn extent(&self) -> f64 {
        let base = match &self.spec.kind {
            ShapeKind::Ellipsoid { semiaxes } => semiaxes.iter().cloned().fold(0.0, f64::max),
            ShapeKind::TorusOfRevolution { major, minor } => major + minor,
            ShapeKind::CliffordTorus { r1, r2 } => (r1 * r1 + r2 * r2).sqrt(),
            ShapeKind::TubeAroundSphere { radius, .. } => 1.0 + radius,
            ShapeKind::RoundSphere { radius, .. } => *radius,
        };
        let bump = self
            .perturbation
            .as_ref()
            .map_or(0.0, |p| p.amplitude * p.profile.abs_bound());
        2.0 * (base + bump)
    }

    fn factor_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.factors.len());
        let mut acc = 0;
        for &d in &self.factors {
            off.push(acc);
            acc += d;
        }
        off
    }

    fn check_domain(&self, chart: usize, xi: &[f64]) -> Result<Vec<f64>> {
        let c = self
            .charts
            .get(chart)
            .ok_or_else(|| Error::InvalidArgument(format!("no chart {chart}")))?;
        if xi.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.n,
                xi.len()
            )));
        }
        let mut out = xi.to_vec();
        for (i, v) in out.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::OutOfDomain { chart, coordinate: i, value: *v });
            }
            if c.periodic[i] {
                *v = v.rem_euclid(TAU);
            } else if *v < c.lower[i] || *v > c.upper[i] {
                return Err(Error::OutOfDomain { chart, coordinate: i, value: *v });
            }
        }
        Ok(out)
    }

    /// Unit-sphere jets of every factor, embedded in the full variable set.
    fn factor_jets(&self, chart: usize, xi: &[f64]) -> Vec<VectorJet> {
        let offs = self.factor_offsets();
        self.charts[chart]
            .patches
            .iter()
            .zip(&self.factors)
            .zip(offs)
            .map(|((&p, &d), off)| sphere::unit_sphere_jet(p, &xi[off..off + d]).embed_vars(off, self.n))
            .collect()
    }

    fn base_jet(&self, fj: &[VectorJet]) -> VectorJet {
        match &self.spec.kind {
            ShapeKind::Ellipsoid { semiaxes } => fj[0].scale_rows(semiaxes),
            ShapeKind::RoundSphere { radius, ambient, n } => fj[0].scale(*radius).pad(ambient - n - 1),
            ShapeKind::CliffordTorus { r1, r2 } => fj[0].scale(*r1).concat(&fj[1].scale(*r2)),
            ShapeKind::TorusOfRevolution { major, minor } => tube_jet(&fj[0], &fj[1], *major, *minor),
            ShapeKind::TubeAroundSphere { radius, .. } => tube_jet(&fj[0], &fj[1], 1.0, *radius),
        }
    }

    /// Outward unit normal of the unperturbed hypersurface, with its jet.
    fn base_normal_jet(&self, fj: &[VectorJet]) -> Option<VectorJet> {
        if self.codim() != 1 {
            return None;
        }
        let nu = match &self.spec.kind {
            ShapeKind::Ellipsoid { semiaxes } => {
                let inv: Vec<f64> = semiaxes.iter().map(|a| 1.0 / a).collect();
                fj[0].scale_rows(&inv).normalized()
            }
            ShapeKind::RoundSphere { .. } => fj[0].clone(),
            ShapeKind::TorusOfRevolution { .. } | ShapeKind::TubeAroundSphere { .. } => {
                tube_jet(&fj[0], &fj[1], 0.0, 1.0)
            }
            ShapeKind::CliffordTorus { .. } => return None,
        };
        Some(nu)
    }

    /// Point, Jacobian and second derivatives of `f` at `xi` in `chart`.
    pub fn jet(&self, chart: usize, xi: &[f64]) -> Result<VectorJet> {
        let xi = self.check_domain(chart, xi)?;
        let fj = self.factor_jets(chart, &xi);
        let base = self.base_jet(&fj);
        let Some(p) = &self.perturbation else {
            return Ok(base);
        };
        let nu = self.base_normal_jet(&fj).expect("perturbation requires a hypersurface");
        let profile = if p.on_angles {
            p.profile.jet(&xi)
        } else {
            p.profile.jet(base.value.as_slice()).compose(&base)
        };
        Ok(base.add(&nu.times_scalar(&profile.component(0)).scale(p.amplitude)))
    }

    pub fn point(&self, chart: usize, xi: &[f64]) -> Result<DVector<f64>> {
        Ok(self.jet(chart, xi)?.value)
    }

    /// Orthonormal basis of the normal space at `xi`. For hypersurfaces the
    /// single vector is the co-orientation.
    pub fn normal_frame(&self, chart: usize, xi: &[f64]) -> Result<Vec<DVector<f64>>> {
        let jet = self.jet(chart, xi)?;
        let mut frame = orthogonal_complement(&jet.jac)?;
        if let Some(outward) = self.reference_normal(chart, xi)? {
            if frame[0].dot(&outward) < 0.0 {
                frame[0] = -&frame[0];
            }
        }
        Ok(frame)
    }

    fn reference_normal(&self, chart: usize, xi: &[f64]) -> Result<Option<DVector<f64>>> {
        let xi = self.check_domain(chart, xi)?;
        let fj = self.factor_jets(chart, &xi);
        Ok(self.base_normal_jet(&fj).map(|j| j.value * self.orientation))
    }

    /// The distinguished unit normal of a co-oriented hypersurface.
    pub fn co_orientation(&self, chart: usize, xi: &[f64]) -> Result<DVector<f64>> {
        if self.codim() != 1 {
            return Err(Error::UnsupportedCodimension(self.codim()));
        }
        Ok(self.normal_frame(chart, xi)?.remove(0))
    }

    /// Sample grid with `samples` points per coordinate in every chart
    /// (stereographic coordinates sampled on the unit cube).
    fn sample_grid(&self, samples: usize) -> Vec<(usize, Vec<f64>)> {
        let samples = samples.max(2);
        let mut out = Vec::new();
        for (ci, chart) in self.charts.iter().enumerate() {
            let total = samples.pow(self.n as u32);
            for idx in 0..total {
                let mut rem = idx;
                let xi: Vec<f64> = (0..self.n)
                    .map(|a| {
                        let i = rem % samples;
                        rem /= samples;
                        if chart.periodic[a] {
                            TAU * i as f64 / samples as f64
                        } else {
                            -1.0 + 2.0 * i as f64 / (samples - 1) as f64
                        }
                    })
                    .collect();
                out.push((ci, xi));
            }
        }
        out
    }

    /// Checks `rank J = n` on a grid with `samples` points per coordinate in
    /// every chart.
    pub fn check_immersion(&self, samples: usize) -> Result<()> {
        for (ci, xi) in self.sample_grid(samples) {
            let jet = self.jet(ci, &xi)?;
            let sv = jet.jac.clone().svd(false, false).singular_values;
            let (lo, hi) = (sv.min(), sv.max());
            if !(hi > 0.0 && lo > 1e-9 * hi) {
                return Err(Error::DegeneratePoint);
            }
        }
        Ok(())
    }

    /// `det [J | nu_0]` with `nu_0` the normal of the unperturbed hypersurface.
    /// Along a normal perturbation it vanishes exactly where the perturbed
    /// sheet folds over the original one.
    fn transversality(&self, chart: usize, xi: &[f64]) -> Result<f64> {
        let jac = self.jet(chart, xi)?.jac;
        let nu = self
            .reference_normal(chart, xi)?
            .ok_or(Error::UnsupportedCodimension(self.codim()))?;
        let mut frame = DMatrix::zeros(self.m, self.m);
        frame.view_mut((0, 0), (self.m, self.n)).copy_from(&jac);
        frame.set_column(self.n, &nu);
        Ok(frame.determinant())
    }

    /// Canonical chart for `xi`: angles wrapped, stereographic coordinates in
    /// the cap where they have norm at most one.
    pub fn recenter(&self, point: &ChartPoint) -> ChartPoint {
        let chart = &self.charts[point.chart];
        let mut xi = point.xi.clone();
        let offs = self.factor_offsets();
        let patches: Vec<Patch> = chart
            .patches
            .iter()
            .zip(&self.factors)
            .zip(offs)
            .map(|((&p, &d), off)| sphere::recenter(p, &mut xi[off..off + d]))
            .collect();
        let idx = self
            .charts
            .iter()
            .position(|c| c.patches == patches)
            .expect("every patch combination is a chart");
        ChartPoint { chart: idx, xi }
    }

    /// Chart point of a tuple of unit vectors, one per sphere factor.
    pub fn chart_point_of(&self, factor_points: &[Vec<f64>]) -> ChartPoint {
        let mut patches = Vec::new();
        let mut xi = Vec::new();
        for (&d, x) in self.factors.iter().zip(factor_points) {
            let (p, w) = sphere::coordinates_of(d, x);
            patches.push(p);
            xi.extend(w);
        }
        let chart = self
            .charts
            .iter()
            .position(|c| c.patches == patches)
            .expect("every patch combination is a chart");
        ChartPoint { chart, xi }
    }

    /// Uniform sample with respect to the round measure on each sphere factor.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChartPoint {
        let pts: Vec<Vec<f64>> = self
            .factors
            .iter()
            .map(|&d| loop {
                let v: Vec<f64> = (0..=d).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    break v.into_iter().map(|x| x / norm).collect();
                }
            })
            .collect();
        self.chart_point_of(&pts)
    }

    /// Grid region used by the brute-force oracle for coordinate `a` of `chart`:
    /// `(lower, upper, periodic)`.
    pub fn grid_range(&self, chart: usize, a: usize) -> (f64, f64, bool) {
        let c = &self.charts[chart];
        if c.periodic[a] {
            (0.0, TAU, true)
        } else {
            (-1.2, 1.2, false)
        }
    }
}

/// `((core + r t_0) s, r t_1..t_k)` for sphere jets `s`, `t`.
fn tube_jet(s: &VectorJet, t: &VectorJet, core: f64, r: f64) -> VectorJet {
    let k = t.value.len() - 1;
    let radial = t.component(0).affine(r, core);
    s.times_scalar(&radial).concat(&t.rows(1, k).scale(r))
}

/// Orthonormal basis of the orthogonal complement of the column space of `jac`.
pub fn orthogonal_complement(jac: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let (m, n) = (jac.nrows(), jac.ncols());
    let scale = jac.amax().max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m);
    let project_out = |v: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for _ in 0..2 {
            for b in basis {
                let c = b.dot(v);
                v.axpy(-c, b, 1.0);
            }
        }
    };
    for c in 0..n {
        let mut v = jac.column(c).into_owned();
        project_out(&mut v, &basis);
        let norm = v.norm();
        if norm < 1e-10 * scale {
            return Err(Error::DegeneratePoint);
        }
        basis.push(v / norm);
    }
    let mut normals = Vec::with_capacity(m - n);
    while basis.len() < m {
        // the standard basis vector with the largest remaining component
        let mut best: Option<DVector<f64>> = None;
        for i in 0..m {
            let mut e = DVector::zeros(m);
            e[i] = 1.0;
            project_out(&mut e, &basis);
            if best.as_ref().is_none_or(|b| e.norm() > b.norm()) {
                best = Some(e);
            }
        }
        let v = best.unwrap();
        let v = &v / v.norm();
        basis.push(v.clone());
        normals.push(v);
    }
    Ok(normals)
}
