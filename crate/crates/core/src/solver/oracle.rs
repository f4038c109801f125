//! Exhaustive grid oracle for double normals of curves and surfaces.
//!
//! Every chart is sampled on a regular grid, the residual norm
//! `|[J_1ᵀ d; J_2ᵀ d]|` is evaluated on all grid pairs, and its local minima
//! (over the axis neighbours in the product grid) are polished by
//! Levenberg-Marquardt with a finite-difference Jacobian. Nothing here uses
//! the analytic second derivatives the Newton solver relies on.
//!
//! Every polished pair is then lifted, in both endpoint orders, to the
//! function `F(x, y, z) = <x, f(y) - f(z)>` on `S^{m-1} x M x M`: a direction
//! grid on the sphere seeds a polish of the full critical-point system of
//! `F`, and the distinct solutions are counted.
//! A nondegenerate double normal yields exactly four critical points of `F`
//! (both endpoint orders, both signs of `x`).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::endpoint_set_distance;
use super::newton::sorted_eigenvalues;
use crate::geometry::{ChartPoint, Immersion};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Grid points per chart coordinate.
    pub density: usize,
    /// Pairs closer than this are skipped in the scan; `None` means
    /// `0.2` times the extent of the shape.
    pub scan_exclusion: Option<f64>,
    /// Polished pairs shorter than this are diagonal; `None` means `1e-3`
    /// times the extent.
    pub diagonal_exclusion: Option<f64>,
    /// A polish succeeds when the residual norm drops below this.
    pub residual_tol: f64,
    /// Polished solutions closer than this are merged.
    pub merge_radius: f64,
    /// Relative eigenvalue threshold on the finite-difference Hessian.
    pub degeneracy_threshold: f64,
    /// Grid points per axis on each face of the cube used to sample `S^{m-1}`.
    pub sphere_density: usize,
    /// Whether to run the lift to `F`.
    pub lift: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            density: 200,
            scan_exclusion: None,
            diagonal_exclusion: None,
            residual_tol: 1e-10,
            merge_radius: 1e-6,
            degeneracy_threshold: 1e-4,
            sphere_density: 16,
            lift: true,
        }
    }
}

/// A polished, deduplicated critical pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub length: f64,
    pub nondegenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub density: usize,
    /// Grid pairs evaluated.
    pub grid_pairs: u64,
    /// Grid-local minima below the coarse threshold.
    pub candidates: usize,
    /// Distinct nondegenerate critical pairs (unordered).
    pub count: usize,
    /// Distinct degenerate critical pairs; nonzero signals a critical family.
    pub degenerate: usize,
    pub solutions: Vec<OracleSolution>,
    /// Distinct critical points of `F` off the diagonal; `None` if not lifted.
    pub f_count: Option<usize>,
}

impl OracleReport {
    /// Whether the `F` count is four times the double-normal count.
    pub fn four_to_one(&self) -> Option<bool> {
        self.f_count.map(|f| f == 4 * self.count)
    }
}

/// Regular grid on one chart, with points and Jacobians in single precision,
/// stored component-wise so the pair scan vectorizes.
struct ChartGrid {
    axes: [usize; 2],
    coords: [Vec<f64>; 2],
    periodic: [bool; 2],
    /// `points[r][idx]`: component `r` of the grid point `idx`.
    points: Vec<Vec<f32>>,
    /// `jacs[a * m + r][idx]`: entry `J[(r, a)]` at the grid point `idx`.
    jacs: Vec<Vec<f32>>,
}

impl ChartGrid {
    fn build(imm: &Immersion, chart: usize, density: usize) -> Result<(Self, f64, f64)> {
        let (m, n) = (imm.ambient_dim(), imm.intrinsic_dim());
        let mut axes = [1usize; 2];
        let mut coords = [vec![0.0], vec![0.0]];
        let mut periodic = [false; 2];
        for a in 0..n {
            let (lo, hi, per) = imm.grid_range(chart, a);
            axes[a] = density;
            periodic[a] = per;
            coords[a] = (0..density)
                .map(|i| {
                    if per {
                        lo + (hi - lo) * i as f64 / density as f64
                    } else {
                        lo + (hi - lo) * i as f64 / (density - 1) as f64
                    }
                })
                .collect();
        }
        let len = axes[0] * axes[1];
        let mut points = vec![Vec::with_capacity(len); m];
        let mut jacs = vec![Vec::with_capacity(len); m * n];
        let (mut jmax, mut kmax) = (0.0f64, 0.0f64);
        for i0 in 0..axes[0] {
            for i1 in 0..axes[1] {
                let xi: Vec<f64> = [coords[0][i0], coords[1][i1]][..n].to_vec();
                let jet = imm.jet(chart, &xi)?;
                for (r, col) in points.iter_mut().enumerate() {
                    col.push(jet.value[r] as f32);
                }
                // column-major: J[(r, a)] at a * m + r
                for (k, col) in jacs.iter_mut().enumerate() {
                    col.push(jet.jac[(k % m, k / m)] as f32);
                }
                jmax = jmax.max(jet.jac.column_iter().map(|c| c.norm()).fold(0.0, f64::max));
                kmax = kmax.max(jet.second.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
        Ok((
            Self {
                axes,
                coords,
                periodic,
                points,
                jacs,
            },
            jmax,
            kmax,
        ))
    }

    fn len(&self) -> usize {
        self.axes[0] * self.axes[1]
    }

    fn point(&self, idx: usize) -> Vec<f32> {
        self.points.iter().map(|c| c[idx]).collect()
    }

    fn jac(&self, idx: usize) -> Vec<f32> {
        self.jacs.iter().map(|c| c[idx]).collect()
    }
}

/// `|r|^2` for one first point against every second point, with the
/// dimensions fixed at compile time so the inner loop vectorizes.
fn scan_row_fixed<const M: usize, const N: usize>(
    p1: &[f32],
    j1: &[f32],
    g2: &ChartGrid,
    excl2: f32,
    out: &mut [f32],
) {
    let p2: [&[f32]; M] = std::array::from_fn(|r| &g2.points[r][..out.len()]);
    let j2: [&[f32]; 8] = std::array::from_fn(|k| if k < M * N { &g2.jacs[k][..out.len()] } else { &[][..] });
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut d = [0f32; M];
        let mut len2 = 0f32;
        for r in 0..M {
            d[r] = p1[r] - p2[r][idx];
            len2 += d[r] * d[r];
        }
        let mut s = 0f32;
        for a in 0..N {
            let (mut r1, mut r2) = (0f32, 0f32);
            for r in 0..M {
                r1 += j1[a * M + r] * d[r];
                r2 += j2[a * M + r][idx] * d[r];
            }
            s += r1 * r1 + r2 * r2;
        }
        *slot = if len2 < excl2 { f32::INFINITY } else { s };
    }
}

/// Generic fallback of [`scan_row_fixed`].
fn scan_row_dyn(m: usize, n: usize, p1: &[f32], j1: &[f32], g2: &ChartGrid, excl2: f32, out: &mut [f32]) {
    let mut d = vec![0f32; m];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut len2 = 0f32;
        for r in 0..m {
            d[r] = p1[r] - g2.points[r][idx];
            len2 += d[r] * d[r];
        }
        let mut s = 0f32;
        for a in 0..n {
            let (mut r1, mut r2) = (0f32, 0f32);
            for r in 0..m {
                r1 += j1[a * m + r] * d[r];
                r2 += g2.jacs[a * m + r][idx] * d[r];
            }
            s += r1 * r1 + r2 * r2;
        }
        *slot = if len2 < excl2 { f32::INFINITY } else { s };
    }
}

fn scan_row(m: usize, n: usize, p1: &[f32], j1: &[f32], g2: &ChartGrid, excl2: f32, out: &mut [f32]) {
    match (m, n) {
        (2, 1) => scan_row_fixed::<2, 1>(p1, j1, g2, excl2, out),
        (3, 1) => scan_row_fixed::<3, 1>(p1, j1, g2, excl2, out),
        (3, 2) => scan_row_fixed::<3, 2>(p1, j1, g2, excl2, out),
        (4, 2) => scan_row_fixed::<4, 2>(p1, j1, g2, excl2, out),
        _ => scan_row_dyn(m, n, p1, j1, g2, excl2, out),
    }
}

/// Scans one ordered chart pair and returns grid-local minima below `thr2`.
fn scan_pair(
    imm: &Immersion,
    g1: &ChartGrid,
    g2: &ChartGrid,
    c1: usize,
    c2: usize,
    excl: f64,
    thr2: f32,
) -> Vec<(ChartPoint, ChartPoint)> {
    let (m, n) = (imm.ambient_dim(), imm.intrinsic_dim());
    let s0 = g1.axes[0];
    let s1 = g1.axes[1];
    let row = g2.len();
    let slab_len = s1 * row;
    let excl2 = (excl * excl) as f32;
    let compute = |i0: usize| -> Vec<f32> {
        let mut slab = vec![0f32; slab_len];
        slab.par_chunks_mut(row).enumerate().for_each(|(i1, out)| {
            let idx = i0 * s1 + i1;
            scan_row(m, n, &g1.point(idx), &g1.jac(idx), g2, excl2, out);
        });
        slab
    };

    // axis sizes and periodicity of the 4-D grid (i0, i1, k0, k1)
    let sizes = [s0, s1, g2.axes[0], g2.axes[1]];
    let per = [g1.periodic[0], g1.periodic[1], g2.periodic[0], g2.periodic[1]];
    let step = |i: usize, axis: usize, dir: isize| -> Option<usize> {
        let s = sizes[axis];
        if s == 1 {
            return None;
        }
        let j = i as isize + dir;
        if per[axis] {
            Some(j.rem_euclid(s as isize) as usize)
        } else if j < 0 || j >= s as isize {
            None
        } else {
            Some(j as usize)
        }
    };
    let interior = |i: usize, axis: usize| per[axis] || sizes[axis] == 1 || (i > 0 && i + 1 < sizes[axis]);

    let mut cache: HashMap<usize, Vec<f32>> = HashMap::new();
    let mut found = Vec::new();
    for i0 in 0..s0 {
        if !interior(i0, 0) {
            continue;
        }
        let neighbours0: Vec<usize> = [-1isize, 1].iter().filter_map(|&dir| step(i0, 0, dir)).collect();
        for &k in neighbours0.iter().chain(std::iter::once(&i0)) {
            cache.entry(k).or_insert_with(|| compute(k));
        }
        let cur = &cache[&i0];
        let others: Vec<&Vec<f32>> = neighbours0.iter().map(|k| &cache[k]).collect();
        let at = |a: usize, b: usize, c: usize| (a * sizes[2] + b) * sizes[3] + c;
        let local: Vec<(usize, usize, usize)> = (0..s1)
            .into_par_iter()
            .flat_map_iter(|i1| {
                let mut hits = Vec::new();
                if !interior(i1, 1) {
                    return hits.into_iter();
                }
                for k0 in 0..sizes[2] {
                    if !interior(k0, 2) {
                        continue;
                    }
                    for k1 in 0..sizes[3] {
                        if !interior(k1, 3) {
                            continue;
                        }
                        let v = cur[at(i1, k0, k1)];
                        if !(v < thr2) {
                            continue;
                        }
                        // axis neighbours only: in the flat valleys of nearly
                        // degenerate shapes the grid minimum along a valley is
                        // set by aliasing, and a full-neighbourhood test can
                        // miss one of two critical pairs sharing a valley.
                        // Neighbours in the excluded band are infinite, which
                        // disqualifies the cell: true critical pairs lie well
                        // outside the band
                        let below = |w: f32| w.is_finite() && v <= w;
                        let mut is_min = others.iter().all(|o| below(o[at(i1, k0, k1)]));
                        for dir in [-1isize, 1] {
                            if !is_min {
                                break;
                            }
                            if let Some(j) = step(i1, 1, dir) {
                                is_min &= below(cur[at(j, k0, k1)]);
                            }
                            if let Some(j) = step(k0, 2, dir) {
                                is_min &= below(cur[at(i1, j, k1)]);
                            }
                            if let Some(j) = step(k1, 3, dir) {
                                is_min &= below(cur[at(i1, k0, j)]);
                            }
                        }
                        if is_min {
                            hits.push((i1, k0, k1));
                        }
                    }
                }
                hits.into_iter()
            })
            .collect();
        for (i1, k0, k1) in local {
            let a = ChartPoint {
                chart: c1,
                xi: [g1.coords[0][i0], g1.coords[1][i1]][..n].to_vec(),
            };
            let b = ChartPoint {
                chart: c2,
                xi: [g2.coords[0][k0], g2.coords[1][k1]][..n].to_vec(),
            };
            found.push((a, b));
        }
        // keep the slabs still needed: the next one, and the wrap-around ends
        let keep = [i0, (i0 + 1) % s0, 0, s0 - 1];
        cache.retain(|k, _| keep.contains(k));
    }
    found
}

/// Levenberg-Marquardt on a square or overdetermined system with a
/// finite-difference Jacobian. `eval` returns `None` outside its domain.
/// Returns the solution, its residual and its Jacobian.
fn levenberg_marquardt(
    z0: DVector<f64>,
    eval: &dyn Fn(&DVector<f64>) -> Option<DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> Option<(DVector<f64>, DVector<f64>, DMatrix<f64>)> {
    const FD_STEP: f64 = 1e-7;
    // central differences for the returned Jacobian, which feeds the
    // degeneracy test; forward differences are enough to steer the iteration
    let central = |z: &DVector<f64>, r: &DVector<f64>| -> Option<DMatrix<f64>> {
        let mut j = DMatrix::zeros(r.len(), z.len());
        for c in 0..z.len() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[c] += FD_STEP;
            zm[c] -= FD_STEP;
            let col = (eval(&zp)? - eval(&zm)?) / (2.0 * FD_STEP);
            j.set_column(c, &col);
        }
        Some(j)
    };
    let forward = |z: &DVector<f64>, r: &DVector<f64>| -> Option<DMatrix<f64>> {
        let mut j = DMatrix::zeros(r.len(), z.len());
        for c in 0..z.len() {
            let mut zp = z.clone();
            zp[c] += FD_STEP;
            let col = (eval(&zp)? - r) / FD_STEP;
            j.set_column(c, &col);
        }
        Some(j)
    };
    let mut z = z0;
    let mut r = eval(&z)?;
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        if r.norm() < tol {
            let j = central(&z, &r)?;
            return Some((z, r, j));
        }
        let j = forward(&z, &r)?;
        let jtj = j.tr_mul(&j);
        let jtr = j.tr_mul(&r);
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(delta) = a.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &z + &delta;
            if let Some(rt) = eval(&trial) {
                if rt.norm() < r.norm() {
                    z = trial;
                    r = rt;
                    lambda = (lambda * 0.1).max(1e-15);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if r.norm() < tol {
        let j = central(&z, &r)?;
        Some((z, r, j))
    } else {
        None
    }
}

fn pack(a: &ChartPoint, b: &ChartPoint) -> DVector<f64> {
    DVector::from_iterator(a.xi.len() + b.xi.len(), a.xi.iter().chain(&b.xi).copied())
}

fn unpack(z: &[f64], c1: usize, c2: usize, n: usize) -> (ChartPoint, ChartPoint) {
    (
        ChartPoint { chart: c1, xi: z[..n].to_vec() },
        ChartPoint { chart: c2, xi: z[n..2 * n].to_vec() },
    )
}

/// Chart-aware polish of `[J_1ᵀ d; J_2ᵀ d] = 0`; the chart of each point may
/// change after an accepted step, so charts travel inside the closure state.
fn polish_pair(
    imm: &Immersion,
    a: &ChartPoint,
    b: &ChartPoint,
    tol: f64,
) -> Option<(ChartPoint, ChartPoint, DMatrix<f64>)> {
    let n = imm.intrinsic_dim();
    let (mut a, mut b) = (imm.recenter(a), imm.recenter(b));
    // restart LM whenever recentering switches a chart; a few rounds suffice
    for _ in 0..4 {
        let (c1, c2) = (a.chart, b.chart);
        let eval = |z: &DVector<f64>| -> Option<DVector<f64>> {
            let (pa, pb) = unpack(z.as_slice(), c1, c2, n);
            super::residual::critical_residual(imm, &pa, &pb).ok()
        };
        let (z, _, j) = levenberg_marquardt(pack(&a, &b), &eval, tol, 100)?;
        let (pa, pb) = unpack(z.as_slice(), c1, c2, n);
        let (ra, rb) = (imm.recenter(&pa), imm.recenter(&pb));
        if ra.chart == c1 && rb.chart == c2 {
            return Some((ra, rb, j));
        }
        a = ra;
        b = rb;
    }
    None
}

/// Directions on `S^{m-1}` from a grid on the faces of `[-1, 1]^m`.
fn sphere_directions(m: usize, s: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    let face = s.pow((m - 1) as u32);
    for axis in 0..m {
        for sign in [-1.0, 1.0] {
            for idx in 0..face {
                let mut rem = idx;
                let mut v = DVector::zeros(m);
                for c in (0..m).filter(|&c| c != axis) {
                    let i = rem % s;
                    rem /= s;
                    v[c] = -1.0 + 2.0 * (i as f64 + 0.5) / s as f64;
                }
                v[axis] = sign;
                out.push(v.normalize());
            }
        }
    }
    out
}

/// Critical points of `F` seeded from one ordered parameter pair.
fn lift_pair(
    imm: &Immersion,
    a: &ChartPoint,
    b: &ChartPoint,
    dirs: &[DVector<f64>],
    tol: f64,
) -> Vec<(DVector<f64>, DVector<f64>, DVector<f64>)> {
    const MAX_STARTS: usize = 6;
    const SUPPRESS: f64 = 0.5;
    let (m, n) = (imm.ambient_dim(), imm.intrinsic_dim());
    let (c1, c2) = (a.chart, b.chart);
    let system = |z: &DVector<f64>| -> Option<DVector<f64>> {
        let x = z.rows(0, m).into_owned();
        let (pa, pb) = unpack(&z.as_slice()[m..], c1, c2, n);
        let ja = imm.jet(pa.chart, &pa.xi).ok()?;
        let jb = imm.jet(pb.chart, &pb.xi).ok()?;
        let d = &ja.value - &jb.value;
        let tangential = &d - &x * x.dot(&d);
        let mut out = DVector::zeros(2 * n + m + 1);
        out.rows_mut(0, n).copy_from(&ja.jac.tr_mul(&x));
        out.rows_mut(n, n).copy_from(&(-jb.jac.tr_mul(&x)));
        out.rows_mut(2 * n, m).copy_from(&tangential);
        out[2 * n + m] = x.norm_squared() - 1.0;
        Some(out)
    };
    let mut scored: Vec<(f64, usize)> = dirs
        .iter()
        .enumerate()
        .filter_map(|(i, x)| {
            let z = DVector::from_iterator(
                m + 2 * n,
                x.iter().chain(&a.xi).chain(&b.xi).copied(),
            );
            system(&z).map(|r| (r.norm(), i))
        })
        .collect();
    scored.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let mut starts: Vec<&DVector<f64>> = Vec::new();
    let mut found = Vec::new();
    for (_, i) in scored {
        if starts.len() >= MAX_STARTS {
            break;
        }
        let x = &dirs[i];
        if starts.iter().any(|s| (*s - x).norm() < SUPPRESS) {
            continue;
        }
        starts.push(x);
        let z0 = DVector::from_iterator(m + 2 * n, x.iter().chain(&a.xi).chain(&b.xi).copied());
        if let Some((z, _, _)) = levenberg_marquardt(z0, &system, tol, 100) {
            let (pa, pb) = unpack(&z.as_slice()[m..], c1, c2, n);
            if let (Ok(p1), Ok(p2)) = (imm.point(pa.chart, &pa.xi), imm.point(pb.chart, &pb.xi)) {
                found.push((z.rows(0, m).into_owned(), p1, p2));
            }
        }
    }
    found
}

/// Counts double normals by exhaustive grid search; see the module docs.
pub fn brute_force_oracle(imm: &Immersion, cfg: &OracleConfig) -> Result<OracleReport> {
    let n = imm.intrinsic_dim();
    if n > 2 {
        return Err(Error::Unsupported(format!(
            "grid oracle needs intrinsic dimension at most 2, got {n}"
        )));
    }
    if cfg.density < 3 {
        return Err(Error::InvalidArgument("oracle density must be at least 3".into()));
    }
    let extent = imm.extent();
    let scan_excl = cfg.scan_exclusion.unwrap_or(0.2 * extent);
    let diag_excl = cfg.diagonal_exclusion.unwrap_or(1e-3 * extent);

    let mut grids = Vec::new();
    let (mut jmax, mut kmax) = (0.0f64, 0.0f64);
    for c in 0..imm.charts().len() {
        let (g, j, k) = ChartGrid::build(imm, c, cfg.density)?;
        jmax = jmax.max(j);
        kmax = kmax.max(k);
        grids.push(g);
    }
    // spacing of the coarsest axis and a bound on |Hess g| give the
    // largest residual the grid point nearest a critical pair can have
    let h = grids
        .iter()
        .enumerate()
        .flat_map(|(c, g)| (0..n).map(move |a| (c, g, a)))
        .map(|(c, g, a)| {
            let (lo, hi, _) = imm.grid_range(c, a);
            (hi - lo) / (g.axes[a] - 1) as f64
        })
        .fold(0.0, f64::max);
    let hess_bound = 2.0 * jmax * jmax + extent * kmax;
    let thr = 2.0 * hess_bound * h * (2.0 * n as f64).sqrt();
    let thr2 = (thr * thr) as f32;

    let mut candidates = Vec::new();
    let mut grid_pairs = 0u64;
    for c1 in 0..grids.len() {
        // the swap symmetry makes (c2, c1) redundant given (c1, c2)
        for c2 in c1..grids.len() {
            grid_pairs += (grids[c1].len() * grids[c2].len()) as u64;
            candidates.extend(scan_pair(imm, &grids[c1], &grids[c2], c1, c2, scan_excl, thr2));
        }
    }

    // polish every candidate and merge
    let polished: Vec<_> = candidates
        .par_iter()
        .map(|(a, b)| polish_pair(imm, a, b, cfg.residual_tol))
        .collect();
    let mut solutions: Vec<OracleSolution> = Vec::new();
    let mut pairs: Vec<(ChartPoint, ChartPoint)> = Vec::new();
    for (a, b, j) in polished.into_iter().flatten() {
        let (Ok(p1), Ok(p2)) = (imm.point(a.chart, &a.xi), imm.point(b.chart, &b.xi)) else {
            continue;
        };
        let length = (&p1 - &p2).norm();
        if length < diag_excl {
            continue;
        }
        let (p1, p2): (Vec<f64>, Vec<f64>) = (p1.iter().copied().collect(), p2.iter().copied().collect());
        if solutions
            .iter()
            .any(|s| endpoint_set_distance(&s.p1, &s.p2, &p1, &p2) < cfg.merge_radius)
        {
            continue;
        }
        // Hessian of g is diag(I, -I) times the residual Jacobian
        let mut hess = j.clone();
        for r in n..2 * n {
            for c in 0..2 * n {
                hess[(r, c)] = -hess[(r, c)];
            }
        }
        let sym = (&hess + hess.transpose()) * 0.5;
        let ev = sorted_eigenvalues(&sym);
        let norm = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let min_abs = ev.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        solutions.push(OracleSolution {
            p1,
            p2,
            length,
            nondegenerate: norm > 0.0 && min_abs >= cfg.degeneracy_threshold * norm,
        });
        pairs.push((a, b));
    }
    solutions.sort_by(|x, y| x.length.total_cmp(&y.length));
    let count = solutions.iter().filter(|s| s.nondegenerate).count();

    let f_count = cfg.lift.then(|| {
        let dirs = sphere_directions(imm.ambient_dim(), cfg.sphere_density);
        // every critical point of F projects to a critical pair of g, so the
        // distinct polished pairs (in both orders) seed the full system
        let lifted: Vec<_> = pairs
            .par_iter()
            .flat_map_iter(|(a, b)| {
                let mut v = lift_pair(imm, a, b, &dirs, cfg.residual_tol);
                v.extend(lift_pair(imm, b, a, &dirs, cfg.residual_tol));
                v.into_iter()
            })
            .collect();
        let mut distinct: Vec<(DVector<f64>, DVector<f64>, DVector<f64>)> = Vec::new();
        for (x, p1, p2) in lifted {
            if (&p1 - &p2).norm() < diag_excl {
                continue;
            }
            let same = |(y, q1, q2): &(DVector<f64>, DVector<f64>, DVector<f64>)| {
                (y - &x).norm().max((q1 - &p1).norm()).max((q2 - &p2).norm()) < cfg.merge_radius
            };
            if !distinct.iter().any(same) {
                distinct.push((x, p1, p2));
            }
        }
        distinct.len()
    });

    Ok(OracleReport {
        density: cfg.density,
        grid_pairs,
        candidates: candidates.len(),
        count,
        degenerate: solutions.len() - count,
        solutions,
        f_count,
    })
}
