//! Multi-start search for all double normals.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bott::cluster_families;
use super::classify::{classify_passing, morse_data_of};
use super::newton::{newton_refine, sorted_eigenpairs, NewtonStatus};
use super::residual::{pair_system, PairSystem};
use super::{endpoint_set_distance, DoubleNormal, Diagnostics, PassingClass, SolveResult, SolverConfig};
use crate::geometry::{ChartPoint, Immersion};
use crate::Result;

/// Critical values closer than this (relative) belong to one family.
const FAMILY_VALUE_TOL: f64 = 1e-6;
/// Cap on the auxiliary samples added while walking degenerate families.
const MAX_FAMILY_SAMPLES: usize = 4096;

pub type SeedPair = (ChartPoint, ChartPoint);

/// Deterministic seed pairs drawn uniformly from `M x M`.
pub fn seed_pairs(imm: &Immersion, count: usize, rng_seed: u64) -> Vec<SeedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| {
            let a = imm.sample(&mut rng);
            let b = imm.sample(&mut rng);
            (a, b)
        })
        .collect()
}

/// Finds, deduplicates, classifies and analyses the double normals of `imm`.
pub fn find_double_normals(imm: &Immersion, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let seeds = seed_pairs(imm, cfg.seed_count, cfg.rng_seed);
    find_double_normals_from_seeds(imm, cfg, &seeds)
}

/// Dedup index keyed by the chord midpoint, which moves by at most the
/// endpoint-set distance.
struct Dedup {
    radius: f64,
    grid: HashMap<Vec<i64>, Vec<usize>>,
    offsets: Vec<Vec<i64>>,
}

impl Dedup {
    fn new(radius: f64, dim: usize) -> Self {
        let offsets = (0..3usize.pow(dim as u32))
            .map(|mut idx| {
                (0..dim)
                    .map(|_| {
                        let v = (idx % 3) as i64 - 1;
                        idx /= 3;
                        v
                    })
                    .collect()
            })
            .collect();
        Self {
            radius,
            grid: HashMap::new(),
            offsets,
        }
    }

    fn cell(&self, p1: &[f64], p2: &[f64]) -> Vec<i64> {
        p1.iter()
            .zip(p2)
            .map(|(a, b)| (0.5 * (a + b) / self.radius).floor() as i64)
            .collect()
    }

    /// Lowest index of a stored solution within the radius of the chord `p1 p2`.
    fn nearest(&self, p1: &[f64], p2: &[f64], store: &[DoubleNormal]) -> Option<usize> {
        let cell = self.cell(p1, p2);
        let mut hit: Option<usize> = None;
        for off in &self.offsets {
            let key: Vec<i64> = cell.iter().zip(off).map(|(c, o)| c + o).collect();
            if let Some(bucket) = self.grid.get(&key) {
                for &j in bucket {
                    let d = endpoint_set_distance(&store[j].p1, &store[j].p2, p1, p2);
                    if d < self.radius && hit.is_none_or(|h| j < h) {
                        hit = Some(j);
                    }
                }
            }
        }
        hit
    }

    fn insert(&mut self, dn: &DoubleNormal, idx: usize) {
        self.grid.entry(self.cell(&dn.p1, &dn.p2)).or_default().push(idx);
    }

    /// Index of a stored solution within the radius, or inserts `idx`.
    fn find_or_insert(&mut self, dn: &DoubleNormal, idx: usize, store: &[DoubleNormal]) -> Option<usize> {
        let hit = self.nearest(&dn.p1, &dn.p2, store);
        if hit.is_none() {
            self.insert(dn, idx);
        }
        hit
    }
}

/// Double normal at a converged pair, endpoints in canonical order.
fn assemble(a: ChartPoint, b: ChartPoint, sys: PairSystem, cfg: &SolverConfig) -> DoubleNormal {
    // the iteration may have crossed the lexicographic tie, so reorder
    let (length, residual) = (sys.length(), sys.residual.norm());
    let (a, b, p1, p2) = if super::newton::lex_greater(&sys.p1, &sys.p2) {
        (b, a, sys.p2, sys.p1)
    } else {
        (a, b, sys.p1, sys.p2)
    };
    let morse = morse_data_of(&sys.hessian, cfg.degeneracy_threshold);
    DoubleNormal {
        chart1: a.chart,
        xi1: a.xi,
        chart2: b.chart,
        xi2: b.xi,
        p1: p1.iter().copied().collect(),
        p2: p2.iter().copied().collect(),
        length,
        residual,
        index: morse.nondegenerate.then_some(morse.index),
        nondegenerate: morse.nondegenerate,
        class: PassingClass::Unclassified,
    }
}

/// Adds samples of the critical families through the degenerate solutions in
/// `samples`, so that single linkage at `link` sees each family as connected.
///
/// Multi-start Newton does not land uniformly on a critical manifold, and
/// sparse regions would otherwise split one family into several clusters.
/// From every sample the walk steps along each Hessian null direction, by
/// about half the link radius in endpoint displacement, and refines back onto
/// the family; results at the same critical value that are not already
/// covered become new samples.
fn walk_families(imm: &Immersion, cfg: &SolverConfig, link: f64, samples: &mut Vec<DoubleNormal>) {
    let exclusion = cfg.diagonal_exclusion_for(imm.extent());
    let n = imm.intrinsic_dim();
    let mut cover = Dedup::new(0.25 * link, imm.ambient_dim());
    for (i, s) in samples.iter().enumerate() {
        if cover.nearest(&s.p1, &s.p2, samples).is_none() {
            cover.insert(s, i);
        }
    }
    let limit = samples.len() + MAX_FAMILY_SAMPLES;
    let mut next = 0;
    while next < samples.len() && samples.len() < limit {
        let src = samples[next].clone();
        next += 1;
        let (a, b) = (
            ChartPoint { chart: src.chart1, xi: src.xi1.clone() },
            ChartPoint { chart: src.chart2, xi: src.xi2.clone() },
        );
        let Ok(sys) = pair_system(imm, &a, &b) else { continue };
        let (Ok(ja), Ok(jb)) = (imm.jet(a.chart, &a.xi), imm.jet(b.chart, &b.xi)) else { continue };
        let pairs = sorted_eigenpairs(&sys.hessian);
        let norm = pairs.iter().fold(0.0f64, |m, (v, _)| m.max(v.abs()));
        for (_, v) in pairs.iter().filter(|(v, _)| v.abs() < cfg.degeneracy_threshold * norm) {
            let (va, vb) = (v.rows(0, n).into_owned(), v.rows(n, n).into_owned());
            let (da, db) = (&ja.jac * &va, &jb.jac * &vb);
            let moved = da.norm().max(db.norm());
            if !(moved > 0.0) {
                continue;
            }
            let t = 0.5 * link / moved;
            for sign in [t, -t] {
                // first-order prediction; skip steps into covered territory
                let q1: Vec<f64> = sys.p1.iter().zip(da.iter()).map(|(p, d)| p + sign * d).collect();
                let q2: Vec<f64> = sys.p2.iter().zip(db.iter()).map(|(p, d)| p + sign * d).collect();
                if cover.nearest(&q1, &q2, samples).is_some() {
                    continue;
                }
                let shift = |p: &ChartPoint, d: &nalgebra::DVector<f64>| ChartPoint {
                    chart: p.chart,
                    xi: p.xi.iter().zip(d.iter()).map(|(x, s)| x + sign * s).collect(),
                };
                let r = newton_refine(imm, (shift(&a, &va), shift(&b, &vb)), cfg);
                if r.status != NewtonStatus::Converged {
                    continue;
                }
                let sys = r.system.expect("converged reports carry their system");
                if sys.length() < exclusion {
                    continue;
                }
                let dn = assemble(r.a, r.b, sys, cfg);
                let (v0, v1) = (src.critical_value(), dn.critical_value());
                if (v1 - v0).abs() > FAMILY_VALUE_TOL * v0.abs().max(v1.abs()) {
                    continue;
                }
                if cover.nearest(&dn.p1, &dn.p2, samples).is_none() {
                    cover.insert(&dn, samples.len());
                    samples.push(dn);
                }
            }
        }
    }
}

/// As [`find_double_normals`] with explicit seeds. Results do not depend on the
/// endpoint order inside each seed.
pub fn find_double_normals_from_seeds(
    imm: &Immersion,
    cfg: &SolverConfig,
    seeds: &[SeedPair],
) -> Result<SolveResult> {
    cfg.validate()?;
    let reports: Vec<_> = seeds
        .par_iter()
        .map(|s| newton_refine(imm, s.clone(), cfg))
        .collect();

    let exclusion = cfg.diagonal_exclusion_for(imm.extent());
    let mut diag = Diagnostics {
        seeds: seeds.len(),
        ..Diagnostics::default()
    };
    let mut store: Vec<DoubleNormal> = Vec::new();
    let mut dedup = Dedup::new(cfg.dedup_radius, imm.ambient_dim());
    for r in reports {
        match r.status {
            NewtonStatus::Converged => {}
            NewtonStatus::Diverged => {
                diag.diverged += 1;
                continue;
            }
            NewtonStatus::Singular => {
                diag.singular += 1;
                continue;
            }
            NewtonStatus::ExcludedDiagonal => {
                diag.excluded_near_diagonal += 1;
                continue;
            }
        }
        diag.converged += 1;
        let sys = r.system.expect("converged reports carry their system");
        let length = sys.length();
        if length < exclusion {
            diag.excluded_near_diagonal += 1;
            continue;
        }
        let mut dn = assemble(r.a, r.b, sys, cfg);
        if dedup.find_or_insert(&dn, store.len(), &store).is_some() {
            diag.deduplicated += 1;
            continue;
        }
        if dn.nondegenerate {
            dn.class = classify_passing(imm, &dn)?;
        }
        store.push(dn);
    }
    diag.divergence_warning = 10 * diag.failed() > 9 * diag.seeds;

    let (mut diameters, degenerate): (Vec<_>, Vec<_>) = store.into_iter().partition(|d| d.nondegenerate);
    diameters.sort_by(|x, y| {
        x.length
            .total_cmp(&y.length)
            .then_with(|| super::newton::lex_slice_cmp(&x.p1, &y.p1))
            .then_with(|| super::newton::lex_slice_cmp(&x.p2, &y.p2))
    });
    diag.degenerate_solutions = degenerate.len();
    let link = cfg.bott_link_radius_for(imm.extent());
    let mut samples = degenerate.clone();
    walk_families(imm, cfg, link, &mut samples);
    let bott_clusters = cluster_families(&samples, degenerate.len(), link, FAMILY_VALUE_TOL);
    Ok(SolveResult {
        shape: imm.spec().to_string(),
        config: cfg.clone(),
        diameters,
        bott_clusters,
        diagnostics: diag,
        degenerate,
    })
}
