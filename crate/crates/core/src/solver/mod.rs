//! Double normals as critical points of `g(x, y) = |f(x) - f(y)|^2 / 2` on
//! `M x M` minus the diagonal, modulo the swap `(x, y) -> (y, x)`.

pub mod bott;
pub mod classify;
pub mod newton;
pub mod oracle;
pub mod residual;
pub mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use bott::{detect_bott_families, BottCluster};
pub use classify::{classify_passing, morse_data, MorseData};
pub use newton::{newton_refine, NewtonReport, NewtonStatus};
pub use oracle::{brute_force_oracle, OracleConfig, OracleReport};
pub use residual::{critical_residual, pair_system, PairSystem};
pub use search::{find_double_normals, find_double_normals_from_seeds, SeedPair};

/// Tolerances and budgets of the multi-start search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed_count: usize,
    pub rng_seed: u64,
    pub newton_max_iter: usize,
    /// Converged once `|residual| < residual_tol`.
    pub residual_tol: f64,
    /// Two solutions within this endpoint-set distance are the same.
    pub dedup_radius: f64,
    /// Pairs shorter than this are treated as diagonal; `None` means
    /// `1e-3` times the extent of the shape.
    pub diagonal_exclusion: Option<f64>,
    /// Degenerate when `|lambda_min| < degeneracy_threshold * |Hess|`.
    pub degeneracy_threshold: f64,
    /// Single-linkage radius for grouping degenerate solutions into
    /// families; `None` means `0.3` times the extent of the shape.
    pub bott_link_radius: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed_count: 20_000,
            rng_seed: 0,
            newton_max_iter: 50,
            residual_tol: 1e-10,
            dedup_radius: 1e-4,
            diagonal_exclusion: None,
            degeneracy_threshold: 1e-6,
            bott_link_radius: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.seed_count < 1 {
            return Err(Error::InvalidArgument("seed_count must be at least 1".into()));
        }
        if self.newton_max_iter < 1 {
            return Err(Error::InvalidArgument("newton_max_iter must be at least 1".into()));
        }
        let mut tolerances = vec![
            ("residual_tol", self.residual_tol),
            ("dedup_radius", self.dedup_radius),
            ("degeneracy_threshold", self.degeneracy_threshold),
        ];
        if let Some(v) = self.diagonal_exclusion {
            tolerances.push(("diagonal_exclusion", v));
        }
        if let Some(v) = self.bott_link_radius {
            tolerances.push(("bott_link_radius", v));
        }
        for (name, v) in tolerances {
            if !positive(v) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn diagonal_exclusion_for(&self, extent: f64) -> f64 {
        self.diagonal_exclusion.unwrap_or(1e-3 * extent)
    }

    pub fn bott_link_radius_for(&self, extent: f64) -> f64 {
        self.bott_link_radius.unwrap_or(0.3 * extent)
    }
}

/// Relative position of the co-orientations at the two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PassingClass {
    /// Co-orientations point the same way along the segment.
    Passing,
    /// Co-orientations point opposite ways along the segment.
    Counterpassing,
    /// No co-orientation (codimension above one).
    Unclassified,
}

impl fmt::Display for PassingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PassingClass::Passing => "passing",
            PassingClass::Counterpassing => "counterpassing",
            PassingClass::Unclassified => "unclassified",
        })
    }
}

/// One double normal, stored with its endpoints in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleNormal {
    pub chart1: usize,
    pub xi1: Vec<f64>,
    pub chart2: usize,
    pub xi2: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub length: f64,
    pub residual: f64,
    /// Number of negative Hessian eigenvalues; absent when degenerate.
    pub index: Option<usize>,
    pub nondegenerate: bool,
    pub class: PassingClass,
}

impl DoubleNormal {
    /// `g = |p1 - p2|^2 / 2`.
    pub fn critical_value(&self) -> f64 {
        0.5 * self.length * self.length
    }

    /// Unit vector `(p1 - p2) / length`.
    pub fn direction(&self) -> Vec<f64> {
        self.p1
            .iter()
            .zip(&self.p2)
            .map(|(a, b)| (a - b) / self.length)
            .collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.p1.iter().zip(&self.p2).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Order-insensitive distance between endpoint sets.
    pub fn endpoint_distance(&self, other: &DoubleNormal) -> f64 {
        endpoint_set_distance(&self.p1, &self.p2, &other.p1, &other.p2)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `min` over the two matchings of the larger endpoint displacement.
pub fn endpoint_set_distance(a1: &[f64], a2: &[f64], b1: &[f64], b2: &[f64]) -> f64 {
    let straight = dist(a1, b1).max(dist(a2, b2));
    let crossed = dist(a1, b2).max(dist(a2, b1));
    straight.min(crossed)
}

/// Seed bookkeeping of one search.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub seeds: usize,
    pub converged: usize,
    pub diverged: usize,
    pub singular: usize,
    /// Converged seeds merged into an earlier solution.
    pub deduplicated: usize,
    /// Seeds or limits closer to the diagonal than the exclusion radius.
    pub excluded_near_diagonal: usize,
    /// Distinct degenerate solutions (members of Bott clusters).
    pub degenerate_solutions: usize,
    /// Set when more than 90% of the seeds failed to converge.
    pub divergence_warning: bool,
}

impl Diagnostics {
    pub fn failed(&self) -> usize {
        self.diverged + self.singular
    }
}

/// The outcome of [`find_double_normals`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub shape: String,
    pub config: SolverConfig,
    /// Nondegenerate, deduplicated double normals sorted by length.
    pub diameters: Vec<DoubleNormal>,
    pub bott_clusters: Vec<BottCluster>,
    pub diagnostics: Diagnostics,
    /// Distinct degenerate solutions feeding `bott_clusters`.
    #[serde(skip)]
    pub degenerate: Vec<DoubleNormal>,
}

impl SolveResult {
    pub fn count_class(&self, class: PassingClass) -> usize {
        self.diameters.iter().filter(|d| d.class == class).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solve results serialize")
    }

    /// Reads a result written by [`SolveResult::to_json`]; degenerate samples
    /// are not persisted.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One row per diameter; vectors are `;`-separated.
    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let mut out = String::from(
            "row,chart1,xi1,chart2,xi2,p1,p2,length,residual,index,nondegenerate,class\n",
        );
        for (i, d) in self.diameters.iter().enumerate() {
            out.push_str(&format!(
                "{i},{},{},{},{},{},{},{},{},{},{},{}\n",
                d.chart1,
                join(&d.xi1),
                d.chart2,
                join(&d.xi2),
                join(&d.p1),
                join(&d.p2),
                d.length,
                d.residual,
                d.index.map_or(String::new(), |v| v.to_string()),
                d.nondegenerate,
                d.class
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            seed_count: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            residual_tol: -1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn endpoint_distance_ignores_order() {
        let (a, b) = ([0.0, 0.0], [1.0, 0.0]);
        assert_eq!(endpoint_set_distance(&a, &b, &b, &a), 0.0);
        assert!((endpoint_set_distance(&a, &b, &[0.0, 0.1], &b) - 0.1).abs() < 1e-15);
    }
}
