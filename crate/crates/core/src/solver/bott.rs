//! Grouping of degenerate critical points into critical families.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::DoubleNormal;

/// A connected family of degenerate critical points with a common critical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottCluster {
    pub members: usize,
    /// Mean of `g = l^2 / 2` over the members.
    pub critical_value: f64,
    /// Mean chord length over the members.
    pub length: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn cell_of(p: &[f64], size: f64) -> Vec<i64> {
    p.iter().map(|x| (x / size).floor() as i64).collect()
}

/// All integer offsets in `{-1, 0, 1}^dim`.
fn neighbour_offsets(dim: usize) -> Vec<Vec<i64>> {
    (0..3usize.pow(dim as u32))
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let v = (idx % 3) as i64 - 1;
                    idx /= 3;
                    v
                })
                .collect()
        })
        .collect()
}

/// Groups solutions whose critical values agree to `value_tol` (relative) and
/// that are connected by chains of solutions pairwise within `link_radius`
/// (endpoint-set distance). Clusters are sorted by critical value.
pub fn detect_bott_families(solutions: &[DoubleNormal], link_radius: f64, value_tol: f64) -> Vec<BottCluster> {
    cluster_families(solutions, solutions.len(), link_radius, value_tol)
}

/// As [`detect_bott_families`], but only the first `counted` solutions are
/// members; the rest are auxiliary samples that may bridge gaps between them.
pub fn cluster_families(
    solutions: &[DoubleNormal],
    counted: usize,
    link_radius: f64,
    value_tol: f64,
) -> Vec<BottCluster> {
    if counted == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..solutions.len()).collect();
    order.sort_by(|&i, &j| {
        solutions[i]
            .critical_value()
            .total_cmp(&solutions[j].critical_value())
            .then(i.cmp(&j))
    });
    let mut uf = UnionFind((0..solutions.len()).collect());

    // split into runs of (relatively) equal critical value
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        let v = solutions[i].critical_value();
        match runs.last_mut() {
            Some(run) if {
                let prev = solutions[*run.last().unwrap()].critical_value();
                (v - prev).abs() <= value_tol * v.abs().max(prev.abs())
            } =>
            {
                run.push(i)
            }
            _ => runs.push(vec![i]),
        }
    }

    // single linkage inside each run; a chord-midpoint grid prunes candidates
    // because the endpoint-set distance bounds the midpoint distance
    let dim = solutions[0].p1.len();
    let offsets = neighbour_offsets(dim);
    for run in &runs {
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for &i in run {
            grid.entry(cell_of(&solutions[i].midpoint(), link_radius)).or_default().push(i);
        }
        for &i in run {
            let cell = cell_of(&solutions[i].midpoint(), link_radius);
            for off in &offsets {
                let key: Vec<i64> = cell.iter().zip(off).map(|(c, o)| c + o).collect();
                if let Some(bucket) = grid.get(&key) {
                    for &j in bucket {
                        if j > i && solutions[i].endpoint_distance(&solutions[j]) <= link_radius {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..counted {
        let root = uf.find(i);
        let at = *slot.entry(root).or_insert_with(|| {
            groups.push((root, Vec::new()));
            groups.len() - 1
        });
        groups[at].1.push(i);
    }
    let mut clusters: Vec<BottCluster> = groups
        .into_iter()
        .map(|(_, members)| {
            let k = members.len() as f64;
            BottCluster {
                members: members.len(),
                critical_value: members.iter().map(|&i| solutions[i].critical_value()).sum::<f64>() / k,
                length: members.iter().map(|&i| solutions[i].length).sum::<f64>() / k,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.critical_value
            .total_cmp(&b.critical_value)
            .then(b.members.cmp(&a.members))
    });
    clusters
}
