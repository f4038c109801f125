//! The chain complex of `(S^N x M x M) / iota` for the free involution
//! `iota(x, y, z) = (-x, z, y)`.
//!
//! `S^N` carries the antipodally invariant structure with two cells
//! `sigma^k`, `hat sigma^k = -sigma^k` in each dimension. Every orbit of
//! `iota` on the product cells contains exactly one cell `sigma^k x a x b`,
//! which is used as its representative. Over GF(2)
//!
//! ```text
//! d(sigma^k x a x b) = sigma^k x (da x b + a x db) + sigma^{k-1} x (a x b + b x a)
//! ```
//!
//! with `sigma^{-1} = 0`.

use std::collections::HashMap;

use super::complex::CellComplex;
use super::gf2::BitMatrix;
use crate::{Error, Result};

/// Quotient complex together with the sphere grade `k` of every cell.
#[derive(Debug, Clone)]
pub struct SwapQuotient {
    pub complex: CellComplex,
    /// `grades[d][i]` is the sphere-cell dimension of cell `i` in dimension `d`.
    pub grades: Vec<Vec<usize>>,
    pub sphere_dim: usize,
}

/// Builds the quotient complex for `sphere_dim = N >= 1`.
pub fn swap_quotient(m: &CellComplex, sphere_dim: usize) -> Result<SwapQuotient> {
    if sphere_dim < 1 {
        return Err(Error::InvalidArgument("sphere dimension N must be >= 1".into()));
    }
    if !m.verify_boundary_squared() {
        return Err(Error::InvalidComplex("boundary does not square to zero".into()));
    }
    let cells: Vec<(usize, usize)> = (0..=m.top_dim())
        .flat_map(|d| (0..m.cell_count(d)).map(move |i| (d, i)))
        .collect();
    let top = sphere_dim + 2 * m.top_dim();

    // Cell (k, a, b) -> (dimension, position).
    let mut counts = vec![0usize; top + 1];
    let mut index: HashMap<(usize, usize, usize), (usize, usize)> = HashMap::new();
    let mut grades: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    for k in 0..=sphere_dim {
        for (a, &(da, ia)) in cells.iter().enumerate() {
            for (b, &(db, ib)) in cells.iter().enumerate() {
                let d = k + da + db;
                index.insert((k, a, b), (d, counts[d]));
                counts[d] += 1;
                grades[d].push(k);
                labels[d].push(format!("σ{k}×{}×{}", m.label(da, ia), m.label(db, ib)));
            }
        }
    }

    // Faces of each cell of M as global cell ids.
    let global = |d: usize, i: usize| cells.iter().position(|&c| c == (d, i)).unwrap();
    let faces: Vec<Vec<usize>> = cells
        .iter()
        .map(|&(d, i)| match m.boundary_z2(d) {
            Some(bd) => (0..m.cell_count(d - 1))
                .filter(|&r| bd.get(r, i))
                .map(|r| global(d - 1, r))
                .collect(),
            None => Vec::new(),
        })
        .collect();

    let mut boundaries: Vec<BitMatrix> = (1..=top)
        .map(|d| BitMatrix::zeros(counts[d - 1], counts[d]))
        .collect();
    for (&(k, a, b), &(d, col)) in &index {
        if d == 0 {
            continue;
        }
        let bd = &mut boundaries[d - 1];
        for &fa in &faces[a] {
            bd.flip(index[&(k, fa, b)].1, col);
        }
        for &fb in &faces[b] {
            bd.flip(index[&(k, a, fb)].1, col);
        }
        if k > 0 {
            bd.flip(index[&(k - 1, a, b)].1, col);
            bd.flip(index[&(k - 1, b, a)].1, col);
        }
    }

    let complex = CellComplex::new(counts, boundaries, None, Some(labels))?;
    Ok(SwapQuotient {
        complex,
        grades,
        sphere_dim,
    })
}

impl SwapQuotient {
    /// Homology dimensions graded by the sphere-cell dimension `k = 0..=N`.
    ///
    /// The grading is a chain-complex grading only when `M` has zero cellular
    /// boundary over GF(2); otherwise this returns `Unsupported`.
    pub fn sphere_graded_betti(&self) -> Result<Vec<usize>> {
        let n = self.sphere_dim;
        let c = &self.complex;
        // Every nonzero entry must lower the grade by exactly one.
        for d in 1..=c.top_dim() {
            let bd = c.boundary_z2(d).unwrap();
            for col in 0..bd.cols() {
                for row in 0..bd.rows() {
                    if bd.get(row, col) && self.grades[d - 1][row] + 1 != self.grades[d][col] {
                        return Err(Error::Unsupported(
                            "sphere grading requires zero boundary on M".into(),
                        ));
                    }
                }
            }
        }
        let mut out = vec![0usize; n + 1];
        for &k in self.grades.iter().flatten() {
            out[k] += 1;
        }
        // Subtract ranks of each graded block d: (d, k) -> (d-1, k-1).
        for d in 1..=c.top_dim() {
            let bd = c.boundary_z2(d).unwrap();
            for k in 1..=n {
                let cols: Vec<usize> = (0..bd.cols()).filter(|&j| self.grades[d][j] == k).collect();
                let rows: Vec<usize> =
                    (0..bd.rows()).filter(|&i| self.grades[d - 1][i] == k - 1).collect();
                if cols.is_empty() || rows.is_empty() {
                    continue;
                }
                let mut block = BitMatrix::zeros(rows.len(), cols.len());
                for (bi, &i) in rows.iter().enumerate() {
                    for (bj, &j) in cols.iter().enumerate() {
                        if bd.get(i, j) {
                            block.set(bi, bj, true);
                        }
                    }
                }
                let r = block.rank();
                // removes r cycles from grade k and r boundaries from grade k-1
                out[k] -= r;
                out[k - 1] -= r;
            }
        }
        Ok(out)
    }
}
