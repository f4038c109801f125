//! Integer matrices and their Smith normal form invariant factors.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, entries: &[Vec<i64>]) -> Option<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self {
            rows,
            cols,
            data: entries.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Exact product; fails with [`Error::Overflow`] instead of wrapping.
    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidComplex(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let term = self
                        .get(r, k)
                        .checked_mul(other.get(k, c))
                        .ok_or(Error::Overflow)?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow)?;
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }
}

/// Nonzero invariant factors `d_1 | d_2 | ... | d_r` of the Smith normal form,
/// each positive. `r` is the rank over Q.
pub fn invariant_factors(m: &IntMatrix) -> Result<Vec<i128>> {
    let rows = m.rows;
    let cols = m.cols;
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|r| (0..cols).map(|c| m.get(r, c) as i128).collect())
        .collect();

    let sub = |x: i128, q: i128, y: i128| -> Result<i128> {
        let p = q.checked_mul(y).ok_or(Error::Overflow)?;
        x.checked_sub(p).ok_or(Error::Overflow)
    };

    let mut factors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            let pivot = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t] / pivot;
                    for j in t..cols {
                        a[i][j] = sub(a[i][j], q, a[t][j])?;
                    }
                    dirty |= a[i][t] != 0;
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j] / pivot;
                    for row in a.iter_mut().skip(t) {
                        row[j] = sub(row[j], q, row[t])?;
                    }
                    dirty |= a[t][j] != 0;
                }
            }
            if dirty {
                // a remainder smaller than the pivot survived; move it to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // pivot must divide the whole trailing block
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| a[i][j] % pivot != 0));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] = a[t][j].checked_add(a[i][j]).ok_or(Error::Overflow)?;
                    }
                }
                None => break,
            }
        }
        factors.push(a[t][t].abs());
        t += 1;
    }
    Ok(factors)
}

/// Rank over Q.
pub fn rational_rank(m: &IntMatrix) -> Result<usize> {
    Ok(invariant_factors(m)?.len())
}

/// Number of invariant factors strictly greater than one.
pub fn torsion_count(m: &IntMatrix) -> Result<usize> {
    Ok(invariant_factors(m)?.into_iter().filter(|&d| d > 1).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_rows(v.len(), v[0].len(), &v).unwrap()
    }

    #[test]
    fn one_by_one_two() {
        assert_eq!(invariant_factors(&mat(&[&[2]])).unwrap(), vec![2]);
        assert_eq!(torsion_count(&mat(&[&[2]])).unwrap(), 1);
    }

    #[test]
    fn classic_example() {
        // diag(2, 6) up to unimodular change: [[2, 4], [-2, 2]] has SNF diag(2, 6)
        let f = invariant_factors(&mat(&[&[2, 4], &[-2, 2]])).unwrap();
        assert_eq!(f, vec![2, 6]);
    }

    #[test]
    fn coprime_entries_fuse() {
        // gcd(2,3)=1, det=6 -> diag(1, 6)
        let f = invariant_factors(&mat(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(f, vec![1, 6]);
    }

    #[test]
    fn zero_and_rank_deficient() {
        assert!(invariant_factors(&IntMatrix::zeros(3, 2)).unwrap().is_empty());
        let f = invariant_factors(&mat(&[&[1, 2], &[2, 4]])).unwrap();
        assert_eq!(f, vec![1]);
    }

    #[test]
    fn checked_mul_detects_overflow() {
        let big = mat(&[&[i64::MAX]]);
        assert_eq!(big.checked_mul(&mat(&[&[2]])), Err(Error::Overflow));
    }
}
