//! Dense GF(2) matrices stored as packed bit rows.

use std::fmt;

const WORD_BITS: usize = 64;

/// A `rows x cols` matrix over GF(2). Row `r` occupies `words_per_row`
/// consecutive `u64` words; bit `c` of a row lives in word `c / 64` at
/// position `c % 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row-major 0/1 entries. Any odd integer is read as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: usize, cols: usize, entries: &[R]) -> Option<Self> {
        if entries.len() != rows {
            return None;
        }
        let mut m = Self::zeros(rows, cols);
        for (r, row) in entries.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return None;
            }
            for (c, &v) in row.iter().enumerate() {
                if v & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        Some(m)
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
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        let w = self.data[r * self.words_per_row + c / WORD_BITS];
        (w >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        let idx = r * self.words_per_row + c / WORD_BITS;
        self.data[idx] ^= 1u64 << (c % WORD_BITS);
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// `row[dst] += row[src]`.
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words_per_row;
        let (s, d) = (src * w, dst * w);
        for k in 0..w {
            let v = self.data[s + k];
            self.data[d + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rank over GF(2) by forward elimination with row pivoting.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(pivot, rank);
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Matrix product over GF(2). Returns `None` on a shape mismatch.
    pub fn mul(&self, other: &BitMatrix) -> Option<BitMatrix> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let dst = r * out.words_per_row;
            for k in 0..self.cols {
                if self.get(r, k) {
                    for (i, &v) in other.row_words(k).iter().enumerate() {
                        out.data[dst + i] ^= v;
                    }
                }
            }
        }
        Some(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    /// Row-major 0/1 entries.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) as u8).collect())
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(BitMatrix::identity(70).rank(), 70);
        assert_eq!(BitMatrix::zeros(5, 130).rank(), 0);
    }

    #[test]
    fn rank_counts_dependent_rows_once() {
        // rows 0 and 1 sum to row 2 over GF(2)
        let m = BitMatrix::from_rows(3, 3, &[[1u8, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn product_crosses_word_boundary() {
        let mut a = BitMatrix::zeros(2, 100);
        a.set(0, 99, true);
        a.set(1, 3, true);
        let mut b = BitMatrix::zeros(100, 2);
        b.set(99, 1, true);
        b.set(3, 1, true);
        let p = a.mul(&b).unwrap();
        assert!(p.get(0, 1) && p.get(1, 1));
        assert!(!p.get(0, 0));
        assert!(a.mul(&a).is_none());
    }

    #[test]
    fn transpose_roundtrip() {
        let m = BitMatrix::from_rows(2, 3, &[[1u8, 0, 1], [0, 1, 1]]).unwrap();
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.transpose().to_rows(), vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    }
}
