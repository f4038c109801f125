//! Cellular chain complexes with GF(2) and optional integer boundaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gf2::BitMatrix;
use super::snf::{self, IntMatrix};
use crate::{Error, Result};

/// A finite CW chain complex.
///
/// `boundary_z2(d)` is the `cell_count(d-1) x cell_count(d)` matrix of the
/// cellular boundary over GF(2); the integer boundary, when present, reduces
/// to it mod 2.
#[derive(Debug, Clone, PartialEq)]
pub struct CellComplex {
    cell_counts: Vec<usize>,
    boundaries_z2: Vec<BitMatrix>,
    boundaries_z: Option<Vec<IntMatrix>>,
    labels: Option<Vec<Vec<String>>>,
}

/// Per-dimension Betti numbers and their sum `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub b: Vec<usize>,
    pub total: usize,
}

impl BettiVector {
    pub fn new(b: Vec<usize>) -> Self {
        let total = b.iter().sum();
        Self { b, total }
    }
}

/// Minimal number of generators of the torsion of `H_d(X; Z)`, per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionVector {
    pub q: Vec<usize>,
}

impl CellComplex {
    /// Assembles a complex, checking matrix shapes against the cell counts.
    /// The boundary-squared condition is not enforced here; see
    /// [`CellComplex::verify_boundary_squared`].
    pub fn new(
        cell_counts: Vec<usize>,
        boundaries_z2: Vec<BitMatrix>,
        boundaries_z: Option<Vec<IntMatrix>>,
        labels: Option<Vec<Vec<String>>>,
    ) -> Result<Self> {
        if cell_counts.is_empty() {
            return Err(Error::InvalidComplex("no dimensions".into()));
        }
        let top = cell_counts.len() - 1;
        if boundaries_z2.len() != top {
            return Err(Error::InvalidComplex(format!(
                "expected {top} boundary matrices, got {}",
                boundaries_z2.len()
            )));
        }
        for (i, m) in boundaries_z2.iter().enumerate() {
            let d = i + 1;
            if m.rows() != cell_counts[d - 1] || m.cols() != cell_counts[d] {
                return Err(Error::InvalidComplex(format!(
                    "boundary {d} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    cell_counts[d - 1],
                    cell_counts[d]
                )));
            }
        }
        if let Some(bz) = &boundaries_z {
            if bz.len() != top {
                return Err(Error::InvalidComplex("integer boundary count mismatch".into()));
            }
            for (i, m) in bz.iter().enumerate() {
                let d = i + 1;
                if m.rows() != cell_counts[d - 1] || m.cols() != cell_counts[d] {
                    return Err(Error::InvalidComplex(format!(
                        "integer boundary {d} has wrong shape"
                    )));
                }
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != cell_counts.len()
                || labels.iter().zip(&cell_counts).any(|(l, &c)| l.len() != c)
            {
                return Err(Error::InvalidComplex("label counts do not match cells".into()));
            }
        }
        Ok(Self {
            cell_counts,
            boundaries_z2,
            boundaries_z,
            labels,
        })
    }

    /// Builds a complex from integer boundaries; the GF(2) boundaries are
    /// their reductions mod 2.
    pub fn from_integer(
        cell_counts: Vec<usize>,
        boundaries_z: Vec<IntMatrix>,
        labels: Option<Vec<Vec<String>>>,
    ) -> Result<Self> {
        let z2 = boundaries_z.iter().map(reduce_mod2).collect();
        Self::new(cell_counts, z2, Some(boundaries_z), labels)
    }

    pub fn top_dim(&self) -> usize {
        self.cell_counts.len() - 1
    }

    pub fn cell_counts(&self) -> &[usize] {
        &self.cell_counts
    }

    pub fn cell_count(&self, d: usize) -> usize {
        self.cell_counts.get(d).copied().unwrap_or(0)
    }

    pub fn total_cells(&self) -> usize {
        self.cell_counts.iter().sum()
    }

    /// Boundary `C_d -> C_{d-1}` over GF(2), for `1 <= d <= top_dim`.
    pub fn boundary_z2(&self, d: usize) -> Option<&BitMatrix> {
        d.checked_sub(1).and_then(|i| self.boundaries_z2.get(i))
    }

    pub fn boundary_z(&self, d: usize) -> Option<&IntMatrix> {
        let i = d.checked_sub(1)?;
        self.boundaries_z.as_ref().and_then(|b| b.get(i))
    }

    pub fn has_integer_boundaries(&self) -> bool {
        self.boundaries_z.is_some()
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    pub fn label(&self, d: usize, i: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(d))
            .and_then(|l| l.get(i))
            .cloned()
            .unwrap_or_else(|| format!("e{d}_{i}"))
    }

    /// Mutable access for constructing counterexamples in tests and tools.
    pub fn boundary_z2_mut(&mut self, d: usize) -> Option<&mut BitMatrix> {
        d.checked_sub(1).and_then(|i| self.boundaries_z2.get_mut(i))
    }

    /// True iff `boundary(d-1) * boundary(d) = 0` over GF(2) and, when integer
    /// boundaries are present, over Z with matching mod-2 reduction.
    pub fn verify_boundary_squared(&self) -> bool {
        for d in 2..=self.top_dim() {
            let (lo, hi) = (&self.boundaries_z2[d - 2], &self.boundaries_z2[d - 1]);
            match lo.mul(hi) {
                Some(p) if p.is_zero() => {}
                _ => return false,
            }
        }
        if let Some(bz) = &self.boundaries_z {
            for (m, m2) in bz.iter().zip(&self.boundaries_z2) {
                if reduce_mod2(m) != *m2 {
                    return false;
                }
            }
            for d in 2..=self.top_dim() {
                match bz[d - 2].checked_mul(&bz[d - 1]) {
                    Ok(p) if p.is_zero() => {}
                    _ => return false,
                }
            }
        }
        true
    }

    fn require_valid(&self) -> Result<()> {
        if self.verify_boundary_squared() {
            Ok(())
        } else {
            Err(Error::InvalidComplex("boundary does not square to zero".into()))
        }
    }

    /// Betti numbers over GF(2): `b_d = c_d - rank d_d - rank d_{d+1}`.
    pub fn betti_z2(&self) -> Result<BettiVector> {
        self.require_valid()?;
        let ranks: Vec<usize> = self.boundaries_z2.iter().map(BitMatrix::rank).collect();
        Ok(betti_from_ranks(&self.cell_counts, &ranks))
    }

    /// Betti numbers over Q (free ranks of integral homology).
    pub fn betti_rational(&self) -> Result<BettiVector> {
        let bz = self
            .boundaries_z
            .as_ref()
            .ok_or_else(|| Error::Unsupported("complex has no integer boundaries".into()))?;
        self.require_valid()?;
        let ranks = bz
            .iter()
            .map(snf::rational_rank)
            .collect::<Result<Vec<_>>>()?;
        Ok(betti_from_ranks(&self.cell_counts, &ranks))
    }

    /// Torsion generator counts: `q_d` is the number of invariant factors
    /// greater than one of the boundary `C_{d+1} -> C_d`.
    pub fn torsion_generators(&self) -> Result<TorsionVector> {
        let bz = self
            .boundaries_z
            .as_ref()
            .ok_or_else(|| Error::Unsupported("complex has no integer boundaries".into()))?;
        self.require_valid()?;
        let mut q = vec![0; self.cell_counts.len()];
        for (i, m) in bz.iter().enumerate() {
            q[i] = snf::torsion_count(m)?;
        }
        Ok(TorsionVector { q })
    }

    /// Cellular product `A x B` with `d(x*y) = dx*y + (-1)^{|x|} x*dy`.
    /// Integer boundaries are carried when both factors have them.
    pub fn product(&self, other: &CellComplex) -> Result<CellComplex> {
        let top = self.top_dim() + other.top_dim();
        // index[(p, i, q, j)] -> position within dimension p+q
        let mut offsets = vec![vec![0usize; other.top_dim() + 1]; self.top_dim() + 1];
        let mut counts = vec![0usize; top + 1];
        for d in 0..=top {
            for p in 0..=d.min(self.top_dim()) {
                let q = d - p;
                if q > other.top_dim() {
                    continue;
                }
                offsets[p][q] = counts[d];
                counts[d] += self.cell_count(p) * other.cell_count(q);
            }
        }
        let index = |p: usize, i: usize, q: usize, j: usize| {
            offsets[p][q] + i * other.cell_count(q) + j
        };

        let with_z = self.boundaries_z.is_some() && other.boundaries_z.is_some();
        let mut bz2: Vec<BitMatrix> = (1..=top)
            .map(|d| BitMatrix::zeros(counts[d - 1], counts[d]))
            .collect();
        let mut bz: Vec<IntMatrix> = if with_z {
            (1..=top).map(|d| IntMatrix::zeros(counts[d - 1], counts[d])).collect()
        } else {
            Vec::new()
        };

        for p in 0..=self.top_dim() {
            for q in 0..=other.top_dim() {
                let d = p + q;
                if d == 0 {
                    continue;
                }
                for i in 0..self.cell_count(p) {
                    for j in 0..other.cell_count(q) {
                        let col = index(p, i, q, j);
                        if p > 0 {
                            for i2 in 0..self.cell_count(p - 1) {
                                let row = index(p - 1, i2, q, j);
                                if self.boundaries_z2[p - 1].get(i2, i) {
                                    bz2[d - 1].flip(row, col);
                                }
                                if with_z {
                                    let c = self.boundary_z(p).unwrap().get(i2, i);
                                    let v = bz[d - 1].get(row, col) + c;
                                    bz[d - 1].set(row, col, v);
                                }
                            }
                        }
                        if q > 0 {
                            let sign = if p % 2 == 0 { 1 } else { -1 };
                            for j2 in 0..other.cell_count(q - 1) {
                                let row = index(p, i, q - 1, j2);
                                if other.boundaries_z2[q - 1].get(j2, j) {
                                    bz2[d - 1].flip(row, col);
                                }
                                if with_z {
                                    let c = other.boundary_z(q).unwrap().get(j2, j);
                                    let v = bz[d - 1].get(row, col) + sign * c;
                                    bz[d - 1].set(row, col, v);
                                }
                            }
                        }
                    }
                }
            }
        }

        let mut labels: Vec<Vec<String>> = counts.iter().map(|&c| vec![String::new(); c]).collect();
        for p in 0..=self.top_dim() {
            for q in 0..=other.top_dim() {
                for i in 0..self.cell_count(p) {
                    for j in 0..other.cell_count(q) {
                        labels[p + q][index(p, i, q, j)] =
                            format!("{}×{}", self.label(p, i), other.label(q, j));
                    }
                }
            }
        }

        CellComplex::new(counts, bz2, with_z.then_some(bz), Some(labels))
    }

    /// Serializable document form.
    pub fn to_document(&self) -> ComplexDocument {
        ComplexDocument {
            top_dim: self.top_dim(),
            cell_counts: self.cell_counts.clone(),
            boundaries_z2: self.boundaries_z2.iter().map(BitMatrix::to_rows).collect(),
            boundaries_z: self
                .boundaries_z
                .as_ref()
                .map(|b| b.iter().map(IntMatrix::to_rows).collect()),
            labels: self.labels.clone(),
        }
    }

    pub fn from_document(doc: &ComplexDocument) -> Result<Self> {
        if doc.cell_counts.len() != doc.top_dim + 1 {
            return Err(Error::InvalidComplex("top_dim disagrees with cell_counts".into()));
        }
        if doc.boundaries_z2.len() != doc.top_dim {
            return Err(Error::InvalidComplex("wrong number of GF(2) boundaries".into()));
        }
        let mut z2 = Vec::with_capacity(doc.top_dim);
        for (i, rows) in doc.boundaries_z2.iter().enumerate() {
            let (r, c) = (doc.cell_counts[i], doc.cell_counts[i + 1]);
            if rows.iter().flatten().any(|&v| v > 1) {
                return Err(Error::InvalidComplex("GF(2) entries must be 0 or 1".into()));
            }
            z2.push(BitMatrix::from_rows(r, c, rows).ok_or_else(|| {
                Error::InvalidComplex(format!("GF(2) boundary {} has wrong shape", i + 1))
            })?);
        }
        let z = match &doc.boundaries_z {
            None => None,
            Some(mats) => {
                if mats.len() != doc.top_dim {
                    return Err(Error::InvalidComplex("wrong number of integer boundaries".into()));
                }
                let mut out = Vec::with_capacity(mats.len());
                for (i, rows) in mats.iter().enumerate() {
                    let (r, c) = (doc.cell_counts[i], doc.cell_counts[i + 1]);
                    out.push(IntMatrix::from_rows(r, c, rows).ok_or_else(|| {
                        Error::InvalidComplex(format!("integer boundary {} has wrong shape", i + 1))
                    })?);
                }
                Some(out)
            }
        };
        CellComplex::new(doc.cell_counts.clone(), z2, z, doc.labels.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("complex serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ComplexDocument =
            serde_json::from_str(text).map_err(|e| Error::InvalidComplex(e.to_string()))?;
        Self::from_document(&doc)
    }
}

fn betti_from_ranks(counts: &[usize], ranks: &[usize]) -> BettiVector {
    let b = (0..counts.len())
        .map(|d| {
            let out = if d == 0 { 0 } else { ranks[d - 1] };
            let inc = ranks.get(d).copied().unwrap_or(0);
            counts[d] - out - inc
        })
        .collect();
    BettiVector::new(b)
}

fn reduce_mod2(m: &IntMatrix) -> BitMatrix {
    let mut out = BitMatrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if m.get(r, c).rem_euclid(2) == 1 {
                out.set(r, c, true);
            }
        }
    }
    out
}

/// JSON layout of a [`CellComplex`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub top_dim: usize,
    pub cell_counts: Vec<usize>,
    pub boundaries_z2: Vec<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries_z: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

/// Built-in minimal CW structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexKind {
    Sphere(i64),
    Torus(i64),
    Surface(i64),
    Projective(i64),
    Point,
    Interval,
    Product(Box<ComplexKind>, Box<ComplexKind>),
}

impl ComplexKind {
    pub fn build(&self) -> Result<CellComplex> {
        match self {
            ComplexKind::Sphere(n) => sphere(non_negative(*n)?),
            ComplexKind::Torus(n) => torus(non_negative(*n)?),
            ComplexKind::Surface(g) => surface(non_negative(*g)?),
            ComplexKind::Projective(n) => projective(non_negative(*n)?),
            ComplexKind::Point => Ok(point()),
            ComplexKind::Interval => Ok(interval()),
            ComplexKind::Product(a, b) => a.build()?.product(&b.build()?),
        }
    }
}

fn non_negative(v: i64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::InvalidArgument(format!("negative parameter {v}")))
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexKind::Sphere(n) => write!(f, "sphere({n})"),
            ComplexKind::Torus(n) => write!(f, "torus({n})"),
            ComplexKind::Surface(g) => write!(f, "surface({g})"),
            ComplexKind::Projective(n) => write!(f, "projective({n})"),
            ComplexKind::Point => write!(f, "point"),
            ComplexKind::Interval => write!(f, "interval"),
            ComplexKind::Product(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

impl FromStr for ComplexKind {
    type Err = Error;

    /// Parses `sphere(2)`, `torus(3)`, `surface(1)`, `projective(2)`, `point`,
    /// `interval`, and `*`-separated products such as `sphere(1)*sphere(2)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((head, tail)) = s.split_once('*') {
            return Ok(ComplexKind::Product(
                Box::new(head.parse()?),
                Box::new(tail.parse()?),
            ));
        }
        match s {
            "point" => return Ok(ComplexKind::Point),
            "interval" => return Ok(ComplexKind::Interval),
            _ => {}
        }
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Parse(format!("unknown complex `{s}`")))?;
        let arg = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing `)` in `{s}`")))?;
        let v: i64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer `{arg}` in `{s}`")))?;
        match name.trim() {
            "sphere" => Ok(ComplexKind::Sphere(v)),
            "torus" => Ok(ComplexKind::Torus(v)),
            "surface" => Ok(ComplexKind::Surface(v)),
            "projective" => Ok(ComplexKind::Projective(v)),
            other => Err(Error::Parse(format!("unknown complex `{other}`"))),
        }
    }
}

/// One-point complex.
pub fn point() -> CellComplex {
    CellComplex::from_integer(vec![1], vec![], Some(vec![vec!["v".into()]])).expect("point")
}

/// `[0, 1]` with `d e = v1 - v0`.
pub fn interval() -> CellComplex {
    let d1 = IntMatrix::from_rows(2, 1, &[vec![-1], vec![1]]).unwrap();
    CellComplex::from_integer(
        vec![2, 1],
        vec![d1],
        Some(vec![vec!["v0".into(), "v1".into()], vec!["e".into()]]),
    )
    .expect("interval")
}

/// `S^n` as one 0-cell and one n-cell; for `n = 0` two points.
pub fn sphere(n: usize) -> Result<CellComplex> {
    let mut counts = vec![0; n + 1];
    counts[0] += 1;
    counts[n] += 1;
    let bz = (1..=n)
        .map(|d| IntMatrix::zeros(counts[d - 1], counts[d]))
        .collect();
    let mut labels: Vec<Vec<String>> = counts.iter().map(|&c| Vec::with_capacity(c)).collect();
    labels[0].push("s0".into());
    labels[n].push(format!("s{n}"));
    CellComplex::from_integer(counts, bz, Some(labels))
}

/// `T^n`, the n-fold product of circles; `T^0` is a point.
pub fn torus(n: usize) -> Result<CellComplex> {
    let circle = sphere(1)?;
    let mut acc = point();
    for _ in 0..n {
        acc = if acc.total_cells() == 1 {
            circle.clone()
        } else {
            acc.product(&circle)?
        };
    }
    Ok(acc)
}

/// Closed orientable surface of genus `g` with one vertex, `2g` edges and one
/// face attached along `prod [a_i, b_i]` (zero cellular boundary).
pub fn surface(g: usize) -> Result<CellComplex> {
    if g == 0 {
        return sphere(2);
    }
    let counts = vec![1, 2 * g, 1];
    let bz = vec![IntMatrix::zeros(1, 2 * g), IntMatrix::zeros(2 * g, 1)];
    let mut edges = Vec::with_capacity(2 * g);
    for i in 1..=g {
        edges.push(format!("a{i}"));
        edges.push(format!("b{i}"));
    }
    let labels = vec![vec!["v".to_string()], edges, vec!["F".to_string()]];
    CellComplex::from_integer(counts, bz, Some(labels))
}

/// `RP^n` with one cell per dimension and `d e^k = (1 + (-1)^k) e^{k-1}`.
pub fn projective(n: usize) -> Result<CellComplex> {
    let counts = vec![1; n + 1];
    let bz = (1..=n)
        .map(|k| {
            let c = if k % 2 == 0 { 2 } else { 0 };
            IntMatrix::from_rows(1, 1, &[vec![c]]).unwrap()
        })
        .collect();
    let labels = (0..=n).map(|k| vec![format!("e{k}")]).collect();
    CellComplex::from_integer(counts, bz, Some(labels))
}
