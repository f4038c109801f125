//! Closed-form lower bounds on counts of critical points, self-intersections
//! and double normals, evaluated from Betti-number data.
//!
//! Every bound is an exact half-integer. Used as a count of discrete objects
//! it is rounded up.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::homology::{BettiVector, TorsionVector};

/// Exact value `twice / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const fn from_int(v: i64) -> Self {
        Self { twice: 2 * v }
    }

    pub const fn halves(twice: i64) -> Self {
        Self { twice }
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Smallest integer count satisfying "at least `self`", never negative.
    pub fn count(self) -> u64 {
        let up = self.twice.div_euclid(2) + self.twice.rem_euclid(2);
        up.max(0) as u64
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Lower bound on the number of critical points of a quasifunction over `E`:
/// the Morse-type bound `sum(b_i + 2 q_i)`, the field bound `sum b_i` and, when
/// the cup length is supplied, `cl + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPointBounds {
    pub morse: u64,
    pub field: u64,
    pub cup_length: Option<u64>,
}

pub fn chekanov_bounds(
    betti: &BettiVector,
    torsion: &TorsionVector,
    cup_length: Option<u64>,
) -> CriticalPointBounds {
    let len = betti.b.len().max(torsion.q.len());
    let morse = (0..len)
        .map(|i| {
            let b = betti.b.get(i).copied().unwrap_or(0) as u64;
            let q = torsion.q.get(i).copied().unwrap_or(0) as u64;
            b + 2 * q
        })
        .sum();
    CriticalPointBounds {
        morse,
        field: betti.total as u64,
        cup_length: cup_length.map(|c| c + 1),
    }
}

/// `|B_Etilde - B_Lambda| / 2` self-intersection points of the projection.
pub fn selfintersection_bound(b_fiber_square: u64, b_lambda: u64) -> HalfInt {
    HalfInt::halves((b_fiber_square as i64 - b_lambda as i64).abs())
}

/// Trivial-bundle case `E = M x W`: `(B_M * B_W^2 - B_Lambda) / 2`.
pub fn trivial_bundle_selfintersection_bound(b_base: u64, b_fiber: u64, b_lambda: u64) -> HalfInt {
    HalfInt::halves((b_base * b_fiber * b_fiber) as i64 - b_lambda as i64)
}

/// Double normals of a generic immersion of `M^n` with total Z2 Betti number `B`:
/// `(B^2 + (n - 1) B) / 2`.
pub fn diameter_bound(b: u64, n: u64) -> HalfInt {
    let b = b as i64;
    HalfInt::halves(b * b + (n as i64 - 1) * b)
}

/// Bounds for a co-oriented front obtained by deforming the unit conormal
/// front of `L` in `R^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefrontBounds {
    /// `(B_L^2 + (n-1) B_L) / 2`, deformations without any self-tangency.
    pub total_no_tangency: HalfInt,
    /// `B_L^2 - B_L` passing double normals.
    pub passing: HalfInt,
    /// `B_L^2 + n B_L` counterpassing double normals.
    pub counterpassing: HalfInt,
    /// `(B_Lambda^2 + n B_Lambda) / 2`.
    pub total_from_lambda: HalfInt,
    /// `B_Lambda` actually used.
    pub b_lambda: u64,
    /// True when `B_Lambda` was replaced by its upper estimate `2 B_L`.
    pub b_lambda_substituted: bool,
    pub warnings: Vec<String>,
}

pub fn wavefront_bounds(b_l: u64, n: u64, b_lambda: Option<u64>) -> WavefrontBounds {
    let (bl, ni) = (b_l as i64, n as i64);
    let mut warnings = Vec::new();
    let (b_lam, substituted) = match b_lambda {
        Some(v) => (v, false),
        None => {
            warnings.push(format!(
                "B_Lambda not supplied; using the sphere-bundle estimate 2*B_L = {}",
                2 * b_l
            ));
            (2 * b_l, true)
        }
    };
    let passing = HalfInt::from_int(bl * bl - bl);
    let counterpassing = HalfInt::from_int(bl * bl + ni * bl);
    let lam = b_lam as i64;
    let total_from_lambda = HalfInt::halves(lam * lam + ni * lam);
    if total_from_lambda.twice() > passing.twice() + counterpassing.twice() {
        warnings.push(format!(
            "total bound {total_from_lambda} exceeds passing + counterpassing = {}",
            passing.count() + counterpassing.count()
        ));
    }
    WavefrontBounds {
        total_no_tangency: diameter_bound(b_l, n),
        passing,
        counterpassing,
        total_from_lambda,
        b_lambda: b_lam,
        b_lambda_substituted: substituted,
        warnings,
    }
}

/// One evaluated bound with its identifier and consumed inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub theorem: String,
    pub quantity: String,
    pub value: HalfInt,
    pub count: u64,
    pub inputs: serde_json::Value,
    pub warnings: Vec<String>,
}

impl BoundEntry {
    pub fn new(theorem: &str, quantity: &str, value: HalfInt, inputs: serde_json::Value) -> Self {
        let mut warnings = Vec::new();
        if value.twice() < 0 {
            warnings.push(format!("negative value {value}; bound is vacuous"));
        }
        Self {
            theorem: theorem.to_string(),
            quantity: quantity.to_string(),
            value,
            count: value.count(),
            inputs,
            warnings,
        }
    }
}

/// Inputs and evaluated bounds for one shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub bounds: Vec<BoundEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Total Z2 Betti number of the immersed manifold.
    pub b: u64,
    /// Intrinsic dimension of the immersed manifold.
    pub n: u64,
    /// Codimension of the immersion.
    pub k: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betti: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cup_length: Option<u64>,
    /// Total Z2 Betti number of the submanifold whose conormal front is deformed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_front_core: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_lambda: Option<u64>,
}

/// Evaluates every bound the inputs allow.
///
/// Front bounds need a hypersurface (`k = 1`) and the Betti number of the
/// core `L`; the ambient space is `R^{n+1}`.
pub fn bound_report(inputs: &BoundInputs) -> BoundReport {
    let mut bounds = Vec::new();
    let mut warnings = Vec::new();
    let (b, n) = (inputs.b, inputs.n);

    bounds.push(BoundEntry::new(
        "3.1",
        "diameters",
        diameter_bound(b, n),
        serde_json::json!({"B": b, "n": n}),
    ));

    if let Some(betti) = &inputs.betti {
        let torsion = TorsionVector {
            q: inputs.torsion.clone().unwrap_or_else(|| vec![0; betti.len()]),
        };
        let cb = chekanov_bounds(&BettiVector::new(betti.clone()), &torsion, inputs.cup_length);
        let used = serde_json::json!({"betti": betti, "torsion": torsion.q});
        bounds.push(BoundEntry::new(
            "1.1",
            "critical_points_morse",
            HalfInt::from_int(cb.morse as i64),
            used.clone(),
        ));
        bounds.push(BoundEntry::new(
            "1.1",
            "critical_points_field",
            HalfInt::from_int(cb.field as i64),
            used,
        ));
        if let Some(c) = cb.cup_length {
            bounds.push(BoundEntry::new(
                "1.1",
                "critical_points_cup_length",
                HalfInt::from_int(c as i64),
                serde_json::json!({"cup_length": inputs.cup_length}),
            ));
        }
    }

    if inputs.k == 1 {
        bounds.push(BoundEntry::new(
            "4.1",
            "diameters",
            diameter_bound(b, n),
            serde_json::json!({"B_L": b, "n": n}),
        ));
        if let Some(bl) = inputs.b_front_core {
            let wf = wavefront_bounds(bl, n, inputs.b_lambda);
            let used = serde_json::json!({"B_L": bl, "n": n});
            bounds.push(BoundEntry::new("4.4", "passing", wf.passing, used.clone()));
            bounds.push(BoundEntry::new("4.4", "counterpassing", wf.counterpassing, used));
            let mut total = BoundEntry::new(
                "4.4",
                "diameters",
                wf.total_from_lambda,
                serde_json::json!({"B_Lambda": wf.b_lambda, "n": n, "substituted": wf.b_lambda_substituted}),
            );
            total.warnings.extend(wf.warnings.iter().cloned());
            bounds.push(total);
            bounds.push(BoundEntry::new(
                "2.2",
                "self_intersections",
                trivial_bundle_selfintersection_bound(2, bl, wf.b_lambda),
                serde_json::json!({"B_M": 2, "B_W": bl, "B_Lambda": wf.b_lambda}),
            ));
        }
    } else if inputs.b_front_core.is_some() {
        warnings.push("front bounds need a hypersurface; core Betti number ignored".into());
    }

    BoundReport {
        inputs: inputs.clone(),
        bounds,
        warnings,
    }
}
