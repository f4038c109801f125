//! Shape descriptions and their canonical string form, e.g.
//! `tube(n=1,k=1,r=0.5)+perturb(a=0.01,w=3,seed=42)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShapeKind {
    /// Axis-aligned ellipsoid in `R^m`, `m = semiaxes.len()`.
    Ellipsoid { semiaxes: Vec<f64> },
    /// Torus of revolution in `R^3` about the z-axis.
    TorusOfRevolution { major: f64, minor: f64 },
    /// `S^1(r1) x S^1(r2) ⊂ R^4`.
    CliffordTorus { r1: f64, r2: f64 },
    /// Points at distance `radius` from the unit `S^n ⊂ R^{n+1} ⊂ R^{n+k+1}`.
    TubeAroundSphere { n: usize, k: usize, radius: f64 },
    /// Round `S^n` of the given radius in `R^ambient`, `ambient >= n + 1`.
    RoundSphere { n: usize, radius: f64, ambient: usize },
}

/// Seeded normal perturbation `f + a P(xi) nu(xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbSpec {
    pub amplitude: f64,
    pub frequency: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub perturbation: Option<PerturbSpec>,
    /// Reverses the co-orientation of hypersurfaces.
    pub flip_orientation: bool,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind) -> Self {
        Self {
            kind,
            perturbation: None,
            flip_orientation: false,
        }
    }

    pub fn perturbed(mut self, amplitude: f64, frequency: u32, seed: u64) -> Self {
        self.perturbation = Some(PerturbSpec {
            amplitude,
            frequency,
            seed,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match &self.kind {
            ShapeKind::Ellipsoid { semiaxes } => {
                if semiaxes.len() < 2 {
                    return bad("ellipsoid needs at least two semiaxes".into());
                }
                if !semiaxes.iter().all(|&a| positive(a)) {
                    return bad("ellipsoid semiaxes must be positive".into());
                }
            }
            ShapeKind::TorusOfRevolution { major, minor } => {
                if !(positive(*minor) && positive(*major) && major > minor) {
                    return bad("torus needs R > r > 0".into());
                }
            }
            ShapeKind::CliffordTorus { r1, r2 } => {
                if !(positive(*r1) && positive(*r2)) {
                    return bad("clifford torus radii must be positive".into());
                }
            }
            ShapeKind::TubeAroundSphere { n, k, radius } => {
                if *n < 1 || *k < 1 {
                    return bad("tube needs n >= 1 and k >= 1".into());
                }
                if !(positive(*radius) && *radius < 1.0) {
                    return bad("tube radius must lie in (0, 1)".into());
                }
            }
            ShapeKind::RoundSphere { n, radius, ambient } => {
                if *n < 1 || !positive(*radius) || *ambient < n + 1 {
                    return bad("sphere needs n >= 1, radius > 0, ambient >= n + 1".into());
                }
            }
        }
        if let Some(p) = &self.perturbation {
            if !(p.amplitude.is_finite() && p.amplitude >= 0.0) || p.frequency < 1 {
                return bad("perturbation needs amplitude >= 0 and frequency >= 1".into());
            }
        }
        Ok(())
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeKind::Ellipsoid { semiaxes } => {
                let parts: Vec<String> = semiaxes.iter().map(|&a| fmt_num(a)).collect();
                write!(f, "ellipsoid({})", parts.join(","))
            }
            ShapeKind::TorusOfRevolution { major, minor } => {
                write!(f, "torus(R={},r={})", fmt_num(*major), fmt_num(*minor))
            }
            ShapeKind::CliffordTorus { r1, r2 } => {
                write!(f, "clifford(r1={},r2={})", fmt_num(*r1), fmt_num(*r2))
            }
            ShapeKind::TubeAroundSphere { n, k, radius } => {
                write!(f, "tube(n={n},k={k},r={})", fmt_num(*radius))
            }
            ShapeKind::RoundSphere { n, radius, ambient } => {
                if *ambient == n + 1 {
                    write!(f, "sphere(n={n},r={})", fmt_num(*radius))
                } else {
                    write!(f, "sphere(n={n},r={},m={ambient})", fmt_num(*radius))
                }
            }
        }
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(p) = &self.perturbation {
            write!(
                f,
                "+perturb(a={},w={},seed={})",
                fmt_num(p.amplitude),
                p.frequency,
                p.seed
            )?;
        }
        if self.flip_orientation {
            write!(f, "+flip")?;
        }
        Ok(())
    }
}

/// `name(args)` with comma-separated positional or `key=value` arguments.
struct Call<'a> {
    name: &'a str,
    positional: Vec<&'a str>,
    named: BTreeMap<&'a str, &'a str>,
}

fn parse_call(s: &str) -> Result<Call<'_>> {
    let s = s.trim();
    let (name, args) = match s.split_once('(') {
        Some((name, rest)) => {
            let args = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("missing `)` in `{s}`")))?;
            (name.trim(), args)
        }
        None => (s, ""),
    };
    let mut positional = Vec::new();
    let mut named = BTreeMap::new();
    for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some((k, v)) => {
                if named.insert(k.trim(), v.trim()).is_some() {
                    return Err(Error::Parse(format!("duplicate key `{}` in `{s}`", k.trim())));
                }
            }
            None => positional.push(part),
        }
    }
    Ok(Call {
        name,
        positional,
        named,
    })
}

impl<'a> Call<'a> {
    fn get<T: FromStr>(&self, key: &str, pos: usize) -> Result<Option<T>> {
        let raw = self.named.get(key).copied().or_else(|| self.positional.get(pos).copied());
        raw.map(|r| {
            r.parse::<T>()
                .map_err(|_| Error::Parse(format!("bad value `{r}` for `{key}` in `{}`", self.name)))
        })
        .transpose()
    }

    fn require<T: FromStr>(&self, key: &str, pos: usize) -> Result<T> {
        self.get(key, pos)?
            .ok_or_else(|| Error::Parse(format!("missing `{key}` for `{}`", self.name)))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.named.keys() {
            if !allowed.contains(k) {
                return Err(Error::Parse(format!("unknown key `{k}` for `{}`", self.name)));
            }
        }
        Ok(())
    }
}

impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('+');
        let head = parse_call(parts.next().unwrap_or_default())?;
        let kind = match head.name {
            "ellipsoid" => {
                head.check_keys(&[])?;
                let semiaxes = head
                    .positional
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|_| Error::Parse(format!("bad semiaxis `{p}`"))))
                    .collect::<Result<Vec<_>>>()?;
                ShapeKind::Ellipsoid { semiaxes }
            }
            "torus" => {
                head.check_keys(&["R", "r"])?;
                ShapeKind::TorusOfRevolution {
                    major: head.require("R", 0)?,
                    minor: head.require("r", 1)?,
                }
            }
            "clifford" => {
                head.check_keys(&["r1", "r2"])?;
                ShapeKind::CliffordTorus {
                    r1: head.get("r1", 0)?.unwrap_or(1.0),
                    r2: head.get("r2", 1)?.unwrap_or(1.0),
                }
            }
            "tube" => {
                head.check_keys(&["n", "k", "r"])?;
                ShapeKind::TubeAroundSphere {
                    n: head.require("n", 0)?,
                    k: head.require("k", 1)?,
                    radius: head.get("r", 2)?.unwrap_or(0.5),
                }
            }
            "sphere" => {
                head.check_keys(&["n", "r", "m"])?;
                let n: usize = head.require("n", 0)?;
                ShapeKind::RoundSphere {
                    n,
                    radius: head.get("r", 1)?.unwrap_or(1.0),
                    ambient: head.get("m", 2)?.unwrap_or(n + 1),
                }
            }
            other => return Err(Error::Parse(format!("unknown shape `{other}`"))),
        };
        let mut spec = ShapeSpec::new(kind);
        for part in parts {
            let call = parse_call(part)?;
            match call.name {
                "perturb" => {
                    call.check_keys(&["a", "w", "seed"])?;
                    spec.perturbation = Some(PerturbSpec {
                        amplitude: call.require("a", 0)?,
                        frequency: call.get("w", 1)?.unwrap_or(3),
                        seed: call.get("seed", 2)?.unwrap_or(0),
                    });
                }
                "flip" => spec.flip_orientation = true,
                other => return Err(Error::Parse(format!("unknown modifier `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}
