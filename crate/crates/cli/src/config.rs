//! Flat `key = value` run configuration.
//!
//! ```text
//! # perturbed tube, full budget
//! shape = tube(n=1,k=1,r=0.5)+perturb(a=0.01,w=3,seed=42)
//! homology_source = sphere(1)*sphere(1)
//! seed_count = 20000
//! rng_seed = 0
//! formats = json,csv,md
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Every key mirrors a
//! field of the shape, the solver configuration or the bound inputs; unknown
//! and repeated keys are errors. Command-line flags are applied afterwards
//! through [`RunConfig::set`], so they override file values.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dnormal_core::geometry::ShapeSpec;
use dnormal_core::homology::ComplexKind;
use dnormal_core::solver::SolverConfig;

use crate::CliError;

/// Output formats a run may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(CliError::Config(format!("unknown format `{other}` (json, csv, md)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Markdown => "md",
        })
    }
}

/// Parses a comma-separated format list into a sorted, duplicate-free set.
pub fn parse_formats(s: &str) -> Result<Vec<Format>, CliError> {
    let mut out = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Format>, _>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config("empty format list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub shape: Option<ShapeSpec>,
    /// Complex whose homology feeds the bounds; defaults to the table entry.
    pub homology_source: Option<ComplexKind>,
    pub solver: SolverConfig,
    /// Total Betti number of the front's Legendrian lift, when known.
    pub b_lambda: Option<u64>,
    pub cup_length: Option<u64>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            shape: None,
            homology_source: None,
            solver: SolverConfig::default(),
            b_lambda: None,
            cup_length: None,
            out: PathBuf::from("out"),
            formats: vec![Format::Json],
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("bad value `{value}` for `{key}`")))
}

/// `none` clears an optional value.
fn parse_opt<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, CliError> {
    if value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "shape",
        "homology_source",
        "seed_count",
        "rng_seed",
        "newton_max_iter",
        "residual_tol",
        "dedup_radius",
        "diagonal_exclusion",
        "degeneracy_threshold",
        "bott_link_radius",
        "b_lambda",
        "cup_length",
        "out",
        "formats",
    ];

    /// Parses the file format described in the module docs.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", no + 1)));
            }
            seen.push(key.to_string());
            cfg.set(key, value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(cfg)
    }

    /// Sets one key; the same keys as the file format.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let s = &mut self.solver;
        match key {
            "shape" => self.shape = Some(value.parse()?),
            "homology_source" => self.homology_source = Some(value.parse()?),
            "seed_count" => s.seed_count = parse(key, value)?,
            "rng_seed" => s.rng_seed = parse(key, value)?,
            "newton_max_iter" => s.newton_max_iter = parse(key, value)?,
            "residual_tol" => s.residual_tol = parse(key, value)?,
            "dedup_radius" => s.dedup_radius = parse(key, value)?,
            "diagonal_exclusion" => s.diagonal_exclusion = parse_opt(key, value)?,
            "degeneracy_threshold" => s.degeneracy_threshold = parse(key, value)?,
            "bott_link_radius" => s.bott_link_radius = parse_opt(key, value)?,
            "b_lambda" => self.b_lambda = parse_opt(key, value)?,
            "cup_length" => self.cup_length = parse_opt(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "formats" => self.formats = parse_formats(value)?,
            other => {
                return Err(CliError::Config(format!(
                    "unknown key `{other}`; expected one of {}",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{o}` is not `key=value`")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn require_shape(&self) -> Result<&ShapeSpec, CliError> {
        self.shape
            .as_ref()
            .ok_or_else(|| CliError::Config("no shape given (config key `shape` or --shape)".into()))
    }

    /// Canonical text of everything that influences results: resolved values,
    /// one `key = value` per line in key order. Output location and formats
    /// are excluded, so the same computation hashes the same wherever it is
    /// written.
    pub fn canonical(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:e}"));
        let s = &self.solver;
        let mut lines = vec![
            ("b_lambda", self.b_lambda.map_or("none".into(), |v| v.to_string())),
            ("bott_link_radius", opt(s.bott_link_radius)),
            ("cup_length", self.cup_length.map_or("none".into(), |v| v.to_string())),
            ("dedup_radius", format!("{:e}", s.dedup_radius)),
            ("degeneracy_threshold", format!("{:e}", s.degeneracy_threshold)),
            ("diagonal_exclusion", opt(s.diagonal_exclusion)),
            (
                "homology_source",
                self.homology_source.as_ref().map_or("none".into(), |c| c.to_string()),
            ),
            ("newton_max_iter", s.newton_max_iter.to_string()),
            ("residual_tol", format!("{:e}", s.residual_tol)),
            ("rng_seed", s.rng_seed.to_string()),
            ("seed_count", s.seed_count.to_string()),
            ("shape", self.shape.as_ref().map_or("none".into(), |v| v.to_string())),
        ];
        lines.sort_by(|a, b| a.0.cmp(b.0));
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 of [`RunConfig::canonical`], lowercase hex.
    pub fn hash(&self) -> String {
        crate::output::sha256_hex(self.canonical().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut cfg = RunConfig::parse(
            "# comment\n\nshape = ellipsoid(1,1.3,1.7)\nseed_count = 500\nformats = md,json\n",
        )
        .unwrap();
        assert_eq!(cfg.solver.seed_count, 500);
        assert_eq!(cfg.formats, vec![Format::Json, Format::Markdown]);
        cfg.apply_overrides(&["seed_count=7".into()]).unwrap();
        assert_eq!(cfg.solver.seed_count, 7);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed_lines() {
        assert!(RunConfig::parse("colour = red\n").is_err());
        assert!(RunConfig::parse("rng_seed = 1\nrng_seed = 2\n").is_err());
        assert!(RunConfig::parse("just words\n").is_err());
        assert!(RunConfig::parse("seed_count = many\n").is_err());
        assert!(RunConfig::parse("shape = blob(3)\n").is_err());
    }

    #[test]
    fn hash_ignores_output_location_only() {
        let a = RunConfig::parse("shape = ellipsoid(1,2,3)\nout = a\n").unwrap();
        let b = RunConfig::parse("out = b\nformats = csv\nshape = ellipsoid(1,2,3)\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::parse("shape = ellipsoid(1,2,3)\nrng_seed = 1\n").unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
