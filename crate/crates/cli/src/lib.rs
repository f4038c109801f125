//! Command-line driver: homology, bounds, double-normal search and
//! verification runs with persisted, byte-stable outputs.
//!
//! Exit codes are [`ExitStatus`]: 0 success, 1 a bound was violated (or an
//! identity check failed), 2 invalid configuration or input, 3 the solver
//! budget failed (more than 90% of the seeds did not converge).

pub mod compat;
pub mod config;
pub mod output;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dnormal_core::bounds::{bound_report, BoundInputs, BoundReport};
use dnormal_core::geometry::{build_shape, ShapeSpec};
use dnormal_core::homology::{build_named_complex, swap_quotient, CellComplex, ComplexKind};
use dnormal_core::solver::{find_double_normals, SolveResult};
use thiserror::Error;

use crate::config::{parse_formats, Format, RunConfig};
use crate::output::write_atomic;
use crate::verify::{Verdict, VerificationReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("shape `{shape}` is not declared compatible with `{complex}` (accepted: {accepted})")]
    Incompatible {
        shape: String,
        complex: String,
        accepted: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] dnormal_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Violated = 1,
    Invalid = 2,
    SolverFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "dnormal", version, about = "Double normals of immersed manifolds and their topological lower bounds")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output formats, comma-separated: json, csv, md (overrides `formats`).
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// RNG seed of the multi-start search (overrides `rng_seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shape string (overrides `shape`).
    #[arg(long, global = true)]
    pub shape: Option<String>,
    /// Any configuration key, `KEY=VALUE`; repeatable, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Betti numbers and torsion of a named complex or a complex JSON file.
    Homology {
        /// Complex name such as `torus(2)` or `sphere(1)*sphere(2)`, or a JSON file.
        source: String,
        /// Also build the swap quotient with sphere dimension N and check its total Betti number.
        #[arg(long, value_name = "N")]
        quotient: Option<usize>,
    },
    /// Evaluates the lower bounds, from explicit numbers or from the configured shape.
    Bounds {
        /// Total Z2 Betti number (requires --dim).
        #[arg(long = "betti", requires = "n")]
        b: Option<u64>,
        /// Intrinsic dimension.
        #[arg(long = "dim")]
        n: Option<u64>,
        /// Codimension.
        #[arg(long = "codim", default_value_t = 1)]
        k: u64,
        /// Total Betti number of the submanifold whose conormal front is the shape.
        #[arg(long)]
        front_core: Option<u64>,
        /// Total Betti number of the Legendrian lift.
        #[arg(long)]
        b_lambda: Option<u64>,
    },
    /// Runs the double-normal search and writes `solve.json` (and `solve.csv`).
    Solve,
    /// Runs search, homology and bounds and writes `verify.json` (and `verify.md`).
    Verify {
        /// Verify a stored solve result instead of running the search.
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// As `verify`, writing the Markdown report `report.md`.
    Report {
        #[arg(long)]
        result: Option<PathBuf>,
    },
}

/// Parses arguments and runs; errors become exit code 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Invalid.code() } else { 0 };
        }
    };
    match run(&cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::Invalid.code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<ExitStatus, CliError> {
    match &cli.command {
        Command::Homology { source, quotient } => run_homology(source, *quotient, &cli.common),
        Command::Bounds {
            b,
            n,
            k,
            front_core,
            b_lambda,
        } => {
            let cfg = load_config(&cli.common)?;
            let report = match (b, n) {
                (Some(b), Some(n)) => bound_report(&BoundInputs {
                    b: *b,
                    n: *n,
                    k: *k,
                    betti: None,
                    torsion: None,
                    cup_length: cfg.cup_length,
                    b_front_core: *front_core,
                    b_lambda: b_lambda.or(cfg.b_lambda),
                }),
                _ => shape_bounds(&cfg, cfg.require_shape()?)?.1,
            };
            let text = serde_json::to_string_pretty(&report).expect("bound reports serialize");
            println!("{text}");
            Ok(ExitStatus::Success)
        }
        Command::Solve => {
            let cfg = load_config(&cli.common)?;
            let result = run_solve(&cfg)?;
            let out = &cfg.out;
            write_atomic(out, "solve.json", &(result.to_json() + "\n"))?;
            if cfg.formats.contains(&Format::Csv) {
                write_atomic(out, "solve.csv", &result.to_csv())?;
            }
            println!(
                "{}: {} diameters, {} degenerate families -> {}",
                result.shape,
                result.diameters.len(),
                result.bott_clusters.len(),
                out.display()
            );
            Ok(solver_status(&result).unwrap_or(ExitStatus::Success))
        }
        Command::Verify { result } => {
            let cfg = load_config(&cli.common)?;
            let (report, status) = run_verify(&cfg, result.as_deref())?;
            write_atomic(&cfg.out, "verify.json", &report.to_json())?;
            if cfg.formats.contains(&Format::Markdown) {
                write_atomic(&cfg.out, "verify.md", &report.to_markdown())?;
            }
            print!("{}", summary(&report));
            Ok(status)
        }
        Command::Report { result } => {
            let cfg = load_config(&cli.common)?;
            let (report, status) = run_verify(&cfg, result.as_deref())?;
            let path = write_atomic(&cfg.out, "report.md", &report.to_markdown())?;
            if cfg.formats.contains(&Format::Json) {
                write_atomic(&cfg.out, "verify.json", &report.to_json())?;
            }
            println!("{} -> {}", report.verdict, path.display());
            Ok(status)
        }
    }
}

/// Config file, then flags, then `--set` overrides.
pub fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = &common.shape {
        cfg.set("shape", s)?;
    }
    if let Some(seed) = common.seed {
        cfg.solver.rng_seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(f) = &common.format {
        cfg.formats = parse_formats(f)?;
    }
    cfg.apply_overrides(&common.overrides)?;
    Ok(cfg)
}

fn load_complex(source: &str) -> Result<CellComplex, CliError> {
    if let Ok(kind) = source.parse::<ComplexKind>() {
        return Ok(build_named_complex(&kind)?);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(CellComplex::from_json(&text)?)
}

/// Homology summary text; the second value is false when the quotient
/// identity check failed.
pub fn homology_text(complex: &CellComplex, quotient: Option<usize>) -> Result<(String, bool), CliError> {
    let mut s = String::new();
    let betti = complex.betti_z2()?;
    writeln!(s, "cells: {:?}", complex.cell_counts()).unwrap();
    for (d, v) in betti.b.iter().enumerate() {
        writeln!(s, "b{d} = {v}").unwrap();
    }
    writeln!(s, "B = {}", betti.total).unwrap();
    if complex.has_integer_boundaries() {
        writeln!(s, "torsion generators: {:?}", complex.torsion_generators()?.q).unwrap();
    }
    let mut ok = true;
    if let Some(n) = quotient {
        let q = swap_quotient(complex, n)?;
        let total = q.complex.betti_z2()?.total;
        let b = betti.total;
        let expect = b * b + n * b;
        ok = total == expect;
        writeln!(s, "quotient N = {n}: cells {:?}, B = {total}", q.complex.cell_counts()).unwrap();
        writeln!(
            s,
            "identity B^2 + N B = {expect}: {}",
            if ok { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    Ok((s, ok))
}

fn run_homology(source: &str, quotient: Option<usize>, common: &Common) -> Result<ExitStatus, CliError> {
    let complex = load_complex(source)?;
    let (text, ok) = homology_text(&complex, quotient)?;
    let json = common
        .format
        .as_deref()
        .map(parse_formats)
        .transpose()?
        .is_some_and(|f| f == [Format::Json]);
    if json {
        let betti = complex.betti_z2()?;
        let mut v = serde_json::json!({ "cells": complex.cell_counts(), "betti": betti });
        if complex.has_integer_boundaries() {
            v["torsion"] = serde_json::to_value(complex.torsion_generators()?).unwrap();
        }
        if let Some(n) = quotient {
            let q = swap_quotient(&complex, n)?;
            v["quotient"] = serde_json::json!({
                "N": n,
                "cells": q.complex.cell_counts(),
                "total": q.complex.betti_z2()?.total,
                "identity_holds": ok,
            });
        }
        println!("{}", serde_json::to_string_pretty(&v).unwrap());
    } else {
        print!("{text}");
    }
    Ok(if ok { ExitStatus::Success } else { ExitStatus::Violated })
}

/// Homology source and bound report for the configured shape.
pub fn shape_bounds(cfg: &RunConfig, shape: &ShapeSpec) -> Result<(ComplexKind, BoundReport), CliError> {
    let source = compat::resolve_homology(shape, cfg.homology_source.as_ref())?;
    let complex = build_named_complex(&source)?;
    let imm = build_shape(shape)?;
    let betti = complex.betti_z2()?;
    let torsion = complex.torsion_generators()?;
    if betti.b.len() != imm.intrinsic_dim() + 1 {
        return Err(CliError::Incompatible {
            shape: shape.to_string(),
            complex: source.to_string(),
            accepted: "a complex of the shape's dimension".into(),
        });
    }
    let report = bound_report(&BoundInputs {
        b: betti.total as u64,
        n: imm.intrinsic_dim() as u64,
        k: imm.codim() as u64,
        betti: Some(betti.b),
        torsion: Some(torsion.q),
        cup_length: cfg.cup_length,
        b_front_core: compat::front_core_betti(shape),
        b_lambda: cfg.b_lambda,
    });
    Ok((source, report))
}

pub fn run_solve(cfg: &RunConfig) -> Result<SolveResult, CliError> {
    cfg.solver.validate()?;
    let shape = cfg.require_shape()?;
    let imm = build_shape(shape)?;
    Ok(find_double_normals(&imm, &cfg.solver)?)
}

fn solver_status(result: &SolveResult) -> Option<ExitStatus> {
    result
        .diagnostics
        .divergence_warning
        .then_some(ExitStatus::SolverFailure)
}

/// Builds the verification report; with `stored` the solve result is read
/// from that file and must belong to the configured shape.
pub fn run_verify(cfg: &RunConfig, stored: Option<&Path>) -> Result<(VerificationReport, ExitStatus), CliError> {
    cfg.solver.validate()?;
    let shape = cfg.require_shape()?;
    let (source, bounds) = shape_bounds(cfg, shape)?;
    let result = match stored {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
            let r = SolveResult::from_json(&text)?;
            if r.shape != shape.to_string() {
                return Err(CliError::Config(format!(
                    "stored result is for `{}`, config is for `{shape}`",
                    r.shape
                )));
            }
            r
        }
        None => run_solve(cfg)?,
    };
    let report = VerificationReport::new(&result, &bounds, source.to_string(), cfg.hash());
    let status = solver_status(&result).unwrap_or(match report.verdict {
        Verdict::Violated => ExitStatus::Violated,
        _ => ExitStatus::Success,
    });
    Ok((report, status))
}

/// One line per check, for the terminal.
pub fn summary(report: &VerificationReport) -> String {
    let mut s = format!("{} [{}]\n", report.shape, report.homology_source);
    for c in &report.checks {
        writeln!(
            s,
            "  {:<4} {:<28} required {:>4}  observed {:>4}  {}{}",
            c.theorem,
            c.quantity,
            c.required,
            c.observed.map_or("-".into(), |v| v.to_string()),
            c.verdict,
            if c.sharp { " (sharp)" } else { "" }
        )
        .unwrap();
    }
    writeln!(s, "verdict: {}", report.verdict).unwrap();
    s
}
