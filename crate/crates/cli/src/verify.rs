//! Comparison of observed double-normal counts with the evaluated bounds.

use std::fmt;

use dnormal_core::bounds::{BoundEntry, BoundReport};
use dnormal_core::solver::{Diagnostics, PassingClass, SolveResult};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Satisfied,
    Violated,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Violated => "VIOLATED",
            Verdict::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

/// Counts read off a solve result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observed {
    pub total: usize,
    pub passing: usize,
    pub counterpassing: usize,
    pub unclassified: usize,
    pub bott_clusters: usize,
}

impl Observed {
    pub fn of(result: &SolveResult) -> Self {
        Self {
            total: result.diameters.len(),
            passing: result.count_class(PassingClass::Passing),
            counterpassing: result.count_class(PassingClass::Counterpassing),
            unclassified: result.count_class(PassingClass::Unclassified),
            bott_clusters: result.bott_clusters.len(),
        }
    }
}

/// One bound against the matching observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub theorem: String,
    pub quantity: String,
    /// Exact value of the bound (an integer or a half-integer).
    pub bound: String,
    /// The bound as a count: the value rounded up.
    pub required: u64,
    pub observed: Option<u64>,
    pub verdict: Verdict,
    /// Observed count equals the requirement.
    pub sharp: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub shape: String,
    pub homology_source: String,
    pub config_hash: String,
    pub observed: Observed,
    pub checks: Vec<BoundCheck>,
    /// VIOLATED if any check is, else SATISFIED if any check is.
    pub verdict: Verdict,
    /// The evaluated bounds with their inputs and warnings.
    pub bounds: serde_json::Value,
    pub diagnostics: Diagnostics,
}

fn observation(entry: &BoundEntry, obs: &Observed) -> Result<u64, String> {
    let count = match entry.quantity.as_str() {
        "diameters" if entry.theorem == "4.4" => {
            return Err(
                "total from the Legendrian lift exceeds the sum of the passing and \
                 counterpassing bounds; reported, not enforced"
                    .into(),
            )
        }
        "diameters" => obs.total,
        "passing" => obs.passing,
        "counterpassing" => obs.counterpassing,
        q if q.starts_with("critical_points") => {
            return Err("counts critical points of a generating function, not observed here".into())
        }
        "self_intersections" => return Err("self-intersections are not observed here".into()),
        q => return Err(format!("no observation for `{q}`")),
    };
    if obs.bott_clusters > 0 {
        return Err(format!(
            "{} degenerate critical families found; counts of isolated diameters do not apply",
            obs.bott_clusters
        ));
    }
    Ok(count as u64)
}

pub fn check(entry: &BoundEntry, obs: &Observed) -> BoundCheck {
    let base = BoundCheck {
        theorem: entry.theorem.clone(),
        quantity: entry.quantity.clone(),
        bound: entry.value.to_string(),
        required: entry.count,
        observed: None,
        verdict: Verdict::NotApplicable,
        sharp: false,
        note: None,
    };
    match observation(entry, obs) {
        Ok(seen) => BoundCheck {
            observed: Some(seen),
            verdict: if seen >= entry.count {
                Verdict::Satisfied
            } else {
                Verdict::Violated
            },
            sharp: seen == entry.count,
            ..base
        },
        Err(note) => BoundCheck {
            note: Some(note),
            ..base
        },
    }
}

impl VerificationReport {
    pub fn new(
        result: &SolveResult,
        bounds: &BoundReport,
        homology_source: String,
        config_hash: String,
    ) -> Self {
        let observed = Observed::of(result);
        let checks: Vec<BoundCheck> = bounds.bounds.iter().map(|e| check(e, &observed)).collect();
        let verdict = if checks.iter().any(|c| c.verdict == Verdict::Violated) {
            Verdict::Violated
        } else if checks.iter().any(|c| c.verdict == Verdict::Satisfied) {
            Verdict::Satisfied
        } else {
            Verdict::NotApplicable
        };
        Self {
            shape: result.shape.clone(),
            homology_source,
            config_hash,
            observed,
            checks,
            verdict,
            bounds: serde_json::to_value(bounds).expect("bound reports serialize"),
            diagnostics: result.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Markdown summary with the bound-versus-observed table.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# Double normals of `{}`\n\n", self.shape));
        s.push_str(&format!("- homology source: `{}`\n", self.homology_source));
        s.push_str(&format!("- config hash: `{}`\n", self.config_hash));
        s.push_str(&format!("- verdict: **{}**\n\n", self.verdict));

        let o = &self.observed;
        s.push_str("## Observed\n\n| diameters | passing | counterpassing | unclassified | degenerate families |\n");
        s.push_str("|---:|---:|---:|---:|---:|\n");
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n\n",
            o.total, o.passing, o.counterpassing, o.unclassified, o.bott_clusters
        ));

        s.push_str("## Bounds\n\n| id | quantity | bound | required | observed | verdict | sharp |\n");
        s.push_str("|---|---|---:|---:|---:|---|---|\n");
        for c in &self.checks {
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                c.theorem,
                c.quantity,
                c.bound,
                c.required,
                c.observed.map_or("-".into(), |v| v.to_string()),
                c.verdict,
                if c.observed.is_none() {
                    "-"
                } else if c.sharp {
                    "yes"
                } else {
                    "no"
                }
            ));
        }
        let notes: Vec<String> = self
            .checks
            .iter()
            .filter_map(|c| c.note.as_ref().map(|n| format!("- {} {}: {n}\n", c.theorem, c.quantity)))
            .collect();
        if !notes.is_empty() {
            s.push_str("\n## Notes\n\n");
            s.extend(notes);
        }

        let d = &self.diagnostics;
        s.push_str("\n## Solver diagnostics\n\n| seeds | converged | diverged | singular | deduplicated | near diagonal | degenerate |\n");
        s.push_str("|---:|---:|---:|---:|---:|---:|---:|\n");
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            d.seeds,
            d.converged,
            d.diverged,
            d.singular,
            d.deduplicated,
            d.excluded_near_diagonal,
            d.degenerate_solutions
        ));
        if d.divergence_warning {
            s.push_str("\nWARNING: more than 90% of the seeds failed to converge.\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnormal_core::bounds::HalfInt;

    fn entry(theorem: &str, quantity: &str, v: i64) -> BoundEntry {
        BoundEntry::new(theorem, quantity, HalfInt::from_int(v), serde_json::json!({}))
    }

    fn obs(total: usize, passing: usize, counterpassing: usize, bott: usize) -> Observed {
        Observed {
            total,
            passing,
            counterpassing,
            unclassified: 0,
            bott_clusters: bott,
        }
    }

    #[test]
    fn verdicts() {
        let c = check(&entry("3.1", "diameters", 10), &obs(10, 2, 8, 0));
        assert_eq!((c.verdict, c.sharp), (Verdict::Satisfied, true));
        let c = check(&entry("3.1", "diameters", 10), &obs(9, 2, 7, 0));
        assert_eq!(c.verdict, Verdict::Violated);
        let c = check(&entry("4.4", "passing", 2), &obs(12, 4, 8, 0));
        assert_eq!((c.verdict, c.sharp), (Verdict::Satisfied, false));
        let c = check(&entry("4.4", "diameters", 12), &obs(10, 2, 8, 0));
        assert_eq!(c.verdict, Verdict::NotApplicable);
        let c = check(&entry("3.1", "diameters", 10), &obs(0, 0, 0, 4));
        assert_eq!(c.verdict, Verdict::NotApplicable);
        let c = check(&entry("1.1", "critical_points_morse", 4), &obs(10, 2, 8, 0));
        assert_eq!(c.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn verdict_spelling() {
        assert_eq!(serde_json::to_string(&Verdict::NotApplicable).unwrap(), "\"NOT-APPLICABLE\"");
        assert_eq!(Verdict::Violated.to_string(), "VIOLATED");
    }
}
