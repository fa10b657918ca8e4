//! Benchmark corpus loading and the suite runner.
//!
//! A corpus is a directory of `.mls` problem files. A leading comment of the
//! form `(* tier: hard *)` (or `(* expected: hard *)`) marks the file's tier;
//! files without one count as acceptance problems.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::parallel::{par_map, Parallelism};
use crate::syntax::{parse_problem, pretty_print, ParseError, Sugar, SynthesisProblem};
use crate::synthesis::{
    check_structural, synthesize_with, verify, FocusMode, SearchLimits, SynthError,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, ParseError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    /// Must be solved for the suite to pass.
    Acceptance,
    /// Reported only.
    Hard,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Acceptance => "acceptance",
            Tier::Hard => "hard",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchCase {
    pub name: String,
    pub path: PathBuf,
    pub tier: Tier,
    pub problem: SynthesisProblem,
}

fn tier_of(text: &str) -> Tier {
    let head = text.trim_start();
    let Some(rest) = head.strip_prefix("(*") else {
        return Tier::Acceptance;
    };
    let comment = rest.split("*)").next().unwrap_or("");
    let comment = comment.trim();
    let value = comment
        .strip_prefix("tier:")
        .or_else(|| comment.strip_prefix("expected:"))
        .map(str::trim);
    match value {
        Some("hard") => Tier::Hard,
        _ => Tier::Acceptance,
    }
}

pub fn load_case(path: &Path) -> Result<BenchCase, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.into(), e))?;
    let problem = parse_problem(&text).map_err(|e| BenchError::Parse(path.into(), e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(BenchCase {
        name,
        path: path.into(),
        tier: tier_of(&text),
        problem,
    })
}

/// Every `.mls` file in `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<BenchCase>, BenchError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| BenchError::Io(dir.into(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mls"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_case(p)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved,
    NoSolution,
    Timeout,
    /// The search hit its cap on stored terms.
    TermLimit,
    /// A returned program failed the independent check.
    Unsound(String),
    Invalid(String),
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Solved => "solved",
            Outcome::NoSolution => "no-solution",
            Outcome::Timeout => "timeout",
            Outcome::TermLimit => "term-limit",
            Outcome::Unsound(_) => "unsound",
            Outcome::Invalid(_) => "invalid",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchResult {
    pub name: String,
    pub tier: Tier,
    pub outcome: Outcome,
    pub size: Option<usize>,
    pub examples: usize,
    pub elapsed: Duration,
    pub program: Option<String>,
}

impl BenchResult {
    pub fn solved(&self) -> bool {
        self.outcome == Outcome::Solved
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub results: Vec<BenchResult>,
}

/// Runs one case and re-checks any program it returns, apart from the
/// engine's own verification: type, examples, and structural recursion.
pub fn run_case(case: &BenchCase, limits: &SearchLimits, mode: FocusMode) -> BenchResult {
    let started = Instant::now();
    let res = synthesize_with(&case.problem, limits, mode);
    let elapsed = started.elapsed();
    let sugar = Sugar::from_decls(&case.problem.decls);
    let mut out = BenchResult {
        name: case.name.clone(),
        tier: case.tier,
        outcome: Outcome::Solved,
        size: None,
        examples: case.problem.example_count(),
        elapsed,
        program: None,
    };
    match res {
        Ok(s) => {
            out.size = Some(s.size);
            out.program = Some(pretty_print(&s.expr, &sugar));
            if let Err(why) = verify(&case.problem, &s.expr, limits.eval_fuel) {
                out.outcome = Outcome::Unsound(why);
            } else if !check_structural(&s.program) {
                out.outcome = Outcome::Unsound("recursion is not structural".into());
            }
        }
        Err(SynthError::NoSolution(_)) => out.outcome = Outcome::NoSolution,
        Err(SynthError::Timeout(_)) => out.outcome = Outcome::Timeout,
        Err(SynthError::TermLimit(_)) => out.outcome = Outcome::TermLimit,
        Err(SynthError::Unsound(why)) => out.outcome = Outcome::Unsound(why),
        Err(SynthError::Invalid(why)) => out.outcome = Outcome::Invalid(why),
    }
    out
}

pub fn run_suite(cases: &[BenchCase], limits: &SearchLimits, parallelism: Parallelism) -> Report {
    Report {
        results: par_map(cases, parallelism, |c| {
            run_case(c, limits, FocusMode::Eager)
        }),
    }
}

impl Report {
    /// Acceptance-tier problems that were not solved soundly.
    pub fn acceptance_failures(&self) -> Vec<&BenchResult> {
        self.results
            .iter()
            .filter(|r| r.tier == Tier::Acceptance && !r.solved())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,tier,outcome,size,examples,seconds\n");
        for r in &self.results {
            let size = r.size.map(|n| n.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:.3}",
                r.name,
                r.tier.as_str(),
                r.outcome.as_str(),
                size,
                r.examples,
                r.elapsed.as_secs_f64()
            );
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| program | tier | outcome | size | examples | seconds |\n");
        s.push_str("|---|---|---|---:|---:|---:|\n");
        for r in &self.results {
            let size = r.size.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {:.3} |",
                r.name,
                r.tier.as_str(),
                r.outcome.as_str(),
                size,
                r.examples,
                r.elapsed.as_secs_f64()
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiers_from_headers() {
        assert_eq!(tier_of("(* tier: hard *)\ntype a = A"), Tier::Hard);
        assert_eq!(tier_of("  (* tier: acceptance *)"), Tier::Acceptance);
        assert_eq!(tier_of("type a = A"), Tier::Acceptance);
        assert_eq!(tier_of("(* expected: hard *)"), Tier::Hard);
    }
}
