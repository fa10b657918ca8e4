//! Smallest-program search: refinement of introduction forms against the
//! examples, bottom-up guessing of elimination forms, and eager focusing of
//! product-typed hypotheses.

mod engine;
mod structural;
mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::eval::{default_fuel, eval_in_world, satisfies};
use crate::focusing::{FocusState, World};
use crate::syntax::{Elim, Expr, Intro, Name, SynthesisProblem, Type, Value};
use crate::typecheck::{check, BindingContext, ConstructorContext};

use engine::{Abort, Ctx, Engine, Goal};

pub use structural::check_structural;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest program considered, in AST nodes.
    pub max_total_size: usize,
    pub max_scrutinee_size: usize,
    /// How many matches may nest.
    pub max_match_depth: usize,
    pub timeout: Duration,
    pub eval_fuel: u64,
    /// Cap on terms kept in the guessing tables; bounds memory the way
    /// `timeout` bounds time.
    pub max_terms: u64,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            max_total_size: 40,
            max_scrutinee_size: 6,
            max_match_depth: 2,
            timeout: Duration::from_secs(60),
            eval_fuel: default_fuel(),
            max_terms: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("no program of at most {0} nodes satisfies the examples")]
    NoSolution(usize),
    #[error("search timed out after {0:?}")]
    Timeout(Duration),
    #[error("search stored more than {0} candidate terms")]
    TermLimit(u64),
    #[error("invalid problem: {0}")]
    Invalid(String),
    /// The engine produced a program that fails independent verification.
    /// Never expected; reported rather than hidden.
    #[error("internal error: synthesized program failed verification: {0}")]
    Unsound(String),
}

/// How product-typed hypotheses are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FocusMode {
    /// Focus every new binding as soon as it is introduced.
    #[default]
    Eager,
    /// Queue new bindings and focus them just before the next rule fires.
    Lazy,
    /// No focusing: tuples stay whole and projections are guessed.
    Off,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Statistics {
    /// Elimination forms generated.
    pub candidates: u64,
    /// Elimination forms tested against goals.
    pub guesses: u64,
    pub scrutinees: u64,
    pub contexts: usize,
    pub rules: BTreeMap<&'static str, u64>,
    pub elapsed: Duration,
}

impl fmt::Display for Statistics {
    /// One `key=value` per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "candidates={}", self.candidates)?;
        writeln!(f, "guesses={}", self.guesses)?;
        writeln!(f, "scrutinees={}", self.scrutinees)?;
        writeln!(f, "contexts={}", self.contexts)?;
        for (rule, n) in &self.rules {
            writeln!(f, "rule.{rule}={n}")?;
        }
        write!(f, "elapsed_ms={:.3}", self.elapsed.as_secs_f64() * 1000.0)
    }
}

#[derive(Clone, Debug)]
pub struct SynthOutput {
    pub program: Intro,
    pub expr: Expr,
    pub size: usize,
    pub stats: Statistics,
    /// Rules of the derivation that builds `program`, one per line.
    pub trace: Vec<String>,
}

/// A synthesis hole: the datatypes, the hypotheses with their example
/// worlds, and the type to fill.
#[derive(Clone, Debug)]
pub struct SynthGoal {
    pub sigma: ConstructorContext,
    pub state: FocusState,
    pub goal: Type,
    /// Name given to the fixpoint if the hole is filled by one.
    pub fname: Option<Name>,
}

impl SynthGoal {
    /// The top-level hole of a problem: library functions pending focus, one
    /// world binding each to its examples.
    pub fn root(problem: &SynthesisProblem) -> Result<SynthGoal, SynthError> {
        let sigma = ConstructorContext::from_decls(&problem.decls)
            .map_err(|e| SynthError::Invalid(e.to_string()))?;
        let entries = problem
            .library
            .iter()
            .map(|l| (Elim::Var(l.name.clone()), l.ty.clone()))
            .collect();
        let omega = BindingContext::from_entries(entries)
            .map_err(|e| SynthError::Invalid(e.to_string()))?;
        let world = World::new(
            problem
                .library
                .iter()
                .map(|l| {
                    (
                        Elim::Var(l.name.clone()),
                        Value::PartialFn(l.examples.clone()),
                    )
                })
                .collect(),
            problem.examples.clone(),
        );
        Ok(SynthGoal {
            sigma,
            state: FocusState {
                omega,
                worlds: vec![world],
                ..Default::default()
            },
            goal: problem.goal_type.clone(),
            fname: Some(problem.goal_name.clone()),
        })
    }
}

/// Whether a scrutinee's partition of the worlds (sizes per branch) sends
/// examples down at least two branches.
pub fn informative(partition: &[usize]) -> bool {
    partition.iter().filter(|&&n| n > 0).count() >= 2
}

pub fn synthesize(
    problem: &SynthesisProblem,
    limits: &SearchLimits,
) -> Result<SynthOutput, SynthError> {
    synthesize_with(problem, limits, FocusMode::Eager)
}

/// The same search without focusing; projections of tuple hypotheses are
/// guessed like any other elimination form.
pub fn synthesize_nofocus(
    problem: &SynthesisProblem,
    limits: &SearchLimits,
) -> Result<SynthOutput, SynthError> {
    synthesize_with(problem, limits, FocusMode::Off)
}

pub fn synthesize_with(
    problem: &SynthesisProblem,
    limits: &SearchLimits,
    mode: FocusMode,
) -> Result<SynthOutput, SynthError> {
    let started = Instant::now();
    let root = SynthGoal::root(problem)?;
    let mut eng = Engine::new(&root.sigma, limits, mode);
    let goal = enter(&mut eng, &root);
    let mut found = None;
    for budget in 1..=limits.max_total_size {
        match eng.solve(&goal, budget) {
            Ok(Some(p)) => {
                found = Some(p);
                break;
            }
            Ok(None) => {}
            Err(Abort::Timeout) => return Err(SynthError::Timeout(started.elapsed())),
            Err(Abort::TermLimit) => return Err(SynthError::TermLimit(limits.max_terms)),
        }
    }
    let mut stats = std::mem::take(&mut eng.stats);
    stats.contexts = eng.contexts();
    stats.elapsed = started.elapsed();
    let program = found.ok_or(SynthError::NoSolution(limits.max_total_size))?;
    let expr = program.to_expr();
    verify(problem, &expr, limits.eval_fuel).map_err(SynthError::Unsound)?;
    let trace = trace::derivation(&root, &program, mode);
    Ok(SynthOutput {
        size: program.size(),
        program,
        expr,
        stats,
        trace,
    })
}

/// The smallest introduction form of at most `budget` nodes for a hole.
pub fn irefine(
    g: &SynthGoal,
    budget: usize,
    limits: &SearchLimits,
) -> Result<Option<Intro>, SynthError> {
    let mut eng = Engine::new(&g.sigma, limits, FocusMode::Eager);
    let goal = enter(&mut eng, g);
    eng.solve(&goal, budget).map_err(|a| match a {
        Abort::Timeout => SynthError::Timeout(limits.timeout),
        Abort::TermLimit => SynthError::TermLimit(limits.max_terms),
    })
}

/// The elimination forms of exactly `size` nodes and type `ty` that the
/// guessing rules generate in a hole's context, in generation order.
pub fn eguess(g: &SynthGoal, size: usize, ty: &Type, limits: &SearchLimits) -> Vec<Elim> {
    let mut eng = Engine::new(&g.sigma, limits, FocusMode::Eager);
    let goal = enter(&mut eng, g);
    eng.elims_of(goal.ctx, size, ty)
}

fn enter(eng: &mut Engine, g: &SynthGoal) -> Goal {
    let mut used: Vec<Name> = Vec::new();
    for ctx in [&g.state.gamma, &g.state.delta, &g.state.omega] {
        for (e, _) in ctx.entries() {
            if !used.contains(e.head()) {
                used.push(e.head().clone());
            }
        }
    }
    if let Some(f) = &g.fname {
        used.push(f.clone());
    }
    let ctx = Ctx {
        gamma: g.state.gamma.entries().to_vec(),
        delta: g.state.delta.entries().to_vec(),
        pending: Vec::new(),
        frames: Vec::new(),
        used,
        top_name: g.fname.clone(),
    };
    let sigmas = g.state.worlds.iter().map(|w| w.sigma.clone()).collect();
    let (ctx, sigmas) = eng.bind(ctx, sigmas, g.state.omega.entries().to_vec());
    let env = eng.intern_env(sigmas);
    let goals: Arc<[Value]> = g.state.worlds.iter().map(|w| w.goal.clone()).collect();
    Goal {
        ctx,
        env,
        goals,
        ty: g.goal.clone(),
        depth: 0,
    }
}

/// Independent check of a candidate program: it type-checks at the goal
/// type with the library in scope, and its value under the library's
/// examples satisfies the goal examples.
pub fn verify(problem: &SynthesisProblem, program: &Expr, fuel: u64) -> Result<(), String> {
    let sigma = ConstructorContext::from_decls(&problem.decls).map_err(|e| e.to_string())?;
    let vars: Vec<(Name, Type)> = problem
        .library
        .iter()
        .map(|l| (l.name.clone(), l.ty.clone()))
        .collect();
    match check(&sigma, &vars, program, &problem.goal_type) {
        Ok(true) => {}
        Ok(false) => return Err(format!("does not have type {}", problem.goal_type)),
        Err(e) => return Err(e.to_string()),
    }
    let world: Vec<(Elim, Value)> = problem
        .library
        .iter()
        .map(|l| {
            (
                Elim::Var(l.name.clone()),
                Value::PartialFn(l.examples.clone()),
            )
        })
        .collect();
    let v = eval_in_world(&world, program, fuel).map_err(|e| e.to_string())?;
    if satisfies(&v, &problem.examples, fuel) {
        Ok(())
    } else {
        Err("does not satisfy the examples".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_problem, pretty_print, Sugar};

    const LEN: &str = "type nat = O | S of nat
        type natlist = Nil | Cons of nat * natlist
        let len : natlist -> nat |> { [] => 0; [3] => 1; [4; 3] => 2 } = ?";

    fn solve(src: &str, mode: FocusMode) -> SynthOutput {
        let p = parse_problem(src).unwrap();
        synthesize_with(&p, &SearchLimits::default(), mode).unwrap()
    }

    #[test]
    fn len_is_found() {
        let out = solve(LEN, FocusMode::Eager);
        assert_eq!(out.size, 12);
        let p = parse_problem(LEN).unwrap();
        let text = pretty_print(&out.expr, &Sugar::from_decls(&p.decls));
        assert!(text.contains("len #2"), "{text}");
        assert!(check_structural(&out.program));
    }

    #[test]
    fn modes_agree_on_len() {
        let a = solve(LEN, FocusMode::Eager);
        let b = solve(LEN, FocusMode::Lazy);
        let c = solve(LEN, FocusMode::Off);
        assert_eq!(a.program, b.program);
        assert_eq!(a.size, c.size);
    }

    #[test]
    fn informative_partitions() {
        assert!(informative(&[1, 2]));
        assert!(!informative(&[0, 3]));
        assert!(!informative(&[]));
    }

    #[test]
    fn unit_goal() {
        let out = solve("let u : unit |> { () } = ?", FocusMode::Eager);
        assert_eq!(out.program, Intro::Unit);
    }

    #[test]
    fn no_solution_within_budget() {
        let p = parse_problem(LEN).unwrap();
        let limits = SearchLimits {
            max_total_size: 8,
            ..Default::default()
        };
        assert_eq!(
            synthesize(&p, &limits).unwrap_err(),
            SynthError::NoSolution(8)
        );
    }

    #[test]
    fn guessing_in_the_root_context() {
        let p = parse_problem(
            "type nat = O | S of nat
             val inc : nat -> nat |> { 0 => 1; 1 => 2 }
             let two : nat |> { 2 } = ?",
        )
        .unwrap();
        let g = SynthGoal::root(&p).unwrap();
        let nat = Type::base("nat");
        let limits = SearchLimits::default();
        let apps = eguess(&g, 4, &nat, &limits);
        assert!(apps.iter().any(|e| e.to_string() == "inc O"), "{apps:?}");
        let out = irefine(&g, 10, &limits).unwrap().unwrap();
        assert_eq!(verify(&p, &out.to_expr(), 1000), Ok(()));
    }
}
