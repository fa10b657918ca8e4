#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use prodsynth::bench::{load_corpus, BenchCase, Tier};
use prodsynth::eval::{eval, eval_in_world, DEFAULT_FUEL};
use prodsynth::focusing::{FocusState, World};
use prodsynth::syntax::Intro;
use prodsynth::syntax::{
    name, parse_problem, Declarations, Elim, Expr, PartialFn, SynthesisProblem, Type, Value,
};
use prodsynth::synthesis::check_structural;
use prodsynth::typecheck::{
    check, ctx_well_formed, extract_vars, BindingContext, ConstructorContext,
};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus() -> Vec<BenchCase> {
    load_corpus(&corpus_dir()).expect("corpus loads")
}

pub fn acceptance_corpus() -> Vec<BenchCase> {
    corpus()
        .into_iter()
        .filter(|c| c.tier == Tier::Acceptance)
        .collect()
}

pub fn case(name: &str) -> BenchCase {
    corpus()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no corpus problem {name}"))
}

/// Every fully applied input-output path through the goal examples.
pub fn example_paths(v: &Value) -> Vec<(Vec<Value>, Value)> {
    match v {
        Value::PartialFn(pf) => pf
            .cases()
            .iter()
            .flat_map(|(k, out)| {
                example_paths(out).into_iter().map(move |(mut ins, o)| {
                    ins.insert(0, k.clone());
                    (ins, o)
                })
            })
            .collect(),
        _ => vec![(Vec::new(), v.clone())],
    }
}

/// Checks a program without the engine's own verification: the type
/// checker, then the plain stepper on each example applied in full, with
/// the result compared structurally. Only for problems without library
/// functions.
pub fn independently_ok(problem: &SynthesisProblem, program: &Expr) -> Result<(), String> {
    let sigma = ConstructorContext::from_decls(&problem.decls).map_err(|e| e.to_string())?;
    if check(&sigma, &[], program, &problem.goal_type) != Ok(true) {
        return Err(format!("does not check at {}", problem.goal_type));
    }
    if let Some(intro) = Intro::from_expr(program) {
        if !check_structural(&intro) {
            return Err("recursion is not structural".into());
        }
    }
    for (inputs, expected) in example_paths(&problem.examples) {
        let applied = inputs
            .iter()
            .fold(program.clone(), |f, x| Expr::app(f, x.to_expr()));
        // The plain stepper has no rule for applying a partial-function
        // literal, so function-valued inputs go through the example-aware
        // evaluator instead.
        let higher_order = inputs.iter().any(|x| matches!(x, Value::PartialFn(_)));
        let result = if higher_order {
            eval_in_world(&[], &applied, DEFAULT_FUEL)
        } else {
            eval(&applied, DEFAULT_FUEL)
        };
        match result {
            Ok(v) if v == expected => {}
            Ok(v) => return Err(format!("{inputs:?} gave {v:?}, expected {expected:?}")),
            Err(e) => return Err(format!("{inputs:?}: {e}")),
        }
    }
    Ok(())
}

pub const DECLS: &str = "type nat = O | S of nat
type bool = T | F
type list = Nil | Cons of nat * list
let f : nat |> { 0 } = ?";

pub fn decls() -> Declarations {
    parse_problem(DECLS).unwrap().decls
}

pub fn sigma() -> ConstructorContext {
    ConstructorContext::from_decls(&decls()).unwrap()
}

pub fn nat() -> Type {
    Type::base("nat")
}

pub fn bool_t() -> Type {
    Type::base("bool")
}

pub fn list_t() -> Type {
    Type::base("list")
}

pub fn random_type(rng: &mut StdRng, depth: u32) -> Type {
    let leaf = |rng: &mut StdRng| match rng.gen_range(0..4) {
        0 => Type::Unit,
        1 => bool_t(),
        2 => list_t(),
        _ => nat(),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 | 1 => leaf(rng),
        2 | 3 => {
            let n = rng.gen_range(2..=3);
            Type::product((0..n).map(|_| random_type(rng, depth - 1)).collect())
        }
        _ => Type::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1)),
    }
}

pub fn random_nat(rng: &mut StdRng, max: u32) -> Value {
    let mut v = Value::ctor("O", Value::Unit);
    for _ in 0..rng.gen_range(0..=max) {
        v = Value::ctor("S", v);
    }
    v
}

pub fn random_value(rng: &mut StdRng, ty: &Type, depth: u32) -> Value {
    match ty {
        Type::Unit => Value::Unit,
        Type::Base(b) if b.as_ref() == "bool" => {
            Value::ctor(if rng.gen_bool(0.5) { "T" } else { "F" }, Value::Unit)
        }
        Type::Base(b) if b.as_ref() == "nat" => random_nat(rng, 2),
        Type::Base(_) => {
            let mut v = Value::ctor("Nil", Value::Unit);
            for _ in 0..rng.gen_range(0..3) {
                let head = random_nat(rng, 2);
                v = Value::ctor("Cons", Value::tuple(vec![head, v]));
            }
            v
        }
        Type::Product(ts) => Value::tuple(ts.iter().map(|t| random_value(rng, t, depth)).collect()),
        Type::Arrow(dom, cod) => {
            let mut cases: Vec<(Value, Value)> = Vec::new();
            if depth > 0 {
                for _ in 0..rng.gen_range(0..3) {
                    let k = random_value(rng, dom, depth - 1);
                    if cases.iter().all(|(k2, _)| *k2 != k) {
                        let v = random_value(rng, cod, depth - 1);
                        cases.push((k, v));
                    }
                }
            }
            Value::PartialFn(PartialFn::new(cases).unwrap())
        }
    }
}

/// A well-formed state: fresh variables pending in the focusing context,
/// some base bindings already settled, and worlds giving every binding a
/// value of its type.
pub fn random_state(seed: u64) -> FocusState {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut gamma = BindingContext::new();
    let mut omega = BindingContext::new();
    let mut typed = Vec::new();
    for i in 0..rng.gen_range(0..3) {
        let t = if rng.gen_bool(0.5) { nat() } else { bool_t() };
        let x = Elim::var(&name(&format!("g{i}")));
        gamma.push(x.clone(), t.clone()).unwrap();
        typed.push((x, t));
    }
    for i in 0..rng.gen_range(1..5) {
        let t = random_type(&mut rng, 3);
        let x = Elim::var(&name(&format!("x{i}")));
        omega.push(x.clone(), t.clone()).unwrap();
        typed.push((x, t));
    }
    let worlds = (0..rng.gen_range(1..4))
        .map(|_| {
            let binds = typed
                .iter()
                .map(|(x, t)| (x.clone(), random_value(&mut rng, t, 2)))
                .collect();
            World::new(binds, Value::Unit)
        })
        .collect();
    FocusState {
        gamma,
        delta: BindingContext::new(),
        omega,
        worlds,
    }
}

/// Contexts well-formed, and every world binding names a settled or
/// pending entry and carries a value of its type.
pub fn well_formed(s: &FocusState) -> bool {
    let sg = sigma();
    let vars = extract_vars(&[&s.gamma, &s.delta, &s.omega]);
    let contexts_ok = [&s.gamma, &s.delta, &s.omega]
        .iter()
        .all(|c| ctx_well_formed(&sg, c, &vars));
    let worlds_ok = s.worlds.iter().all(|w| {
        w.sigma.iter().all(|(e, v)| {
            let ty = s.gamma.lookup(e).or_else(|| s.omega.lookup(e));
            ty.is_some_and(|t| matches!(check(&sg, &[], &v.to_expr(), t), Ok(true)))
        })
    });
    contexts_ok && worlds_ok
}

pub fn as_set(c: &BindingContext) -> BTreeSet<String> {
    c.entries()
        .iter()
        .map(|(e, t)| format!("{e} : {t}"))
        .collect()
}

pub fn world_sets(s: &FocusState) -> Vec<BTreeSet<String>> {
    s.worlds
        .iter()
        .map(|w| {
            w.sigma
                .iter()
                .map(|(e, v)| format!("{e} = {v:?}"))
                .collect()
        })
        .collect()
}
