//! Small-step evaluation, evaluation under example contexts, and example
//! satisfaction.

use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Branch, Elim, Expr, FixExpr, Intro, Name, Value};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Evaluation fuel: `PRODSYNTH_FUEL` when set to a positive integer, else
/// the default.
pub fn default_fuel() -> u64 {
    std::env::var("PRODSYNTH_FUEL")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_FUEL)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation ran out of fuel")]
    FuelExhausted,
    #[error("evaluation is stuck")]
    Stuck,
    #[error("no example binding for `{0}`")]
    UnboundName(String),
    #[error("partial function is undefined on the given input")]
    OutsideDomain,
}

/// One step of the leftmost-outermost reduction. `None` when `e` is a value
/// or no rule applies.
pub fn step(e: &Expr) -> Option<Expr> {
    match step_ext(e, false) {
        Stepped::Next(e) => Some(e),
        _ => None,
    }
}

enum Stepped {
    Next(Expr),
    Stuck,
    Fail(EvalError),
}

/// The stepper. With `partial_apps`, applying a partial-function literal to a
/// value looks the value up (failing outside the domain), and its argument
/// is reduced first.
fn step_ext(e: &Expr, partial_apps: bool) -> Stepped {
    use Stepped::*;
    match e {
        Expr::Ctor(c, arg) => match step_ext(arg, partial_apps) {
            Next(a) => Next(Expr::Ctor(c.clone(), Box::new(a))),
            other => other,
        },
        Expr::Tuple(es) => {
            let Some(k) = es.iter().position(|c| !c.is_value()) else {
                return Stuck;
            };
            match step_ext(&es[k], partial_apps) {
                Next(c) => {
                    let mut es = es.clone();
                    es[k] = c;
                    Next(Expr::Tuple(es))
                }
                other => other,
            }
        }
        Expr::Proj(k, t) => match &**t {
            Expr::Tuple(es) if *k >= 1 && *k <= es.len() => Next(es[k - 1].clone()),
            _ => match step_ext(t, partial_apps) {
                Next(t) => Next(Expr::Proj(*k, Box::new(t))),
                other => other,
            },
        },
        Expr::App(f, x) => match &**f {
            Expr::Fix(fx) => Next(subst(
                &fx.body,
                &[
                    (fx.arg.clone(), (**x).clone()),
                    (fx.fname.clone(), (**f).clone()),
                ],
            )),
            Expr::PartialFn(pf) if partial_apps => {
                if let Some(v) = x.to_value() {
                    return match pf.lookup(&v) {
                        Some(out) => Next(out.to_expr()),
                        None => Fail(EvalError::OutsideDomain),
                    };
                }
                match step_ext(x, partial_apps) {
                    Next(x) => Next(Expr::App(f.clone(), Box::new(x))),
                    other => other,
                }
            }
            _ => match step_ext(f, partial_apps) {
                Next(f) => Next(Expr::App(Box::new(f), x.clone())),
                other => other,
            },
        },
        Expr::Match(s, branches) => {
            if let Expr::Ctor(c, v) = &**s {
                if v.is_value() {
                    return match branches.iter().find(|b| &b.ctor == c) {
                        Some(b) => Next(subst(&b.body, &[(b.binder.clone(), (**v).clone())])),
                        None => Stuck,
                    };
                }
            }
            match step_ext(s, partial_apps) {
                Next(s) => Next(Expr::Match(Box::new(s), branches.clone())),
                other => other,
            }
        }
        Expr::Var(_) | Expr::Unit | Expr::Fix(_) | Expr::PartialFn(_) => Stuck,
    }
}

/// Simultaneous substitution of closed terms for variables.
pub fn subst(e: &Expr, map: &[(Name, Expr)]) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    match e {
        Expr::Var(x) => match map.iter().find(|(y, _)| y == x) {
            Some((_, r)) => r.clone(),
            None => e.clone(),
        },
        Expr::Unit | Expr::PartialFn(_) => e.clone(),
        Expr::Tuple(es) => Expr::Tuple(es.iter().map(|c| subst(c, map)).collect()),
        Expr::Proj(k, t) => Expr::Proj(*k, Box::new(subst(t, map))),
        Expr::Ctor(c, a) => Expr::Ctor(c.clone(), Box::new(subst(a, map))),
        Expr::App(f, x) => Expr::App(Box::new(subst(f, map)), Box::new(subst(x, map))),
        Expr::Fix(fx) => {
            let inner: Vec<_> = map
                .iter()
                .filter(|(y, _)| *y != fx.fname && *y != fx.arg)
                .cloned()
                .collect();
            if inner.len() == map.len() && !mentions_any(&fx.body, map) {
                return e.clone();
            }
            Expr::Fix(Arc::new(FixExpr {
                body: subst(&fx.body, &inner),
                ..(**fx).clone()
            }))
        }
        Expr::Match(s, branches) => Expr::Match(
            Box::new(subst(s, map)),
            branches
                .iter()
                .map(|b| {
                    let inner: Vec<_> = map
                        .iter()
                        .filter(|(y, _)| *y != b.binder)
                        .cloned()
                        .collect();
                    Branch {
                        ctor: b.ctor.clone(),
                        binder: b.binder.clone(),
                        body: subst(&b.body, &inner),
                    }
                })
                .collect(),
        ),
    }
}

fn mentions_any(e: &Expr, map: &[(Name, Expr)]) -> bool {
    match e {
        Expr::Var(x) => map.iter().any(|(y, _)| y == x),
        _ => e.children().into_iter().any(|c| mentions_any(c, map)),
    }
}

/// Steps `e` to a value, spending one unit of fuel per step.
pub fn eval(e: &Expr, fuel: u64) -> Result<Value, EvalError> {
    run(e.clone(), fuel, false)
}

fn run(mut e: Expr, fuel: u64, partial_apps: bool) -> Result<Value, EvalError> {
    let mut left = fuel;
    loop {
        if let Some(v) = e.to_value() {
            return Ok(v);
        }
        if left == 0 {
            return Err(EvalError::FuelExhausted);
        }
        left -= 1;
        match step_ext(&e, partial_apps) {
            Stepped::Next(next) => e = next,
            Stepped::Stuck => return Err(EvalError::Stuck),
            Stepped::Fail(err) => return Err(err),
        }
    }
}

/// An example context: elimination forms bound to values.
pub type ExampleContext = [(Elim, Value)];

/// Evaluates `e` under `sigma`: every occurrence of a bound elimination form
/// (largest first, respecting binders in `e`) is replaced by its value, and
/// the result is stepped, with partial functions applied by lookup.
pub fn eval_in_world(sigma: &ExampleContext, e: &Expr, fuel: u64) -> Result<Value, EvalError> {
    let replaced = replace_bound(e, sigma, &mut Vec::new());
    if let Some(x) = replaced.free_vars().into_iter().next() {
        return Err(EvalError::UnboundName(x.to_string()));
    }
    run(replaced, fuel, true)
}

fn replace_bound(e: &Expr, sigma: &ExampleContext, bound: &mut Vec<Name>) -> Expr {
    if matches!(e, Expr::Var(_) | Expr::Proj(..) | Expr::App(..)) {
        if let Some(elim) = Elim::from_expr(e) {
            if let Some((_, v)) = sigma.iter().find(|(k, _)| *k == elim) {
                if e.free_vars().iter().all(|x| !bound.contains(x)) {
                    return v.to_expr();
                }
            }
        }
    }
    match e {
        Expr::Var(_) | Expr::Unit | Expr::PartialFn(_) => e.clone(),
        Expr::Tuple(es) => Expr::Tuple(es.iter().map(|c| replace_bound(c, sigma, bound)).collect()),
        Expr::Proj(k, t) => Expr::Proj(*k, Box::new(replace_bound(t, sigma, bound))),
        Expr::Ctor(c, a) => Expr::Ctor(c.clone(), Box::new(replace_bound(a, sigma, bound))),
        Expr::App(f, x) => Expr::App(
            Box::new(replace_bound(f, sigma, bound)),
            Box::new(replace_bound(x, sigma, bound)),
        ),
        Expr::Fix(fx) => {
            bound.push(fx.fname.clone());
            bound.push(fx.arg.clone());
            let body = replace_bound(&fx.body, sigma, bound);
            bound.truncate(bound.len() - 2);
            Expr::Fix(Arc::new(FixExpr {
                body,
                ..(**fx).clone()
            }))
        }
        Expr::Match(s, branches) => Expr::Match(
            Box::new(replace_bound(s, sigma, bound)),
            branches
                .iter()
                .map(|b| {
                    bound.push(b.binder.clone());
                    let body = replace_bound(&b.body, sigma, bound);
                    bound.pop();
                    Branch {
                        ctor: b.ctor.clone(),
                        binder: b.binder.clone(),
                        body,
                    }
                })
                .collect(),
        ),
    }
}

/// Direct evaluation of a normal-form elimination under `sigma`: a bound
/// form is looked up, a projection projects, and an application looks its
/// argument up in the head's partial function. Agrees with
/// [`eval_in_world`] wherever the head of every application is bound to a
/// partial function.
pub fn eval_elim(sigma: &ExampleContext, e: &Elim, fuel: u64) -> Result<Value, EvalError> {
    if let Some((_, v)) = sigma.iter().find(|(k, _)| k == e) {
        return Ok(v.clone());
    }
    match e {
        Elim::Var(x) => Err(EvalError::UnboundName(x.to_string())),
        Elim::Proj(k, t) => match eval_elim(sigma, t, fuel)? {
            Value::Tuple(vs) if *k >= 1 && *k <= vs.len() => Ok(vs[k - 1].clone()),
            _ => Err(EvalError::Stuck),
        },
        Elim::App(f, x) => {
            let head = eval_elim(sigma, f, fuel)?;
            let arg = eval_intro(sigma, x, fuel)?;
            apply(&head, &arg, fuel)
        }
    }
}

/// Applies a function value to an argument value.
pub fn apply(f: &Value, arg: &Value, fuel: u64) -> Result<Value, EvalError> {
    match f {
        Value::PartialFn(pf) => pf.lookup(arg).cloned().ok_or(EvalError::OutsideDomain),
        // The closure may mention library partial functions substituted in
        // from an example context.
        Value::Fix(fx) => run(Expr::app(Expr::Fix(fx.clone()), arg.to_expr()), fuel, true),
        _ => Err(EvalError::Stuck),
    }
}

/// Evaluates an introduction form under `sigma`. Matches select a branch by
/// the scrutinee's constructor and bind its payload.
pub fn eval_intro(sigma: &ExampleContext, i: &Intro, fuel: u64) -> Result<Value, EvalError> {
    match i {
        Intro::Elim(e) => eval_elim(sigma, e, fuel),
        Intro::Unit => Ok(Value::Unit),
        Intro::Tuple(is) => Ok(Value::Tuple(
            is.iter()
                .map(|c| eval_intro(sigma, c, fuel))
                .collect::<Result<Vec<_>, _>>()?
                .into(),
        )),
        Intro::Ctor(c, a) => Ok(Value::Ctor(
            c.clone(),
            Arc::new(eval_intro(sigma, a, fuel)?),
        )),
        Intro::Fix(_) => eval_in_world(sigma, &i.to_expr(), fuel),
        Intro::Match(s, branches) => {
            let Value::Ctor(c, payload) = eval_elim(sigma, s, fuel)? else {
                return Err(EvalError::Stuck);
            };
            let b = branches
                .iter()
                .find(|b| b.ctor == c)
                .ok_or(EvalError::Stuck)?;
            let mut inner: Vec<(Elim, Value)> = sigma
                .iter()
                .filter(|(k, _)| k.head() != &b.binder)
                .cloned()
                .collect();
            inner.push((Elim::Var(b.binder.clone()), (*payload).clone()));
            eval_intro(&inner, &b.body, fuel)
        }
    }
}

/// Whether a value meets an example. Functions are tested on every input
/// the example names; running out of fuel counts as failure.
pub fn satisfies(v: &Value, example: &Value, fuel: u64) -> bool {
    match (v, example) {
        (Value::Unit, Value::Unit) => true,
        (Value::Tuple(vs), Value::Tuple(xs)) => {
            vs.len() == xs.len() && vs.iter().zip(xs.iter()).all(|(v, x)| satisfies(v, x, fuel))
        }
        (Value::Ctor(c, v), Value::Ctor(d, x)) => c == d && satisfies(v, x, fuel),
        (Value::Fix(_) | Value::PartialFn(_), Value::PartialFn(pf)) => {
            pf.cases()
                .iter()
                .all(|(input, out)| match apply(v, input, fuel) {
                    Ok(r) => satisfies(&r, out, fuel),
                    Err(_) => false,
                })
        }
        _ => false,
    }
}

/// Whether a closed program meets the example.
pub fn program_satisfies(program: &Expr, example: &Value, fuel: u64) -> bool {
    match eval(program, fuel) {
        Ok(v) => satisfies(&v, example, fuel),
        Err(_) => false,
    }
}
