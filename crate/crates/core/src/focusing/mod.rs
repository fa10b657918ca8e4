//! Eager left-inversion of products over binding contexts and their example
//! worlds.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Elim, Type, Value};
use crate::typecheck::{BindingContext, InternalError};

/// One example scenario: bindings for elimination forms, and the goal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    pub sigma: Vec<(Elim, Value)>,
    pub goal: Value,
}

impl World {
    pub fn new(sigma: Vec<(Elim, Value)>, goal: Value) -> World {
        World { sigma, goal }
    }

    pub fn lookup(&self, e: &Elim) -> Option<&Value> {
        self.sigma.iter().find(|(k, _)| k == e).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FocusState {
    pub gamma: BindingContext,
    pub delta: BindingContext,
    pub omega: BindingContext,
    pub worlds: Vec<World>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FocusError {
    #[error("example for `{binding}` is not a {arity}-tuple")]
    MalformedWorld { binding: String, arity: usize },
    #[error(transparent)]
    Context(#[from] InternalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FocusRule {
    Unit,
    Base,
    Fun,
    Tuple,
}

impl FocusRule {
    pub fn name(self) -> &'static str {
        match self {
            FocusRule::Unit => "Focus-Unit",
            FocusRule::Base => "Focus-Base",
            FocusRule::Fun => "Focus-Fun",
            FocusRule::Tuple => "Focus-Tuple",
        }
    }
}

/// A single applied focusing rule and the binding it moved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FocusEvent {
    pub rule: FocusRule,
    pub binding: Elim,
    pub ty: Type,
}

impl fmt::Display for FocusEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} : {}", self.rule.name(), self.binding, self.ty)
    }
}

/// Which pending entry to focus next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FocusOrder {
    /// Oldest first; projections queue behind existing entries.
    #[default]
    Fifo,
    /// Newest first.
    Lifo,
}

/// Focuses the first pending entry. `Ok(None)` when nothing is pending.
pub fn focus_step(s: &FocusState) -> Result<Option<(FocusState, FocusEvent)>, FocusError> {
    focus_step_at(s, 0)
}

/// Focuses the pending entry at `index`.
pub fn focus_step_at(
    s: &FocusState,
    index: usize,
) -> Result<Option<(FocusState, FocusEvent)>, FocusError> {
    if index >= s.omega.len() {
        return Ok(None);
    }
    let mut next = s.clone();
    let mut rest: Vec<(Elim, Type)> = s.omega.entries().to_vec();
    let (e, ty) = rest.remove(index);
    next.omega = BindingContext::from_entries(rest)?;
    let rule = match &ty {
        Type::Unit => FocusRule::Unit,
        Type::Base(_) => FocusRule::Base,
        Type::Arrow(..) => FocusRule::Fun,
        Type::Product(_) => FocusRule::Tuple,
    };
    match &ty {
        Type::Product(ts) => {
            next.delta.push(e.clone(), ty.clone())?;
            for (j, t) in ts.iter().enumerate() {
                next.omega.push(e.proj(j + 1), t.clone())?;
            }
            for w in &mut next.worlds {
                let Some(pos) = w.sigma.iter().position(|(k, _)| *k == e) else {
                    continue;
                };
                let (_, v) = w.sigma.remove(pos);
                match v {
                    Value::Tuple(vs) if vs.len() == ts.len() => {
                        for (j, vj) in vs.iter().enumerate() {
                            w.sigma.push((e.proj(j + 1), vj.clone()));
                        }
                    }
                    _ => {
                        return Err(FocusError::MalformedWorld {
                            binding: e.to_string(),
                            arity: ts.len(),
                        })
                    }
                }
            }
        }
        _ => next.gamma.push(e.clone(), ty.clone())?,
    }
    Ok(Some((
        next,
        FocusEvent {
            rule,
            binding: e,
            ty,
        },
    )))
}

/// Focuses until nothing is pending, returning the applied rules in order.
pub fn focus_closure(s: &FocusState) -> Result<(FocusState, Vec<FocusEvent>), FocusError> {
    focus_closure_with(s, FocusOrder::Fifo)
}

pub fn focus_closure_with(
    s: &FocusState,
    order: FocusOrder,
) -> Result<(FocusState, Vec<FocusEvent>), FocusError> {
    let mut cur = s.clone();
    let mut events = Vec::new();
    loop {
        let index = match order {
            FocusOrder::Fifo => 0,
            FocusOrder::Lifo => cur.omega.len().saturating_sub(1),
        };
        match focus_step_at(&cur, index)? {
            Some((next, ev)) => {
                cur = next;
                events.push(ev);
            }
            None => return Ok((cur, events)),
        }
    }
}

/// Total type-tree size of the pending entries.
pub fn potential(omega: &BindingContext) -> usize {
    omega.entries().iter().map(|(_, t)| t.size()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    fn base(n: &str) -> Type {
        Type::base(n)
    }

    fn var(n: &str) -> Elim {
        Elim::var(&name(n))
    }

    fn ctor(c: &str) -> Value {
        Value::ctor(c, Value::Unit)
    }

    #[test]
    fn tuple_splits_worlds() {
        let pair = Type::product(vec![base("a"), base("b")]);
        let s = FocusState {
            omega: BindingContext::from_entries(vec![(var("x"), pair.clone())]).unwrap(),
            worlds: vec![World::new(
                vec![(var("x"), Value::tuple(vec![ctor("A"), ctor("B")]))],
                Value::Unit,
            )],
            ..Default::default()
        };
        let (next, ev) = focus_step(&s).unwrap().unwrap();
        assert_eq!(ev.rule, FocusRule::Tuple);
        assert_eq!(next.delta.entries(), &[(var("x"), pair)]);
        assert_eq!(
            next.omega.entries(),
            &[(var("x").proj(1), base("a")), (var("x").proj(2), base("b"))]
        );
        assert_eq!(
            next.worlds[0].sigma,
            vec![(var("x").proj(1), ctor("A")), (var("x").proj(2), ctor("B"))]
        );
    }

    #[test]
    fn unit_moves_to_gamma() {
        let s = FocusState {
            omega: BindingContext::from_entries(vec![(var("y"), Type::Unit)]).unwrap(),
            ..Default::default()
        };
        let (next, ev) = focus_step(&s).unwrap().unwrap();
        assert_eq!(ev.rule, FocusRule::Unit);
        assert_eq!(next.gamma.entries(), &[(var("y"), Type::Unit)]);
        assert!(next.omega.is_empty() && next.delta.is_empty());
        assert!(focus_step(&next).unwrap().is_none());
    }

    #[test]
    fn nested_product_closure() {
        let inner = Type::product(vec![base("t1"), base("t2")]);
        let outer = Type::product(vec![inner.clone(), base("t3")]);
        let s = FocusState {
            omega: BindingContext::from_entries(vec![(var("p"), outer.clone())]).unwrap(),
            ..Default::default()
        };
        assert_eq!(potential(&s.omega), 5);
        let (done, events) = focus_closure(&s).unwrap();
        assert!(events.len() <= 5);
        let p = var("p");
        let mut gamma = vec![
            (p.proj(1).proj(1), base("t1")),
            (p.proj(1).proj(2), base("t2")),
            (p.proj(2), base("t3")),
        ];
        gamma.sort();
        assert_eq!(done.gamma.normalized(), gamma);
        let mut delta = vec![(p.clone(), outer), (p.proj(1), inner)];
        delta.sort();
        assert_eq!(done.delta.normalized(), delta);
    }

    #[test]
    fn function_moves_unchanged() {
        let f = Type::arrow(base("nat"), base("nat"));
        let s = FocusState {
            omega: BindingContext::from_entries(vec![(var("f"), f.clone())]).unwrap(),
            ..Default::default()
        };
        let (done, events) = focus_closure(&s).unwrap();
        assert_eq!(events[0].rule, FocusRule::Fun);
        assert_eq!(done.gamma.entries(), &[(var("f"), f)]);
    }

    #[test]
    fn malformed_world() {
        let pair = Type::product(vec![base("a"), base("b")]);
        let s = FocusState {
            omega: BindingContext::from_entries(vec![(var("x"), pair)]).unwrap(),
            worlds: vec![World::new(vec![(var("x"), Value::Unit)], Value::Unit)],
            ..Default::default()
        };
        assert!(matches!(
            focus_step(&s),
            Err(FocusError::MalformedWorld { .. })
        ));
    }
}
