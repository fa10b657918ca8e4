//! Replays a finished program as the sequence of rules that derive it.

use crate::focusing::{focus_closure, FocusState};
use crate::syntax::{Elim, Intro, Name, Type};
use crate::typecheck::{infer, BindingContext};

use super::{FocusMode, SynthGoal};

struct Replay<'a> {
    goal: &'a SynthGoal,
    mode: FocusMode,
    vars: Vec<(Name, Type)>,
    lines: Vec<String>,
}

pub(super) fn derivation(goal: &SynthGoal, program: &Intro, mode: FocusMode) -> Vec<String> {
    let mut r = Replay {
        goal,
        mode,
        vars: Vec::new(),
        lines: Vec::new(),
    };
    let lib: Vec<(Elim, Type)> = goal.state.omega.entries().to_vec();
    r.bind(0, lib);
    r.intro(0, program, &goal.goal);
    r.lines
}

impl Replay<'_> {
    fn emit(&mut self, depth: usize, line: String) {
        self.lines.push(format!("{}{line}", "  ".repeat(depth)));
    }

    fn bind(&mut self, depth: usize, new: Vec<(Elim, Type)>) {
        for (e, t) in &new {
            if let Some(x) = e.as_var() {
                self.vars.push((x.clone(), t.clone()));
            }
        }
        if self.mode == FocusMode::Off {
            return;
        }
        let Ok(omega) = BindingContext::from_entries(new) else {
            return;
        };
        let state = FocusState {
            omega,
            ..Default::default()
        };
        if let Ok((_, events)) = focus_closure(&state) {
            for ev in events {
                self.emit(depth, ev.to_string());
            }
        }
    }

    fn intro(&mut self, depth: usize, i: &Intro, ty: &Type) {
        match (i, ty) {
            (Intro::Unit, _) => self.emit(depth, "IRefine-Unit".into()),
            (Intro::Tuple(parts), Type::Product(ts)) => {
                self.emit(depth, format!("IRefine-Tuple {ty}"));
                for (p, t) in parts.iter().zip(ts.iter()) {
                    self.intro(depth + 1, p, t);
                }
            }
            (Intro::Ctor(c, a), _) => {
                self.emit(depth, format!("IRefine-Ctor {c}"));
                let arg_ty = self
                    .goal
                    .sigma
                    .ctor(c)
                    .map(|(t, _)| t.clone())
                    .unwrap_or(Type::Unit);
                self.intro(depth + 1, a, &arg_ty);
            }
            (Intro::Fix(fx), _) => {
                self.emit(depth, format!("IRefine-Fix {} {} : {ty}", fx.fname, fx.arg));
                let mark = self.vars.len();
                self.bind(
                    depth + 1,
                    vec![
                        (Elim::Var(fx.fname.clone()), ty.clone()),
                        (Elim::Var(fx.arg.clone()), fx.dom.clone()),
                    ],
                );
                self.intro(depth + 1, &fx.body, &fx.cod);
                self.vars.truncate(mark);
            }
            (Intro::Match(s, branches), _) => {
                self.emit(depth, format!("IRefine-Match {s}"));
                self.elim(depth + 1, s);
                for b in branches {
                    self.emit(depth + 1, format!("branch {}", b.ctor));
                    let arg_ty = self
                        .goal
                        .sigma
                        .ctor(&b.ctor)
                        .map(|(t, _)| t.clone())
                        .unwrap_or(Type::Unit);
                    let mark = self.vars.len();
                    self.bind(depth + 2, vec![(Elim::Var(b.binder.clone()), arg_ty)]);
                    self.intro(depth + 2, &b.body, ty);
                    self.vars.truncate(mark);
                }
            }
            (Intro::Elim(e), _) => {
                self.emit(depth, format!("IRefine-Guess {e}"));
                self.elim(depth + 1, e);
            }
            (Intro::Tuple(_), _) => self.emit(depth, format!("ill-typed tuple at {ty}")),
        }
    }

    fn elim(&mut self, depth: usize, e: &Elim) {
        match e {
            Elim::Var(x) => self.emit(depth, format!("EGuess-Ctx {x}")),
            Elim::Proj(..) if self.mode != FocusMode::Off && projects_a_variable(e) => {
                self.emit(depth, format!("EGuess-Ctx {e}"));
            }
            Elim::Proj(_, inner) => {
                let rule = if self.mode == FocusMode::Off {
                    "EGuess-Proj"
                } else {
                    "EGuess-Focus"
                };
                self.emit(depth, format!("{rule} {e}"));
                self.elim(depth + 1, inner);
            }
            Elim::App(h, a) => {
                self.emit(depth, format!("EGuess-App {e}"));
                self.elim(depth + 1, h);
                let dom = infer(&self.goal.sigma, &self.vars, &h.to_expr())
                    .and_then(|t| t.as_arrow().map(|(d, _)| d.clone()));
                if let Some(dom) = dom {
                    self.intro(depth + 1, a, &dom);
                }
            }
        }
    }
}

fn projects_a_variable(e: &Elim) -> bool {
    match e {
        Elim::Var(_) => true,
        Elim::Proj(_, t) => projects_a_variable(t),
        Elim::App(..) => false,
    }
}
