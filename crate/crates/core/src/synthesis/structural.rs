use crate::syntax::{Elim, Intro, Name};

/// Recursion bookkeeping for one enclosing fixpoint: its name, its formal
/// argument, and the variables known to be strict pieces of that argument.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Frame {
    pub fname: Name,
    pub arg: Name,
    pub decreasing: Vec<Name>,
}

impl Frame {
    pub fn new(fname: Name, arg: Name) -> Frame {
        Frame {
            fname,
            arg,
            decreasing: Vec::new(),
        }
    }

    /// Whether matching on `scrutinee` yields pieces of this frame's argument.
    pub fn splits(&self, scrutinee: &Elim) -> bool {
        scrutinee
            .proj_root()
            .is_some_and(|r| *r == self.arg || self.decreasing.contains(r))
    }

    /// Whether `arg` may be passed to the recursive name.
    pub fn admits(&self, arg: &Intro) -> bool {
        arg.as_elim()
            .and_then(Elim::proj_root)
            .is_some_and(|r| self.decreasing.contains(r))
    }
}

/// Extends every frame whose argument the scrutinee splits.
pub(crate) fn after_match(frames: &[Frame], scrutinee: &Elim, binder: &Name) -> Vec<Frame> {
    frames
        .iter()
        .map(|f| {
            let mut f = f.clone();
            if f.splits(scrutinee) {
                f.decreasing.push(binder.clone());
            }
            f
        })
        .collect()
}

/// The frame owning `head`, when `head` is a bare recursive name.
pub(crate) fn frame_for<'a>(frames: &'a [Frame], head: &Elim) -> Option<&'a Frame> {
    let x = head.as_var()?;
    frames.iter().rev().find(|f| f.fname == *x)
}

/// Whether every call to a fixpoint-bound name passes, as its first argument,
/// a projection chain rooted at a variable bound by matching (transitively) on
/// that fixpoint's own argument.
pub fn check_structural(program: &Intro) -> bool {
    fn intro(i: &Intro, frames: &mut Vec<Frame>) -> bool {
        match i {
            Intro::Elim(e) => elim(e, frames),
            Intro::Unit => true,
            Intro::Tuple(is) => is.iter().all(|c| intro(c, frames)),
            Intro::Ctor(_, a) => intro(a, frames),
            Intro::Fix(fx) => {
                frames.push(Frame::new(fx.fname.clone(), fx.arg.clone()));
                let ok = intro(&fx.body, frames);
                frames.pop();
                ok
            }
            Intro::Match(s, branches) => {
                elim(s, frames)
                    && branches.iter().all(|b| {
                        let mut inner = after_match(frames, s, &b.binder);
                        intro(&b.body, &mut inner)
                    })
            }
        }
    }
    fn elim(e: &Elim, frames: &mut Vec<Frame>) -> bool {
        match e {
            Elim::Var(_) => true,
            Elim::Proj(_, t) => elim(t, frames),
            Elim::App(h, a) => {
                if let Some(f) = frame_for(frames, h) {
                    if !f.admits(a) {
                        return false;
                    }
                }
                elim(h, frames) && intro(a, frames)
            }
        }
    }
    intro(program, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{name, parse_expr, Sugar};

    fn prog(s: &str) -> Intro {
        let sugar = Sugar {
            nat: Some((name("O"), name("S"))),
            list: Some((name("Nil"), name("Cons"))),
        };
        Intro::from_expr(&parse_expr(s, &sugar).unwrap()).unwrap()
    }

    #[test]
    fn recursion_on_a_tail() {
        assert!(check_structural(&prog(
            "fix len (ls : natlist) : nat = match ls with | Nil u -> O | Cons p -> S (len #2 p)"
        )));
    }

    #[test]
    fn recursion_on_the_whole_argument() {
        assert!(!check_structural(&prog(
            "fix len (ls : natlist) : nat = len ls"
        )));
    }

    #[test]
    fn non_recursive_programs() {
        assert!(check_structural(&prog("fix f (x : nat) : nat = S x")));
        assert!(check_structural(&prog("O")));
    }

    #[test]
    fn nested_matches_and_second_arguments() {
        assert!(check_structural(&prog(
            "fix add (x : nat) : nat -> nat = fix g (y : nat) : nat =
               match x with | O u -> y | S p -> S (add p y)"
        )));
        assert!(check_structural(&prog(
            "fix f (x : nat) : nat = match x with | O u -> O | S p -> match p with | O v -> O | S q -> f q"
        )));
        assert!(!check_structural(&prog(
            "fix f (x : nat) : nat -> nat = fix g (y : nat) : nat =
               match y with | O u -> y | S p -> f p y"
        )));
    }
}
