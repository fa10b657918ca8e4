//! Beta-normal terms, split into elimination and introduction forms.
//!
//! An [`Elim`] is a variable, an application whose head is itself an
//! elimination form, or a projection of one. An [`Intro`] is everything the
//! synthesizer may build at a hole. Because application heads and projection
//! targets can only be `Elim`s, no redex can be written down.

use std::fmt;
use std::sync::Arc;

use super::ast::{Branch, Expr, FixExpr, Name, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elim {
    Var(Name),
    App(Arc<Elim>, Arc<Intro>),
    Proj(usize, Arc<Elim>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixIntro {
    pub fname: Name,
    pub arg: Name,
    pub dom: Type,
    pub cod: Type,
    pub body: Intro,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntroBranch {
    pub ctor: Name,
    pub binder: Name,
    pub body: Intro,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Intro {
    Elim(Elim),
    Unit,
    Tuple(Vec<Intro>),
    Ctor(Name, Arc<Intro>),
    Fix(Arc<FixIntro>),
    Match(Elim, Vec<IntroBranch>),
}

impl Elim {
    pub fn var(n: &Name) -> Elim {
        Elim::Var(n.clone())
    }

    pub fn app(&self, arg: Intro) -> Elim {
        Elim::App(Arc::new(self.clone()), Arc::new(arg))
    }

    pub fn proj(&self, k: usize) -> Elim {
        Elim::Proj(k, Arc::new(self.clone()))
    }

    pub fn size(&self) -> usize {
        match self {
            Elim::Var(_) => 1,
            Elim::App(f, x) => 1 + f.size() + x.size(),
            Elim::Proj(_, e) => 1 + e.size(),
        }
    }

    /// The variable at the root of a chain of projections, if the form is
    /// nothing but projections of a variable.
    pub fn proj_root(&self) -> Option<&Name> {
        match self {
            Elim::Var(x) => Some(x),
            Elim::Proj(_, e) => e.proj_root(),
            Elim::App(..) => None,
        }
    }

    /// The variable at the head of the spine (through applications and
    /// projections).
    pub fn head(&self) -> &Name {
        match self {
            Elim::Var(x) => x,
            Elim::App(f, _) => f.head(),
            Elim::Proj(_, e) => e.head(),
        }
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Elim::Var(x) => Some(x),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Elim::Var(x) => Expr::Var(x.clone()),
            Elim::App(f, x) => Expr::App(Box::new(f.to_expr()), Box::new(x.to_expr())),
            Elim::Proj(k, e) => Expr::Proj(*k, Box::new(e.to_expr())),
        }
    }

    /// Classifies an expression as an elimination form.
    pub fn from_expr(e: &Expr) -> Option<Elim> {
        match e {
            Expr::Var(x) => Some(Elim::Var(x.clone())),
            Expr::App(f, x) => Some(Elim::App(
                Arc::new(Elim::from_expr(f)?),
                Arc::new(Intro::from_expr(x)?),
            )),
            Expr::Proj(k, e) => Some(Elim::Proj(*k, Arc::new(Elim::from_expr(e)?))),
            _ => None,
        }
    }
}

impl Intro {
    pub fn size(&self) -> usize {
        match self {
            Intro::Elim(e) => e.size(),
            Intro::Unit => 1,
            Intro::Tuple(is) => 1 + is.iter().map(Intro::size).sum::<usize>(),
            Intro::Ctor(_, i) => 1 + i.size(),
            Intro::Fix(fx) => 1 + fx.body.size(),
            Intro::Match(e, bs) => {
                1 + e.size() + bs.iter().map(|b| 1 + b.body.size()).sum::<usize>()
            }
        }
    }

    pub fn as_elim(&self) -> Option<&Elim> {
        match self {
            Intro::Elim(e) => Some(e),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Intro::Elim(e) => e.to_expr(),
            Intro::Unit => Expr::Unit,
            Intro::Tuple(is) => Expr::Tuple(is.iter().map(Intro::to_expr).collect()),
            Intro::Ctor(c, i) => Expr::Ctor(c.clone(), Box::new(i.to_expr())),
            Intro::Fix(fx) => Expr::Fix(Arc::new(FixExpr {
                fname: fx.fname.clone(),
                arg: fx.arg.clone(),
                dom: fx.dom.clone(),
                cod: fx.cod.clone(),
                body: fx.body.to_expr(),
            })),
            Intro::Match(e, bs) => Expr::Match(
                Box::new(e.to_expr()),
                bs.iter()
                    .map(|b| Branch {
                        ctor: b.ctor.clone(),
                        binder: b.binder.clone(),
                        body: b.body.to_expr(),
                    })
                    .collect(),
            ),
        }
    }

    /// Classifies an expression as an introduction form. Fails on any redex
    /// or on a partial-function literal.
    pub fn from_expr(e: &Expr) -> Option<Intro> {
        Some(match e {
            Expr::Var(_) | Expr::App(..) | Expr::Proj(..) => Intro::Elim(Elim::from_expr(e)?),
            Expr::Unit => Intro::Unit,
            Expr::Tuple(es) => {
                Intro::Tuple(es.iter().map(Intro::from_expr).collect::<Option<_>>()?)
            }
            Expr::Ctor(c, e) => Intro::Ctor(c.clone(), Arc::new(Intro::from_expr(e)?)),
            Expr::Fix(fx) => Intro::Fix(Arc::new(FixIntro {
                fname: fx.fname.clone(),
                arg: fx.arg.clone(),
                dom: fx.dom.clone(),
                cod: fx.cod.clone(),
                body: Intro::from_expr(&fx.body)?,
            })),
            Expr::Match(s, bs) => Intro::Match(
                Elim::from_expr(s)?,
                bs.iter()
                    .map(|b| {
                        Some(IntroBranch {
                            ctor: b.ctor.clone(),
                            binder: b.binder.clone(),
                            body: Intro::from_expr(&b.body)?,
                        })
                    })
                    .collect::<Option<_>>()?,
            ),
            Expr::PartialFn(_) => return None,
        })
    }
}

impl fmt::Display for Elim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            super::printer::pretty_print(&self.to_expr(), &Default::default())
        )
    }
}

impl fmt::Display for Intro {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            super::printer::pretty_print(&self.to_expr(), &Default::default())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn redexes_do_not_classify() {
        let beta = Expr::app(
            Expr::fix("f", "x", Type::Unit, Type::Unit, Expr::var("x")),
            Expr::Unit,
        );
        assert!(Intro::from_expr(&beta).is_none());
        let proj_tuple = Expr::proj(1, Expr::Tuple(vec![Expr::Unit, Expr::Unit]));
        assert!(Intro::from_expr(&proj_tuple).is_none());
        let match_ctor = Expr::matches(Expr::ctor("A", Expr::Unit), vec![("A", "a", Expr::Unit)]);
        assert!(Intro::from_expr(&match_ctor).is_none());
    }

    #[test]
    fn normal_forms_round_trip_through_expr() {
        let e = Expr::fix(
            "f",
            "x",
            Type::base("nat"),
            Type::base("nat"),
            Expr::matches(
                Expr::var("x"),
                vec![
                    ("O", "u", Expr::ctor("O", Expr::Unit)),
                    (
                        "S",
                        "p",
                        Expr::ctor("S", Expr::app(Expr::var("f"), Expr::var("p"))),
                    ),
                ],
            ),
        );
        let i = Intro::from_expr(&e).unwrap();
        assert_eq!(i.to_expr(), e);
        assert_eq!(i.size(), e.size());
    }

    #[test]
    fn projection_root() {
        let e = Elim::var(&"p".into()).proj(2).proj(1);
        assert_eq!(e.proj_root().map(|n| &**n), Some("p"));
        assert_eq!(e.size(), 3);
        let app = Elim::var(&"f".into()).app(Intro::Unit).proj(1);
        assert!(app.proj_root().is_none());
        assert_eq!(&**app.head(), "f");
    }
}
