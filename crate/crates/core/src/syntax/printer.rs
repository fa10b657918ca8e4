//! Deterministic pretty-printer. Output re-parses to the same tree.

use std::fmt::Write;

use super::ast::{Expr, Name, PartialFn, Value};
use super::problem::Declarations;

/// Which constructors to print as numerals and list literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sugar {
    /// `(zero, succ)`
    pub nat: Option<(Name, Name)>,
    /// `(nil, cons)`
    pub list: Option<(Name, Name)>,
}

impl Sugar {
    /// Sugar is enabled only when it is unambiguous: exactly one nat-shaped
    /// datatype, and exactly one list-shaped one.
    pub fn from_decls(decls: &Declarations) -> Sugar {
        let nats: Vec<_> = decls
            .types
            .iter()
            .filter_map(|d| decls.nat_shape(&d.name))
            .collect();
        let lists: Vec<_> = decls
            .types
            .iter()
            .filter_map(|d| decls.list_shape(&d.name).map(|(n, c, _)| (n, c)))
            .collect();
        Sugar {
            nat: (nats.len() == 1).then(|| nats[0].clone()),
            list: (lists.len() == 1).then(|| lists[0].clone()),
        }
    }

    fn numeral(&self, e: &Expr) -> Option<u64> {
        let (zero, succ) = self.nat.as_ref()?;
        let mut n = 0;
        let mut cur = e;
        loop {
            match cur {
                Expr::Ctor(c, arg) if c == succ => {
                    n += 1;
                    cur = arg;
                }
                Expr::Ctor(c, arg) if c == zero && **arg == Expr::Unit => return Some(n),
                _ => return None,
            }
        }
    }

    fn list_items<'a>(&self, e: &'a Expr) -> Option<Vec<&'a Expr>> {
        let (nil, cons) = self.list.as_ref()?;
        let mut items = Vec::new();
        let mut cur = e;
        loop {
            match cur {
                Expr::Ctor(c, arg) if c == cons => match &**arg {
                    Expr::Tuple(parts) if parts.len() == 2 => {
                        items.push(&parts[0]);
                        cur = &parts[1];
                    }
                    _ => return None,
                },
                Expr::Ctor(c, arg) if c == nil && **arg == Expr::Unit => return Some(items),
                _ => return None,
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// `match` and `fix` may appear bare.
    Top,
    /// Any application-level form; `match` and `fix` get parentheses.
    Body,
    /// Head of an application: applications chain left, the rest are atoms.
    Head,
    Atom,
}

struct Printer<'a> {
    sugar: &'a Sugar,
    out: String,
}

impl Printer<'_> {
    fn newline(&mut self, indent: usize) {
        self.out.push('\n');
        for _ in 0..indent {
            self.out.push_str("  ");
        }
    }

    fn is_atom(&self, e: &Expr) -> bool {
        match e {
            Expr::Var(_) | Expr::Unit | Expr::Tuple(_) | Expr::Proj(..) | Expr::PartialFn(_) => {
                true
            }
            Expr::Ctor(_, arg) => {
                **arg == Expr::Unit
                    || self.sugar.numeral(e).is_some()
                    || self.sugar.list_items(e).is_some()
            }
            _ => false,
        }
    }

    fn expr(&mut self, e: &Expr, ctx: Ctx, indent: usize) {
        let needs_parens = match (e, ctx) {
            (Expr::Fix(_) | Expr::Match(..), Ctx::Top) => false,
            (Expr::Fix(_) | Expr::Match(..), _) => true,
            (Expr::App(..), Ctx::Head) => false,
            // A bare constructor name would take the argument as its own.
            (Expr::Ctor(..), Ctx::Head) => {
                self.sugar.numeral(e).is_none() && self.sugar.list_items(e).is_none()
            }
            (_, Ctx::Top | Ctx::Body) => false,
            _ => !self.is_atom(e),
        };
        if needs_parens {
            self.out.push('(');
            self.bare(e, indent);
            self.out.push(')');
        } else {
            self.bare(e, indent);
        }
    }

    fn bare(&mut self, e: &Expr, indent: usize) {
        if let Some(n) = self.sugar.numeral(e) {
            write!(self.out, "{n}").unwrap();
            return;
        }
        if let Some(items) = self.sugar.list_items(e) {
            self.out.push('[');
            for (i, item) in items.into_iter().enumerate() {
                if i > 0 {
                    self.out.push_str("; ");
                }
                self.expr(item, Ctx::Body, indent);
            }
            self.out.push(']');
            return;
        }
        match e {
            Expr::Var(x) => self.out.push_str(x),
            Expr::Unit => self.out.push_str("()"),
            Expr::Tuple(es) => {
                self.out.push('(');
                for (i, c) in es.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(c, Ctx::Body, indent);
                }
                self.out.push(')');
            }
            Expr::Proj(k, t) => {
                write!(self.out, "#{k} ").unwrap();
                self.expr(t, Ctx::Atom, indent);
            }
            Expr::Ctor(c, arg) => {
                self.out.push_str(c);
                if **arg != Expr::Unit {
                    self.out.push(' ');
                    self.expr(arg, Ctx::Atom, indent);
                }
            }
            Expr::App(f, x) => {
                self.expr(f, Ctx::Head, indent);
                self.out.push(' ');
                self.expr(x, Ctx::Atom, indent);
            }
            Expr::Fix(fx) => {
                write!(
                    self.out,
                    "fix {} ({} : {}) : {} =",
                    fx.fname, fx.arg, fx.dom, fx.cod
                )
                .unwrap();
                self.newline(indent + 1);
                self.expr(&fx.body, Ctx::Top, indent + 1);
            }
            Expr::Match(s, bs) => {
                self.out.push_str("match ");
                self.expr(s, Ctx::Body, indent);
                self.out.push_str(" with");
                for b in bs {
                    self.newline(indent);
                    write!(self.out, "| {}", b.ctor).unwrap();
                    if &*b.binder != "_" {
                        write!(self.out, " {}", b.binder).unwrap();
                    }
                    self.out.push_str(" -> ");
                    self.expr(&b.body, Ctx::Body, indent + 1);
                }
            }
            Expr::PartialFn(pf) => self.partial_fn(pf, indent),
        }
    }

    fn partial_fn(&mut self, pf: &PartialFn, indent: usize) {
        if pf.is_empty() {
            self.out.push_str("{ }");
            return;
        }
        self.out.push_str("{ ");
        for (i, (k, v)) in pf.cases().iter().enumerate() {
            if i > 0 {
                self.out.push_str("; ");
            }
            self.expr(&k.to_expr(), Ctx::Body, indent);
            self.out.push_str(" => ");
            self.expr(&v.to_expr(), Ctx::Body, indent);
        }
        self.out.push_str(" }");
    }
}

/// Renders an expression in surface syntax.
pub fn pretty_print(e: &Expr, sugar: &Sugar) -> String {
    let mut p = Printer {
        sugar,
        out: String::new(),
    };
    p.expr(e, Ctx::Top, 0);
    p.out
}

pub fn print_value(v: &Value, sugar: &Sugar) -> String {
    pretty_print(&v.to_expr(), sugar)
}

#[cfg(test)]
mod tests {
    use super::super::ast::{name, Type};
    use super::super::parser::parse_expr;
    use super::*;

    fn nat_sugar() -> Sugar {
        Sugar {
            nat: Some((name("O"), name("S"))),
            list: Some((name("Nil"), name("Cons"))),
        }
    }

    fn z() -> Expr {
        Expr::ctor("O", Expr::Unit)
    }

    #[test]
    fn basic_forms() {
        let s = Sugar::default();
        assert_eq!(pretty_print(&Expr::proj(1, Expr::var("x")), &s), "#1 x");
        assert_eq!(pretty_print(&Expr::Unit, &s), "()");
        let pair = Expr::Tuple(vec![z(), Expr::ctor("S", z())]);
        assert_eq!(pretty_print(&pair, &nat_sugar()), "(0, 1)");
        assert_eq!(pretty_print(&pair, &s), "(O, S O)");
    }

    #[test]
    fn application_and_projection_nesting() {
        let s = Sugar::default();
        let e = Expr::proj(1, Expr::app(Expr::var("unzip"), Expr::var("tl")));
        assert_eq!(pretty_print(&e, &s), "#1 (unzip tl)");
        let e = Expr::app(
            Expr::app(Expr::var("f"), Expr::var("a")),
            Expr::proj(2, Expr::var("b")),
        );
        assert_eq!(pretty_print(&e, &s), "f a #2 b");
        let e = Expr::app(Expr::var("f"), Expr::app(Expr::var("g"), Expr::var("a")));
        assert_eq!(pretty_print(&e, &s), "f (g a)");
    }

    #[test]
    fn list_literals() {
        let cons = |h, t| Expr::ctor("Cons", Expr::Tuple(vec![h, t]));
        let e = cons(
            Expr::ctor("S", z()),
            cons(z(), Expr::ctor("Nil", Expr::Unit)),
        );
        assert_eq!(pretty_print(&e, &nat_sugar()), "[1; 0]");
        let open = cons(z(), Expr::var("tl"));
        assert_eq!(pretty_print(&open, &nat_sugar()), "Cons (0, tl)");
    }

    #[test]
    fn programs_round_trip() {
        let len = Expr::fix(
            "len",
            "ls",
            Type::base("natlist"),
            Type::base("nat"),
            Expr::matches(
                Expr::var("ls"),
                vec![
                    ("Nil", "_", z()),
                    (
                        "Cons",
                        "p",
                        Expr::ctor(
                            "S",
                            Expr::app(Expr::var("len"), Expr::proj(2, Expr::var("p"))),
                        ),
                    ),
                ],
            ),
        );
        let text = pretty_print(&len, &nat_sugar());
        assert_eq!(
            text,
            "fix len (ls : natlist) : nat =\n  match ls with\n  | Nil -> 0\n  | Cons p -> S (len #2 p)"
        );
        assert_eq!(parse_expr(&text, &nat_sugar()).unwrap(), len);
    }
}
