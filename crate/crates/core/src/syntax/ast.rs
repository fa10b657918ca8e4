//! Types, expressions, and values of the lambda calculus with recursive
//! functions, single-argument constructors, unit, and k-ary products.

use std::fmt;
use std::sync::Arc;

/// Identifiers are shared, immutable strings.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Unit,
    Base(Name),
    Arrow(Arc<Type>, Arc<Type>),
    /// Always at least two components.
    Product(Arc<[Type]>),
}

impl Type {
    pub fn base(n: &str) -> Type {
        Type::Base(name(n))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn product(components: Vec<Type>) -> Type {
        debug_assert!(components.len() >= 2, "unary product");
        Type::Product(components.into())
    }

    /// Curried function type `a -> b -> ... -> result`.
    pub fn arrows(args: Vec<Type>, result: Type) -> Type {
        args.into_iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Type::Base(_))
    }

    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Arrow(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_product(&self) -> Option<&[Type]> {
        match self {
            Type::Product(ts) => Some(ts),
            _ => None,
        }
    }

    /// Node count of the type tree.
    pub fn size(&self) -> usize {
        match self {
            Type::Unit | Type::Base(_) => 1,
            Type::Arrow(a, b) => 1 + a.size() + b.size(),
            Type::Product(ts) => 1 + ts.iter().map(Type::size).sum::<usize>(),
        }
    }

    /// Every base name mentioned anywhere in the type.
    pub fn bases(&self, out: &mut Vec<Name>) {
        match self {
            Type::Unit => {}
            Type::Base(n) => out.push(n.clone()),
            Type::Arrow(a, b) => {
                a.bases(out);
                b.bases(out);
            }
            Type::Product(ts) => ts.iter().for_each(|t| t.bases(out)),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Type, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Type::Unit => write!(f, "unit"),
                Type::Base(n) => write!(f, "{n}"),
                Type::Arrow(a, b) => {
                    if prec > 0 {
                        write!(f, "(")?;
                    }
                    go(a, 1, f)?;
                    write!(f, " -> ")?;
                    go(b, 0, f)?;
                    if prec > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Type::Product(ts) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    for (i, c) in ts.iter().enumerate() {
                        if i > 0 {
                            write!(f, " * ")?;
                        }
                        go(c, 2, f)?;
                    }
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixExpr {
    pub fname: Name,
    pub arg: Name,
    pub dom: Type,
    pub cod: Type,
    pub body: Expr,
}

impl FixExpr {
    pub fn ty(&self) -> Type {
        Type::arrow(self.dom.clone(), self.cod.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    pub ctor: Name,
    pub binder: Name,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(Name),
    Unit,
    Tuple(Vec<Expr>),
    /// 1-based projection.
    Proj(usize, Box<Expr>),
    Ctor(Name, Box<Expr>),
    Fix(Arc<FixExpr>),
    App(Box<Expr>, Box<Expr>),
    Match(Box<Expr>, Vec<Branch>),
    PartialFn(PartialFn),
}

impl Expr {
    pub fn var(n: &str) -> Expr {
        Expr::Var(name(n))
    }

    pub fn ctor(c: &str, arg: Expr) -> Expr {
        Expr::Ctor(name(c), Box::new(arg))
    }

    pub fn app(f: Expr, x: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(x))
    }

    pub fn proj(k: usize, e: Expr) -> Expr {
        Expr::Proj(k, Box::new(e))
    }

    pub fn fix(fname: &str, arg: &str, dom: Type, cod: Type, body: Expr) -> Expr {
        Expr::Fix(Arc::new(FixExpr {
            fname: name(fname),
            arg: name(arg),
            dom,
            cod,
            body,
        }))
    }

    pub fn matches(scrutinee: Expr, branches: Vec<(&str, &str, Expr)>) -> Expr {
        Expr::Match(
            Box::new(scrutinee),
            branches
                .into_iter()
                .map(|(c, x, body)| Branch {
                    ctor: name(c),
                    binder: name(x),
                    body,
                })
                .collect(),
        )
    }

    /// Node count. Every production is one node plus its children; names,
    /// projection indices, and fixpoint type annotations are not nodes. A
    /// match branch counts as one node plus its body.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Unit => 1,
            Expr::Tuple(es) => 1 + es.iter().map(Expr::size).sum::<usize>(),
            Expr::Proj(_, e) | Expr::Ctor(_, e) => 1 + e.size(),
            Expr::Fix(fx) => 1 + fx.body.size(),
            Expr::App(a, b) => 1 + a.size() + b.size(),
            Expr::Match(e, bs) => {
                1 + e.size() + bs.iter().map(|b| 1 + b.body.size()).sum::<usize>()
            }
            Expr::PartialFn(pf) => pf.size(),
        }
    }

    pub fn is_value(&self) -> bool {
        match self {
            Expr::Unit | Expr::Fix(_) | Expr::PartialFn(_) => true,
            Expr::Tuple(es) => es.iter().all(Expr::is_value),
            Expr::Ctor(_, e) => e.is_value(),
            _ => false,
        }
    }

    pub fn to_value(&self) -> Option<Value> {
        Some(match self {
            Expr::Unit => Value::Unit,
            Expr::Fix(fx) => Value::Fix(fx.clone()),
            Expr::PartialFn(pf) => Value::PartialFn(pf.clone()),
            Expr::Tuple(es) => Value::Tuple(
                es.iter()
                    .map(Expr::to_value)
                    .collect::<Option<Vec<_>>>()?
                    .into(),
            ),
            Expr::Ctor(c, e) => Value::Ctor(c.clone(), Arc::new(e.to_value()?)),
            _ => return None,
        })
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Name> {
        fn go(e: &Expr, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
            match e {
                Expr::Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Expr::Unit | Expr::PartialFn(_) => {}
                Expr::Tuple(es) => es.iter().for_each(|e| go(e, bound, out)),
                Expr::Proj(_, e) | Expr::Ctor(_, e) => go(e, bound, out),
                Expr::App(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Expr::Fix(fx) => {
                    bound.push(fx.fname.clone());
                    bound.push(fx.arg.clone());
                    go(&fx.body, bound, out);
                    bound.pop();
                    bound.pop();
                }
                Expr::Match(s, bs) => {
                    go(s, bound, out);
                    for b in bs {
                        bound.push(b.binder.clone());
                        go(&b.body, bound, out);
                        bound.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Immediate subterms, for structural properties.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var(_) | Expr::Unit | Expr::PartialFn(_) => vec![],
            Expr::Tuple(es) => es.iter().collect(),
            Expr::Proj(_, e) | Expr::Ctor(_, e) => vec![e],
            Expr::Fix(fx) => vec![&fx.body],
            Expr::App(a, b) => vec![a, b],
            Expr::Match(s, bs) => std::iter::once(&**s)
                .chain(bs.iter().map(|b| &b.body))
                .collect(),
        }
    }
}

/// A finite map from input values to output examples. Keys are pairwise
/// distinct; case order is the order the cases were written in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialFn(Arc<[(Value, Value)]>);

impl PartialFn {
    /// Builds a partial function, rejecting duplicate keys.
    pub fn new(cases: Vec<(Value, Value)>) -> Result<PartialFn, Value> {
        for (i, (k, _)) in cases.iter().enumerate() {
            if cases[..i].iter().any(|(k2, _)| k2 == k) {
                return Err(k.clone());
            }
        }
        Ok(PartialFn(cases.into()))
    }

    pub fn cases(&self) -> &[(Value, Value)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lookup(&self, key: &Value) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn size(&self) -> usize {
        1 + self
            .0
            .iter()
            .map(|(k, v)| k.to_expr().size() + v.to_expr().size())
            .sum::<usize>()
    }
}

/// Runtime values. Examples are the values that contain no fixpoint closure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Unit,
    Tuple(Arc<[Value]>),
    Ctor(Name, Arc<Value>),
    Fix(Arc<FixExpr>),
    PartialFn(PartialFn),
}

/// Values with no fixpoint closures anywhere inside them.
pub type Example = Value;

impl Value {
    pub fn ctor(c: &str, v: Value) -> Value {
        Value::Ctor(name(c), Arc::new(v))
    }

    pub fn tuple(vs: Vec<Value>) -> Value {
        Value::Tuple(vs.into())
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Unit => Expr::Unit,
            Value::Tuple(vs) => Expr::Tuple(vs.iter().map(Value::to_expr).collect()),
            Value::Ctor(c, v) => Expr::Ctor(c.clone(), Box::new(v.to_expr())),
            Value::Fix(fx) => Expr::Fix(fx.clone()),
            Value::PartialFn(pf) => Expr::PartialFn(pf.clone()),
        }
    }

    pub fn is_example(&self) -> bool {
        match self {
            Value::Unit => true,
            Value::Tuple(vs) => vs.iter().all(Value::is_example),
            Value::Ctor(_, v) => v.is_example(),
            Value::Fix(_) => false,
            Value::PartialFn(pf) => pf
                .cases()
                .iter()
                .all(|(k, v)| k.is_example() && v.is_example()),
        }
    }

    pub fn as_ctor(&self) -> Option<(&Name, &Value)> {
        match self {
            Value::Ctor(c, v) => Some((c, v)),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(vs) => Some(vs),
            _ => None,
        }
    }

    pub fn as_partial_fn(&self) -> Option<&PartialFn> {
        match self {
            Value::PartialFn(pf) => Some(pf),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_of_small_terms() {
        assert_eq!(Expr::var("x").size(), 1);
        assert_eq!(Expr::app(Expr::var("f"), Expr::var("x")).size(), 3);
        assert_eq!(Expr::proj(1, Expr::var("x")).size(), 2);
        let m = Expr::matches(
            Expr::var("x"),
            vec![("A", "a", Expr::Unit), ("B", "b", Expr::var("b"))],
        );
        assert_eq!(m.size(), 1 + 1 + 2 + 2);
    }

    #[test]
    fn type_display_parenthesizes() {
        let t = Type::arrow(
            Type::arrow(Type::base("nat"), Type::base("nat")),
            Type::product(vec![Type::base("nat"), Type::Unit]),
        );
        assert_eq!(t.to_string(), "(nat -> nat) -> nat * unit");
        let nested = Type::product(vec![
            Type::product(vec![Type::base("a"), Type::base("b")]),
            Type::base("c"),
        ]);
        assert_eq!(nested.to_string(), "(a * b) * c");
        assert_eq!(nested.size(), 5);
    }

    #[test]
    fn partial_fn_rejects_duplicate_keys() {
        let k = Value::ctor("O", Value::Unit);
        assert!(PartialFn::new(vec![(k.clone(), Value::Unit), (k, Value::Unit)]).is_err());
    }
}
