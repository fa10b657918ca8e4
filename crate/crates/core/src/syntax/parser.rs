//! Recursive-descent parser for the OCaml-like surface syntax.
//!
//! A problem file holds `type` declarations, optional `val` library bindings,
//! and exactly one `let name : type |> { cases } = ?` goal. Expressions are
//! parsed into a raw tree that still carries numeral and list sugar; the raw
//! tree is then elaborated either untyped (programs) or against an expected
//! type (examples).

use std::sync::Arc;

use super::ast::{name, Branch, Expr, FixExpr, Name, PartialFn, Type, Value};
use super::lexer::{tokenize, Tok, Token};
use super::printer::{print_value, Sugar};
use super::problem::{DataDecl, Declarations, LibraryBinding, SynthesisProblem};
use super::ParseError;

const KEYWORDS: &[&str] = &["type", "of", "let", "val", "fix", "match", "with", "unit"];

#[derive(Clone, Debug)]
struct Raw {
    kind: RawKind,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug)]
enum RawKind {
    Var(Name),
    Unit,
    Tuple(Vec<Raw>),
    Proj(usize, Box<Raw>),
    Ctor(Name, Option<Box<Raw>>),
    App(Box<Raw>, Box<Raw>),
    Fix {
        fname: Name,
        arg: Name,
        dom: Type,
        cod: Type,
        body: Box<Raw>,
    },
    Match(Box<Raw>, Vec<(Name, Name, Raw)>),
    Nat(u64),
    List(Vec<Raw>),
    /// Each case is a chain `a => b => ... => out`.
    Cases(Vec<Vec<Raw>>),
}

enum Item {
    Type(DataDecl),
    Val(Name, Type, Raw),
    Let(Name, Type, Raw),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let (l, c) = self.here();
        Err(ParseError::syntax(
            l,
            c,
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.advance();
            Ok(())
        } else {
            self.error(&t.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.advance();
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(name(&s))
            }
            _ => self.error("an identifier"),
        }
    }

    fn binder(&mut self) -> PResult<Name> {
        if *self.peek() == Tok::Underscore {
            self.advance();
            return Ok(name("_"));
        }
        self.ident()
    }

    fn upper(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Upper(s) => {
                self.advance();
                Ok(name(&s))
            }
            _ => self.error("a constructor name"),
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<Type> {
        let dom = self.product_ty()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let cod = self.ty()?;
            return Ok(Type::arrow(dom, cod));
        }
        Ok(dom)
    }

    fn product_ty(&mut self) -> PResult<Type> {
        let first = self.atom_ty()?;
        if *self.peek() != Tok::Star {
            return Ok(first);
        }
        let mut parts = vec![first];
        while *self.peek() == Tok::Star {
            self.advance();
            parts.push(self.atom_ty()?);
        }
        Ok(Type::product(parts))
    }

    fn atom_ty(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "unit" => {
                self.advance();
                Ok(Type::Unit)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(Type::Base(name(&s)))
            }
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.error("a type"),
        }
    }

    // ---- expressions ----

    fn raw(&self, kind: RawKind, at: (usize, usize)) -> Raw {
        Raw {
            kind,
            line: at.0,
            col: at.1,
        }
    }

    fn expr(&mut self) -> PResult<Raw> {
        let at = self.here();
        if self.is_keyword("fix") {
            self.advance();
            let fname = self.ident()?;
            self.expect(Tok::LParen)?;
            let arg = self.binder()?;
            self.expect(Tok::Colon)?;
            let dom = self.ty()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Colon)?;
            let cod = self.ty()?;
            self.expect(Tok::Equals)?;
            let body = self.expr()?;
            return Ok(self.raw(
                RawKind::Fix {
                    fname,
                    arg,
                    dom,
                    cod,
                    body: Box::new(body),
                },
                at,
            ));
        }
        if self.is_keyword("match") {
            self.advance();
            let scrutinee = self.expr()?;
            self.expect_keyword("with")?;
            if *self.peek() == Tok::Bar {
                self.advance();
            }
            let mut branches = vec![self.branch()?];
            while *self.peek() == Tok::Bar {
                self.advance();
                branches.push(self.branch()?);
            }
            return Ok(self.raw(RawKind::Match(Box::new(scrutinee), branches), at));
        }
        self.app()
    }

    fn branch(&mut self) -> PResult<(Name, Name, Raw)> {
        let ctor = self.upper()?;
        let binder = if *self.peek() == Tok::Arrow {
            name("_")
        } else {
            self.binder()?
        };
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        Ok((ctor, binder, body))
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Upper(_)
            | Tok::Num(_)
            | Tok::Proj(_)
            | Tok::LParen
            | Tok::LBracket
            | Tok::LBrace => true,
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<Raw> {
        let at = self.here();
        if let Tok::Upper(_) = self.peek() {
            let c = self.upper()?;
            let arg = if self.starts_atom() {
                Some(Box::new(self.atom()?))
            } else {
                None
            };
            return Ok(self.raw(RawKind::Ctor(c, arg), at));
        }
        let mut head = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            head = self.raw(RawKind::App(Box::new(head), Box::new(arg)), at);
        }
        Ok(head)
    }

    fn atom(&mut self) -> PResult<Raw> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(self.raw(RawKind::Var(name(&s)), at))
            }
            Tok::Upper(_) => {
                let c = self.upper()?;
                Ok(self.raw(RawKind::Ctor(c, None), at))
            }
            Tok::Num(n) => {
                self.advance();
                Ok(self.raw(RawKind::Nat(n), at))
            }
            Tok::Proj(k) => {
                self.advance();
                let e = self.atom()?;
                Ok(self.raw(RawKind::Proj(k, Box::new(e)), at))
            }
            Tok::LParen => {
                self.advance();
                if *self.peek() == Tok::RParen {
                    self.advance();
                    return Ok(self.raw(RawKind::Unit, at));
                }
                let first = self.expr()?;
                if *self.peek() != Tok::Comma {
                    self.expect(Tok::RParen)?;
                    return Ok(first);
                }
                let mut items = vec![first];
                while *self.peek() == Tok::Comma {
                    self.advance();
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(self.raw(RawKind::Tuple(items), at))
            }
            Tok::LBracket => {
                self.advance();
                let mut items = Vec::new();
                if *self.peek() != Tok::RBracket {
                    items.push(self.expr()?);
                    while *self.peek() == Tok::Semi {
                        self.advance();
                        if *self.peek() == Tok::RBracket {
                            break;
                        }
                        items.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(self.raw(RawKind::List(items), at))
            }
            Tok::LBrace => self.cases(),
            _ => self.error("an expression"),
        }
    }

    fn cases(&mut self) -> PResult<Raw> {
        let at = self.here();
        self.expect(Tok::LBrace)?;
        let mut cases = Vec::new();
        while *self.peek() != Tok::RBrace {
            let mut chain = vec![self.expr()?];
            while *self.peek() == Tok::FatArrow {
                self.advance();
                chain.push(self.expr()?);
            }
            cases.push(chain);
            if *self.peek() == Tok::Semi {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(self.raw(RawKind::Cases(cases), at))
    }

    // ---- items ----

    fn items(&mut self) -> PResult<Vec<Item>> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            if self.is_keyword("type") {
                self.advance();
                let tname = self.ident()?;
                self.expect(Tok::Equals)?;
                if *self.peek() == Tok::Bar {
                    self.advance();
                }
                let mut ctors = vec![self.ctor_decl()?];
                while *self.peek() == Tok::Bar {
                    self.advance();
                    ctors.push(self.ctor_decl()?);
                }
                items.push(Item::Type(DataDecl { name: tname, ctors }));
            } else if self.is_keyword("val") {
                self.advance();
                let n = self.ident()?;
                self.expect(Tok::Colon)?;
                let t = self.ty()?;
                self.expect(Tok::Pipe)?;
                let cases = self.cases()?;
                items.push(Item::Val(n, t, cases));
            } else if self.is_keyword("let") {
                self.advance();
                let n = self.ident()?;
                self.expect(Tok::Colon)?;
                let t = self.ty()?;
                self.expect(Tok::Pipe)?;
                let cases = self.cases()?;
                self.expect(Tok::Equals)?;
                self.expect(Tok::Question)?;
                items.push(Item::Let(n, t, cases));
            } else {
                return self.error("`type`, `val`, or `let`");
            }
            if *self.peek() == Tok::Semi {
                self.advance();
            }
        }
        Ok(items)
    }

    fn ctor_decl(&mut self) -> PResult<(Name, Type)> {
        let c = self.upper()?;
        if self.is_keyword("of") {
            self.advance();
            Ok((c, self.ty()?))
        } else {
            Ok((c, Type::Unit))
        }
    }
}

/// Parses a type such as `nat -> nat * list`.
pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(t)
}

/// Parses a program expression. Numeral and list literals resolve through
/// `sugar`; without a matching datatype they are rejected.
pub fn parse_expr(text: &str, sugar: &Sugar) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let raw = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    elab_untyped(&raw, sugar)
}

/// Parses a whole problem file.
pub fn parse_problem(text: &str) -> Result<SynthesisProblem, ParseError> {
    let mut p = Parser::new(text)?;
    let items = p.items()?;

    let mut decls = Declarations::default();
    for item in &items {
        if let Item::Type(d) = item {
            if decls.get(&d.name).is_some() {
                return Err(ParseError::DuplicateType(d.name.to_string()));
            }
            for (c, _) in &d.ctors {
                let seen_before = decls.types.iter().chain(std::iter::once(d)).any(|other| {
                    other.ctors.iter().filter(|(c2, _)| c2 == c).count()
                        > usize::from(std::ptr::eq(other, d))
                });
                if seen_before {
                    return Err(ParseError::DuplicateConstructor(c.to_string()));
                }
            }
            decls.types.push(d.clone());
        }
    }
    for d in &decls.types {
        for (_, t) in &d.ctors {
            check_type_known(&decls, t)?;
        }
    }

    let mut library = Vec::new();
    let mut goals = Vec::new();
    for item in items {
        match item {
            Item::Type(_) => {}
            Item::Val(n, t, cases) => {
                check_type_known(&decls, &t)?;
                let ex = elab_example(&cases, &t, &decls)?;
                let examples = match ex {
                    Value::PartialFn(pf) => pf,
                    _ => {
                        return Err(ParseError::IllTypedExample {
                            line: cases.line,
                            col: cases.col,
                            message: format!("library binding `{n}` must be a function"),
                        })
                    }
                };
                library.push(LibraryBinding {
                    name: n,
                    ty: t,
                    examples,
                });
            }
            Item::Let(n, t, cases) => {
                check_type_known(&decls, &t)?;
                let examples = elab_example(&cases, &t, &decls)?;
                goals.push((n, t, examples));
            }
        }
    }
    if goals.len() != 1 {
        return Err(ParseError::GoalCount(goals.len()));
    }
    let (goal_name, goal_type, examples) = goals.pop().unwrap();
    Ok(SynthesisProblem {
        decls,
        library,
        goal_name,
        goal_type,
        examples,
    })
}

fn check_type_known(decls: &Declarations, t: &Type) -> Result<(), ParseError> {
    let mut bases = Vec::new();
    t.bases(&mut bases);
    match bases.into_iter().find(|b| decls.get(b).is_none()) {
        Some(b) => Err(ParseError::UnknownType(b.to_string())),
        None => Ok(()),
    }
}

fn nat_literal(n: u64, zero: &Name, succ: &Name) -> Expr {
    let mut e = Expr::Ctor(zero.clone(), Box::new(Expr::Unit));
    for _ in 0..n {
        e = Expr::Ctor(succ.clone(), Box::new(e));
    }
    e
}

fn nat_value(n: u64, zero: &Name, succ: &Name) -> Value {
    let mut v = Value::Ctor(zero.clone(), Arc::new(Value::Unit));
    for _ in 0..n {
        v = Value::Ctor(succ.clone(), Arc::new(v));
    }
    v
}

fn elab_untyped(raw: &Raw, sugar: &Sugar) -> Result<Expr, ParseError> {
    let err = |message: String| ParseError::syntax(raw.line, raw.col, message);
    Ok(match &raw.kind {
        RawKind::Var(x) => Expr::Var(x.clone()),
        RawKind::Unit => Expr::Unit,
        RawKind::Tuple(items) => Expr::Tuple(
            items
                .iter()
                .map(|r| elab_untyped(r, sugar))
                .collect::<Result<_, _>>()?,
        ),
        RawKind::Proj(k, e) => Expr::Proj(*k, Box::new(elab_untyped(e, sugar)?)),
        RawKind::Ctor(c, arg) => Expr::Ctor(
            c.clone(),
            Box::new(match arg {
                Some(a) => elab_untyped(a, sugar)?,
                None => Expr::Unit,
            }),
        ),
        RawKind::App(f, x) => Expr::App(
            Box::new(elab_untyped(f, sugar)?),
            Box::new(elab_untyped(x, sugar)?),
        ),
        RawKind::Fix {
            fname,
            arg,
            dom,
            cod,
            body,
        } => Expr::Fix(Arc::new(FixExpr {
            fname: fname.clone(),
            arg: arg.clone(),
            dom: dom.clone(),
            cod: cod.clone(),
            body: elab_untyped(body, sugar)?,
        })),
        RawKind::Match(s, branches) => Expr::Match(
            Box::new(elab_untyped(s, sugar)?),
            branches
                .iter()
                .map(|(c, x, b)| {
                    Ok(Branch {
                        ctor: c.clone(),
                        binder: x.clone(),
                        body: elab_untyped(b, sugar)?,
                    })
                })
                .collect::<Result<_, ParseError>>()?,
        ),
        RawKind::Nat(n) => {
            let (zero, succ) = sugar.nat.as_ref().ok_or_else(|| {
                err("numeral literals need exactly one nat-shaped datatype".into())
            })?;
            nat_literal(*n, zero, succ)
        }
        RawKind::List(items) => {
            let (nil, cons) = sugar
                .list
                .as_ref()
                .ok_or_else(|| err("list literals need exactly one list-shaped datatype".into()))?;
            let mut e = Expr::Ctor(nil.clone(), Box::new(Expr::Unit));
            for item in items.iter().rev() {
                let h = elab_untyped(item, sugar)?;
                e = Expr::Ctor(cons.clone(), Box::new(Expr::Tuple(vec![h, e])));
            }
            e
        }
        RawKind::Cases(cases) => {
            let mut merged: Vec<(Value, Value)> = Vec::new();
            for chain in cases {
                let mut vals = Vec::with_capacity(chain.len());
                for r in chain {
                    let e = elab_untyped(r, sugar)?;
                    vals.push(e.to_value().ok_or_else(|| {
                        ParseError::syntax(r.line, r.col, "partial-function cases must be values")
                    })?);
                }
                if vals.len() < 2 {
                    return Err(err("partial-function cases need `input => output`".into()));
                }
                let out = vals.pop().unwrap();
                let chained = vals.into_iter().rev().fold(out, |acc, k| {
                    Value::PartialFn(PartialFn::new(vec![(k, acc)]).unwrap())
                });
                let Value::PartialFn(single) = chained else {
                    unreachable!()
                };
                let (k, v) = single.cases()[0].clone();
                insert_case(&mut merged, k, v, raw.line, raw.col)?;
            }
            Expr::PartialFn(PartialFn::new(merged).expect("merged keys are distinct"))
        }
    })
}

fn insert_case(
    cases: &mut Vec<(Value, Value)>,
    key: Value,
    out: Value,
    line: usize,
    col: usize,
) -> Result<(), ParseError> {
    match cases.iter_mut().find(|(k, _)| *k == key) {
        None => {
            cases.push((key, out));
            Ok(())
        }
        Some((_, existing)) => {
            *existing =
                merge_outputs(existing, &out).ok_or_else(|| ParseError::ContradictoryExamples {
                    line,
                    col,
                    input: print_value(&key, &Sugar::default()),
                })?;
            Ok(())
        }
    }
}

fn merge_outputs(a: &Value, b: &Value) -> Option<Value> {
    match (a, b) {
        (Value::PartialFn(pa), Value::PartialFn(pb)) => {
            let mut cases: Vec<(Value, Value)> = pa.cases().to_vec();
            for (k, v) in pb.cases() {
                match cases.iter_mut().find(|(k2, _)| k2 == k) {
                    None => cases.push((k.clone(), v.clone())),
                    Some((_, existing)) => *existing = merge_outputs(existing, v)?,
                }
            }
            Some(Value::PartialFn(PartialFn::new(cases).ok()?))
        }
        _ if a == b => Some(a.clone()),
        _ => None,
    }
}

/// Elaborates an example against its expected type. Numerals and list
/// literals resolve through the shape of the expected datatype.
fn elab_example(raw: &Raw, ty: &Type, decls: &Declarations) -> Result<Value, ParseError> {
    let ill = |message: String| ParseError::IllTypedExample {
        line: raw.line,
        col: raw.col,
        message,
    };
    match (&raw.kind, ty) {
        (RawKind::Cases(cases), _) => {
            if cases.len() == 1 && cases[0].len() == 1 {
                return elab_example(&cases[0][0], ty, decls);
            }
            let Some((dom, cod)) = ty.as_arrow() else {
                return Err(ill(format!(
                    "input-output cases given at non-function type {ty}"
                )));
            };
            let mut merged: Vec<(Value, Value)> = Vec::new();
            for chain in cases {
                if chain.len() < 2 {
                    return Err(ill("partial-function cases need `input => output`".into()));
                }
                let key = elab_example(&chain[0], dom, decls)?;
                let out = if chain.len() == 2 {
                    elab_example(&chain[1], cod, decls)?
                } else {
                    let rest = Raw {
                        kind: RawKind::Cases(vec![chain[1..].to_vec()]),
                        line: chain[1].line,
                        col: chain[1].col,
                    };
                    elab_example(&rest, cod, decls)?
                };
                insert_case(&mut merged, key, out, chain[0].line, chain[0].col)?;
            }
            Ok(Value::PartialFn(
                PartialFn::new(merged).expect("merged keys are distinct"),
            ))
        }
        (RawKind::Unit, Type::Unit) => Ok(Value::Unit),
        (RawKind::Tuple(items), Type::Product(ts)) => {
            if items.len() != ts.len() {
                return Err(ill(format!(
                    "tuple of {} components where {ty} is expected",
                    items.len()
                )));
            }
            Ok(Value::Tuple(
                items
                    .iter()
                    .zip(ts.iter())
                    .map(|(r, t)| elab_example(r, t, decls))
                    .collect::<Result<Vec<_>, _>>()?
                    .into(),
            ))
        }
        (RawKind::Ctor(c, arg), Type::Base(b)) => {
            let d = decls
                .get(b)
                .ok_or_else(|| ParseError::UnknownType(b.to_string()))?;
            let (_, arg_ty) = d
                .ctors
                .iter()
                .find(|(c2, _)| c2 == c)
                .ok_or_else(|| ill(format!("`{c}` is not a constructor of {b}")))?;
            let v = match arg {
                Some(a) => elab_example(a, arg_ty, decls)?,
                None if *arg_ty == Type::Unit => Value::Unit,
                None => return Err(ill(format!("`{c}` expects an argument of type {arg_ty}"))),
            };
            Ok(Value::Ctor(c.clone(), Arc::new(v)))
        }
        (RawKind::Nat(n), Type::Base(b)) => {
            let (zero, succ) = decls
                .nat_shape(b)
                .ok_or_else(|| ill(format!("numeral literal at non-numeric type {b}")))?;
            Ok(nat_value(*n, &zero, &succ))
        }
        (RawKind::List(items), Type::Base(b)) => {
            let (nil, cons, elem) = decls
                .list_shape(b)
                .ok_or_else(|| ill(format!("list literal at non-list type {b}")))?;
            let mut v = Value::Ctor(nil, Arc::new(Value::Unit));
            for item in items.iter().rev() {
                let h = elab_example(item, &elem, decls)?;
                v = Value::Ctor(cons.clone(), Arc::new(Value::tuple(vec![h, v])));
            }
            Ok(v)
        }
        (RawKind::Var(x), _) => Err(ill(format!("variable `{x}` cannot appear in an example"))),
        (RawKind::Fix { .. }, _) => Err(ill("functions are not permitted inside examples".into())),
        _ => Err(ill(format!("example does not have type {ty}"))),
    }
}
