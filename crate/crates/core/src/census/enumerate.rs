//! Materializing enumerators. These build every term explicitly and filter,
//! and serve as independent checks on the counting recurrences and on the
//! synthesizer's claim of minimality.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::syntax::{Branch, Elim, Expr, FixExpr, FixIntro, Intro, IntroBranch, Name, Type};
use crate::synthesis::check_structural;
use crate::typecheck::{check, ConstructorContext};

use super::{CensusMode, CensusSpace};

fn level_name(i: usize) -> Name {
    Name::from(format!("v{i}"))
}

fn splits(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        if parts == 1 {
            if first == total {
                out.push(vec![first]);
            }
            continue;
        }
        for mut rest in splits(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn all_ctors(sigma: &ConstructorContext) -> Vec<Name> {
    sigma
        .bases()
        .flat_map(|b| sigma.variants(b).unwrap_or(&[]).to_vec())
        .collect()
}

struct AllGen<'a> {
    space: &'a CensusSpace,
    memo: HashMap<(usize, usize), Arc<Vec<Expr>>>,
}

impl AllGen<'_> {
    fn sub(&mut self, scope: usize, n: usize) -> Arc<Vec<Expr>> {
        if let Some(v) = self.memo.get(&(scope, n)) {
            return v.clone();
        }
        let mut out = Vec::new();
        self.forms(scope, n, &mut |e| out.push(e));
        let out = Arc::new(out);
        self.memo.insert((scope, n), out.clone());
        out
    }

    /// Every term of `n` nodes over `scope` variables, handed to `out` one
    /// at a time; only the smaller subterms are kept in memory.
    fn forms(&mut self, scope: usize, n: usize, out: &mut dyn FnMut(Expr)) {
        if n == 1 {
            (0..scope).for_each(|i| out(Expr::Var(level_name(i))));
            out(Expr::Unit);
        } else if n >= 2 {
            for a in 1..n - 1 {
                let xs = self.sub(scope, a);
                let ys = self.sub(scope, n - 1 - a);
                for x in xs.iter() {
                    for y in ys.iter() {
                        out(Expr::Tuple(vec![x.clone(), y.clone()]));
                    }
                }
            }
            let inner = self.sub(scope, n - 1);
            for k in 1..=2 {
                inner
                    .iter()
                    .for_each(|e| out(Expr::Proj(k, Box::new(e.clone()))));
            }
            for c in all_ctors(&self.space.sigma) {
                inner
                    .iter()
                    .for_each(|e| out(Expr::Ctor(c.clone(), Box::new(e.clone()))));
            }
            let body = self.sub(scope + 2, n - 1);
            for dom in &self.space.universe {
                for cod in &self.space.universe {
                    for b in body.iter() {
                        out(Expr::Fix(Arc::new(FixExpr {
                            fname: level_name(scope),
                            arg: level_name(scope + 1),
                            dom: dom.clone(),
                            cod: cod.clone(),
                            body: b.clone(),
                        })));
                    }
                }
            }
            for a in 1..n - 1 {
                let fs = self.sub(scope, a);
                let xs = self.sub(scope, n - 1 - a);
                for f in fs.iter() {
                    for x in xs.iter() {
                        out(Expr::App(Box::new(f.clone()), Box::new(x.clone())));
                    }
                }
            }
            let sigma = self.space.sigma.clone();
            for base in sigma.bases() {
                let ctors = sigma.variants(base).unwrap_or(&[]).to_vec();
                let k = ctors.len();
                if k == 0 || n < 2 + 2 * k {
                    continue;
                }
                for s in 1..=n - 1 - 2 * k {
                    let scruts = self.sub(scope, s);
                    for sizes in splits(n - 1 - s - k, k) {
                        let bodies: Vec<Arc<Vec<Expr>>> =
                            sizes.iter().map(|&b| self.sub(scope + 1, b)).collect();
                        for sc in scruts.iter() {
                            for combo in product(&bodies) {
                                let branches = ctors
                                    .iter()
                                    .zip(combo)
                                    .map(|(c, body)| Branch {
                                        ctor: c.clone(),
                                        binder: level_name(scope),
                                        body,
                                    })
                                    .collect();
                                out(Expr::Match(Box::new(sc.clone()), branches));
                            }
                        }
                    }
                }
            }
        }
    }
}

fn product<T: Clone>(lists: &[Arc<Vec<T>>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(acc.len() * l.len());
        for prefix in &acc {
            for x in l.iter() {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

/// Whether a closed term's outermost form could introduce a value of `ty`.
fn head_compatible(sigma: &ConstructorContext, e: &Expr, ty: &Type) -> bool {
    match e {
        Expr::Unit => *ty == Type::Unit,
        Expr::Tuple(es) => matches!(ty, Type::Product(ts) if ts.len() == es.len()),
        Expr::Ctor(c, _) => match ty {
            Type::Base(b) => sigma.ctor(c).is_some_and(|(_, owner)| owner == b),
            _ => false,
        },
        Expr::Fix(_) => matches!(ty, Type::Arrow(..)),
        _ => true,
    }
}

/// Visits every closed term of `n` nodes that the "All" census counts at
/// `ty`.
pub fn for_each_term(space: &CensusSpace, ty: &Type, n: usize, mut f: impl FnMut(&Expr)) {
    if n == 0 {
        return;
    }
    let mut g = AllGen {
        space,
        memo: HashMap::new(),
    };
    g.forms(0, n, &mut |e| {
        if head_compatible(&space.sigma, &e, ty) {
            f(&e)
        }
    });
}

/// Every closed term of `n` nodes the "All" census counts at `ty`.
pub fn enumerate_all(space: &CensusSpace, ty: &Type, n: usize) -> Vec<Expr> {
    let mut out = Vec::new();
    for_each_term(space, ty, n, |e| out.push(e.clone()));
    out
}

/// The census counts obtained the slow way: build every term, then filter
/// by the type checker and the normal-form predicate.
pub fn count_by_enumeration(space: &CensusSpace, ty: &Type, n: usize, mode: CensusMode) -> u128 {
    let mut count = 0u128;
    for_each_term(space, ty, n, |e| {
        let keep = match mode {
            CensusMode::All => true,
            CensusMode::Typed => matches!(check(&space.sigma, &[], e, ty), Ok(true)),
            CensusMode::Normal => {
                matches!(check(&space.sigma, &[], e, ty), Ok(true))
                    && is_normal_form(&space.sigma, &[], e, ty)
            }
        };
        count += u128::from(keep);
    });
    count
}

/// Whether `e` is a beta-normal, eta-long term of type `ty` under `vars`
/// whose recursion is structural: functions are fixpoints, tuples are
/// tuples, elimination forms only stand as terms at base type, and matches
/// only produce base or product types.
pub fn is_normal_form(
    sigma: &ConstructorContext,
    vars: &[(Name, Type)],
    e: &Expr,
    ty: &Type,
) -> bool {
    let mut env = vars.to_vec();
    normal_intro(sigma, &mut env, e, ty)
        && Intro::from_expr(e).is_some_and(|i| check_structural(&i))
}

fn normal_intro(
    sigma: &ConstructorContext,
    env: &mut Vec<(Name, Type)>,
    e: &Expr,
    ty: &Type,
) -> bool {
    match e {
        Expr::Unit => *ty == Type::Unit,
        Expr::Tuple(es) => match ty {
            Type::Product(ts) if ts.len() == es.len() => es
                .iter()
                .zip(ts.iter())
                .all(|(c, t)| normal_intro(sigma, env, c, t)),
            _ => false,
        },
        Expr::Ctor(c, a) => match (ty, sigma.ctor(c)) {
            (Type::Base(b), Some((arg, owner))) if owner == b => {
                let arg = arg.clone();
                normal_intro(sigma, env, a, &arg)
            }
            _ => false,
        },
        Expr::Fix(fx) => {
            if fx.ty() != *ty {
                return false;
            }
            env.push((fx.fname.clone(), ty.clone()));
            env.push((fx.arg.clone(), fx.dom.clone()));
            let ok = normal_intro(sigma, env, &fx.body, &fx.cod);
            env.truncate(env.len() - 2);
            ok
        }
        Expr::Match(s, branches) => {
            if !matches!(ty, Type::Base(_) | Type::Product(_)) {
                return false;
            }
            let Some(Type::Base(d)) = normal_elim(sigma, env, s) else {
                return false;
            };
            let variants = sigma.variants(&d).unwrap_or(&[]).to_vec();
            if variants.len() != branches.len() {
                return false;
            }
            branches.iter().zip(variants).all(|(b, c)| {
                if b.ctor != c {
                    return false;
                }
                let arg = sigma.ctor(&c).expect("declared").0.clone();
                env.push((b.binder.clone(), arg));
                let ok = normal_intro(sigma, env, &b.body, ty);
                env.pop();
                ok
            })
        }
        Expr::Var(_) | Expr::App(..) | Expr::Proj(..) => {
            ty.is_base() && normal_elim(sigma, env, e).as_ref() == Some(ty)
        }
        Expr::PartialFn(_) => false,
    }
}

fn normal_elim(sigma: &ConstructorContext, env: &mut Vec<(Name, Type)>, e: &Expr) -> Option<Type> {
    match e {
        Expr::Var(x) => env
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t.clone()),
        Expr::Proj(k, t) => match normal_elim(sigma, env, t)? {
            Type::Product(ts) if *k >= 1 && *k <= ts.len() => Some(ts[k - 1].clone()),
            _ => None,
        },
        Expr::App(f, a) => match normal_elim(sigma, env, f)? {
            Type::Arrow(dom, cod) => normal_intro(sigma, env, a, &dom).then(|| (*cod).clone()),
            _ => None,
        },
        _ => None,
    }
}

/// Every structural, eta-long normal form of exactly `n` nodes at `ty`
/// with the given variables in scope, generated directly from the grammar.
pub fn enumerate_normal(
    sigma: &ConstructorContext,
    vars: &[(Name, Type)],
    ty: &Type,
    n: usize,
) -> Vec<Intro> {
    let mut g = NormalGen {
        sigma,
        intros: HashMap::new(),
        elims: HashMap::new(),
    };
    g.intro(vars, ty, n)
        .iter()
        .filter(|i| check_structural(i))
        .cloned()
        .collect()
}

type Scope = Vec<(Name, Type)>;

struct NormalGen<'a> {
    sigma: &'a ConstructorContext,
    intros: HashMap<(Scope, Type, usize), Arc<Vec<Intro>>>,
    elims: HashMap<(Scope, Type, usize), Arc<Vec<Elim>>>,
}

impl NormalGen<'_> {
    fn intro(&mut self, vars: &[(Name, Type)], ty: &Type, n: usize) -> Arc<Vec<Intro>> {
        let key = (vars.to_vec(), ty.clone(), n);
        if let Some(v) = self.intros.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n >= 1 {
            match ty {
                Type::Unit => {
                    if n == 1 {
                        out.push(Intro::Unit);
                    }
                }
                Type::Product(ts) => {
                    if n > ts.len() {
                        for sizes in splits(n - 1, ts.len()) {
                            let parts: Vec<Arc<Vec<Intro>>> = ts
                                .iter()
                                .zip(sizes)
                                .map(|(t, s)| self.intro(vars, t, s))
                                .collect();
                            out.extend(product(&parts).into_iter().map(Intro::Tuple));
                        }
                    }
                    out.extend(self.matches(vars, ty, n));
                }
                Type::Base(b) => {
                    if n >= 2 {
                        for c in self.sigma.variants(b).unwrap_or(&[]).to_vec() {
                            let arg = self.sigma.ctor(&c).expect("declared").0.clone();
                            for a in self.intro(vars, &arg, n - 1).iter() {
                                out.push(Intro::Ctor(c.clone(), Arc::new(a.clone())));
                            }
                        }
                    }
                    out.extend(self.elim(vars, ty, n).iter().cloned().map(Intro::Elim));
                    out.extend(self.matches(vars, ty, n));
                }
                Type::Arrow(dom, cod) => {
                    if n >= 2 {
                        let f = level_name(vars.len());
                        let x = level_name(vars.len() + 1);
                        let mut inner = vars.to_vec();
                        inner.push((f.clone(), ty.clone()));
                        inner.push((x.clone(), (**dom).clone()));
                        for body in self.intro(&inner, cod, n - 1).iter() {
                            out.push(Intro::Fix(Arc::new(FixIntro {
                                fname: f.clone(),
                                arg: x.clone(),
                                dom: (**dom).clone(),
                                cod: (**cod).clone(),
                                body: body.clone(),
                            })));
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.intros.insert(key, out.clone());
        out
    }

    fn matches(&mut self, vars: &[(Name, Type)], ty: &Type, n: usize) -> Vec<Intro> {
        let mut out = Vec::new();
        let sigma = self.sigma;
        for base in sigma.bases() {
            let ctors = sigma.variants(base).unwrap_or(&[]).to_vec();
            let k = ctors.len();
            if k == 0 || n < 2 + 2 * k {
                continue;
            }
            let binder = level_name(vars.len());
            for s in 1..=n - 1 - 2 * k {
                let scruts = self.elim(vars, &Type::Base(base.clone()), s);
                if scruts.is_empty() {
                    continue;
                }
                for sizes in splits(n - 1 - s - k, k) {
                    let bodies: Vec<Arc<Vec<Intro>>> = ctors
                        .iter()
                        .zip(sizes)
                        .map(|(c, b)| {
                            let mut inner = vars.to_vec();
                            inner
                                .push((binder.clone(), sigma.ctor(c).expect("declared").0.clone()));
                            self.intro(&inner, ty, b)
                        })
                        .collect();
                    for combo in product(&bodies) {
                        for sc in scruts.iter() {
                            let branches = ctors
                                .iter()
                                .zip(combo.iter())
                                .map(|(c, body)| IntroBranch {
                                    ctor: c.clone(),
                                    binder: binder.clone(),
                                    body: body.clone(),
                                })
                                .collect();
                            out.push(Intro::Match(sc.clone(), branches));
                        }
                    }
                }
            }
        }
        out
    }

    fn elim(&mut self, vars: &[(Name, Type)], ty: &Type, n: usize) -> Arc<Vec<Elim>> {
        let key = (vars.to_vec(), ty.clone(), n);
        if let Some(v) = self.elims.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 1 {
            // Later bindings shadow earlier ones of the same name.
            for (i, (x, t)) in vars.iter().enumerate() {
                if t == ty && !vars[i + 1..].iter().any(|(y, _)| y == x) {
                    out.push(Elim::Var(x.clone()));
                }
            }
        } else if n >= 2 {
            let mut reach = BTreeSet::new();
            let mut stack: Vec<Type> = vars.iter().map(|(_, t)| t.clone()).collect();
            while let Some(t) = stack.pop() {
                if reach.insert(t.clone()) {
                    match &t {
                        Type::Arrow(_, c) => stack.push((**c).clone()),
                        Type::Product(ts) => stack.extend(ts.iter().cloned()),
                        _ => {}
                    }
                }
            }
            for t in &reach {
                match t {
                    Type::Product(ts) => {
                        for (k, c) in ts.iter().enumerate() {
                            if c == ty {
                                for e in self.elim(vars, t, n - 1).iter() {
                                    out.push(e.proj(k + 1));
                                }
                            }
                        }
                    }
                    Type::Arrow(dom, cod) if **cod == *ty => {
                        for a in 1..n - 1 {
                            let heads = self.elim(vars, t, a);
                            if heads.is_empty() {
                                continue;
                            }
                            let args = self.intro(vars, dom, n - 1 - a);
                            for h in heads.iter() {
                                for x in args.iter() {
                                    out.push(h.app(x.clone()));
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        let out = Arc::new(out);
        self.elims.insert(key, out.clone());
        out
    }
}
