//! Typing of expressions, well-formedness of binding contexts, and variable
//! extraction from contexts of elimination forms.

use indexmap::IndexMap;
use thiserror::Error;

use crate::syntax::{Declarations, Elim, Expr, Name, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InternalError {
    #[error("type `{0}` is not declared")]
    UndeclaredType(String),
    #[error("constructor `{0}` is declared more than once")]
    DuplicateConstructor(String),
    #[error("binding `{0}` appears twice in one context")]
    DuplicateBinding(String),
}

/// Constructor name to (argument type, result base), plus the constructors
/// of each base in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructorContext {
    ctors: IndexMap<Name, (Type, Name)>,
    variants: IndexMap<Name, Vec<Name>>,
}

impl ConstructorContext {
    pub fn from_decls(decls: &Declarations) -> Result<ConstructorContext, InternalError> {
        let mut sigma = ConstructorContext::default();
        for d in &decls.types {
            sigma.variants.insert(
                d.name.clone(),
                d.ctors.iter().map(|(c, _)| c.clone()).collect(),
            );
            for (c, t) in &d.ctors {
                if sigma
                    .ctors
                    .insert(c.clone(), (t.clone(), d.name.clone()))
                    .is_some()
                {
                    return Err(InternalError::DuplicateConstructor(c.to_string()));
                }
            }
        }
        for (arg, _) in sigma.ctors.values() {
            sigma.closed(arg)?;
        }
        Ok(sigma)
    }

    pub fn ctor(&self, c: &str) -> Option<(&Type, &Name)> {
        self.ctors.get(c).map(|(t, b)| (t, b))
    }

    /// Constructors of `base` in declaration order.
    pub fn variants(&self, base: &str) -> Option<&[Name]> {
        self.variants.get(base).map(Vec::as_slice)
    }

    pub fn is_declared(&self, base: &str) -> bool {
        self.variants.contains_key(base)
    }

    pub fn bases(&self) -> impl Iterator<Item = &Name> {
        self.variants.keys()
    }

    /// Fails if `t` mentions an undeclared base.
    pub fn closed(&self, t: &Type) -> Result<(), InternalError> {
        let mut bases = Vec::new();
        t.bases(&mut bases);
        match bases.into_iter().find(|b| !self.is_declared(b)) {
            Some(b) => Err(InternalError::UndeclaredType(b.to_string())),
            None => Ok(()),
        }
    }
}

/// An ordered context binding elimination forms to types. Used for the
/// usable, auxiliary, and focusing contexts alike.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BindingContext {
    entries: Vec<(Elim, Type)>,
}

impl BindingContext {
    pub fn new() -> BindingContext {
        BindingContext::default()
    }

    pub fn from_entries(entries: Vec<(Elim, Type)>) -> Result<BindingContext, InternalError> {
        let mut ctx = BindingContext::new();
        for (e, t) in entries {
            ctx.push(e, t)?;
        }
        Ok(ctx)
    }

    /// Appends a binding; the same elimination form may not be bound twice.
    pub fn push(&mut self, e: Elim, t: Type) -> Result<(), InternalError> {
        if self.contains(&e) {
            return Err(InternalError::DuplicateBinding(e.to_string()));
        }
        self.entries.push((e, t));
        Ok(())
    }

    pub fn contains(&self, e: &Elim) -> bool {
        self.entries.iter().any(|(x, _)| x == e)
    }

    pub fn lookup(&self, e: &Elim) -> Option<&Type> {
        self.entries.iter().find(|(x, _)| x == e).map(|(_, t)| t)
    }

    pub fn entries(&self) -> &[(Elim, Type)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pop_front(&mut self) -> Option<(Elim, Type)> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.remove(0))
        }
    }

    /// Entries sorted, for order-insensitive comparison.
    pub fn normalized(&self) -> Vec<(Elim, Type)> {
        let mut v = self.entries.clone();
        v.sort();
        v
    }
}

/// Variable typings visible to the checker. Later entries shadow earlier ones.
pub type VarBindings = Vec<(Name, Type)>;

/// Decides `vars ⊢ e : ty`. Errors only when the inputs themselves mention
/// undeclared types.
pub fn check(
    sigma: &ConstructorContext,
    vars: &[(Name, Type)],
    e: &Expr,
    ty: &Type,
) -> Result<bool, InternalError> {
    for (_, t) in vars {
        sigma.closed(t)?;
    }
    sigma.closed(ty)?;
    let mut env: VarBindings = vars.to_vec();
    Ok(Checker { sigma }.check(&mut env, e, ty))
}

/// Infers the type of `e`, when it has one that can be read off directly.
pub fn infer(sigma: &ConstructorContext, vars: &[(Name, Type)], e: &Expr) -> Option<Type> {
    let mut env: VarBindings = vars.to_vec();
    Checker { sigma }.infer(&mut env, e)
}

struct Checker<'a> {
    sigma: &'a ConstructorContext,
}

impl Checker<'_> {
    fn lookup(env: &VarBindings, x: &str) -> Option<Type> {
        env.iter()
            .rev()
            .find(|(y, _)| &**y == x)
            .map(|(_, t)| t.clone())
    }

    fn check(&self, env: &mut VarBindings, e: &Expr, ty: &Type) -> bool {
        match (e, ty) {
            (Expr::Tuple(es), Type::Product(ts)) => {
                es.len() == ts.len() && es.iter().zip(ts.iter()).all(|(e, t)| self.check(env, e, t))
            }
            (Expr::Tuple(_), _) => false,
            (Expr::PartialFn(pf), Type::Arrow(dom, cod)) => pf.cases().iter().all(|(k, v)| {
                self.check(env, &k.to_expr(), dom) && self.check(env, &v.to_expr(), cod)
            }),
            (Expr::PartialFn(_), _) => false,
            (Expr::Match(s, branches), _) => {
                let Some(Type::Base(b)) = self.infer(env, s) else {
                    return false;
                };
                if !self.branches_cover(&b, branches.iter().map(|br| &br.ctor)) {
                    return false;
                }
                branches.iter().all(|br| {
                    let (arg, _) = self.sigma.ctor(&br.ctor).expect("covered constructor");
                    env.push((br.binder.clone(), arg.clone()));
                    let ok = self.check(env, &br.body, ty);
                    env.pop();
                    ok
                })
            }
            _ => self.infer(env, e).as_ref() == Some(ty),
        }
    }

    fn branches_cover<'b>(&self, base: &str, ctors: impl Iterator<Item = &'b Name>) -> bool {
        let Some(variants) = self.sigma.variants(base) else {
            return false;
        };
        let seen: Vec<&Name> = ctors.collect();
        seen.len() == variants.len()
            && variants
                .iter()
                .all(|v| seen.iter().filter(|c| **c == v).count() == 1)
    }

    fn infer(&self, env: &mut VarBindings, e: &Expr) -> Option<Type> {
        match e {
            Expr::Var(x) => Self::lookup(env, x),
            Expr::Unit => Some(Type::Unit),
            Expr::Tuple(es) => {
                if es.len() < 2 {
                    return None;
                }
                let ts = es
                    .iter()
                    .map(|e| self.infer(env, e))
                    .collect::<Option<Vec<_>>>()?;
                Some(Type::product(ts))
            }
            Expr::Proj(k, t) => match self.infer(env, t)? {
                Type::Product(ts) if *k >= 1 && *k <= ts.len() => Some(ts[k - 1].clone()),
                _ => None,
            },
            Expr::Ctor(c, arg) => {
                let (arg_ty, base) = self.sigma.ctor(c)?;
                self.check(env, arg, arg_ty)
                    .then(|| Type::Base(base.clone()))
            }
            Expr::Fix(fx) => {
                let fty = fx.ty();
                self.sigma.closed(&fty).ok()?;
                env.push((fx.fname.clone(), fty.clone()));
                env.push((fx.arg.clone(), fx.dom.clone()));
                let ok = self.check(env, &fx.body, &fx.cod);
                env.pop();
                env.pop();
                ok.then_some(fty)
            }
            Expr::App(f, x) => match self.infer(env, f)? {
                Type::Arrow(dom, cod) => self.check(env, x, &dom).then(|| (*cod).clone()),
                _ => None,
            },
            Expr::Match(s, branches) => {
                let Some(Type::Base(b)) = self.infer(env, s) else {
                    return None;
                };
                if !self.branches_cover(&b, branches.iter().map(|br| &br.ctor)) {
                    return None;
                }
                let first = &branches[0];
                let (arg, _) = self.sigma.ctor(&first.ctor)?;
                env.push((first.binder.clone(), arg.clone()));
                let ty = self.infer(env, &first.body);
                env.pop();
                let ty = ty?;
                self.check(env, e, &ty).then_some(ty)
            }
            Expr::PartialFn(_) => None,
        }
    }
}

/// True iff every entry's elimination form checks at its recorded type.
pub fn ctx_well_formed(
    sigma: &ConstructorContext,
    ctx: &BindingContext,
    vars: &[(Name, Type)],
) -> bool {
    let mut seen: Vec<&Elim> = Vec::new();
    ctx.entries().iter().all(|(e, t)| {
        let fresh = !seen.contains(&e);
        seen.push(e);
        fresh && matches!(check(sigma, vars, &e.to_expr(), t), Ok(true))
    })
}

/// The entries whose elimination form is a bare variable, across all the
/// given contexts in order.
pub fn extract_vars(ctxs: &[&BindingContext]) -> VarBindings {
    ctxs.iter()
        .flat_map(|c| c.entries().iter())
        .filter_map(|(e, t)| e.as_var().map(|x| (x.clone(), t.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{name, parse_expr, parse_problem, Sugar};

    fn nat_env() -> (ConstructorContext, Declarations) {
        let p = parse_problem(
            "type nat = O | S of nat
             type natlist = Nil | Cons of nat * natlist
             let f : nat |> { 0 } = ?",
        )
        .unwrap();
        (ConstructorContext::from_decls(&p.decls).unwrap(), p.decls)
    }

    fn nat() -> Type {
        Type::base("nat")
    }

    #[test]
    fn constructors_check() {
        let (sigma, _) = nat_env();
        assert!(check(&sigma, &[], &Expr::ctor("O", Expr::Unit), &nat()).unwrap());
        assert!(!check(&sigma, &[], &Expr::ctor("O", Expr::Unit), &Type::Unit).unwrap());
    }

    #[test]
    fn projection_out_of_range() {
        let (sigma, _) = nat_env();
        let z = Expr::ctor("O", Expr::Unit);
        let e = Expr::proj(3, Expr::Tuple(vec![z.clone(), z]));
        assert!(!check(&sigma, &[], &e, &nat()).unwrap());
    }

    #[test]
    fn len_program_checks() {
        let (sigma, decls) = nat_env();
        let len = parse_expr(
            "fix len (ls : natlist) : nat = match ls with | Nil u -> O | Cons p -> S (len #2 p)",
            &Sugar::from_decls(&decls),
        )
        .unwrap();
        let ty = Type::arrow(Type::base("natlist"), nat());
        assert!(check(&sigma, &[], &len, &ty).unwrap());
        assert_eq!(infer(&sigma, &[], &len), Some(ty));
    }

    #[test]
    fn incomplete_match_is_rejected() {
        let (sigma, decls) = nat_env();
        let e = parse_expr(
            "fix f (x : nat) : nat = match x with | O u -> x",
            &Sugar::from_decls(&decls),
        )
        .unwrap();
        assert!(!check(&sigma, &[], &e, &Type::arrow(nat(), nat())).unwrap());
    }

    #[test]
    fn undeclared_type_in_context_is_an_error() {
        let (sigma, _) = nat_env();
        let vars = vec![(name("x"), Type::base("zzz"))];
        assert!(check(&sigma, &vars, &Expr::var("x"), &Type::base("zzz")).is_err());
    }

    #[test]
    fn well_formed_contexts() {
        let (sigma, _) = nat_env();
        let pair = Type::product(vec![nat(), Type::base("natlist")]);
        let x = Elim::var(&name("x"));
        assert!(ctx_well_formed(&sigma, &BindingContext::new(), &[]));
        let ctx = BindingContext::from_entries(vec![(x.clone(), pair.clone()), (x.proj(1), nat())])
            .unwrap();
        assert!(ctx_well_formed(&sigma, &ctx, &[(name("x"), pair)]));
        let ctx = BindingContext::from_entries(vec![(x.proj(1), nat())]).unwrap();
        assert!(!ctx_well_formed(&sigma, &ctx, &[]));
    }

    #[test]
    fn vars_extraction() {
        let x = Elim::var(&name("x"));
        let ctx = BindingContext::from_entries(vec![(x.clone(), Type::Unit), (x.proj(1), nat())])
            .unwrap();
        assert_eq!(extract_vars(&[&ctx]), vec![(name("x"), Type::Unit)]);
        assert!(extract_vars(&[]).is_empty());
        let app = BindingContext::from_entries(vec![(
            Elim::var(&name("f")).app(crate::syntax::Intro::Elim(Elim::var(&name("y")))),
            nat(),
        )])
        .unwrap();
        assert!(extract_vars(&[&app]).is_empty());
    }

    #[test]
    fn duplicate_bindings_are_rejected() {
        let x = Elim::var(&name("x"));
        let mut ctx = BindingContext::new();
        ctx.push(x.clone(), Type::Unit).unwrap();
        assert!(ctx.push(x, Type::Unit).is_err());
    }
}
