//! Counting syntax trees by node count: all closed terms, the well-typed
//! ones, and the typed normal forms the synthesizer actually searches.
//!
//! Fixpoint annotations range over a finite universe of types (by default
//! the base types, so every fixpoint maps a base type to a base type),
//! tuples are pairs, and matches
//! list every constructor of one datatype in declaration order. "All" counts
//! closed terms whose outermost form does not already commit to the wrong
//! kind of type: no unit, tuple, constructor or fixpoint at the root unless
//! the target type is of that kind.

mod enumerate;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::parallel::{par_map, Parallelism};
use crate::syntax::{name, DataDecl, Declarations, Name, Type};
use crate::typecheck::ConstructorContext;

pub use enumerate::{
    count_by_enumeration, enumerate_all, enumerate_normal, for_each_term, is_normal_form,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CensusMode {
    All,
    Typed,
    Normal,
}

impl CensusMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CensusMode::All => "all",
            CensusMode::Typed => "typed",
            CensusMode::Normal => "normal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("count exceeds the ceiling of {0}")]
    BudgetExceeded(u128),
    #[error("type mentions an undeclared datatype: {0}")]
    IllFormed(String),
}

/// `type nat = O | S of nat`.
pub fn nat_decls() -> Declarations {
    Declarations {
        types: vec![DataDecl {
            name: name("nat"),
            ctors: vec![(name("O"), Type::Unit), (name("S"), Type::base("nat"))],
        }],
    }
}

/// The base types.
pub fn default_universe(sigma: &ConstructorContext) -> Vec<Type> {
    sigma.bases().map(|b| Type::Base(b.clone())).collect()
}

/// The term space being counted.
#[derive(Clone, Debug)]
pub struct CensusSpace {
    pub sigma: ConstructorContext,
    /// Types allowed in fixpoint annotations.
    pub universe: Vec<Type>,
    pub ceiling: u128,
}

impl CensusSpace {
    pub fn new(sigma: ConstructorContext) -> CensusSpace {
        let universe = default_universe(&sigma);
        CensusSpace {
            sigma,
            universe,
            ceiling: u128::from(u64::MAX),
        }
    }

    /// Number of `mode` terms of exactly `n` nodes at `ty`.
    pub fn count(&self, ty: &Type, n: usize, mode: CensusMode) -> Result<u128, CensusError> {
        self.sigma
            .closed(ty)
            .map_err(|e| CensusError::IllFormed(e.to_string()))?;
        let mut c = Counter::new(self);
        match mode {
            CensusMode::All => c.all_root(ty, n),
            CensusMode::Typed => Ok(c.typed(&[], n)?.get(ty).copied().unwrap_or(0)),
            CensusMode::Normal => c.intro(&NCtx::default(), ty, n),
        }
    }
}

pub fn count_asts(
    sigma: &ConstructorContext,
    ty: &Type,
    n: usize,
    mode: CensusMode,
) -> Result<u128, CensusError> {
    CensusSpace::new(sigma.clone()).count(ty, n, mode)
}

/// One row per node count `1..=max_n`, one column per mode; rows are
/// computed in parallel.
pub fn census_rows(
    sigma: &ConstructorContext,
    ty: &Type,
    max_n: usize,
    modes: &[CensusMode],
) -> Result<Vec<(usize, Vec<u128>)>, CensusError> {
    let space = CensusSpace::new(sigma.clone());
    let ns: Vec<usize> = (1..=max_n).collect();
    par_map(&ns, Parallelism::Parallel, |&n| {
        let counts = modes
            .iter()
            .map(|&m| space.count(ty, n, m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((n, counts))
    })
    .into_iter()
    .collect()
}

/// Context of the normal-form recurrence: variable types by binding level,
/// and for each enclosing fixpoint the levels of its name, its argument,
/// and the variables known to be strictly smaller than the argument.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
struct NCtx {
    vars: Vec<Type>,
    frames: Vec<NFrame>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct NFrame {
    fname: usize,
    arg: usize,
    decreasing: Vec<usize>,
}

struct Counter<'a> {
    space: &'a CensusSpace,
    all: HashMap<(usize, usize), u128>,
    typed: HashMap<(Vec<Type>, usize), Arc<HashMap<Type, u128>>>,
    intros: HashMap<(NCtx, Type, usize), u128>,
    elims: HashMap<(NCtx, Type, usize), u128>,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(left: usize, parts: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if left >= 1 {
                acc.push(left);
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        for k in 1..left {
            acc.push(k);
            go(left - k, parts - 1, acc, out);
            acc.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

fn add(ceiling: u128, a: u128, b: u128) -> Result<u128, CensusError> {
    a.checked_add(b)
        .filter(|&x| x <= ceiling)
        .ok_or(CensusError::BudgetExceeded(ceiling))
}

fn mul(ceiling: u128, a: u128, b: u128) -> Result<u128, CensusError> {
    a.checked_mul(b)
        .filter(|&x| x <= ceiling)
        .ok_or(CensusError::BudgetExceeded(ceiling))
}

impl<'a> Counter<'a> {
    fn new(space: &'a CensusSpace) -> Counter<'a> {
        Counter {
            space,
            all: HashMap::new(),
            typed: HashMap::new(),
            intros: HashMap::new(),
            elims: HashMap::new(),
        }
    }

    fn datatypes(&self) -> Vec<(Name, Vec<Type>)> {
        let sigma = &self.space.sigma;
        sigma
            .bases()
            .map(|b| {
                let args = sigma
                    .variants(b)
                    .unwrap_or(&[])
                    .iter()
                    .map(|c| sigma.ctor(c).expect("declared").0.clone())
                    .collect();
                (b.clone(), args)
            })
            .collect()
    }

    // ---- all closed terms ----

    /// Untyped terms of `n` nodes over `scope` bound variables.
    fn all_sub(&mut self, scope: usize, n: usize) -> Result<u128, CensusError> {
        if let Some(&c) = self.all.get(&(scope, n)) {
            return Ok(c);
        }
        let mut total = 0;
        if n == 1 {
            total = scope as u128 + 1;
        } else {
            let rest = self.all_forms_except_leaves(scope, n, None)?;
            total = add(self.space.ceiling, total, rest)?;
        }
        self.all.insert((scope, n), total);
        Ok(total)
    }

    /// Non-leaf forms of `n >= 2` nodes. With `root = Some(ty)`, forms that
    /// introduce a different kind of type than `ty` are left out.
    fn all_forms_except_leaves(
        &mut self,
        scope: usize,
        n: usize,
        root: Option<&Type>,
    ) -> Result<u128, CensusError> {
        let allow = |kind: fn(&Type) -> bool| root.is_none_or(kind);
        let mut total = 0u128;
        // pairs
        if allow(|t| matches!(t, Type::Product(ts) if ts.len() == 2)) {
            for a in 1..n - 1 {
                let x = self.all_sub(scope, a)?;
                let y = self.all_sub(scope, n - 1 - a)?;
                total = add(self.space.ceiling, total, mul(self.space.ceiling, x, y)?)?;
            }
        }
        // projections #1, #2
        let inner = self.all_sub(scope, n - 1)?;
        total = add(
            self.space.ceiling,
            total,
            mul(self.space.ceiling, 2, inner)?,
        )?;
        // constructors
        let ctors: Vec<Name> = match root {
            Some(Type::Base(b)) => self.space.sigma.variants(b).unwrap_or(&[]).to_vec(),
            Some(_) => Vec::new(),
            None => self
                .space
                .sigma
                .bases()
                .flat_map(|b| self.space.sigma.variants(b).unwrap_or(&[]).to_vec())
                .collect(),
        };
        total = add(
            self.space.ceiling,
            total,
            mul(self.space.ceiling, ctors.len() as u128, inner)?,
        )?;
        // fixpoints
        if allow(|t| matches!(t, Type::Arrow(..))) {
            let u = self.space.universe.len() as u128;
            let body = self.all_sub(scope + 2, n - 1)?;
            total = add(
                self.space.ceiling,
                total,
                mul(self.space.ceiling, u * u, body)?,
            )?;
        }
        // applications
        for a in 1..n - 1 {
            let x = self.all_sub(scope, a)?;
            let y = self.all_sub(scope, n - 1 - a)?;
            total = add(self.space.ceiling, total, mul(self.space.ceiling, x, y)?)?;
        }
        // matches
        for (_, args) in self.datatypes() {
            let k = args.len();
            if n < 2 + 2 * k {
                continue;
            }
            for s in 1..=n - 1 - 2 * k {
                let scrut = self.all_sub(scope, s)?;
                if scrut == 0 {
                    continue;
                }
                for sizes in compositions(n - 1 - s - k, k) {
                    let mut prod = scrut;
                    for b in sizes {
                        prod = mul(self.space.ceiling, prod, self.all_sub(scope + 1, b)?)?;
                    }
                    total = add(self.space.ceiling, total, prod)?;
                }
            }
        }
        Ok(total)
    }

    fn all_root(&mut self, ty: &Type, n: usize) -> Result<u128, CensusError> {
        match n {
            0 => Ok(0),
            // Closed: no variables; unit only at unit type.
            1 => Ok(u128::from(*ty == Type::Unit)),
            _ => self.all_forms_except_leaves(0, n, Some(ty)),
        }
    }

    // ---- well-typed terms ----

    /// Typed terms of `n` nodes under variables of the given types, by type.
    fn typed(&mut self, vars: &[Type], n: usize) -> Result<Arc<HashMap<Type, u128>>, CensusError> {
        // Only how many variables of each type are in scope matters.
        let mut sorted = vars.to_vec();
        sorted.sort();
        let key = (sorted, n);
        if let Some(m) = self.typed.get(&key) {
            return Ok(m.clone());
        }
        let mut out: HashMap<Type, u128> = HashMap::new();
        let bump = |c: &Counter,
                    out: &mut HashMap<Type, u128>,
                    t: Type,
                    k: u128|
         -> Result<(), CensusError> {
            if k == 0 {
                return Ok(());
            }
            let e = out.entry(t).or_insert(0);
            *e = add(c.space.ceiling, *e, k)?;
            Ok(())
        };
        if n == 1 {
            for t in vars {
                bump(self, &mut out, t.clone(), 1)?;
            }
            bump(self, &mut out, Type::Unit, 1)?;
        } else {
            // pairs
            for a in 1..n - 1 {
                let xs = self.typed(vars, a)?;
                let ys = self.typed(vars, n - 1 - a)?;
                for (tx, cx) in xs.iter() {
                    for (ty, cy) in ys.iter() {
                        let k = mul(self.space.ceiling, *cx, *cy)?;
                        bump(
                            self,
                            &mut out,
                            Type::product(vec![tx.clone(), ty.clone()]),
                            k,
                        )?;
                    }
                }
            }
            let inner = self.typed(vars, n - 1)?;
            // projections
            for (t, c) in inner.iter() {
                if let Type::Product(ts) = t {
                    for tk in ts.iter().take(2) {
                        bump(self, &mut out, tk.clone(), *c)?;
                    }
                }
            }
            // constructors
            let ctors: Vec<(Type, Name)> = self
                .space
                .sigma
                .bases()
                .flat_map(|b| {
                    self.space
                        .sigma
                        .variants(b)
                        .unwrap_or(&[])
                        .iter()
                        .map(|c| {
                            (
                                self.space.sigma.ctor(c).expect("declared").0.clone(),
                                b.clone(),
                            )
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            for (arg, base) in ctors {
                let c = inner.get(&arg).copied().unwrap_or(0);
                bump(self, &mut out, Type::Base(base), c)?;
            }
            // fixpoints
            let universe = self.space.universe.clone();
            for dom in &universe {
                for cod in &universe {
                    let fty = Type::arrow(dom.clone(), cod.clone());
                    let mut inner_vars = vars.to_vec();
                    inner_vars.push(fty.clone());
                    inner_vars.push(dom.clone());
                    let body = self.typed(&inner_vars, n - 1)?;
                    let c = body.get(cod).copied().unwrap_or(0);
                    bump(self, &mut out, fty, c)?;
                }
            }
            // applications
            for a in 1..n - 1 {
                let fs = self.typed(vars, a)?;
                let xs = self.typed(vars, n - 1 - a)?;
                for (ft, cf) in fs.iter() {
                    if let Type::Arrow(dom, cod) = ft {
                        let cx = xs.get(dom).copied().unwrap_or(0);
                        let k = mul(self.space.ceiling, *cf, cx)?;
                        bump(self, &mut out, (**cod).clone(), k)?;
                    }
                }
            }
            // matches
            for (base, args) in self.datatypes() {
                let k = args.len();
                if n < 2 + 2 * k {
                    continue;
                }
                for s in 1..=n - 1 - 2 * k {
                    let scrut = self
                        .typed(vars, s)?
                        .get(&Type::Base(base.clone()))
                        .copied()
                        .unwrap_or(0);
                    if scrut == 0 {
                        continue;
                    }
                    for sizes in compositions(n - 1 - s - k, k) {
                        let mut per_branch = Vec::with_capacity(k);
                        for (arg, b) in args.iter().zip(sizes) {
                            let mut inner_vars = vars.to_vec();
                            inner_vars.push(arg.clone());
                            per_branch.push(self.typed(&inner_vars, b)?);
                        }
                        for (t, c0) in per_branch[0].iter() {
                            let mut prod = mul(self.space.ceiling, scrut, *c0)?;
                            for m in &per_branch[1..] {
                                prod =
                                    mul(self.space.ceiling, prod, m.get(t).copied().unwrap_or(0))?;
                            }
                            bump(self, &mut out, t.clone(), prod)?;
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.typed.insert(key, out.clone());
        Ok(out)
    }

    // ---- normal forms ----

    /// Types an elimination form can have in `ctx`: the variables' types,
    /// closed under codomains and product components.
    fn reachable(ctx: &NCtx) -> BTreeSet<Type> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<Type> = ctx.vars.clone();
        while let Some(t) = stack.pop() {
            if !seen.insert(t.clone()) {
                continue;
            }
            match &t {
                Type::Arrow(_, cod) => stack.push((**cod).clone()),
                Type::Product(ts) => stack.extend(ts.iter().cloned()),
                _ => {}
            }
        }
        seen
    }

    /// Projection chains of `n` nodes from a variable of type `from` to `to`.
    fn rooted(from: &Type, to: &Type, n: usize) -> u128 {
        match n {
            0 => 0,
            1 => u128::from(from == to),
            _ => match from {
                Type::Product(ts) => ts.iter().map(|t| Counter::rooted(t, to, n - 1)).sum(),
                _ => 0,
            },
        }
    }

    fn intro(&mut self, ctx: &NCtx, ty: &Type, n: usize) -> Result<u128, CensusError> {
        if n == 0 {
            return Ok(0);
        }
        let key = (ctx.clone(), ty.clone(), n);
        if let Some(&c) = self.intros.get(&key) {
            return Ok(c);
        }
        let mut total = 0u128;
        match ty {
            Type::Unit => total = u128::from(n == 1),
            Type::Product(ts) => {
                if n > ts.len() {
                    for sizes in compositions(n - 1, ts.len()) {
                        let mut prod = 1u128;
                        for (t, s) in ts.iter().zip(sizes) {
                            prod = mul(self.space.ceiling, prod, self.intro(ctx, t, s)?)?;
                            if prod == 0 {
                                break;
                            }
                        }
                        total = add(self.space.ceiling, total, prod)?;
                    }
                }
                total = add(self.space.ceiling, total, self.matches(ctx, ty, n)?)?;
            }
            Type::Base(b) => {
                if n >= 2 {
                    let variants: Vec<Name> = self.space.sigma.variants(b).unwrap_or(&[]).to_vec();
                    for c in variants {
                        let arg = self.space.sigma.ctor(&c).expect("declared").0.clone();
                        total = add(self.space.ceiling, total, self.intro(ctx, &arg, n - 1)?)?;
                    }
                }
                total = add(self.space.ceiling, total, self.elim(ctx, ty, n)?)?;
                total = add(self.space.ceiling, total, self.matches(ctx, ty, n)?)?;
            }
            Type::Arrow(dom, cod) => {
                if n >= 2 {
                    let mut inner = ctx.clone();
                    let f = inner.vars.len();
                    inner.vars.push(ty.clone());
                    inner.vars.push((**dom).clone());
                    inner.frames.push(NFrame {
                        fname: f,
                        arg: f + 1,
                        decreasing: Vec::new(),
                    });
                    total = self.intro(&inner, cod, n - 1)?;
                }
            }
        }
        self.intros.insert(key, total);
        Ok(total)
    }

    fn matches(&mut self, ctx: &NCtx, ty: &Type, n: usize) -> Result<u128, CensusError> {
        let mut total = 0u128;
        for (base, args) in self.datatypes() {
            let k = args.len();
            let dt = Type::Base(base);
            if k == 0 || n < 2 + 2 * k {
                continue;
            }
            for s in 1..=n - 1 - 2 * k {
                let all = self.elim(ctx, &dt, s)?;
                if all == 0 {
                    continue;
                }
                let mut unrooted = all;
                let binder = ctx.vars.len();
                for v in 0..ctx.vars.len() {
                    let r = Counter::rooted(&ctx.vars[v], &dt, s);
                    if r == 0 {
                        continue;
                    }
                    unrooted -= r;
                    let mut frames = ctx.frames.clone();
                    for f in &mut frames {
                        if f.arg == v || f.decreasing.contains(&v) {
                            f.decreasing.push(binder);
                        }
                    }
                    let branches = self.branches(ctx, &frames, &args, ty, n - 1 - s)?;
                    total = add(
                        self.space.ceiling,
                        total,
                        mul(self.space.ceiling, r, branches)?,
                    )?;
                }
                if unrooted > 0 {
                    let branches = self.branches(ctx, &ctx.frames, &args, ty, n - 1 - s)?;
                    total = add(
                        self.space.ceiling,
                        total,
                        mul(self.space.ceiling, unrooted, branches)?,
                    )?;
                }
            }
        }
        Ok(total)
    }

    /// Branch lists of `left` nodes in total (each branch one node plus its
    /// body) for a match producing `ty`.
    fn branches(
        &mut self,
        ctx: &NCtx,
        frames: &[NFrame],
        args: &[Type],
        ty: &Type,
        left: usize,
    ) -> Result<u128, CensusError> {
        let k = args.len();
        if left < 2 * k {
            return Ok(0);
        }
        let mut total = 0u128;
        for sizes in compositions(left - k, k) {
            let mut prod = 1u128;
            for (arg, b) in args.iter().zip(sizes) {
                let mut inner = NCtx {
                    vars: ctx.vars.clone(),
                    frames: frames.to_vec(),
                };
                inner.vars.push(arg.clone());
                prod = mul(self.space.ceiling, prod, self.intro(&inner, ty, b)?)?;
                if prod == 0 {
                    break;
                }
            }
            total = add(self.space.ceiling, total, prod)?;
        }
        Ok(total)
    }

    fn elim(&mut self, ctx: &NCtx, ty: &Type, n: usize) -> Result<u128, CensusError> {
        if n == 0 {
            return Ok(0);
        }
        let key = (ctx.clone(), ty.clone(), n);
        if let Some(&c) = self.elims.get(&key) {
            return Ok(c);
        }
        let mut total = 0u128;
        if n == 1 {
            total = ctx.vars.iter().filter(|t| *t == ty).count() as u128;
        } else {
            let reach = Counter::reachable(ctx);
            for t in &reach {
                match t {
                    Type::Product(ts) => {
                        let hits = ts.iter().filter(|c| *c == ty).count() as u128;
                        if hits > 0 {
                            let inner = self.elim(ctx, t, n - 1)?;
                            total = add(
                                self.space.ceiling,
                                total,
                                mul(self.space.ceiling, hits, inner)?,
                            )?;
                        }
                    }
                    Type::Arrow(dom, cod) if **cod == *ty => {
                        for a in 1..n - 1 {
                            let b = n - 1 - a;
                            let mut heads = self.elim(ctx, t, a)?;
                            let mut recursive = 0u128;
                            if a == 1 {
                                for fr in &ctx.frames {
                                    if ctx.vars[fr.fname] == *t {
                                        heads -= 1;
                                        for &v in &fr.decreasing {
                                            recursive += Counter::rooted(&ctx.vars[v], dom, b);
                                        }
                                    }
                                }
                            }
                            let args = self.intro(ctx, dom, b)?;
                            total = add(
                                self.space.ceiling,
                                total,
                                mul(self.space.ceiling, heads, args)?,
                            )?;
                            total = add(self.space.ceiling, total, recursive)?;
                        }
                    }
                    _ => {}
                }
            }
        }
        self.elims.insert(key, total);
        Ok(total)
    }
}
