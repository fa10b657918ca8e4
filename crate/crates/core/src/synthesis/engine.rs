//! The search proper: refinement of introduction forms against example
//! worlds, bottom-up guessing of elimination forms, and memoized
//! branch-and-bound over program size.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use crate::eval::eval_elim;
use crate::focusing::{focus_closure, FocusState, World};
use crate::syntax::{Elim, FixIntro, Intro, IntroBranch, Name, Type, Value};
use crate::typecheck::{BindingContext, ConstructorContext};

use super::structural::{after_match, frame_for, Frame};
use super::{FocusMode, SearchLimits, Statistics};

pub(crate) type CtxId = usize;
pub(crate) type EnvId = usize;
pub(crate) type Sigma = Vec<(Elim, Value)>;

const FIX_NAMES: &[&str] = &["f", "g", "h"];
const ARG_NAMES: &[&str] = &["x", "y", "z", "w"];
const BINDER_NAMES: &[&str] = &["p", "q", "r", "s", "t", "u", "v"];

/// Everything about a hole's surroundings except its example worlds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Ctx {
    /// Usable elimination forms.
    pub gamma: Vec<(Elim, Type)>,
    /// Already-focused product forms.
    pub delta: Vec<(Elim, Type)>,
    /// Bindings not yet focused (lazy focusing only).
    pub pending: Vec<(Elim, Type)>,
    pub frames: Vec<Frame>,
    pub used: Vec<Name>,
    /// Name for the next fixpoint, when it is the goal function itself.
    pub top_name: Option<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Goal {
    pub ctx: CtxId,
    pub env: EnvId,
    pub goals: Arc<[Value]>,
    pub ty: Type,
    pub depth: usize,
}

#[derive(Debug)]
pub(crate) enum Abort {
    Timeout,
    TermLimit,
}

#[derive(Default)]
struct Memo {
    best: Option<Intro>,
    failed_upto: usize,
}

struct Entry {
    elim: Elim,
    ty: Type,
}

#[derive(Default)]
struct ElimTable {
    entries: Vec<Entry>,
    /// Entry indices by size; index 0 is unused.
    by_size: Vec<Vec<usize>>,
    pending: BTreeMap<usize, Vec<(Elim, Type)>>,
}

pub(crate) struct Engine<'a> {
    pub sigma: &'a ConstructorContext,
    pub limits: &'a SearchLimits,
    pub mode: FocusMode,
    ctxs: Vec<Arc<Ctx>>,
    ctx_ids: HashMap<Arc<Ctx>, CtxId>,
    envs: Vec<Arc<[Sigma]>>,
    env_ids: HashMap<Arc<[Sigma]>, EnvId>,
    elims: Vec<ElimTable>,
    intros: HashMap<(CtxId, Type, usize), Arc<Vec<Intro>>>,
    vals: HashMap<(CtxId, EnvId), Vec<Option<Arc<[Option<Value>]>>>>,
    memo: HashMap<Goal, Memo>,
    started: Instant,
    ticks: u64,
    /// Terms stored in the elimination and argument tables.
    terms: u64,
    pub stats: Statistics,
}

fn fresh(used: &[Name], candidates: &[&str]) -> Name {
    for c in candidates {
        if !used.iter().any(|u| &**u == *c) {
            return Name::from(*c);
        }
    }
    for i in 1.. {
        for c in candidates {
            let n = format!("{c}{i}");
            if !used.iter().any(|u| **u == *n) {
                return Name::from(n);
            }
        }
    }
    unreachable!()
}

impl<'a> Engine<'a> {
    pub fn new(
        sigma: &'a ConstructorContext,
        limits: &'a SearchLimits,
        mode: FocusMode,
    ) -> Engine<'a> {
        Engine {
            sigma,
            limits,
            mode,
            ctxs: Vec::new(),
            ctx_ids: HashMap::new(),
            envs: Vec::new(),
            env_ids: HashMap::new(),
            elims: Vec::new(),
            intros: HashMap::new(),
            vals: HashMap::new(),
            memo: HashMap::new(),
            started: Instant::now(),
            ticks: 0,
            terms: 0,
            stats: Statistics::default(),
        }
    }

    pub fn contexts(&self) -> usize {
        self.ctxs.len()
    }

    pub fn intern_ctx(&mut self, ctx: Ctx) -> CtxId {
        if let Some(&id) = self.ctx_ids.get(&ctx) {
            return id;
        }
        let id = self.ctxs.len();
        let ctx = Arc::new(ctx);
        self.ctxs.push(ctx.clone());
        self.ctx_ids.insert(ctx, id);
        self.elims.push(ElimTable {
            by_size: vec![Vec::new()],
            ..Default::default()
        });
        id
    }

    pub fn intern_env(&mut self, env: Vec<Sigma>) -> EnvId {
        let env: Arc<[Sigma]> = env.into();
        if let Some(&id) = self.env_ids.get(&env) {
            return id;
        }
        let id = self.envs.len();
        self.envs.push(env.clone());
        self.env_ids.insert(env, id);
        id
    }

    fn exhausted(&self) -> bool {
        self.terms > self.limits.max_terms
    }

    fn tick(&mut self) -> Result<(), Abort> {
        if self.exhausted() {
            return Err(Abort::TermLimit);
        }
        self.ticks += 1;
        if self.ticks.is_multiple_of(256) && self.started.elapsed() > self.limits.timeout {
            return Err(Abort::Timeout);
        }
        Ok(())
    }

    fn fire(&mut self, rule: &'static str) {
        *self.stats.rules.entry(rule).or_default() += 1;
    }

    /// Adds fresh bindings to a context, focusing them according to the
    /// mode. The sigmas already carry example values for the new bindings.
    pub fn bind(
        &mut self,
        mut ctx: Ctx,
        sigmas: Vec<Sigma>,
        new: Vec<(Elim, Type)>,
    ) -> (CtxId, Vec<Sigma>) {
        match self.mode {
            FocusMode::Off => {
                ctx.gamma.extend(new);
                (self.intern_ctx(ctx), sigmas)
            }
            FocusMode::Lazy => {
                ctx.pending.extend(new);
                (self.intern_ctx(ctx), sigmas)
            }
            FocusMode::Eager => self.focus_into(ctx, sigmas, new),
        }
    }

    fn focus_into(
        &mut self,
        mut ctx: Ctx,
        sigmas: Vec<Sigma>,
        new: Vec<(Elim, Type)>,
    ) -> (CtxId, Vec<Sigma>) {
        let state = FocusState {
            gamma: BindingContext::from_entries(std::mem::take(&mut ctx.gamma))
                .expect("distinct bindings"),
            delta: BindingContext::from_entries(std::mem::take(&mut ctx.delta))
                .expect("distinct bindings"),
            omega: BindingContext::from_entries(new).expect("distinct bindings"),
            worlds: sigmas
                .into_iter()
                .map(|s| World::new(s, Value::Unit))
                .collect(),
        };
        let (done, events) = focus_closure(&state).expect("examples match their types");
        for ev in &events {
            self.fire(ev.rule.name());
        }
        ctx.gamma = done.gamma.entries().to_vec();
        ctx.delta = done.delta.entries().to_vec();
        let sigmas = done.worlds.into_iter().map(|w| w.sigma).collect();
        (self.intern_ctx(ctx), sigmas)
    }

    /// Lazy focusing: settle pending bindings before any rule runs.
    fn settle(&mut self, ctx: CtxId, sigmas: Vec<Sigma>) -> (CtxId, Vec<Sigma>) {
        let mut c = (*self.ctxs[ctx]).clone();
        if c.pending.is_empty() {
            return (ctx, sigmas);
        }
        let new = std::mem::take(&mut c.pending);
        self.fire("IRefine-Focus");
        self.focus_into(c, sigmas, new)
    }

    // ---- elimination forms ----

    fn ensure_built(&mut self, ctx: CtxId, size: usize) {
        while self.elims[ctx].by_size.len() <= size {
            let s = self.elims[ctx].by_size.len();
            self.build(ctx, s);
        }
    }

    fn build(&mut self, ctx: CtxId, s: usize) {
        let c = self.ctxs[ctx].clone();
        let mut new: Vec<(Elim, Type)> = c
            .gamma
            .iter()
            .filter(|(e, _)| e.size() == s)
            .cloned()
            .collect();
        if let Some(p) = self.elims[ctx].pending.remove(&s) {
            new.extend(p);
        }
        // Applications: head of size a, argument of size s - 1 - a.
        for a in 1..s.saturating_sub(1) {
            let b = s - 1 - a;
            let heads: Vec<(Elim, Type, Type)> = self.elims[ctx].by_size[a]
                .iter()
                .filter_map(|&i| {
                    let en = &self.elims[ctx].entries[i];
                    en.ty
                        .as_arrow()
                        .map(|(d, r)| (en.elim.clone(), d.clone(), r.clone()))
                })
                .collect();
            for (head, dom, cod) in heads {
                // Past the cap the tables are left incomplete; the next tick
                // aborts the search.
                if self.exhausted() {
                    break;
                }
                let args = self.intros(ctx, &dom, b);
                let frame = frame_for(&c.frames, &head).cloned();
                for arg in args.iter() {
                    if let Some(f) = &frame {
                        if !f.admits(arg) {
                            continue;
                        }
                    }
                    self.fire("EGuess-App");
                    new.push((head.app(arg.clone()), cod.clone()));
                }
            }
        }
        let mut added = Vec::new();
        for (e, t) in new {
            match (&t, self.mode) {
                (Type::Product(_), FocusMode::Eager | FocusMode::Lazy) => {
                    // A product-typed application is focused at once; its
                    // projections become usable at their own sizes.
                    self.fire("EGuess-Focus");
                    let state = FocusState {
                        omega: BindingContext::from_entries(vec![(e, t)]).expect("single binding"),
                        ..Default::default()
                    };
                    let (done, _) = focus_closure(&state).expect("no worlds to split");
                    for (pe, pt) in done.gamma.entries() {
                        self.elims[ctx]
                            .pending
                            .entry(pe.size())
                            .or_default()
                            .push((pe.clone(), pt.clone()));
                    }
                }
                (Type::Product(ts), FocusMode::Off) => {
                    for (j, tj) in ts.iter().enumerate() {
                        self.elims[ctx]
                            .pending
                            .entry(s + 1)
                            .or_default()
                            .push((e.proj(j + 1), tj.clone()));
                    }
                    added.push((e, t));
                }
                _ => added.push((e, t)),
            }
        }
        let table = &mut self.elims[ctx];
        let mut idxs = Vec::with_capacity(added.len());
        for (elim, ty) in added {
            idxs.push(table.entries.len());
            table.entries.push(Entry { elim, ty });
        }
        self.stats.candidates += idxs.len() as u64;
        self.terms += idxs.len() as u64;
        table.by_size.push(idxs);
    }

    /// Example-free introduction forms of exactly `size` nodes, used as
    /// application arguments.
    fn intros(&mut self, ctx: CtxId, ty: &Type, size: usize) -> Arc<Vec<Intro>> {
        let key = (ctx, ty.clone(), size);
        if let Some(v) = self.intros.get(&key) {
            return v.clone();
        }
        if self.exhausted() {
            return Arc::default();
        }
        let mut out = Vec::new();
        match ty {
            Type::Unit => {
                if size == 1 {
                    out.push(Intro::Unit);
                }
            }
            Type::Base(b) => {
                self.ensure_built(ctx, size);
                for &i in &self.elims[ctx].by_size[size] {
                    let en = &self.elims[ctx].entries[i];
                    if en.ty == *ty {
                        out.push(Intro::Elim(en.elim.clone()));
                    }
                }
                if size >= 2 {
                    let variants: Vec<Name> = self.sigma.variants(b).unwrap_or(&[]).to_vec();
                    for c in variants {
                        let (arg_ty, _) = self.sigma.ctor(&c).expect("declared constructor");
                        let arg_ty = arg_ty.clone();
                        for a in self.intros(ctx, &arg_ty, size - 1).iter() {
                            out.push(Intro::Ctor(c.clone(), Arc::new(a.clone())));
                        }
                    }
                }
            }
            Type::Product(ts) => {
                let m = ts.len();
                if size > m {
                    let mut parts: Vec<Vec<Intro>> = vec![Vec::new()];
                    self.tuples(ctx, ts, size - 1, &mut parts, &mut out);
                }
            }
            Type::Arrow(dom, cod) => {
                if size >= 2 {
                    let c = (*self.ctxs[ctx]).clone();
                    let fname = fresh(&c.used, FIX_NAMES);
                    let mut used = c.used.clone();
                    used.push(fname.clone());
                    let arg = fresh(&used, ARG_NAMES);
                    let (inner, _) = self.enter_fix(c, &fname, &arg, ty, Vec::new());
                    for body in self.intros(inner, cod, size - 1).iter() {
                        out.push(Intro::Fix(Arc::new(FixIntro {
                            fname: fname.clone(),
                            arg: arg.clone(),
                            dom: (**dom).clone(),
                            cod: (**cod).clone(),
                            body: body.clone(),
                        })));
                    }
                }
            }
        }
        self.terms += out.len() as u64;
        let out = Arc::new(out);
        self.intros.insert(key, out.clone());
        out
    }

    /// Every tuple whose components have the given types and sizes summing
    /// to `total`, in order of component sizes.
    fn tuples(
        &mut self,
        ctx: CtxId,
        ts: &[Type],
        total: usize,
        acc: &mut Vec<Vec<Intro>>,
        out: &mut Vec<Intro>,
    ) {
        fn go(
            eng: &mut Engine,
            ctx: CtxId,
            ts: &[Type],
            j: usize,
            left: usize,
            prefix: &mut Vec<Intro>,
            out: &mut Vec<Intro>,
        ) {
            let remaining = ts.len() - j;
            if eng.terms + out.len() as u64 > eng.limits.max_terms {
                eng.terms += out.len() as u64;
                out.clear();
                return;
            }
            if remaining == 1 {
                for i in eng.intros(ctx, &ts[j], left).iter() {
                    prefix.push(i.clone());
                    out.push(Intro::Tuple(prefix.clone()));
                    prefix.pop();
                }
                return;
            }
            for k in 1..=left.saturating_sub(remaining - 1) {
                let here = eng.intros(ctx, &ts[j], k);
                for i in here.iter() {
                    prefix.push(i.clone());
                    go(eng, ctx, ts, j + 1, left - k, prefix, out);
                    prefix.pop();
                }
            }
        }
        acc.clear();
        go(self, ctx, ts, 0, total, &mut Vec::new(), out);
    }

    /// The context for a fixpoint body: the function and its argument bound
    /// and focused, with a recursion frame for the function.
    fn enter_fix(
        &mut self,
        mut c: Ctx,
        fname: &Name,
        arg: &Name,
        ty: &Type,
        sigmas: Vec<Sigma>,
    ) -> (CtxId, Vec<Sigma>) {
        let dom = ty.as_arrow().expect("function type").0.clone();
        c.used.push(fname.clone());
        c.used.push(arg.clone());
        c.frames.push(Frame::new(fname.clone(), arg.clone()));
        c.top_name = None;
        let new = vec![
            (Elim::Var(fname.clone()), ty.clone()),
            (Elim::Var(arg.clone()), dom),
        ];
        let (id, sigmas) = self.bind(c, sigmas, new);
        if self.mode == FocusMode::Lazy && sigmas.is_empty() {
            return self.settle(id, sigmas);
        }
        (id, sigmas)
    }

    pub fn elims_of(&mut self, ctx: CtxId, size: usize, ty: &Type) -> Vec<Elim> {
        if size == 0 {
            return Vec::new();
        }
        self.ensure_built(ctx, size);
        let table = &self.elims[ctx];
        table.by_size[size]
            .iter()
            .map(|&i| &table.entries[i])
            .filter(|en| en.ty == *ty)
            .map(|en| en.elim.clone())
            .collect()
    }

    fn values(&mut self, ctx: CtxId, env: EnvId, idx: usize) -> Arc<[Option<Value>]> {
        let n = self.elims[ctx].entries.len();
        let slot = self.vals.entry((ctx, env)).or_default();
        if slot.len() < n {
            slot.resize(n, None);
        }
        if let Some(v) = &slot[idx] {
            return v.clone();
        }
        let fuel = self.limits.eval_fuel;
        let elim = &self.elims[ctx].entries[idx].elim;
        let vs: Arc<[Option<Value>]> = self.envs[env]
            .iter()
            .map(|sigma| eval_elim(sigma, elim, fuel).ok())
            .collect();
        self.vals.get_mut(&(ctx, env)).unwrap()[idx] = Some(vs.clone());
        vs
    }

    // ---- refinement ----

    /// The smallest program for `g` of at most `budget` nodes.
    pub fn solve(&mut self, g: &Goal, budget: usize) -> Result<Option<Intro>, Abort> {
        if budget == 0 {
            return Ok(None);
        }
        self.tick()?;
        if !self.ctxs[g.ctx].pending.is_empty() {
            let sigmas = self.envs[g.env].to_vec();
            let (ctx, sigmas) = self.settle(g.ctx, sigmas);
            let env = self.intern_env(sigmas);
            let settled = Goal {
                ctx,
                env,
                ..g.clone()
            };
            return self.solve(&settled, budget);
        }
        if let Some(m) = self.memo.get(g) {
            if let Some(best) = &m.best {
                return Ok((best.size() <= budget).then(|| best.clone()));
            }
            if m.failed_upto >= budget {
                return Ok(None);
            }
        }
        let best = self.refine(g, budget)?;
        let m = self.memo.entry(g.clone()).or_default();
        match &best {
            Some(b) => m.best = Some(b.clone()),
            None => m.failed_upto = m.failed_upto.max(budget),
        }
        Ok(best)
    }

    fn refine(&mut self, g: &Goal, budget: usize) -> Result<Option<Intro>, Abort> {
        let mut best: Option<Intro> = None;
        let bound = |best: &Option<Intro>| best.as_ref().map_or(budget, |b| b.size() - 1);
        let no_worlds = g.goals.is_empty();

        match &g.ty {
            Type::Unit => {
                self.fire("IRefine-Unit");
                return Ok(Some(Intro::Unit));
            }
            Type::Product(ts) => {
                let all_tuples = g
                    .goals
                    .iter()
                    .all(|v| v.as_tuple().is_some_and(|vs| vs.len() == ts.len()));
                if all_tuples && bound(&best) > ts.len() {
                    if let Some(t) = self.refine_tuple(g, ts, bound(&best))? {
                        self.fire("IRefine-Tuple");
                        best = Some(t);
                    }
                }
            }
            Type::Base(b) => {
                let ctors: Vec<Name> = if no_worlds {
                    self.sigma.variants(b).unwrap_or(&[]).to_vec()
                } else {
                    let first = g.goals[0].as_ctor().map(|(c, _)| c.clone());
                    match first {
                        Some(c)
                            if g.goals
                                .iter()
                                .all(|v| v.as_ctor().is_some_and(|(d, _)| *d == c)) =>
                        {
                            vec![c]
                        }
                        _ => vec![],
                    }
                };
                for c in ctors {
                    if bound(&best) < 2 {
                        break;
                    }
                    let (arg_ty, _) = self.sigma.ctor(&c).expect("declared constructor");
                    let sub = Goal {
                        goals: g
                            .goals
                            .iter()
                            .map(|v| v.as_ctor().unwrap().1.clone())
                            .collect(),
                        ty: arg_ty.clone(),
                        ..g.clone()
                    };
                    if let Some(a) = self.solve(&sub, bound(&best) - 1)? {
                        self.fire("IRefine-Ctor");
                        best = Some(Intro::Ctor(c, Arc::new(a)));
                    }
                }
            }
            Type::Arrow(..) => {
                let all_fns = g.goals.iter().all(|v| v.as_partial_fn().is_some());
                if all_fns && bound(&best) >= 2 {
                    if let Some(f) = self.refine_fix(g, bound(&best))? {
                        self.fire("IRefine-Fix");
                        best = Some(f);
                    }
                }
            }
        }

        if g.ty.is_base() {
            if let Some(e) = self.guess(g, bound(&best))? {
                self.fire("IRefine-Guess");
                best = Some(Intro::Elim(e));
            }
        }

        let matchable = matches!(g.ty, Type::Base(_) | Type::Product(_));
        if matchable && g.depth < self.limits.max_match_depth && g.goals.len() >= 2 {
            if let Some(m) = self.refine_match(g, bound(&best))? {
                self.fire("IRefine-Match");
                best = Some(m);
            }
        }
        Ok(best)
    }

    fn refine_tuple(
        &mut self,
        g: &Goal,
        ts: &[Type],
        bound: usize,
    ) -> Result<Option<Intro>, Abort> {
        let m = ts.len();
        let mut rem = bound - 1;
        let mut parts = Vec::with_capacity(m);
        for (j, t) in ts.iter().enumerate() {
            let reserve = m - j - 1;
            if rem < reserve + 1 {
                return Ok(None);
            }
            let sub = Goal {
                goals: g
                    .goals
                    .iter()
                    .map(|v| v.as_tuple().unwrap()[j].clone())
                    .collect(),
                ty: t.clone(),
                ..g.clone()
            };
            match self.solve(&sub, rem - reserve)? {
                Some(i) => {
                    rem -= i.size();
                    parts.push(i);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Intro::Tuple(parts)))
    }

    fn refine_fix(&mut self, g: &Goal, bound: usize) -> Result<Option<Intro>, Abort> {
        let c = (*self.ctxs[g.ctx]).clone();
        let fname = match &c.top_name {
            Some(n) => n.clone(),
            None => fresh(&c.used, FIX_NAMES),
        };
        let mut used = c.used.clone();
        used.push(fname.clone());
        let arg = fresh(&used, ARG_NAMES);
        let mut sigmas = Vec::new();
        let mut goals = Vec::new();
        for (sigma, goal) in self.envs[g.env].iter().zip(g.goals.iter()) {
            let pf = goal.as_partial_fn().unwrap();
            for (input, output) in pf.cases() {
                let mut s = sigma.clone();
                s.push((Elim::Var(fname.clone()), goal.clone()));
                s.push((Elim::Var(arg.clone()), input.clone()));
                sigmas.push(s);
                goals.push(output.clone());
            }
        }
        let (dom, cod) = g.ty.as_arrow().unwrap();
        let (dom, cod) = (dom.clone(), cod.clone());
        let (ctx, sigmas) = self.enter_fix(c, &fname, &arg, &g.ty, sigmas);
        let env = self.intern_env(sigmas);
        let sub = Goal {
            ctx,
            env,
            goals: goals.into(),
            ty: cod.clone(),
            depth: g.depth,
        };
        Ok(self.solve(&sub, bound - 1)?.map(|body| {
            Intro::Fix(Arc::new(FixIntro {
                fname,
                arg,
                dom,
                cod,
                body,
            }))
        }))
    }

    /// The first elimination form of the smallest size that produces every
    /// goal in its world.
    fn guess(&mut self, g: &Goal, bound: usize) -> Result<Option<Elim>, Abort> {
        for s in 1..=bound {
            self.tick()?;
            self.ensure_built(g.ctx, s);
            let idxs = self.elims[g.ctx].by_size[s].clone();
            for idx in idxs {
                if self.elims[g.ctx].entries[idx].ty != g.ty {
                    continue;
                }
                self.stats.guesses += 1;
                let ok = g.goals.is_empty() || {
                    let vs = self.values(g.ctx, g.env, idx);
                    vs.iter()
                        .zip(g.goals.iter())
                        .all(|(v, goal)| v.as_ref() == Some(goal))
                };
                if ok {
                    return Ok(Some(self.elims[g.ctx].entries[idx].elim.clone()));
                }
            }
        }
        Ok(None)
    }

    fn refine_match(&mut self, g: &Goal, bound: usize) -> Result<Option<Intro>, Abort> {
        let mut best: Option<Intro> = None;
        let mut seen: HashSet<(Arc<[Option<Value>]>, Vec<bool>)> = HashSet::new();
        let c = self.ctxs[g.ctx].clone();
        for k in 1..=self.limits.max_scrutinee_size {
            let cur = best.as_ref().map_or(bound, |b| b.size() - 1);
            // match node + scrutinee + at least two branches of two nodes
            if cur < 1 + k + 4 {
                break;
            }
            self.ensure_built(g.ctx, k);
            let idxs = self.elims[g.ctx].by_size[k].clone();
            for idx in idxs {
                self.tick()?;
                let Type::Base(base) = self.elims[g.ctx].entries[idx].ty.clone() else {
                    continue;
                };
                let variants: Vec<Name> = self.sigma.variants(&base).unwrap_or(&[]).to_vec();
                let cur = best.as_ref().map_or(bound, |b| b.size() - 1);
                if cur < 1 + k + 2 * variants.len() {
                    continue;
                }
                let scrutinee = self.elims[g.ctx].entries[idx].elim.clone();
                let vs = self.values(g.ctx, g.env, idx);
                let splits: Vec<bool> = c.frames.iter().map(|f| f.splits(&scrutinee)).collect();
                if !seen.insert((vs.clone(), splits)) {
                    continue;
                }
                self.stats.scrutinees += 1;
                let Some(parts) = partition(&vs, &variants) else {
                    continue;
                };
                if !super::informative(&parts.iter().map(Vec::len).collect::<Vec<_>>()) {
                    continue;
                }
                if let Some(m) =
                    self.match_branches(g, &c, &scrutinee, &variants, &parts, &vs, cur)?
                {
                    best = Some(m);
                }
            }
        }
        Ok(best)
    }

    #[allow(clippy::too_many_arguments)]
    fn match_branches(
        &mut self,
        g: &Goal,
        c: &Ctx,
        scrutinee: &Elim,
        variants: &[Name],
        parts: &[Vec<usize>],
        vs: &[Option<Value>],
        bound: usize,
    ) -> Result<Option<Intro>, Abort> {
        let mut rem = bound - 1 - scrutinee.size();
        let mut branches = Vec::with_capacity(variants.len());
        let env = self.envs[g.env].clone();
        for (j, ctor) in variants.iter().enumerate() {
            let reserve = 2 * (variants.len() - j - 1);
            if rem < reserve + 2 {
                return Ok(None);
            }
            let (arg_ty, _) = self.sigma.ctor(ctor).expect("declared constructor");
            let arg_ty = arg_ty.clone();
            let binder = fresh(&c.used, BINDER_NAMES);
            let mut inner = c.clone();
            inner.used.push(binder.clone());
            inner.frames = after_match(&c.frames, scrutinee, &binder);
            let mut sigmas = Vec::with_capacity(parts[j].len());
            let mut goals = Vec::with_capacity(parts[j].len());
            for &i in &parts[j] {
                let payload = vs[i].as_ref().and_then(Value::as_ctor).unwrap().1.clone();
                let mut s = env[i].clone();
                s.push((Elim::Var(binder.clone()), payload));
                sigmas.push(s);
                goals.push(g.goals[i].clone());
            }
            let (ctx, sigmas) = self.bind(inner, sigmas, vec![(Elim::Var(binder.clone()), arg_ty)]);
            let env_id = self.intern_env(sigmas);
            let sub = Goal {
                ctx,
                env: env_id,
                goals: goals.into(),
                ty: g.ty.clone(),
                depth: g.depth + 1,
            };
            match self.solve(&sub, rem - reserve - 1)? {
                Some(body) => {
                    rem -= 1 + body.size();
                    branches.push(IntroBranch {
                        ctor: ctor.clone(),
                        binder,
                        body,
                    });
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Intro::Match(scrutinee.clone(), branches)))
    }
}

/// World indices grouped by the constructor the scrutinee evaluates to, or
/// `None` if it fails to produce a constructor in some world.
fn partition(vs: &[Option<Value>], variants: &[Name]) -> Option<Vec<Vec<usize>>> {
    let mut parts = vec![Vec::new(); variants.len()];
    for (i, v) in vs.iter().enumerate() {
        let (c, _) = v.as_ref()?.as_ctor()?;
        let j = variants.iter().position(|x| x == c)?;
        parts[j].push(i);
    }
    Some(parts)
}
