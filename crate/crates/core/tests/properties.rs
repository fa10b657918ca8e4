mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{
    as_set, bool_t, decls, nat, random_state, random_type, sigma, well_formed, world_sets,
};
use prodsynth::eval::step;
use prodsynth::focusing::{focus_closure_with, focus_step, potential, FocusOrder};
use prodsynth::syntax::{
    name, parse_expr, pretty_print, Branch, Elim, Expr, FixExpr, Name, Sugar, Type,
};
use prodsynth::typecheck::{check, extract_vars, BindingContext};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn focusing_progress_preservation_and_bound(seed in any::<u64>()) {
        let start = random_state(seed);
        prop_assert!(well_formed(&start));
        let budget = potential(&start.omega);
        let mut cur = start;
        let mut steps = 0;
        loop {
            let phi = potential(&cur.omega);
            match focus_step(&cur).unwrap() {
                Some((next, _)) => {
                    prop_assert!(well_formed(&next));
                    prop_assert!(potential(&next.omega) < phi);
                    steps += 1;
                    cur = next;
                }
                None => {
                    prop_assert!(cur.omega.is_empty());
                    break;
                }
            }
        }
        prop_assert!(steps <= budget);
    }

    #[test]
    fn focusing_order_does_not_matter(seed in any::<u64>()) {
        let start = random_state(seed);
        let (a, _) = focus_closure_with(&start, FocusOrder::Fifo).unwrap();
        let (b, _) = focus_closure_with(&start, FocusOrder::Lifo).unwrap();
        prop_assert_eq!(as_set(&a.gamma), as_set(&b.gamma));
        prop_assert_eq!(as_set(&a.delta), as_set(&b.delta));
        prop_assert_eq!(world_sets(&a), world_sets(&b));
    }
}

// A stepper written rule by rule from the small-step semantics, returning
// every result any rule allows; the production stepper must agree with it
// and the rules must never overlap.

fn ref_subst(e: &Expr, x: &Name, with: &Expr) -> Expr {
    let go = |e: &Expr| ref_subst(e, x, with);
    match e {
        Expr::Var(y) if y == x => with.clone(),
        Expr::Var(_) | Expr::Unit | Expr::PartialFn(_) => e.clone(),
        Expr::Ctor(c, a) => Expr::Ctor(c.clone(), Box::new(go(a))),
        Expr::Tuple(es) => Expr::Tuple(es.iter().map(go).collect()),
        Expr::Proj(k, a) => Expr::Proj(*k, Box::new(go(a))),
        Expr::App(f, a) => Expr::App(Box::new(go(f)), Box::new(go(a))),
        Expr::Fix(fx) => {
            if &fx.fname == x || &fx.arg == x {
                e.clone()
            } else {
                Expr::Fix(Arc::new(FixExpr {
                    body: go(&fx.body),
                    ..(**fx).clone()
                }))
            }
        }
        Expr::Match(s, bs) => Expr::Match(
            Box::new(go(s)),
            bs.iter()
                .map(|b| Branch {
                    body: if &b.binder == x {
                        b.body.clone()
                    } else {
                        go(&b.body)
                    },
                    ..b.clone()
                })
                .collect(),
        ),
    }
}

fn ref_steps(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    match e {
        // S-Ctor
        Expr::Ctor(c, a) => {
            for a2 in ref_steps(a) {
                out.push(Expr::Ctor(c.clone(), Box::new(a2)));
            }
        }
        // S-Tuple: the first non-value component steps.
        Expr::Tuple(es) => {
            if let Some(k) = es.iter().position(|c| !c.is_value()) {
                for c2 in ref_steps(&es[k]) {
                    let mut es2 = es.clone();
                    es2[k] = c2;
                    out.push(Expr::Tuple(es2));
                }
            }
        }
        Expr::Proj(k, a) => {
            // S-Proj1
            for a2 in ref_steps(a) {
                out.push(Expr::Proj(*k, Box::new(a2)));
            }
            // S-Proj2
            if let Expr::Tuple(es) = &**a {
                if *k >= 1 && *k <= es.len() {
                    out.push(es[k - 1].clone());
                }
            }
        }
        Expr::App(f, a) => {
            // S-App1
            for f2 in ref_steps(f) {
                out.push(Expr::App(Box::new(f2), a.clone()));
            }
            // S-App2
            if let Expr::Fix(fx) = &**f {
                let body = ref_subst(&fx.body, &fx.arg, a);
                out.push(ref_subst(&body, &fx.fname, f));
            }
        }
        Expr::Match(s, bs) => {
            // S-Match1
            for s2 in ref_steps(s) {
                out.push(Expr::Match(Box::new(s2), bs.clone()));
            }
            // S-Match2
            if let Expr::Ctor(c, v) = &**s {
                if v.is_value() {
                    if let Some(b) = bs.iter().find(|b| &b.ctor == c) {
                        out.push(ref_subst(&b.body, &b.binder, v));
                    }
                }
            }
        }
        Expr::Var(_) | Expr::Unit | Expr::Fix(_) | Expr::PartialFn(_) => {}
    }
    out
}

/// Random closed, well-typed terms over nat and bool, built type-directed.
struct TermGen {
    rng: StdRng,
    fresh: usize,
}

impl TermGen {
    fn name(&mut self, prefix: &str) -> Name {
        self.fresh += 1;
        name(&format!("{prefix}{}", self.fresh))
    }

    fn ty(&mut self, depth: u32) -> Type {
        if depth == 0 || self.rng.gen_bool(0.6) {
            return if self.rng.gen_bool(0.5) {
                nat()
            } else {
                bool_t()
            };
        }
        if self.rng.gen_bool(0.5) {
            Type::product(vec![self.ty(depth - 1), self.ty(depth - 1)])
        } else {
            Type::arrow(self.ty(depth - 1), self.ty(depth - 1))
        }
    }

    fn term(&mut self, vars: &[(Name, Type)], ty: &Type, fuel: u32) -> Expr {
        let usable: Vec<&Name> = vars
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| x)
            .collect();
        if fuel == 0 || self.rng.gen_bool(0.25) {
            if !usable.is_empty() && self.rng.gen_bool(0.7) {
                return Expr::Var(usable[self.rng.gen_range(0..usable.len())].clone());
            }
            return self.intro(vars, ty, 0);
        }
        match self.rng.gen_range(0..5) {
            0 => {
                let other = self.ty(1);
                let f = self.term(vars, &Type::arrow(other.clone(), ty.clone()), fuel - 1);
                let a = self.term(vars, &other, fuel - 1);
                Expr::app(f, a)
            }
            1 => {
                let other = self.ty(1);
                let (k, parts) = if self.rng.gen_bool(0.5) {
                    (1, vec![ty.clone(), other])
                } else {
                    (2, vec![other, ty.clone()])
                };
                Expr::proj(k, self.term(vars, &Type::product(parts), fuel - 1))
            }
            2 => {
                let (scrut_ty, ctors) = if self.rng.gen_bool(0.5) {
                    (nat(), vec![("O", Type::Unit), ("S", nat())])
                } else {
                    (bool_t(), vec![("T", Type::Unit), ("F", Type::Unit)])
                };
                let s = self.term(vars, &scrut_ty, fuel - 1);
                let branches = ctors
                    .into_iter()
                    .map(|(c, t)| {
                        let x = self.name("b");
                        let mut inner = vars.to_vec();
                        inner.push((x.clone(), t));
                        Branch {
                            ctor: name(c),
                            binder: x,
                            body: self.term(&inner, ty, fuel - 1),
                        }
                    })
                    .collect();
                Expr::Match(Box::new(s), branches)
            }
            _ => self.intro(vars, ty, fuel - 1),
        }
    }

    fn intro(&mut self, vars: &[(Name, Type)], ty: &Type, fuel: u32) -> Expr {
        match ty {
            Type::Unit => Expr::Unit,
            Type::Base(b) if b.as_ref() == "bool" => {
                Expr::ctor(if self.rng.gen_bool(0.5) { "T" } else { "F" }, Expr::Unit)
            }
            Type::Base(_) => {
                if fuel == 0 || self.rng.gen_bool(0.4) {
                    Expr::ctor("O", Expr::Unit)
                } else {
                    Expr::ctor("S", self.term(vars, &nat(), fuel - 1))
                }
            }
            Type::Product(ts) => Expr::Tuple(
                ts.iter()
                    .map(|t| self.term(vars, t, fuel.saturating_sub(1)))
                    .collect(),
            ),
            Type::Arrow(dom, cod) => {
                let f = self.name("f");
                let x = self.name("x");
                let mut inner = vars.to_vec();
                inner.push((f.clone(), ty.clone()));
                inner.push((x.clone(), (**dom).clone()));
                let body = self.term(&inner, cod, fuel.saturating_sub(1));
                Expr::Fix(Arc::new(FixExpr {
                    fname: f,
                    arg: x,
                    dom: (**dom).clone(),
                    cod: (**cod).clone(),
                    body,
                }))
            }
        }
    }
}

/// Draws until the term has at most 12 nodes.
fn random_term(seed: u64) -> (Expr, Type) {
    let mut g = TermGen {
        rng: StdRng::seed_from_u64(seed),
        fresh: 0,
    };
    loop {
        let ty = if g.rng.gen_bool(0.5) { nat() } else { g.ty(2) };
        let e = g.term(&[], &ty, 4);
        if e.size() <= 12 {
            return (e, ty);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stepper_follows_the_rules(seed in any::<u64>()) {
        let (e, ty) = random_term(seed);
        prop_assert_eq!(check(&sigma(), &[], &e, &ty), Ok(true));
        let mut cur = e;
        for _ in 0..200 {
            let expected = ref_steps(&cur);
            // The rules overlap in one place: projecting out of a tuple that
            // still has work left, where the projection rule wins.
            if expected.len() > 1 {
                prop_assert!(matches!(&cur, Expr::Proj(_, t) if matches!(**t, Expr::Tuple(_))), "rules overlap on {:?}", cur);
                prop_assert_eq!(expected.len(), 2);
            }
            let got = step(&cur);
            prop_assert_eq!(got.is_some(), !expected.is_empty());
            if let Some(next) = &got {
                prop_assert!(expected.contains(next));
                if let Expr::Proj(k, t) = &cur {
                    if let Expr::Tuple(es) = &**t {
                        prop_assert_eq!(next, &es[k - 1]);
                    }
                }
            }
            match got {
                Some(next) => cur = next,
                None => {
                    prop_assert!(cur.is_value(), "well-typed term got stuck: {:?}", cur);
                    break;
                }
            }
        }
    }
}

// Round trip through the printer and parser.

fn random_expr(rng: &mut StdRng, depth: u32) -> Expr {
    const VARS: [&str; 4] = ["x", "y", "ls", "acc"];
    let leaf = |rng: &mut StdRng| match rng.gen_range(0..4) {
        0 => Expr::Unit,
        1 => Expr::ctor("O", Expr::Unit),
        2 => Expr::ctor("Nil", Expr::Unit),
        _ => Expr::var(VARS[rng.gen_range(0..VARS.len())]),
    };
    if depth == 0 {
        return leaf(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => leaf(rng),
        1 => Expr::ctor("S", random_expr(rng, d)),
        2 => Expr::ctor(
            "Cons",
            Expr::Tuple(vec![random_expr(rng, d), random_expr(rng, d)]),
        ),
        3 => Expr::Tuple(
            (0..rng.gen_range(2..=3))
                .map(|_| random_expr(rng, d))
                .collect(),
        ),
        4 => Expr::proj(rng.gen_range(1..=2), random_expr(rng, d)),
        5 => Expr::app(random_expr(rng, d), random_expr(rng, d)),
        6 => Expr::matches(
            random_expr(rng, d),
            vec![
                ("O", "p", random_expr(rng, d)),
                ("S", "q", random_expr(rng, d)),
            ],
        ),
        7 => Expr::ctor(if rng.gen_bool(0.5) { "T" } else { "F" }, Expr::Unit),
        _ => {
            let dom = random_type(rng, 1);
            let cod = random_type(rng, 1);
            Expr::fix("f", "x", dom, cod, random_expr(rng, d))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_expr(&mut rng, 4);
        for sugar in [Sugar::from_decls(&decls()), Sugar::default()] {
            let text = pretty_print(&e, &sugar);
            let back = parse_expr(&text, &sugar);
            prop_assert_eq!(back.as_ref(), Ok(&e), "printed as {}", text);
        }
    }

    #[test]
    fn size_grows_with_nesting(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_expr(&mut rng, 4);
        for c in e.children() {
            prop_assert!(e.size() > c.size());
        }
    }

    #[test]
    fn literals_desugar(n in 0u64..10_000, len in 0usize..1000) {
        let sugar = Sugar::from_decls(&decls());
        let e = parse_expr(&n.to_string(), &sugar).unwrap();
        prop_assert_eq!(e.size() as u64, n + 2);
        let items = vec!["0"; len].join("; ");
        let l = parse_expr(&format!("[{items}]"), &sugar).unwrap();
        prop_assert_eq!(l.size(), len * 4 + 2);
    }
}

#[test]
fn vars_extraction_is_idempotent() {
    let mut c = BindingContext::new();
    c.push(Elim::var(&name("x")), nat()).unwrap();
    c.push(Elim::var(&name("p")), Type::product(vec![nat(), bool_t()]))
        .unwrap();
    c.push(Elim::var(&name("p")).proj(1), nat()).unwrap();
    let once = extract_vars(&[&c]);
    let image = BindingContext::from_entries(
        once.iter()
            .map(|(x, t)| (Elim::var(x), t.clone()))
            .collect(),
    )
    .unwrap();
    assert_eq!(extract_vars(&[&image]), once);
    assert_eq!(once.len(), 2);
}
