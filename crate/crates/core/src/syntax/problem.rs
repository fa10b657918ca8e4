use super::ast::{Name, PartialFn, Type, Value};

/// One `type` declaration: a base type and its single-argument constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataDecl {
    pub name: Name,
    pub ctors: Vec<(Name, Type)>,
}

/// Datatype declarations in source order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub types: Vec<DataDecl>,
}

impl Declarations {
    pub fn get(&self, base: &str) -> Option<&DataDecl> {
        self.types.iter().find(|d| &*d.name == base)
    }

    /// `(zero, succ)` when `base` is shaped like the naturals: exactly two
    /// constructors, one carrying unit and one carrying `base` itself.
    pub fn nat_shape(&self, base: &str) -> Option<(Name, Name)> {
        let d = self.get(base)?;
        if d.ctors.len() != 2 {
            return None;
        }
        let me = Type::Base(d.name.clone());
        let (a, b) = (&d.ctors[0], &d.ctors[1]);
        match (&a.1, &b.1) {
            (Type::Unit, t) if *t == me => Some((a.0.clone(), b.0.clone())),
            (t, Type::Unit) if *t == me => Some((b.0.clone(), a.0.clone())),
            _ => None,
        }
    }

    /// `(nil, cons, element)` when `base` is shaped like a list: one
    /// constructor carrying unit and one carrying `element * base`.
    pub fn list_shape(&self, base: &str) -> Option<(Name, Name, Type)> {
        let d = self.get(base)?;
        if d.ctors.len() != 2 {
            return None;
        }
        let me = Type::Base(d.name.clone());
        let cons_elem = |t: &Type| match t {
            Type::Product(ts) if ts.len() == 2 && ts[1] == me => Some(ts[0].clone()),
            _ => None,
        };
        let (a, b) = (&d.ctors[0], &d.ctors[1]);
        match (&a.1, &b.1) {
            (Type::Unit, t) => cons_elem(t).map(|e| (a.0.clone(), b.0.clone(), e)),
            (t, Type::Unit) => cons_elem(t).map(|e| (b.0.clone(), a.0.clone(), e)),
            _ => None,
        }
    }
}

/// A library function available to the synthesizer, specified only by its
/// input-output behavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LibraryBinding {
    pub name: Name,
    pub ty: Type,
    pub examples: PartialFn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisProblem {
    pub decls: Declarations,
    pub library: Vec<LibraryBinding>,
    pub goal_name: Name,
    pub goal_type: Type,
    /// The goal example; a partial function whenever the goal is a function.
    pub examples: Value,
}

impl SynthesisProblem {
    /// Number of top-level input-output cases, counting every fully applied
    /// path through nested partial functions.
    pub fn example_count(&self) -> usize {
        fn count(v: &Value) -> usize {
            match v {
                Value::PartialFn(pf) => pf.cases().iter().map(|(_, out)| count(out)).sum(),
                _ => 1,
            }
        }
        count(&self.examples)
    }

    /// The same problem with one fully applied case removed (cases numbered
    /// as by [`SynthesisProblem::example_count`]).
    pub fn without_example(&self, index: usize) -> SynthesisProblem {
        fn drop(v: &Value, index: &mut usize) -> Option<Value> {
            match v {
                Value::PartialFn(pf) => {
                    let mut kept = Vec::new();
                    for (k, out) in pf.cases() {
                        if let Some(o) = drop(out, index) {
                            kept.push((k.clone(), o));
                        }
                    }
                    if kept.is_empty() {
                        None
                    } else {
                        Some(Value::PartialFn(
                            PartialFn::new(kept).expect("subset of distinct keys"),
                        ))
                    }
                }
                _ => {
                    let keep = *index != 0;
                    *index = index.wrapping_sub(1);
                    keep.then(|| v.clone())
                }
            }
        }
        let mut i = index;
        let examples = drop(&self.examples, &mut i)
            .unwrap_or_else(|| Value::PartialFn(PartialFn::new(vec![]).unwrap()));
        SynthesisProblem {
            examples,
            ..self.clone()
        }
    }
}
