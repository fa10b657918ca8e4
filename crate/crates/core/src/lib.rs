//! Type-directed program synthesis from input-output examples over a simply
//! typed lambda calculus with algebraic datatypes and tuples.

pub mod bench;
pub mod census;
pub mod eval;
pub mod focusing;
pub mod parallel;
pub mod syntax;
pub mod synthesis;
pub mod typecheck;
