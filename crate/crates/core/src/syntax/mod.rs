//! Abstract syntax, the surface-syntax parser, and the pretty-printer.

pub mod ast;
mod lexer;
pub mod normal;
mod parser;
pub mod printer;
mod problem;

pub use ast::{name, Branch, Example, Expr, FixExpr, Name, PartialFn, Type, Value};
pub use normal::{Elim, FixIntro, Intro, IntroBranch};
pub use parser::{parse_expr, parse_problem, parse_type};
pub use printer::{pretty_print, print_value, Sugar};
pub use problem::{DataDecl, Declarations, LibraryBinding, SynthesisProblem};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("constructor `{0}` is declared more than once")]
    DuplicateConstructor(String),
    #[error("type `{0}` is declared more than once")]
    DuplicateType(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("{line}:{col}: contradictory examples for input {input}")]
    ContradictoryExamples {
        line: usize,
        col: usize,
        input: String,
    },
    #[error("{line}:{col}: {message}")]
    IllTypedExample {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("expected exactly one `let ... = ?` goal, found {0}")]
    GoalCount(usize),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}
