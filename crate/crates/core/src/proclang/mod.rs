//! Parser, guardedness checker, compiler, and solver for textual recursive
//! process specifications.
//!
//! A specification file declares a signature and a monad, then one equation
//! per variable:
//!
//! ```text
//! sig actions a b
//! monad powerset
//! x3 = a.x1 + tick
//! x1 = a.(x2 + x3)
//! x2 = a.x1 + b.x3
//! ```
//!
//! `tick` is successful termination, `0` the empty choice, `a.t` prefixing,
//! and `+` (left-associative) choice. With `sig ops`, declared symbols are
//! applied as `g(t,u)`; unary symbols may also prefix. Line comments start
//! with `#`.

mod ast;
mod compile;
mod parse;

pub use ast::{print_spec, MonadChoice, SigDecl, SpecAst, Term};
pub use compile::{check_guarded, compile, ChoiceSide, EquationSystem, Violation};
pub use parse::parse;

use thiserror::Error;

use crate::effects::EffectError;

#[derive(Debug, Error)]
pub enum ProcError {
    #[error("lexical error at {line}:{col}: {message}")]
    Lex {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("variable `{name}` is defined more than once")]
    DuplicateDefinition { name: String },
    #[error("undefined variable `{name}`")]
    UndefinedVariable { name: String },
    #[error("unknown action or operation `{name}`")]
    UnknownAction { name: String },
    #[error("`{name}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("`0` is not expressible under the {monad} monad")]
    StopUnsupported { monad: String },
    #[error("choice is not expressible under the {monad} monad")]
    ChoiceUnsupported { monad: String },
    #[error("trace semantics needs an action or delay signature")]
    TraceModeNeedsActions,
    #[error("{violation}")]
    Unguarded { violation: Violation },
    #[error(transparent)]
    Effect(#[from] EffectError),
}
