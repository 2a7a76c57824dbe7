//! Concrete effect monads with Kleisli structure, coproduct helpers, the
//! pointwise information order, and least-fixed-point iteration.

mod iterate;
mod kleisli;
mod space;
mod value;

pub use iterate::{iterate, Approx, ApproximantSeq, IterPolicy};
pub use kleisli::{unit, KleisliMap};
pub use space::{Carrier, Point, PureMap, Space};
pub use value::{render_word, EffectValue, MonadId, Word};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EffectError {
    #[error("duplicate element `{element}` in carrier `{carrier}`")]
    DuplicateElement { carrier: String, element: String },
    #[error("point {point} does not belong to space {space}")]
    UnknownElement { point: String, space: String },
    #[error("table is not total: expected {expected} entries, got {got}")]
    NotTotal { expected: usize, got: usize },
    #[error("monad mismatch: expected {expected}, got {got}")]
    MonadMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("space mismatch: expected {expected}, got {got}")]
    SpaceMismatch { expected: String, got: String },
    #[error("trace alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("chain is not monotone")]
    NonMonotoneChain,
    #[error("iteration did not stabilize within {window} steps; last approximant: {last}")]
    NonConvergence { window: usize, last: String },
    #[error("enumeration budget exceeded: needs {required}")]
    BudgetExceeded { required: String },
    #[error("unsupported operation: {what}")]
    Unsupported { what: String },
    #[error("signature error: {0}")]
    Signature(String),
}
