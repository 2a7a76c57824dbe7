//! Effect monads with uniform iteration, lazy coalgebraic resumption trees,
//! algebras with iteration, and a small process-specification language whose
//! guarded systems are solved by corecursion and whose trace semantics is
//! computed by collapsing stepwise processes into the trace monad.
//!
//! The crate is organized bottom-up:
//!
//! - [`effects`]: the maybe, finite-powerset, and trace-powerset monads over
//!   finite carriers, their Kleisli structure, and Kleene iteration;
//! - [`signatures`]: polynomial signatures (action prefixes, delay, generic
//!   operation symbols);
//! - [`pmonad`]: the combined functor `T(A + Σ X)` with its parameterized
//!   unit and multiplication;
//! - [`resumption`]: lazy, memoized trees forming the final coalgebra of
//!   `T(X + Σ -)`, with coiteration, primitive corecursion, a monad
//!   structure, and depth-bounded observation;
//! - [`elgot`]: algebras with an iteration operator (solution, functoriality
//!   and compositionality laws), continuous and free instances, and the
//!   correspondence with evaluators of resumption trees;
//! - [`laws`]: exhaustive and randomized checking of the monad-level
//!   iteration laws;
//! - [`bridge`]: the collapsing of delay processes into one-shot effects,
//!   trace extraction, and the passage between monad-level and
//!   algebra-level iteration;
//! - [`proclang`]: parser, guardedness checker, compiler, and solver for
//!   textual recursive process specifications.

// Structure maps and iteration operators are higher-order by nature.
#![allow(clippy::type_complexity)]
// Ordered collections are keyed by tree handles; their ordering is the
// immutable node id, never the memoized contents.
#![allow(clippy::mutable_key_type)]

pub mod bridge;
pub mod effects;
pub mod elgot;
pub mod laws;
pub mod pmonad;
pub mod proclang;
pub mod resumption;
pub mod signatures;

pub use effects::{Approx, Carrier, EffectError, EffectValue, IterPolicy, KleisliMap, MonadId,
    Point, PureMap, Space, Word};
pub use pmonad::{HashItem, HashValue, Inst, PMonadInstance};
pub use resumption::{ResTree, Trunc};
pub use signatures::{Signature, SigmaLayer};
