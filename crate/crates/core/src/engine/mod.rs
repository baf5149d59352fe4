//! Event semantics: precedence inference, chronology checks, linearization
//! and token-flow simulation.

mod chronology;
mod precedence;
pub mod simulate;

pub use chronology::{behavior_from_precedence, linearize, validate_behavior, ChronologyError};
pub use precedence::{infer_dependencies, PrecedenceRelation};
pub use simulate::{simulate, EventTrace, SimulateError, Token, TokenId, TraceStep};
