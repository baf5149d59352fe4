//! Toolkit for Thinging Machine (TM) conceptual models written in the `.tm`
//! language: parsing and canonical formatting, name resolution and legality
//! rules, event decomposition and chronology checks, token-flow simulation,
//! and Graphviz DOT rendering.

pub mod analysis;
pub mod diagnostic;
pub mod engine;
pub mod generate;
pub mod model;
mod pipeline;
pub mod render;
pub mod syntax;

pub use diagnostic::{Diagnostic, Severity, Span};
pub use model::{
    Arc, ArcId, ArcKind, BehaviorGraph, ElementId, EventDef, LookupError, MachineId, MachineNode,
    ModelBuilder, ModelError, Region, Stage, StageId, StageKind, StaticModel,
};
pub use pipeline::{check, CheckOptions, Checked};
