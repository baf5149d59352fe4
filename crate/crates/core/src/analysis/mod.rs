//! Name resolution and the TM legality rule set.

mod resolve;
mod rules;

pub use resolve::{build_model, resolve, Resolved};
pub use rules::{
    classify_flow, region_connected, validate, validate_with, FlowClass, RuleId, Strictness,
    ValidateOptions, INTRA_FLOWS,
};
