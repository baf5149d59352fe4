//! Graphviz DOT output and model summaries.

mod dot;
mod report;

pub use dot::{
    render, render_behavior, render_dynamic, render_static, RankDir, RenderError, RenderMode,
    RenderOptions, PALETTE,
};
pub use report::{summarize, DiagnosticSummary, Report, StageCounts};
