//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Every export takes model source text and returns JSON or DOT as a string,
//! so the page needs no extra glue beyond `JSON.parse`.

use serde::Serialize;
use tm_core::engine::{behavior_from_precedence, infer_dependencies, linearize, simulate as run};
use tm_core::render::{render as render_dot, summarize, RenderMode, RenderOptions, Report};
use tm_core::{Diagnostic, StaticModel};
use wasm_bindgen::prelude::*;

const SAMPLES: [(&str, &str); 4] = [
    (
        "stock_goods",
        include_str!("../../../corpus/stock_goods.tm"),
    ),
    ("railway", include_str!("../../../corpus/railway.tm")),
    ("script", include_str!("../../../corpus/script.tm")),
    ("propp", include_str!("../../../corpus/propp.tm")),
];

#[derive(Serialize)]
struct Event {
    id: String,
    label: Option<String>,
    after: Vec<String>,
}

#[derive(Serialize)]
struct CheckResult {
    diagnostics: Vec<String>,
    errors: usize,
    summary: Report,
    events: Vec<Event>,
    /// Declared edges, or the inferred ones when no behavior block exists.
    edges: Vec<(String, String)>,
    order: Option<Vec<String>>,
}

#[derive(Serialize)]
struct Step {
    event: String,
    lines: Vec<String>,
    held: Vec<(String, usize)>,
}

#[derive(Serialize)]
struct SimResult {
    diagnostics: Vec<String>,
    steps: Vec<Step>,
}

fn lines(diags: &[Diagnostic]) -> Vec<String> {
    diags.iter().map(|d| d.render("model.tm")).collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn model_or_err(source: &str) -> Result<StaticModel, String> {
    let checked = tm_core::check(source, &Default::default());
    if checked.has_errors() {
        return Err(lines(&checked.diagnostics).join("\n"));
    }
    checked.model.ok_or_else(|| "no model".to_string())
}

/// Names of the bundled sample models.
#[wasm_bindgen]
pub fn samples() -> String {
    to_json(&SAMPLES.iter().map(|(n, _)| *n).collect::<Vec<_>>())
}

#[wasm_bindgen]
pub fn sample(name: &str) -> Option<String> {
    SAMPLES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s.to_string())
}

/// Diagnostics, summary counts, events and a chronology for drawing.
#[wasm_bindgen]
pub fn check(source: &str) -> String {
    let checked = tm_core::check(source, &Default::default());
    let errors = checked.diagnostics.iter().filter(|d| d.is_error()).count();
    let mut result = CheckResult {
        diagnostics: lines(&checked.diagnostics),
        errors,
        summary: checked
            .model
            .as_ref()
            .map(summarize)
            .unwrap_or_default()
            .with_diagnostics(&checked.diagnostics),
        events: Vec::new(),
        edges: Vec::new(),
        order: None,
    };
    if let Some(model) = checked.model.as_ref().filter(|_| errors == 0) {
        let relation = infer_dependencies(model);
        result.events = model
            .events
            .iter()
            .map(|e| Event {
                id: e.id.clone(),
                label: e.label.clone(),
                after: relation
                    .predecessors(&e.id)
                    .into_iter()
                    .map(String::from)
                    .collect(),
            })
            .collect();
        let graph = model
            .behavior
            .clone()
            .unwrap_or_else(|| behavior_from_precedence(model));
        result.order = linearize(&graph).ok();
        result.edges = graph.edges;
    }
    to_json(&result)
}

/// DOT text. `mode` is `static`, `dynamic` or `behavior`; `highlight` is a
/// comma-separated list of event ids for dynamic mode.
#[wasm_bindgen]
pub fn render(source: &str, mode: &str, highlight: &str) -> Result<String, JsError> {
    let model = model_or_err(source).map_err(|e| JsError::new(&e))?;
    let mode = match mode {
        "static" => RenderMode::Static,
        "dynamic" => RenderMode::Dynamic,
        "behavior" => RenderMode::Behavior,
        other => return Err(JsError::new(&format!("unknown mode `{other}`"))),
    };
    let ids: Vec<String> = highlight
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    let opts = RenderOptions {
        mode,
        highlight_events: (!ids.is_empty()).then_some(ids),
        ..RenderOptions::default()
    };
    render_dot(&model, &opts).map_err(|e| JsError::new(&e.to_string()))
}

/// Trace grouped by event, with tokens held per machine after each step.
#[wasm_bindgen]
pub fn simulate(source: &str) -> Result<String, JsError> {
    simulate_json(source).map_err(|e| JsError::new(&e))
}

fn simulate_json(source: &str) -> Result<String, String> {
    let model = model_or_err(source)?;
    let graph = model
        .behavior
        .clone()
        .unwrap_or_else(|| behavior_from_precedence(&model));
    let order = linearize(&graph).map_err(|e| e.to_string())?;
    let trace = run(&model, &order).map_err(|e| e.to_string())?;
    let text = trace.to_text(&model);
    let mut all = text.lines();
    let steps = trace
        .steps
        .iter()
        .map(|s| Step {
            event: s.event.clone(),
            lines: all
                .by_ref()
                .take(s.firings.len())
                .map(String::from)
                .collect(),
            held: s
                .ledger
                .iter()
                .filter(|(_, &n)| n > 0)
                .map(|(&m, &n)| (model.machine_path(m), n))
                .collect(),
        })
        .collect();
    Ok(to_json(&SimResult {
        diagnostics: lines(&trace.diagnostics),
        steps,
    }))
}
