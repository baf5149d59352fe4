use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{ArcKind, MachineId, StageId, StaticModel};

/// Set3 from ColorBrewer; assigned by event declaration order, cycling.
pub const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenderMode {
    #[default]
    Static,
    Dynamic,
    Behavior,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RankDir {
    #[default]
    LR,
    TB,
}

impl RankDir {
    fn as_str(self) -> &'static str {
        match self {
            RankDir::LR => "LR",
            RankDir::TB => "TB",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    pub mode: RenderMode,
    pub rankdir: RankDir,
    pub show_labels: bool,
    /// Dynamic mode only: annotate just these events.
    pub highlight_events: Option<Vec<String>>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            mode: RenderMode::Static,
            rankdir: RankDir::LR,
            show_labels: true,
            highlight_events: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("dynamic rendering needs at least one event")]
    NoEvents,
    #[error("behavior rendering needs a behavior block")]
    NoBehavior,
    #[error("unknown event `{0}` in highlight list")]
    UnknownEvent(String),
}

pub fn render(model: &StaticModel, opts: &RenderOptions) -> Result<String, RenderError> {
    match opts.mode {
        RenderMode::Static => Ok(render_static(model, opts)),
        RenderMode::Dynamic => render_dynamic(model, opts),
        RenderMode::Behavior => render_behavior(model, opts),
    }
}

/// Quoted DOT string.
pub(crate) fn q(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn stage_node(id: StageId) -> String {
    format!("s{}", id.0)
}

/// Per-stage and per-arc colors for dynamic mode.
struct Annotation {
    stage_events: BTreeMap<StageId, Vec<usize>>,
    arc_events: BTreeMap<crate::model::ArcId, Vec<usize>>,
}

pub fn render_static(model: &StaticModel, opts: &RenderOptions) -> String {
    write_graph(model, opts, None)
}

/// Static rendering plus one fill color per event region and a legend.
/// Stages in several regions are striped with each region's color.
pub fn render_dynamic(model: &StaticModel, opts: &RenderOptions) -> Result<String, RenderError> {
    if model.events.is_empty() {
        return Err(RenderError::NoEvents);
    }
    let selected: Vec<usize> = match &opts.highlight_events {
        None => (0..model.events.len()).collect(),
        Some(ids) => ids
            .iter()
            .map(|id| {
                model
                    .event_position(id)
                    .ok_or_else(|| RenderError::UnknownEvent(id.clone()))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut ann = Annotation {
        stage_events: BTreeMap::new(),
        arc_events: BTreeMap::new(),
    };
    let mut selected_sorted = selected.clone();
    selected_sorted.sort_unstable();
    selected_sorted.dedup();
    for &i in &selected_sorted {
        let region = &model.events[i].region;
        for &s in &region.stages {
            ann.stage_events.entry(s).or_default().push(i);
        }
        for &a in &region.arcs {
            ann.arc_events.entry(a).or_default().push(i);
        }
    }
    let mut out = write_graph(model, opts, Some(&ann));
    // legend goes before the closing brace
    out.truncate(out.len() - 2);
    out.push_str("  subgraph \"cluster_legend\" {\n    label=\"Events\";\n");
    for &i in &selected_sorted {
        let ev = &model.events[i];
        let mut text = ev.id.clone();
        if opts.show_labels {
            if let Some(l) = &ev.label {
                text.push_str(": ");
                text.push_str(l);
            }
            if let Some(t) = &ev.time {
                let _ = write!(text, " [time: {t}]");
            }
        }
        let _ = writeln!(
            out,
            "    {} [shape=box, style=filled, fillcolor={}, label={}];",
            q(&format!("event_{}", ev.id)),
            q(PALETTE[i % PALETTE.len()]),
            q(&text)
        );
    }
    out.push_str("  }\n}\n");
    Ok(out)
}

fn write_graph(model: &StaticModel, opts: &RenderOptions, ann: Option<&Annotation>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", q("tm"));
    let _ = writeln!(out, "  rankdir={};", opts.rankdir.as_str());
    out.push_str("  node [shape=box, style=rounded, fontname=\"Helvetica\"];\n");
    for &root in &model.roots {
        write_cluster(&mut out, model, root, opts, ann, 1);
    }
    for arc in &model.arcs {
        let mut attrs = Vec::new();
        if arc.kind == ArcKind::Trigger {
            attrs.push("style=dashed".to_string());
        }
        if opts.show_labels {
            let text = match (&arc.name, &arc.label) {
                (Some(n), Some(l)) => Some(format!("{n}: {l}")),
                (Some(n), None) => Some(n.clone()),
                (None, Some(l)) => Some(l.clone()),
                (None, None) => None,
            };
            if let Some(t) = text {
                attrs.push(format!("label={}", q(&t)));
            }
        }
        if let Some(events) = ann.and_then(|a| a.arc_events.get(&arc.id)) {
            attrs.push(format!("color={}", q(&colors(events))));
            attrs.push("penwidth=2".to_string());
        }
        let _ = write!(out, "  {} -> {}", stage_node(arc.src), stage_node(arc.dst));
        if !attrs.is_empty() {
            let _ = write!(out, " [{}]", attrs.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

fn colors(events: &[usize]) -> String {
    events
        .iter()
        .map(|&i| PALETTE[i % PALETTE.len()])
        .collect::<Vec<_>>()
        .join(":")
}

fn write_cluster(
    out: &mut String,
    model: &StaticModel,
    id: MachineId,
    opts: &RenderOptions,
    ann: Option<&Annotation>,
    depth: usize,
) {
    let pad = "  ".repeat(depth);
    let machine = model.machine(id);
    let mut title = machine.name.clone();
    if opts.show_labels {
        if let Some(l) = &machine.label {
            let _ = write!(title, "\n{l}");
        }
    }
    for store in &machine.stores {
        let _ = write!(title, "\n[store: {store}]");
    }
    let _ = writeln!(out, "{pad}subgraph {} {{", q(&format!("cluster_m{}", id.0)));
    let _ = writeln!(out, "{pad}  label={};", q(&title));
    for &s in machine.stages.values() {
        let stage = model.stage(s);
        let mut label = stage.kind.keyword().to_string();
        if opts.show_labels {
            if let Some(l) = &stage.label {
                let _ = write!(label, "\n{l}");
            }
        }
        let mut attrs = Vec::new();
        if let Some(events) = ann.and_then(|a| a.stage_events.get(&s)) {
            let ids: Vec<&str> = events
                .iter()
                .map(|&i| model.events[i].id.as_str())
                .collect();
            let _ = write!(label, "\n[{}]", ids.join(","));
            let style = if events.len() > 1 {
                "striped"
            } else {
                "filled"
            };
            attrs.push("shape=box".to_string());
            attrs.push(format!("style={style}"));
            attrs.push(format!("fillcolor={}", q(&colors(events))));
        }
        attrs.insert(0, format!("label={}", q(&label)));
        let _ = writeln!(out, "{pad}  {} [{}];", stage_node(s), attrs.join(", "));
    }
    for &child in &machine.children {
        write_cluster(out, model, child, opts, ann, depth + 1);
    }
    let _ = writeln!(out, "{pad}}}");
}

/// One node per event, one edge per declared chronology edge.
pub fn render_behavior(model: &StaticModel, opts: &RenderOptions) -> Result<String, RenderError> {
    let behavior = model.behavior.as_ref().ok_or(RenderError::NoBehavior)?;
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", q("behavior"));
    let _ = writeln!(out, "  rankdir={};", opts.rankdir.as_str());
    out.push_str("  node [shape=ellipse, fontname=\"Helvetica\"];\n");
    for id in &behavior.nodes {
        let mut label = id.clone();
        if opts.show_labels {
            if let Some(l) = model.event(id).and_then(|e| e.label.as_ref()) {
                let _ = write!(label, "\n{l}");
            }
        }
        let _ = writeln!(out, "  {} [label={}];", q(id), q(&label));
    }
    for (f, t) in &behavior.edges {
        let _ = writeln!(out, "  {} -> {};", q(f), q(t));
    }
    out.push_str("}\n");
    Ok(out)
}
