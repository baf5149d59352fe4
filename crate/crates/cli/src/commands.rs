use std::fmt::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use tm_core::analysis::{Strictness, ValidateOptions};
use tm_core::engine::{behavior_from_precedence, infer_dependencies, linearize, simulate};
use tm_core::render::{render, summarize, RankDir, RenderMode, RenderOptions, Report};
use tm_core::syntax::{format, parse};
use tm_core::{CheckOptions, Checked, Diagnostic, Severity, StaticModel};

use crate::args::{Cli, Command, Dir, Mode};
use crate::color::Painter;

/// What processing one input produced.
#[derive(Debug, Default)]
pub struct FileOutput {
    pub stdout: String,
    pub stderr: String,
    pub json: Option<Value>,
    pub code: i32,
}

impl FileOutput {
    fn fail(&mut self, code: i32) {
        self.code = self.code.max(code);
    }
}

pub struct Context<'a> {
    pub cli: &'a Cli,
    pub painter: Painter,
    /// Print a header before each file's text output.
    pub headers: bool,
}

impl Context<'_> {
    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            validate: ValidateOptions {
                strictness: if self.cli.lax {
                    Strictness::Lax
                } else {
                    Strictness::Strict
                },
                connected_regions: self.cli.connected_regions,
            },
            acyclic: self.cli.acyclic,
        }
    }

    fn report(&self, out: &mut FileOutput, file: &str, diags: &[Diagnostic]) {
        for d in diags {
            out.stderr.push_str(&self.painter.diagnostic(d, file));
            out.stderr.push('\n');
            if d.is_error() {
                out.fail(1);
            }
        }
    }

    fn error(&self, out: &mut FileOutput, file: &str, message: &str) {
        let _ = writeln!(
            out.stderr,
            "{file}: {}: {message}",
            self.painter.severity(Severity::Error)
        );
        out.fail(1);
    }

    fn header(&self, out: &mut FileOutput, file: &str) {
        if self.headers {
            let _ = writeln!(out.stdout, "==> {file} <==");
        }
    }
}

pub fn process(ctx: &Context<'_>, path: &Path) -> FileOutput {
    let file = path.display().to_string();
    let mut out = FileOutput::default();
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(out.stderr, "tm: cannot read {file}: {e}");
            if ctx.cli.json {
                out.json = Some(serde_json::json!({ "file": file, "error": e.to_string() }));
            }
            out.code = 2;
            return out;
        }
    };
    match &ctx.cli.command {
        Command::Check(_) => check(ctx, &mut out, &file, &source),
        Command::Fmt(_) => fmt(ctx, &mut out, path, &file, &source),
        _ => {
            let checked = tm_core::check(&source, &ctx.check_options());
            ctx.report(&mut out, &file, &checked.diagnostics);
            if out.code > 0 {
                return out;
            }
            let model = checked.model.expect("clean check yields a model");
            match &ctx.cli.command {
                Command::Events(_) => events(ctx, &mut out, &file, &model),
                Command::Behavior(_) => behavior(ctx, &mut out, &file, &model),
                Command::Render(_) => render_dot(ctx, &mut out, &file, &model),
                Command::Simulate(_) => run_simulation(ctx, &mut out, &file, &model),
                Command::Check(_) | Command::Fmt(_) => unreachable!(),
            }
        }
    }
    out
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    severity: Severity,
    code: &'a str,
    message: &'a str,
    line: u32,
    col: u32,
    end_line: u32,
    end_col: u32,
}

#[derive(Serialize)]
struct CheckJson<'a> {
    file: &'a str,
    summary: Report,
    diagnostics: Vec<JsonDiagnostic<'a>>,
}

fn summary(checked: &Checked) -> Report {
    checked
        .model
        .as_ref()
        .map(summarize)
        .unwrap_or_default()
        .with_diagnostics(&checked.diagnostics)
}

fn check(ctx: &Context<'_>, out: &mut FileOutput, file: &str, source: &str) {
    let checked = tm_core::check(source, &ctx.check_options());
    ctx.report(out, file, &checked.diagnostics);
    let report = summary(&checked);
    if ctx.cli.json {
        let doc = CheckJson {
            file,
            summary: report,
            diagnostics: checked
                .diagnostics
                .iter()
                .map(|d| JsonDiagnostic {
                    severity: d.severity,
                    code: &d.code,
                    message: &d.message,
                    line: d.span.line,
                    col: d.span.col,
                    end_line: d.span.end_line,
                    end_col: d.span.end_col,
                })
                .collect(),
        };
        out.json = Some(serde_json::to_value(doc).expect("report serializes"));
        return;
    }
    let r = &report;
    let _ = writeln!(
        out.stdout,
        "{file}: {} errors, {} warnings; {} machines, {} stages, {} flows, {} triggers, {} events",
        r.diagnostics.errors,
        r.diagnostics.warnings,
        r.machines,
        r.stages.total(),
        r.flows,
        r.triggers,
        r.events
    );
}

#[derive(Serialize)]
struct EventJson {
    id: String,
    label: Option<String>,
    time: Option<String>,
    size: usize,
    stages: Vec<String>,
    arcs: Vec<String>,
    after: Vec<String>,
}

fn events(ctx: &Context<'_>, out: &mut FileOutput, file: &str, model: &StaticModel) {
    let relation = infer_dependencies(model);
    let rows: Vec<EventJson> = model
        .events
        .iter()
        .map(|e| EventJson {
            id: e.id.clone(),
            label: e.label.clone(),
            time: e.time.clone(),
            size: e.region.len(),
            stages: e
                .region
                .stages
                .iter()
                .map(|&s| model.stage_path(s))
                .collect(),
            arcs: e
                .region
                .arcs
                .iter()
                .map(|&a| model.arc_display(a))
                .collect(),
            after: relation
                .predecessors(&e.id)
                .into_iter()
                .map(String::from)
                .collect(),
        })
        .collect();
    if ctx.cli.json {
        out.json = Some(serde_json::json!({ "file": file, "events": rows }));
        return;
    }
    ctx.header(out, file);
    let id_w = rows
        .iter()
        .map(|r| r.id.chars().count())
        .max()
        .unwrap_or(0)
        .max(2);
    let after: Vec<String> = rows
        .iter()
        .map(|r| {
            if r.after.is_empty() {
                "-".to_string()
            } else {
                r.after.join(",")
            }
        })
        .collect();
    let after_w = after
        .iter()
        .map(|a| a.chars().count())
        .max()
        .unwrap_or(0)
        .max(5);
    let _ = writeln!(
        out.stdout,
        "{:id_w$}  {:>4}  {:after_w$}  LABEL",
        "ID", "SIZE", "AFTER"
    );
    for (r, a) in rows.iter().zip(&after) {
        let label = r.label.as_deref().unwrap_or("").replace('\n', " ");
        let line = format!("{:id_w$}  {:>4}  {:after_w$}  {label}", r.id, r.size, a);
        let _ = writeln!(out.stdout, "{}", line.trim_end());
    }
}

fn behavior(ctx: &Context<'_>, out: &mut FileOutput, file: &str, model: &StaticModel) {
    let Some(graph) = &model.behavior else {
        ctx.error(out, file, "model declares no behavior block");
        return;
    };
    match linearize(graph) {
        Ok(order) => {
            ctx.header(out, file);
            for id in order {
                let _ = writeln!(out.stdout, "{id}");
            }
        }
        Err(e) => ctx.error(out, file, &e.to_string()),
    }
}

fn render_dot(ctx: &Context<'_>, out: &mut FileOutput, file: &str, model: &StaticModel) {
    let opts = RenderOptions {
        mode: match ctx.cli.mode {
            Mode::Static => RenderMode::Static,
            Mode::Dynamic => RenderMode::Dynamic,
            Mode::Behavior => RenderMode::Behavior,
        },
        rankdir: match ctx.cli.rankdir {
            Dir::Lr => RankDir::LR,
            Dir::Tb => RankDir::TB,
        },
        ..RenderOptions::default()
    };
    match render(model, &opts) {
        Ok(text) => out.stdout.push_str(&text),
        Err(e) => ctx.error(out, file, &e.to_string()),
    }
}

fn run_simulation(ctx: &Context<'_>, out: &mut FileOutput, file: &str, model: &StaticModel) {
    let graph = model
        .behavior
        .clone()
        .unwrap_or_else(|| behavior_from_precedence(model));
    let order = match linearize(&graph) {
        Ok(o) => o,
        Err(e) => return ctx.error(out, file, &e.to_string()),
    };
    let trace = match simulate(model, &order) {
        Ok(t) => t,
        Err(e) => return ctx.error(out, file, &e.to_string()),
    };
    ctx.report(out, file, &trace.diagnostics);
    ctx.header(out, file);
    out.stdout.push_str(&trace.to_text(model));
    let _ = writeln!(out.stdout, "tokens={}", trace.total_tokens());
    for t in &trace.tokens {
        let _ = writeln!(
            out.stdout,
            "token={} at={} born={} processed={}",
            t.id,
            model.stage_path(t.at),
            model.stage_path(t.birth),
            t.processed
        );
    }
}

fn fmt(ctx: &Context<'_>, out: &mut FileOutput, path: &Path, file: &str, source: &str) {
    let ast = parse(source);
    ctx.report(out, file, &ast.diagnostics);
    if out.code > 0 {
        return;
    }
    let text = format(&ast).expect("error-free AST formats");
    match ctx.cli.output.as_deref() {
        Some(p) if p == Path::new("-") => out.stdout.push_str(&text),
        Some(p) => write_file(out, p, &text),
        None if text != source => write_file(out, path, &text),
        None => {}
    }
}

fn write_file(out: &mut FileOutput, path: &Path, text: &str) {
    if let Err(e) = std::fs::write(path, text) {
        let _ = writeln!(out.stderr, "tm: cannot write {}: {e}", path.display());
        out.fail(2);
    }
}
