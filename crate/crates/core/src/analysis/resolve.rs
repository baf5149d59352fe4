//! Name resolution: AST declarations to a [`StaticModel`].

use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::model::{ElementId, MachineId, ModelBuilder, ModelError, StageId, StaticModel};
use crate::syntax::ast::{Ast, Decl, MachineDecl, MachineItem, Path};

/// Result of [`resolve`]: a model only when no resolution error occurred.
#[derive(Debug)]
pub struct Resolved {
    pub model: Option<StaticModel>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Binds every path in `ast` to model elements. Declarations are processed
/// by class (machines, arcs, events, behavior), each class in source order,
/// so ids follow declaration order.
pub fn resolve(ast: &Ast) -> Resolved {
    build_model(&ast.declarations)
}

/// Builds a model from an ordered declaration list.
pub fn build_model(decls: &[Decl]) -> Resolved {
    let mut builder = ModelBuilder::new();
    let mut diags = Vec::new();

    for decl in decls {
        if let Decl::Machine(m) = decl {
            add_machine(&mut builder, None, m, &mut diags);
        }
    }
    for decl in decls {
        if let Decl::Arc(arc) = decl {
            let src = resolve_stage(builder.model(), &arc.src, &mut diags);
            let dst = resolve_stage(builder.model(), &arc.dst, &mut diags);
            if let (Some(src), Some(dst)) = (src, dst) {
                let name = arc.name.as_ref().map(|n| n.name.clone());
                let span = arc.name.as_ref().map(|n| n.span).unwrap_or(arc.span);
                if let Err(e) =
                    builder.add_arc(arc.kind, src, dst, name, arc.label.clone(), arc.span)
                {
                    let mut d = model_error(e);
                    d.span = span;
                    diags.push(d);
                }
            }
        }
    }
    for decl in decls {
        if let Decl::Event(ev) = decl {
            let mut members = Vec::new();
            let mut ok = true;
            for r in &ev.region {
                match resolve_member(builder.model(), r) {
                    Ok(id) => members.push(id),
                    Err(d) => {
                        diags.push(d);
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            if let Err(e) = builder.add_event(
                &ev.id.name,
                ev.label.clone(),
                &members,
                ev.time.clone(),
                ev.id.span,
            ) {
                diags.push(model_error(e));
            }
        }
    }
    for decl in decls {
        if let Decl::Behavior(b) = decl {
            builder.declare_behavior(b.span);
            for edge in &b.edges {
                builder.add_behavior_edge(&edge.from.name, &edge.to.name, edge.span);
            }
        }
    }

    let model = match builder.finish() {
        Ok(model) => Some(model),
        Err(errors) => {
            diags.extend(errors.into_iter().map(model_error));
            None
        }
    };
    sort_diagnostics(&mut diags);
    let model = if diags.is_empty() { model } else { None };
    Resolved {
        model,
        diagnostics: diags,
    }
}

fn add_machine(
    builder: &mut ModelBuilder,
    parent: Option<MachineId>,
    decl: &MachineDecl,
    diags: &mut Vec<Diagnostic>,
) {
    let id = match builder.add_machine(parent, &decl.name.name, decl.label.clone(), decl.name.span)
    {
        Ok(id) => id,
        Err(e) => {
            diags.push(model_error(e));
            return;
        }
    };
    for item in &decl.items {
        let result = match item {
            MachineItem::Machine(inner) => {
                add_machine(builder, Some(id), inner, diags);
                Ok(())
            }
            MachineItem::Stage(s) => builder
                .add_stage(id, s.kind, s.label.clone(), s.span)
                .map(|_| ()),
            MachineItem::Store(s) => builder.add_store(id, &s.name.name, s.span),
        };
        if let Err(e) = result {
            diags.push(model_error(e));
        }
    }
}

fn resolve_stage(model: &StaticModel, path: &Path, diags: &mut Vec<Diagnostic>) -> Option<StageId> {
    let Some(kind) = path.stage else {
        let last = path.segments.last().expect("paths have a segment");
        let msg = if path.segments.len() > 1 {
            format!(
                "`{}` is not a stage keyword in `{}`",
                last.name,
                path.display()
            )
        } else {
            format!("`{}` is not a stage path", path.display())
        };
        diags.push(Diagnostic::error("N1", last.span, msg));
        return None;
    };
    let names: Vec<&str> = path.segments.iter().map(|s| s.name.as_str()).collect();
    match model.resolve_machine(&names) {
        Ok(m) => match model.machine(m).stages.get(&kind) {
            Some(&s) => Some(s),
            None => {
                diags.push(Diagnostic::error(
                    "N1",
                    path.span,
                    format!("machine `{}` has no {kind} stage", model.machine_path(m)),
                ));
                None
            }
        },
        Err(i) => {
            diags.push(Diagnostic::error(
                "N1",
                path.segments[i].span,
                format!(
                    "unresolved machine `{}` in `{}`",
                    path.segments[i].name,
                    path.display()
                ),
            ));
            None
        }
    }
}

fn resolve_member(model: &StaticModel, path: &Path) -> Result<ElementId, Diagnostic> {
    if path.is_bare_ident() {
        let name = &path.segments[0].name;
        return model.arc_by_name(name).map(ElementId::Arc).ok_or_else(|| {
            Diagnostic::error(
                "R7",
                path.span,
                format!("region member `{name}` is not a named arc"),
            )
        });
    }
    let mut scratch = Vec::new();
    match resolve_stage(model, path, &mut scratch) {
        Some(s) => Ok(ElementId::Stage(s)),
        None => {
            let mut d = scratch.remove(0);
            d.code = "R7".into();
            d.message = format!("region member: {}", d.message);
            Err(d)
        }
    }
}

fn model_error(e: ModelError) -> Diagnostic {
    let code = match &e {
        ModelError::Dangling { .. } => "N1",
        ModelError::SelfArc { .. } => "N3",
        ModelError::EmptyRegion { .. } => "R7",
        ModelError::UndeclaredEvent { .. } | ModelError::BehaviorSelfLoop { .. } => "R6",
        ModelError::DuplicateMachine { .. }
        | ModelError::DuplicateStage { .. }
        | ModelError::DuplicateStore { .. }
        | ModelError::DuplicateArcName { .. }
        | ModelError::DuplicateEvent { .. } => "N2",
    };
    let mut d = Diagnostic::error(code, e.span(), e.to_string());
    if let Some(first) = e.first_span() {
        d = d.with_related(first);
    }
    d
}
