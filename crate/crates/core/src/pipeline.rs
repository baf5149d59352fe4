use crate::analysis::{resolve, validate_with, ValidateOptions};
use crate::diagnostic::{has_errors, sort_diagnostics, Diagnostic};
use crate::engine::validate_behavior;
use crate::model::StaticModel;
use crate::syntax::{parse, Ast};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub validate: ValidateOptions,
    /// Reports declared behavior cycles as `B3` errors.
    pub acyclic: bool,
}

/// Result of running a source text through every static stage.
#[derive(Debug, Clone)]
pub struct Checked {
    pub ast: Ast,
    /// Present whenever parsing and name resolution succeeded, even if
    /// later rules reported errors.
    pub model: Option<StaticModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Checked {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }
}

/// Parses, resolves, validates and, when a behavior block exists, checks the
/// declared chronology. Later stages run only if earlier ones were clean.
pub fn check(source: &str, opts: &CheckOptions) -> Checked {
    let ast = parse(source);
    let mut diagnostics = ast.diagnostics.clone();
    let mut model = None;
    if !ast.has_errors() {
        let resolved = resolve(&ast);
        diagnostics.extend(resolved.diagnostics);
        if let Some(m) = resolved.model {
            let rules = validate_with(&m, &opts.validate);
            let clean = !has_errors(&rules);
            diagnostics.extend(rules);
            if clean && m.behavior.is_some() {
                if let Ok(found) = validate_behavior(&m, opts.acyclic) {
                    diagnostics.extend(found);
                }
            }
            model = Some(m);
        }
    }
    sort_diagnostics(&mut diagnostics);
    Checked {
        ast,
        model,
        diagnostics,
    }
}
