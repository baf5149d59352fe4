//! Source spans and diagnostics shared by every analysis stage.

use std::fmt;

use serde::Serialize;

/// A range in a source file. Lines and columns are 1-based, columns count
/// characters; `start`/`end` are byte offsets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    /// The smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let (first, last) = if self.start <= other.start {
            (self, other)
        } else {
            (other, self)
        };
        let tail = if last.end >= first.end { last } else { first };
        Span {
            start: first.start,
            end: tail.end,
            line: first.line,
            col: first.col,
            end_line: tail.end_line,
            end_col: tail.end_col,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.start <= self.end && self.line >= 1 && self.col >= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Rule identifier, e.g. `R2`, `B1`, `P3`.
    pub code: String,
    pub message: String,
    pub span: Span,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub related: Vec<Span>,
}

impl Diagnostic {
    pub fn error(code: impl Into<String>, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: code.into(),
            message: message.into(),
            span,
            related: Vec::new(),
        }
    }

    pub fn warning(code: impl Into<String>, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, span, message)
        }
    }

    pub fn with_related(mut self, span: Span) -> Self {
        self.related.push(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders as `FILE:LINE:COL: SEVERITY[RULE]: message`.
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            file, self.span.line, self.span.col, self.severity, self.code, self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

pub fn count_errors(diags: &[Diagnostic]) -> usize {
    diags.iter().filter(|d| d.is_error()).count()
}

/// Sorts by file position, then by rule code, then by message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.span.start, a.span.end, rule_order(&a.code), &a.message).cmp(&(
            b.span.start,
            b.span.end,
            rule_order(&b.code),
            &b.message,
        ))
    });
}

// `R10` sorts after `R9`.
fn rule_order(code: &str) -> (String, u32) {
    let split = code
        .find(|c: char| c.is_ascii_digit())
        .unwrap_or(code.len());
    let (prefix, num) = code.split_at(split);
    (prefix.to_string(), num.parse().unwrap_or(0))
}
