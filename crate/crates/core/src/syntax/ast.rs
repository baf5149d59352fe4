//! Syntax tree for `.tm` files. Every node keeps its source span; use
//! [`Ast::structurally_eq`] to compare trees while ignoring positions.

use crate::diagnostic::{Diagnostic, Span};
pub use crate::model::{ArcKind, StageKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

/// A dotted reference. Stage paths end with a stage keyword, which is
/// stored in `stage`; a bare identifier has one segment and no stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub segments: Vec<Ident>,
    pub stage: Option<StageKind>,
    pub span: Span,
}

impl Path {
    pub fn is_bare_ident(&self) -> bool {
        self.stage.is_none() && self.segments.len() == 1
    }

    pub fn display(&self) -> String {
        let mut s = self
            .segments
            .iter()
            .map(|i| i.name.as_str())
            .collect::<Vec<_>>()
            .join(".");
        if let Some(kind) = self.stage {
            s.push('.');
            s.push_str(kind.keyword());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineDecl {
    pub comments: Vec<String>,
    pub name: Ident,
    pub label: Option<String>,
    pub items: Vec<MachineItem>,
    pub trailing_comments: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineItem {
    Machine(MachineDecl),
    Stage(StageDecl),
    Store(StoreDecl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageDecl {
    pub comments: Vec<String>,
    pub kind: StageKind,
    pub label: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreDecl {
    pub comments: Vec<String>,
    pub name: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDecl {
    pub comments: Vec<String>,
    pub kind: ArcKind,
    pub src: Path,
    pub dst: Path,
    pub name: Option<Ident>,
    pub label: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub comments: Vec<String>,
    pub id: Ident,
    pub label: Option<String>,
    pub region: Vec<Path>,
    pub time: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorEdge {
    pub comments: Vec<String>,
    pub from: Ident,
    pub to: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorDecl {
    pub comments: Vec<String>,
    pub edges: Vec<BehaviorEdge>,
    pub trailing_comments: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Machine(MachineDecl),
    Arc(ArcDecl),
    Event(EventDecl),
    Behavior(BehaviorDecl),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Machine(m) => m.span,
            Decl::Arc(a) => a.span,
            Decl::Event(e) => e.span,
            Decl::Behavior(b) => b.span,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ast {
    pub declarations: Vec<Decl>,
    /// Comments after the last declaration.
    pub trailing_comments: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Ast {
    pub fn has_errors(&self) -> bool {
        crate::diagnostic::has_errors(&self.diagnostics)
    }

    /// Copy of the declarations and comments with every span zeroed.
    pub fn without_spans(&self) -> Ast {
        let mut ast = Ast {
            declarations: self.declarations.clone(),
            trailing_comments: self.trailing_comments.clone(),
            diagnostics: Vec::new(),
        };
        for decl in &mut ast.declarations {
            decl.clear_spans();
        }
        ast
    }

    /// Equality of declarations and comments, ignoring spans and diagnostics.
    pub fn structurally_eq(&self, other: &Ast) -> bool {
        self.without_spans() == other.without_spans()
    }

    pub fn machines(&self) -> impl Iterator<Item = &MachineDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Decl::Machine(m) => Some(m),
            _ => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = &EventDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Decl::Event(e) => Some(e),
            _ => None,
        })
    }
}

trait ClearSpans {
    fn clear_spans(&mut self);
}

impl ClearSpans for Ident {
    fn clear_spans(&mut self) {
        self.span = Span::default();
    }
}

impl ClearSpans for Path {
    fn clear_spans(&mut self) {
        self.span = Span::default();
        self.segments.iter_mut().for_each(Ident::clear_spans);
    }
}

impl ClearSpans for MachineDecl {
    fn clear_spans(&mut self) {
        self.span = Span::default();
        self.name.clear_spans();
        for item in &mut self.items {
            match item {
                MachineItem::Machine(m) => m.clear_spans(),
                MachineItem::Stage(s) => s.span = Span::default(),
                MachineItem::Store(s) => {
                    s.span = Span::default();
                    s.name.clear_spans();
                }
            }
        }
    }
}

impl ClearSpans for Decl {
    fn clear_spans(&mut self) {
        match self {
            Decl::Machine(m) => m.clear_spans(),
            Decl::Arc(a) => {
                a.span = Span::default();
                a.src.clear_spans();
                a.dst.clear_spans();
                if let Some(n) = &mut a.name {
                    n.clear_spans();
                }
            }
            Decl::Event(e) => {
                e.span = Span::default();
                e.id.clear_spans();
                e.region.iter_mut().for_each(Path::clear_spans);
            }
            Decl::Behavior(b) => {
                b.span = Span::default();
                for edge in &mut b.edges {
                    edge.span = Span::default();
                    edge.from.clear_spans();
                    edge.to.clear_spans();
                }
            }
        }
    }
}
