//! Canonical pretty-printer: two-space indents, one item per line, LF endings.

use std::fmt::Write;

use super::ast::*;
use super::lexer::quote;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("cannot format a file with {0} syntax error(s)")]
    HasErrors(usize),
}

pub fn format(ast: &Ast) -> Result<String, FormatError> {
    if ast.has_errors() {
        return Err(FormatError::HasErrors(crate::diagnostic::count_errors(
            &ast.diagnostics,
        )));
    }
    let mut out = String::new();
    let mut prev: Option<&Decl> = None;
    for decl in &ast.declarations {
        let grouped =
            matches!((prev, decl), (Some(Decl::Arc(_)), Decl::Arc(a)) if a.comments.is_empty());
        if prev.is_some() && !grouped {
            out.push('\n');
        }
        match decl {
            Decl::Machine(m) => write_machine(&mut out, m, 0),
            Decl::Arc(a) => write_arc(&mut out, a),
            Decl::Event(e) => write_event(&mut out, e),
            Decl::Behavior(b) => write_behavior(&mut out, b),
        }
        prev = Some(decl);
    }
    if !ast.trailing_comments.is_empty() {
        if prev.is_some() {
            out.push('\n');
        }
        write_comments(&mut out, &ast.trailing_comments, 0);
    }
    Ok(out)
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_comments(out: &mut String, comments: &[String], depth: usize) {
    for c in comments {
        indent(out, depth);
        out.push_str("//");
        out.push_str(c);
        out.push('\n');
    }
}

fn write_label(out: &mut String, label: &Option<String>) {
    if let Some(l) = label {
        out.push(' ');
        out.push_str(&quote(l));
    }
}

fn write_machine(out: &mut String, m: &MachineDecl, depth: usize) {
    write_comments(out, &m.comments, depth);
    indent(out, depth);
    let _ = write!(out, "machine {}", m.name.name);
    write_label(out, &m.label);
    if m.items.is_empty() && m.trailing_comments.is_empty() {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    for item in &m.items {
        match item {
            MachineItem::Machine(inner) => write_machine(out, inner, depth + 1),
            MachineItem::Stage(s) => {
                write_comments(out, &s.comments, depth + 1);
                indent(out, depth + 1);
                out.push_str(s.kind.keyword());
                write_label(out, &s.label);
                out.push('\n');
            }
            MachineItem::Store(s) => {
                write_comments(out, &s.comments, depth + 1);
                indent(out, depth + 1);
                let _ = writeln!(out, "store {}", s.name.name);
            }
        }
    }
    write_comments(out, &m.trailing_comments, depth + 1);
    indent(out, depth);
    out.push_str("}\n");
}

fn write_arc(out: &mut String, a: &ArcDecl) {
    write_comments(out, &a.comments, 0);
    let (kw, arrow) = match a.kind {
        ArcKind::Flow => ("flow", "->"),
        ArcKind::Trigger => ("trigger", "=>"),
    };
    let _ = write!(out, "{kw} {} {arrow} {}", a.src.display(), a.dst.display());
    if let Some(n) = &a.name {
        let _ = write!(out, " as {}", n.name);
    }
    write_label(out, &a.label);
    out.push('\n');
}

fn write_event(out: &mut String, e: &EventDecl) {
    write_comments(out, &e.comments, 0);
    let _ = write!(out, "event {}", e.id.name);
    write_label(out, &e.label);
    out.push_str(" {\n  region: [");
    let refs: Vec<String> = e.region.iter().map(Path::display).collect();
    out.push_str(&refs.join(", "));
    out.push_str("]\n");
    if let Some(t) = &e.time {
        let _ = writeln!(out, "  time: {}", quote(t));
    }
    out.push_str("}\n");
}

fn write_behavior(out: &mut String, b: &BehaviorDecl) {
    write_comments(out, &b.comments, 0);
    if b.edges.is_empty() && b.trailing_comments.is_empty() {
        out.push_str("behavior {}\n");
        return;
    }
    out.push_str("behavior {\n");
    for edge in &b.edges {
        write_comments(out, &edge.comments, 1);
        let _ = writeln!(out, "  {} -> {}", edge.from.name, edge.to.name);
    }
    write_comments(out, &b.trailing_comments, 1);
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn empty_file() {
        assert_eq!(format(&parse("")).unwrap(), "");
    }

    #[test]
    fn unlabeled_create_at_depth_one() {
        let text = format(&parse("machine A { create }")).unwrap();
        assert_eq!(text, "machine A {\n  create\n}\n");
    }

    #[test]
    fn refuses_errors() {
        assert_eq!(format(&parse("machine {")), Err(FormatError::HasErrors(1)));
    }

    #[test]
    fn canonical_layout() {
        let src = "machine A \"a\" { create release transfer machine B{} store S } \
                   flow A.create->A.release flow A.release -> A.transfer as out \"x\" \
                   trigger A.release=>A.create \
                   event E1 {region:[A.create,out] time:\"now\"} behavior{E1->E2}";
        let ast = parse(src);
        assert!(ast.diagnostics.is_empty(), "{:?}", ast.diagnostics);
        let text = format(&ast).unwrap();
        let expected = "\
machine A \"a\" {
  create
  release
  transfer
  machine B {}
  store S
}

flow A.create -> A.release
flow A.release -> A.transfer as out \"x\"
trigger A.release => A.create

event E1 {
  region: [A.create, out]
  time: \"now\"
}

behavior {
  E1 -> E2
}
";
        assert_eq!(text, expected);
        assert_eq!(format(&parse(&text)).unwrap(), text);
    }

    #[test]
    fn comments_survive() {
        let src = "// head\nmachine A {\n  // inner\n  create\n  // tail\n}\n\n// end\n";
        let text = format(&parse(src)).unwrap();
        assert_eq!(text, src);
    }
}
