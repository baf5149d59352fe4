//! A small DOT reader, independent of the renderer, that accepts the subset
//! of the language the renderer is expected to emit.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    Quoted(String),
    Punct(char),
    Arrow,
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        let next = *chars.get(i + 1).ok_or("dangling escape")?;
                        s.push('\\');
                        s.push(next);
                        i += 2;
                    }
                    Some(&ch) => {
                        if ch == '\n' {
                            return Err("raw newline in string".into());
                        }
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Quoted(s));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow);
            i += 2;
        } else if "{}[];=,".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '#' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || "_.#".contains(chars[i]))
            {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

pub type Attrs = BTreeMap<String, String>;

#[derive(Debug, Clone, Default)]
pub struct Cluster {
    pub name: String,
    pub label: Option<String>,
    pub nodes: Vec<String>,
    pub depth: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    pub name: String,
    pub nodes: BTreeMap<String, Attrs>,
    pub node_order: Vec<String>,
    pub edges: Vec<(String, String, Attrs)>,
    pub clusters: Vec<Cluster>,
    pub graph_attrs: Attrs,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Id(s)) | Some(Tok::Quoted(s)) => Ok(s),
            other => Err(format!("expected id, found {other:?}")),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            other => Err(format!("expected {c:?}, found {other:?}")),
        }
    }

    fn attrs(&mut self) -> Result<Attrs, String> {
        let mut out = Attrs::new();
        if self.peek() != Some(&Tok::Punct('[')) {
            return Ok(out);
        }
        self.next();
        loop {
            if self.peek() == Some(&Tok::Punct(']')) {
                self.next();
                return Ok(out);
            }
            let k = self.id()?;
            self.punct('=')?;
            let v = self.id()?;
            if out.insert(k.clone(), v).is_some() {
                return Err(format!("duplicate attribute {k}"));
            }
            if self.peek() == Some(&Tok::Punct(',')) {
                self.next();
            }
        }
    }

    fn stmts(&mut self, g: &mut Graph, cluster: Option<usize>, depth: usize) -> Result<(), String> {
        loop {
            match self.peek() {
                Some(Tok::Punct('}')) => {
                    self.next();
                    return Ok(());
                }
                None => return Err("unexpected end of input".into()),
                _ => {}
            }
            let first = self.id()?;
            if first == "subgraph" {
                let name = self.id()?;
                self.punct('{')?;
                g.clusters.push(Cluster {
                    name,
                    depth,
                    ..Cluster::default()
                });
                let idx = g.clusters.len() - 1;
                self.stmts(g, Some(idx), depth + 1)?;
            } else if matches!(first.as_str(), "node" | "edge" | "graph") {
                self.attrs()?;
            } else if self.peek() == Some(&Tok::Punct('=')) {
                self.next();
                let v = self.id()?;
                match cluster {
                    Some(c) if first == "label" => g.clusters[c].label = Some(v),
                    Some(_) => {}
                    None => {
                        g.graph_attrs.insert(first, v);
                    }
                }
            } else if self.peek() == Some(&Tok::Arrow) {
                self.next();
                let to = self.id()?;
                let attrs = self.attrs()?;
                g.edges.push((first, to, attrs));
            } else {
                let attrs = self.attrs()?;
                if g.nodes.insert(first.clone(), attrs).is_some() {
                    return Err(format!("node {first} declared twice"));
                }
                g.node_order.push(first.clone());
                if let Some(c) = cluster {
                    g.clusters[c].nodes.push(first);
                }
            }
            if self.peek() == Some(&Tok::Punct(';')) {
                self.next();
            }
        }
    }
}

/// Parses a `digraph`, checking that every edge joins declared nodes.
pub fn parse(src: &str) -> Result<Graph, String> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    if p.id()? != "digraph" {
        return Err("expected digraph".into());
    }
    let mut g = Graph {
        name: p.id()?,
        ..Graph::default()
    };
    p.punct('{')?;
    p.stmts(&mut g, None, 0)?;
    if p.pos != p.toks.len() {
        return Err("trailing input after graph".into());
    }
    for (a, b, _) in &g.edges {
        for n in [a, b] {
            if !g.nodes.contains_key(n) {
                return Err(format!("edge endpoint {n} is not declared"));
            }
        }
    }
    Ok(g)
}
