//! Recursive-descent parser with declaration-boundary error recovery.

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::diagnostic::{Diagnostic, Span};
use crate::model::StageKind;

/// Parses `source` into a best-effort [`Ast`]. Lexical and syntax errors are
/// collected in `Ast::diagnostics`; parsing never aborts.
pub fn parse(source: &str) -> Ast {
    let (tokens, mut diagnostics) = tokenize(source);
    let mut parser = Parser::new(tokens, source);
    let declarations = parser.parse_model();
    let trailing_comments = parser.take_comments();
    diagnostics.append(&mut parser.diags);
    crate::diagnostic::sort_diagnostics(&mut diagnostics);
    Ast {
        declarations,
        trailing_comments,
        diagnostics,
    }
}

struct Parser {
    tokens: Vec<Token>,
    /// `comments_before[i]` holds comments preceding `tokens[i]`; the extra
    /// last slot holds comments before end of input.
    comments_before: Vec<Vec<String>>,
    collected: usize,
    pending: Vec<String>,
    pos: usize,
    eof: Span,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    fn new(all: Vec<Token>, source: &str) -> Self {
        let mut tokens = Vec::new();
        let mut comments_before = vec![Vec::new()];
        for tok in all {
            match tok.kind {
                TokenKind::Comment(body) => comments_before.last_mut().unwrap().push(body),
                _ => {
                    tokens.push(tok);
                    comments_before.push(Vec::new());
                }
            }
        }
        let (line, col) = end_position(source);
        let eof = Span {
            start: source.len(),
            end: source.len(),
            line,
            col,
            end_line: line,
            end_col: col,
        };
        Parser {
            tokens,
            comments_before,
            collected: 0,
            pending: Vec::new(),
            pos: 0,
            eof,
            diags: Vec::new(),
        }
    }

    fn collect_through(&mut self, idx: usize) {
        while self.collected <= idx && self.collected < self.comments_before.len() {
            let mut c = std::mem::take(&mut self.comments_before[self.collected]);
            self.pending.append(&mut c);
            self.collected += 1;
        }
    }

    /// Comments seen so far, including those right before the current token.
    fn take_comments(&mut self) -> Vec<String> {
        self.collect_through(self.pos);
        std::mem::take(&mut self.pending)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn cur_span(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.eof)
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.eof
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned()?;
        self.collect_through(self.pos);
        self.pos += 1;
        Some(tok)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Keyword(k)) if *k == kw)
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Punct(p)) if *p == c)
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(t) => match &t.kind {
                TokenKind::Str(_) => "string literal".to_string(),
                _ => format!("`{}`", t.text),
            },
        }
    }

    fn error_here(&mut self, expected: &str) {
        let msg = format!("expected {expected}, found {}", self.describe_current());
        let span = self.cur_span();
        self.diags.push(Diagnostic::error("P3", span, msg));
    }

    fn expect_punct(&mut self, c: char) -> PResult<Span> {
        if self.at_punct(c) {
            Ok(self.bump().unwrap().span)
        } else {
            self.error_here(&format!("`{c}`"));
            Err(())
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.bump().unwrap().span)
        } else {
            self.error_here(&format!("`{}`", kw.as_str()));
            Err(())
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek_kind() {
            Some(TokenKind::Ident) => {
                let t = self.bump().unwrap();
                Ok(Ident {
                    name: t.text,
                    span: t.span,
                })
            }
            Some(TokenKind::Keyword(k)) if !k.starts_declaration() => {
                let msg = format!("expected {what}, found keyword `{}`", k.as_str());
                let span = self.cur_span();
                self.diags.push(Diagnostic::error("P3", span, msg));
                Err(())
            }
            _ => {
                self.error_here(what);
                Err(())
            }
        }
    }

    fn eat_string(&mut self) -> Option<String> {
        if let Some(TokenKind::Str(s)) = self.peek_kind() {
            let s = s.clone();
            self.bump();
            Some(s)
        } else {
            None
        }
    }

    fn expect_string(&mut self) -> PResult<String> {
        match self.eat_string() {
            Some(s) => Ok(s),
            None => {
                self.error_here("string literal");
                Err(())
            }
        }
    }

    // -- recovery ----------------------------------------------------------

    /// Skips to the next top-level declaration keyword. A keyword counts when
    /// braces opened while skipping are balanced, or when it starts a line.
    fn recover_declaration(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        let mut depth: i32 = 0;
        while let Some(tok) = self.peek() {
            match &tok.kind {
                TokenKind::Keyword(k)
                    if k.starts_declaration() && (depth <= 0 || tok.span.col == 1) =>
                {
                    return
                }
                TokenKind::Punct('{') => depth += 1,
                TokenKind::Punct('}') => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    /// Inside a machine body: skip to the next item keyword or the closing brace.
    fn recover_item(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        while let Some(tok) = self.peek() {
            match &tok.kind {
                TokenKind::Keyword(k) if stage_kind(*k).is_some() => return,
                TokenKind::Keyword(Keyword::Store | Keyword::Machine) => return,
                TokenKind::Punct('}') => return,
                TokenKind::Keyword(k) if k.starts_declaration() && tok.span.col == 1 => return,
                _ => {}
            }
            self.bump();
        }
    }

    // -- grammar -----------------------------------------------------------

    fn parse_model(&mut self) -> Vec<Decl> {
        let mut decls = Vec::new();
        while self.peek().is_some() {
            let start = self.pos;
            let comments = self.take_comments();
            let result = match self.peek_kind() {
                Some(TokenKind::Keyword(Keyword::Machine)) => {
                    self.parse_machine(comments).map(Decl::Machine)
                }
                Some(TokenKind::Keyword(Keyword::Flow)) => {
                    self.parse_arc(comments, ArcKind::Flow).map(Decl::Arc)
                }
                Some(TokenKind::Keyword(Keyword::Trigger)) => {
                    self.parse_arc(comments, ArcKind::Trigger).map(Decl::Arc)
                }
                Some(TokenKind::Keyword(Keyword::Event)) => {
                    self.parse_event(comments).map(Decl::Event)
                }
                Some(TokenKind::Keyword(Keyword::Behavior)) => {
                    self.parse_behavior(comments).map(Decl::Behavior)
                }
                _ => {
                    self.pending = comments;
                    self.error_here("`machine`, `flow`, `trigger`, `event` or `behavior`");
                    Err(())
                }
            };
            match result {
                Ok(d) => decls.push(d),
                Err(()) => self.recover_declaration(start),
            }
        }
        decls
    }

    fn parse_machine(&mut self, comments: Vec<String>) -> PResult<MachineDecl> {
        let kw = self.expect_keyword(Keyword::Machine)?;
        let name = self.expect_ident("machine name")?;
        let label = self.eat_string();
        self.expect_punct('{')?;
        let mut items = Vec::new();
        loop {
            let item_comments = self.take_comments();
            if self.at_punct('}') {
                let close = self.bump().unwrap().span;
                return Ok(MachineDecl {
                    comments,
                    name,
                    label,
                    items,
                    trailing_comments: item_comments,
                    span: kw.to(close),
                });
            }
            let start = self.pos;
            let item = match self.peek_kind() {
                None => {
                    self.pending = item_comments;
                    self.error_here("`}` to close machine");
                    return Err(());
                }
                Some(TokenKind::Keyword(Keyword::Machine)) => {
                    self.parse_machine(item_comments).map(MachineItem::Machine)
                }
                Some(TokenKind::Keyword(Keyword::Store)) => {
                    let kw = self.bump().unwrap().span;
                    self.expect_ident("store name").map(|name| {
                        MachineItem::Store(StoreDecl {
                            comments: item_comments,
                            span: kw.to(name.span),
                            name,
                        })
                    })
                }
                Some(TokenKind::Keyword(k)) if stage_kind(*k).is_some() => {
                    let kind = stage_kind(*k).unwrap();
                    let mut span = self.bump().unwrap().span;
                    let label = self.eat_string();
                    if label.is_some() {
                        span = span.to(self.prev_span());
                    }
                    Ok(MachineItem::Stage(StageDecl {
                        comments: item_comments,
                        kind,
                        label,
                        span,
                    }))
                }
                Some(TokenKind::Keyword(k)) if k.starts_declaration() => {
                    // most likely a missing `}` before the next declaration
                    self.pending = item_comments;
                    self.error_here("`}` to close machine");
                    return Err(());
                }
                _ => {
                    self.pending = item_comments;
                    self.error_here("stage keyword, `store`, `machine` or `}`");
                    Err(())
                }
            };
            match item {
                Ok(i) => items.push(i),
                Err(()) => self.recover_item(start),
            }
        }
    }

    /// `IDENT { "." IDENT } [ "." STAGEKW ]`
    fn parse_path(&mut self) -> PResult<Path> {
        let first = self.expect_ident("machine name or arc name")?;
        let mut span = first.span;
        let mut segments = vec![first];
        let mut stage = None;
        while self.at_punct('.') {
            self.bump();
            match self.peek_kind() {
                Some(TokenKind::Keyword(k)) if stage_kind(*k).is_some() => {
                    stage = stage_kind(*k);
                    span = span.to(self.bump().unwrap().span);
                    break;
                }
                Some(TokenKind::Ident) => {
                    let t = self.bump().unwrap();
                    span = span.to(t.span);
                    segments.push(Ident {
                        name: t.text,
                        span: t.span,
                    });
                }
                _ => {
                    self.error_here("identifier or stage keyword after `.`");
                    return Err(());
                }
            }
        }
        Ok(Path {
            segments,
            stage,
            span,
        })
    }

    fn parse_arc(&mut self, comments: Vec<String>, kind: ArcKind) -> PResult<ArcDecl> {
        let kw = self.bump().unwrap().span;
        let src = self.parse_path()?;
        match kind {
            ArcKind::Flow => {
                if matches!(self.peek_kind(), Some(TokenKind::Arrow)) {
                    self.bump();
                } else {
                    self.error_here("`->`");
                    return Err(());
                }
            }
            ArcKind::Trigger => {
                if matches!(self.peek_kind(), Some(TokenKind::TriggerArrow)) {
                    self.bump();
                } else {
                    self.error_here("`=>`");
                    return Err(());
                }
            }
        }
        let dst = self.parse_path()?;
        let mut span = kw.to(dst.span);
        let name = if self.at_keyword(Keyword::As) {
            self.bump();
            let n = self.expect_ident("arc name")?;
            span = span.to(n.span);
            Some(n)
        } else {
            None
        };
        let label = self.eat_string();
        if label.is_some() {
            span = span.to(self.prev_span());
        }
        Ok(ArcDecl {
            comments,
            kind,
            src,
            dst,
            name,
            label,
            span,
        })
    }

    fn parse_event(&mut self, comments: Vec<String>) -> PResult<EventDecl> {
        let kw = self.bump().unwrap().span;
        let id = self.expect_ident("event id")?;
        let label = self.eat_string();
        self.expect_punct('{')?;
        self.expect_keyword(Keyword::Region)?;
        self.expect_punct(':')?;
        self.expect_punct('[')?;
        let mut region = Vec::new();
        if !self.at_punct(']') {
            region.push(self.parse_path()?);
            while self.at_punct(',') {
                self.bump();
                region.push(self.parse_path()?);
            }
        }
        self.expect_punct(']')?;
        let time = if self.at_keyword(Keyword::Time) {
            self.bump();
            self.expect_punct(':')?;
            Some(self.expect_string()?)
        } else {
            None
        };
        let close = self.expect_punct('}')?;
        Ok(EventDecl {
            comments,
            id,
            label,
            region,
            time,
            span: kw.to(close),
        })
    }

    fn parse_behavior(&mut self, comments: Vec<String>) -> PResult<BehaviorDecl> {
        let kw = self.bump().unwrap().span;
        self.expect_punct('{')?;
        let mut edges = Vec::new();
        loop {
            let edge_comments = self.take_comments();
            if self.at_punct('}') {
                let close = self.bump().unwrap().span;
                return Ok(BehaviorDecl {
                    comments,
                    edges,
                    trailing_comments: edge_comments,
                    span: kw.to(close),
                });
            }
            let from = self.expect_ident("event id or `}`")?;
            if matches!(self.peek_kind(), Some(TokenKind::Arrow)) {
                self.bump();
            } else {
                self.error_here("`->`");
                return Err(());
            }
            let to = self.expect_ident("event id")?;
            edges.push(BehaviorEdge {
                comments: edge_comments,
                span: from.span.to(to.span),
                from,
                to,
            });
        }
    }
}

fn stage_kind(kw: Keyword) -> Option<StageKind> {
    Some(match kw {
        Keyword::Create => StageKind::Create,
        Keyword::Process => StageKind::Process,
        Keyword::Release => StageKind::Release,
        Keyword::Transfer => StageKind::Transfer,
        Keyword::Receive => StageKind::Receive,
        _ => return None,
    })
}

fn end_position(source: &str) -> (u32, u32) {
    let mut line = 1;
    let mut col = 1;
    for c in source.chars() {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}
