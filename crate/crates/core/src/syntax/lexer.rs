//! Tokenizer for `.tm` sources. Never fails: illegal characters and
//! unterminated strings become diagnostics and lexing continues.

use crate::diagnostic::{Diagnostic, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Machine,
    Flow,
    Trigger,
    Event,
    Behavior,
    Store,
    Region,
    Time,
    As,
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl Keyword {
    pub fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "machine" => Keyword::Machine,
            "flow" => Keyword::Flow,
            "trigger" => Keyword::Trigger,
            "event" => Keyword::Event,
            "behavior" => Keyword::Behavior,
            "store" => Keyword::Store,
            "region" => Keyword::Region,
            "time" => Keyword::Time,
            "as" => Keyword::As,
            "create" => Keyword::Create,
            "process" => Keyword::Process,
            "release" => Keyword::Release,
            "transfer" => Keyword::Transfer,
            "receive" => Keyword::Receive,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Machine => "machine",
            Keyword::Flow => "flow",
            Keyword::Trigger => "trigger",
            Keyword::Event => "event",
            Keyword::Behavior => "behavior",
            Keyword::Store => "store",
            Keyword::Region => "region",
            Keyword::Time => "time",
            Keyword::As => "as",
            Keyword::Create => "create",
            Keyword::Process => "process",
            Keyword::Release => "release",
            Keyword::Transfer => "transfer",
            Keyword::Receive => "receive",
        }
    }

    /// Keywords that start a top-level declaration; the parser resynchronizes on these.
    pub fn starts_declaration(self) -> bool {
        matches!(
            self,
            Keyword::Machine
                | Keyword::Flow
                | Keyword::Trigger
                | Keyword::Event
                | Keyword::Behavior
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    /// Decoded string contents (escapes resolved).
    Str(String),
    /// One of `{ } [ ] : , .`
    Punct(char),
    Arrow,
    TriggerArrow,
    /// Comment body without the leading `//`, trailing whitespace trimmed.
    Comment(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.col)
    }

    fn span_from(&self, (start, line, col): (usize, u32, u32)) -> Span {
        Span {
            start,
            end: self.pos,
            line,
            col,
            end_line: self.line,
            end_col: self.col,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `source` into tokens. Whitespace (including `\r`) is trivia and is
/// not represented; comments are kept as tokens.
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let start = cur.mark();
        let kind = match c {
            '/' if cur.peek2() == Some('/') => {
                cur.bump();
                cur.bump();
                let body_start = cur.pos;
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                TokenKind::Comment(source[body_start..cur.pos].trim_end().to_string())
            }
            '-' if cur.peek2() == Some('>') => {
                cur.bump();
                cur.bump();
                TokenKind::Arrow
            }
            '=' if cur.peek2() == Some('>') => {
                cur.bump();
                cur.bump();
                TokenKind::TriggerArrow
            }
            '{' | '}' | '[' | ']' | ':' | ',' | '.' => {
                cur.bump();
                TokenKind::Punct(c)
            }
            '"' => lex_string(&mut cur, &mut diags),
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                let word = &source[start.0..cur.pos];
                match Keyword::from_word(word) {
                    Some(kw) => TokenKind::Keyword(kw),
                    None => TokenKind::Ident,
                }
            }
            other => {
                cur.bump();
                diags.push(Diagnostic::error(
                    "P1",
                    cur.span_from(start),
                    format!("illegal character {other:?}"),
                ));
                continue;
            }
        };
        let span = cur.span_from(start);
        let text = source[span.start..span.end].to_string();
        tokens.push(Token { kind, text, span });
    }
    (tokens, diags)
}

fn lex_string(cur: &mut Cursor<'_>, diags: &mut Vec<Diagnostic>) -> TokenKind {
    let start = cur.mark();
    cur.bump();
    let mut value = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') => {
                diags.push(Diagnostic::error(
                    "P2",
                    cur.span_from(start),
                    "unterminated string literal",
                ));
                // a trailing '\r' of a CRLF line is not part of the string
                if value.ends_with('\r') {
                    value.pop();
                }
                return TokenKind::Str(value);
            }
            Some('"') => {
                cur.bump();
                return TokenKind::Str(value);
            }
            Some('\\') => {
                cur.bump();
                match cur.peek() {
                    Some('n') => value.push('\n'),
                    Some('t') => value.push('\t'),
                    Some('"') => value.push('"'),
                    Some('\\') => value.push('\\'),
                    Some(other) if other != '\n' => {
                        let esc = cur.mark();
                        cur.bump();
                        diags.push(Diagnostic::warning(
                            "P4",
                            cur.span_from(esc),
                            format!("unknown escape \\{other}; kept literally"),
                        ));
                        value.push(other);
                        continue;
                    }
                    _ => continue,
                }
                cur.bump();
            }
            Some(c) => {
                value.push(c);
                cur.bump();
            }
        }
    }
}

/// Quotes `value` so that [`tokenize`] decodes it back unchanged.
pub fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
