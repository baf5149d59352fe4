//! Surface syntax: tokens, syntax tree, parser and canonical formatter.

pub mod ast;
mod format;
pub mod lexer;
mod parser;

pub use ast::Ast;
pub use format::{format, FormatError};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;
