//! Surface syntax: AST, fragments, parser, printer.

mod ast;
mod parse;
mod print;

pub use ast::{
    Features, Fragment, Ident, Sentence, Term, Theory, TheoryError, RESERVED_SIGIL,
};
pub use parse::{parse_sentence, parse_term, parse_theory, ParseError, ParseOptions, Warning};

pub(crate) use parse::{tokenize_all, tokenize_line, Cursor, Spanned, Tok};
