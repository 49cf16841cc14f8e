//! Tokenizer and recursive-descent parser for the theory file format.
//!
//! The format is line oriented:
//!
//! ```text
//! # comment
//! nouns: p q
//! verbs: r s
//! all p (r all q)
//! all p q or some q q
//! some (r some p) q
//! [ p (not q) ]
//! < p q >
//! ```
//!
//! Terms are fully parenthesized, so a single token of lookahead suffices.
//! The keywords `all`, `some`, `not`, `or`, `nouns`, `verbs` are reserved and
//! cannot be used as identifiers. Identifiers starting with the reserved
//! sigil `$` belong to machine-generated theories and are rejected unless
//! [`ParseOptions::allow_reserved`] is set.

use super::ast::{Ident, Sentence, Term, Theory, RESERVED_SIGIL};

/// Parser configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept identifiers that start with the reserved `$` sigil (used when
    /// re-reading theories produced by the flattening translation).
    pub allow_reserved: bool,
}

/// A non-fatal diagnostic produced while parsing (duplicates dropped, …).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub msg: String,
}

/// A fatal syntax or vocabulary error with source position.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

pub(crate) const KEYWORDS: [&str; 6] = ["all", "some", "not", "or", "nouns", "verbs"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    Colon,
    Tilde,
    Word(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Word(w) => format!("`{w}`"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Split one line into tokens; `#` starts a comment running to end of line.
pub(crate) fn tokenize_line(text: &str, line_no: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | '[' | ']' | '<' | '>' | ':' | '~' => {
                chars.next();
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    '<' => Tok::LAngle,
                    '>' => Tok::RAngle,
                    ':' => Tok::Colon,
                    _ => Tok::Tilde,
                };
                out.push(Spanned {
                    tok,
                    line: line_no,
                    col,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == RESERVED_SIGIL => {
                let start = i;
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == RESERVED_SIGIL {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Word(text[start..end].to_string()),
                    line: line_no,
                    col,
                });
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}

/// Token cursor shared by the theory parser and the bridge-language parser.
pub(crate) struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    opts: ParseOptions,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(toks: &'a [Spanned], line: usize, opts: ParseOptions) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            opts,
        }
    }

    pub(crate) fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    pub(crate) fn bump(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn end_col(&self) -> usize {
        self.toks.last().map(|t| t.col + 1).unwrap_or(1)
    }

    pub(crate) fn error_here(&self, msg: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(t.line, t.col, msg),
            None => ParseError::new(self.line, self.end_col(), msg),
        }
    }

    pub(crate) fn expect(&mut self, want: &Tok, what: &str) -> Result<&'a Spanned, ParseError> {
        match self.peek() {
            Some(t) if t.tok == *want => Ok(self.bump().unwrap()),
            Some(t) => Err(ParseError::new(
                t.line,
                t.col,
                format!("expected {what}, found {}", t.tok.describe()),
            )),
            None => Err(self.error_here(format!("expected {what}, found end of input"))),
        }
    }

    /// Consume the next token as an identifier, enforcing keyword and sigil
    /// discipline.
    pub(crate) fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek() {
            Some(t) => {
                if let Tok::Word(w) = &t.tok {
                    if KEYWORDS.contains(&w.as_str()) {
                        return Err(ParseError::new(
                            t.line,
                            t.col,
                            format!("keyword `{w}` cannot be used as {what}"),
                        ));
                    }
                    if w.starts_with(RESERVED_SIGIL) && !self.opts.allow_reserved {
                        return Err(ParseError::new(
                            t.line,
                            t.col,
                            format!(
                                "identifier `{w}` starts with the reserved sigil `{RESERVED_SIGIL}`"
                            ),
                        ));
                    }
                    let w = w.clone();
                    self.bump();
                    Ok(w)
                } else {
                    Err(ParseError::new(
                        t.line,
                        t.col,
                        format!("expected {what}, found {}", t.tok.describe()),
                    ))
                }
            }
            None => Err(self.error_here(format!("expected {what}, found end of input"))),
        }
    }

    /// Is the next token the given keyword?
    pub(crate) fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Word(w), .. }) if w == kw)
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected keyword `{kw}`")))
        }
    }

    /// Parse one term: `ID | (not T) | (ID all T) | (ID some T)`.
    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Spanned {
                tok: Tok::LParen, ..
            }) => {
                self.bump();
                let t = if self.at_keyword("not") {
                    self.bump();
                    Term::not(self.term()?)
                } else {
                    let verb = self.ident("a verb")?;
                    if self.at_keyword("all") {
                        self.bump();
                        Term::all_of(verb, self.term()?)
                    } else if self.at_keyword("some") {
                        self.bump();
                        Term::some_of(verb, self.term()?)
                    } else {
                        return Err(self.error_here("expected `all` or `some` after verb"));
                    }
                };
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Spanned { tok: Tok::Word(_), .. }) => Ok(Term::Noun(self.ident("a noun")?)),
            _ => Err(self.error_here("expected a term")),
        }
    }

    /// Parse one sentence. Duplicate clause literals are dropped; the count
    /// of dropped literals is reported through `dropped`.
    pub(crate) fn sentence(&mut self, dropped: &mut usize) -> Result<Sentence, ParseError> {
        match self.peek() {
            Some(t) => match &t.tok {
                Tok::Word(w) if w == "all" => {
                    self.bump();
                    let x = self.term()?;
                    let y = self.term()?;
                    if self.at_keyword("or") {
                        self.bump();
                        self.expect_keyword("some")?;
                        let u = self.term()?;
                        let v = self.term()?;
                        Ok(Sentence::AllOrSome(x, y, u, v))
                    } else {
                        Ok(Sentence::All(x, y))
                    }
                }
                Tok::Word(w) if w == "some" => {
                    self.bump();
                    let x = self.term()?;
                    let y = self.term()?;
                    Ok(Sentence::Some(x, y))
                }
                Tok::LBrack => {
                    self.bump();
                    let ts = self.term_list(&Tok::RBrack, "`]`")?;
                    let (s, d) = Sentence::empty_meet(ts);
                    *dropped += d;
                    Ok(s)
                }
                Tok::LAngle => {
                    self.bump();
                    let ts = self.term_list(&Tok::RAngle, "`>`")?;
                    let (s, d) = Sentence::nonempty_meet(ts);
                    *dropped += d;
                    Ok(s)
                }
                _ => Err(self.error_here(
                    "expected a sentence (`all`, `some`, `[` or `<` at start)",
                )),
            },
            None => Err(self.error_here("expected a sentence, found end of input")),
        }
    }

    fn term_list(&mut self, close: &Tok, close_name: &str) -> Result<Vec<Term>, ParseError> {
        let mut ts = Vec::new();
        loop {
            match self.peek() {
                Some(t) if t.tok == *close => {
                    self.bump();
                    if ts.is_empty() {
                        return Err(ParseError::new(
                            t.line,
                            t.col,
                            "clause sentences need at least one term",
                        ));
                    }
                    return Ok(ts);
                }
                Some(_) => ts.push(self.term()?),
                None => {
                    return Err(self.error_here(format!(
                        "expected a term or {close_name}, found end of input"
                    )))
                }
            }
        }
    }
}

/// Parse a full theory file.
pub fn parse_theory(src: &str, opts: ParseOptions) -> Result<(Theory, Vec<Warning>), ParseError> {
    let mut theory = Theory::new();
    let mut warnings = Vec::new();
    let mut sentence_lines: Vec<(usize, usize)> = Vec::new(); // (index, line)

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize_line(raw, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, line_no, opts);
        if cur.at_keyword("nouns") || cur.at_keyword("verbs") {
            let is_nouns = cur.at_keyword("nouns");
            cur.bump();
            cur.expect(&Tok::Colon, "`:` after header keyword")?;
            while !cur.at_end() {
                let role = if is_nouns { "a noun" } else { "a verb" };
                let id = cur.ident(role)?;
                let clash = if is_nouns {
                    theory.verbs.contains(&id)
                } else {
                    theory.nouns.contains(&id)
                };
                if clash {
                    return Err(ParseError::new(
                        line_no,
                        1,
                        format!("`{id}` is declared both as a noun and as a verb"),
                    ));
                }
                if is_nouns {
                    theory.declare_noun(id);
                } else {
                    theory.declare_verb(id);
                }
            }
        } else {
            let mut dropped = 0usize;
            let s = cur.sentence(&mut dropped)?;
            if !cur.at_end() {
                return Err(cur.error_here("unexpected trailing tokens after sentence"));
            }
            if dropped > 0 {
                warnings.push(Warning {
                    line: line_no,
                    msg: format!("{dropped} duplicate clause literal(s) dropped"),
                });
            }
            if theory.push_sentence(s) {
                sentence_lines.push((theory.sentences.len() - 1, line_no));
            } else {
                warnings.push(Warning {
                    line: line_no,
                    msg: "duplicate sentence dropped".into(),
                });
            }
        }
    }

    // Vocabulary discipline, reported with the offending sentence's line.
    for (idx, line) in &sentence_lines {
        let (ns, vs) = theory.sentences[*idx].symbols();
        for n in ns {
            if !theory.nouns.contains(&n) {
                return Err(ParseError::new(
                    *line,
                    1,
                    format!("`{n}` is used as a noun but not declared as one"),
                ));
            }
        }
        for v in vs {
            if !theory.verbs.contains(&v) {
                return Err(ParseError::new(
                    *line,
                    1,
                    format!("`{v}` is used as a verb but not declared as one"),
                ));
            }
        }
    }
    Ok((theory, warnings))
}

/// Parse a single sentence (for goals, proof files, tests). No vocabulary
/// check is performed; duplicate clause literals are dropped silently.
pub fn parse_sentence(src: &str, opts: ParseOptions) -> Result<Sentence, ParseError> {
    let toks = tokenize_all(src)?;
    let mut cur = Cursor::new(&toks, 1, opts);
    let mut dropped = 0;
    let s = cur.sentence(&mut dropped)?;
    if !cur.at_end() {
        return Err(cur.error_here("unexpected trailing tokens after sentence"));
    }
    Ok(s)
}

/// Parse a single term.
pub fn parse_term(src: &str, opts: ParseOptions) -> Result<Term, ParseError> {
    let toks = tokenize_all(src)?;
    let mut cur = Cursor::new(&toks, 1, opts);
    let t = cur.term()?;
    if !cur.at_end() {
        return Err(cur.error_here("unexpected trailing tokens after term"));
    }
    Ok(t)
}

pub(crate) fn tokenize_all(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        toks.extend(tokenize_line(raw, idx + 1)?);
    }
    Ok(toks)
}
