//! Pretty printer. Printing is the inverse of parsing: for every value built
//! by the parser, `parse(print(v))` reproduces `v` exactly.
//!
//! Terms print fully parenthesized (`(r all (not p))`); sentences print on
//! one line (`all p (r all q)`, `all a b or some x y`, `[ p (not q) ]`,
//! `< p q >`); theories print their two header lines followed by one sentence
//! per line.

use std::fmt;

use super::ast::{Sentence, Term, Theory};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Noun(p) => f.write_str(p),
            Term::AllOf(r, t) => write!(f, "({r} all {t})"),
            Term::SomeOf(r, t) => write!(f, "({r} some {t})"),
            Term::Not(t) => write!(f, "(not {t})"),
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sentence::All(x, y) => write!(f, "all {x} {y}"),
            Sentence::Some(x, y) => write!(f, "some {x} {y}"),
            Sentence::AllOrSome(a, b, x, y) => write!(f, "all {a} {b} or some {x} {y}"),
            Sentence::EmptyMeet(ts) => {
                f.write_str("[")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(" ]")
            }
            Sentence::NonemptyMeet(ts) => {
                f.write_str("<")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(" >")
            }
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.nouns.is_empty() {
            f.write_str("nouns:")?;
            for n in &self.nouns {
                write!(f, " {n}")?;
            }
            f.write_str("\n")?;
        }
        if !self.verbs.is_empty() {
            f.write_str("verbs:")?;
            for v in &self.verbs {
                write!(f, " {v}")?;
            }
            f.write_str("\n")?;
        }
        for s in &self.sentences {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
