//! Recursive-descent parser for the term grammar
//!
//! ```text
//! term := ident | symbol '(' term {',' term} ')' | 'mu' nat '.' term
//! ```
//!
//! Variables are `x<nat>`. `mu x<nat>. t` is accepted as an alias of
//! `mu <nat>. t`. Error positions are 1-based character columns.

use super::signature::{is_identifier, variable_index};
use super::{infer_pattern, Signature, Term, TermError};
use crate::scalar::Scalar;

/// Parses and checks `src` against `sig`, reading it over the smallest
/// context arity it needs.
pub fn parse_term<T: Scalar>(src: &str, sig: &Signature<T>) -> Result<Term, TermError> {
    let term = parse_term_unchecked(src)?;
    infer_pattern(&term, sig, term.need())?;
    Ok(term)
}

/// Parses `src` without resolving symbols.
pub fn parse_term_unchecked(src: &str) -> Result<Term, TermError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> TermError {
        TermError::Syntax {
            position: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        let start = self.pos;
        let Some(word) = self.word() else {
            return Err(self.error("expected a term"));
        };
        if word == "mu" {
            return self.binder();
        }
        if !is_identifier(&word) {
            self.pos = start;
            return Err(self.error(&format!("`{word}` is not an identifier")));
        }
        if let Some(k) = variable_index(&word) {
            if k == 0 {
                self.pos = start;
                return Err(self.error("variables are numbered from 1"));
            }
            return Ok(Term::Var(k));
        }
        if self.peek() != Some('(') {
            return Ok(Term::App(word, Vec::new()));
        }
        self.pos += 1;
        let mut args = vec![self.term()?];
        loop {
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    args.push(self.term()?);
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(Term::App(word, args));
                }
                _ => return Err(self.error("expected `,` or `)`")),
            }
        }
    }

    fn binder(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        let start = self.pos;
        let slot = match self.word() {
            Some(w) if w.bytes().all(|b| b.is_ascii_digit()) => w.parse::<usize>().ok(),
            Some(w) => variable_index(&w),
            None => None,
        };
        let slot = match slot {
            Some(k) if k > 0 => k,
            _ => {
                self.pos = start;
                return Err(self.error("expected a binder slot after `mu`"));
            }
        };
        self.expect('.')?;
        Ok(Term::mu(slot, self.term()?))
    }
}
