//! Minimal s-expression reader and writer.
//!
//! Atoms are symbols or integers; `;` starts a comment running to the end of
//! the line. The writer emits a canonical single-space form, so printing is
//! deterministic.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Sym(String),
    Int(i64),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn sym(s: impl Into<String>) -> Sexp {
        Sexp::Sym(s.into())
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items)
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Sexp::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            _ => None,
        }
    }

    /// Head symbol of a list form, e.g. `foo` for `(foo a b)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_sym)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Sym(s) => write!(f, "{s}"),
            Sexp::Int(i) => write!(f, "{i}"),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.bump() {
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn read_atom(&mut self) -> Result<Sexp> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                break;
            }
            self.bump();
        }
        if self.pos == start {
            return Err(self.err("expected an atom"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err("invalid UTF-8 in atom"))?;
        if text.bytes().all(|b| b.is_ascii_digit())
            || (text.starts_with('-') && text.len() > 1 && text[1..].bytes().all(|b| b.is_ascii_digit()))
        {
            text.parse::<i64>()
                .map(Sexp::Int)
                .map_err(|_| self.err(format!("integer out of range: {text}")))
        } else {
            Ok(Sexp::Sym(text.to_string()))
        }
    }

    fn read_form(&mut self) -> Result<Sexp> {
        self.skip_trivia();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(self.err("unclosed parenthesis")),
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexp::List(items));
                        }
                        _ => items.push(self.read_form()?),
                    }
                }
            }
            Some(b')') => Err(self.err("unmatched `)`")),
            _ => self.read_atom(),
        }
    }
}

/// Reads every top-level form in `src`.
pub fn parse_many(src: &str) -> Result<Vec<Sexp>> {
    let mut r = Reader::new(src);
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read_form()?);
    }
}

/// Reads exactly one form.
pub fn parse_one(src: &str) -> Result<Sexp> {
    let forms = parse_many(src)?;
    match forms.len() {
        1 => Ok(forms.into_iter().next().unwrap()),
        n => Err(Error::Syntax {
            line: 1,
            col: 1,
            msg: format!("expected exactly one form, found {n}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_simple() {
        let src = "(sig (ground A) (fn f (A) Omega)) ; trailing comment";
        let forms = parse_many(src).unwrap();
        assert_eq!(forms.len(), 1);
        let printed = forms[0].to_string();
        assert_eq!(printed, "(sig (ground A) (fn f (A) Omega))");
        assert_eq!(parse_one(&printed).unwrap(), forms[0]);
    }

    #[test]
    fn unbalanced_is_a_syntax_error_with_position() {
        let err = parse_many("(a (b c)").unwrap_err();
        match err {
            Error::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 8);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn integers_and_negatives() {
        let forms = parse_many("(t 12 -3 x-3)").unwrap();
        let items = forms[0].as_list().unwrap();
        assert_eq!(items[1].as_int(), Some(12));
        assert_eq!(items[2].as_int(), Some(-3));
        assert_eq!(items[3].as_sym(), Some("x-3"));
    }
}
