//! Line-oriented text format for structures.
//!
//! ```text
//! # optional comment lines
//! signature: edge/2 mark/1
//! size: 3
//! edge: (0,1) (1,0)
//! mark: (2)
//! ```
//!
//! Exactly one `signature:` line, which must precede the relation lines, and
//! exactly one `size:` line. Each relation symbol gets at most one line; a
//! missing line means the relation is empty. Tuples may contain spaces.
//! Serialization emits every symbol in signature order with sorted tuples, so
//! `serialize(parse(text))` is the normal form of `text`.

use std::fmt::Write;

use super::{is_identifier, Signature, Structure, Symbol};
use crate::error::{Error, Result};

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::syntax(self.line, self.column(), message)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::syntax(self.line, start + 1, "number too large"))
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }
}

/// Parse the structure file format. See the module docs for the grammar.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut signature: Option<Signature> = None;
    let mut size: Option<(usize, usize)> = None;
    let mut relations: Vec<Option<Vec<(Vec<usize>, usize, usize)>>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut cur = Cursor {
            line,
            text: raw,
            pos: 0,
        };
        cur.skip_ws();
        if cur.at_end() || cur.peek() == Some('#') {
            continue;
        }
        let key_col = cur.column();
        let key = cur.word();
        if key.is_empty() {
            return Err(cur.err("expected a keyword or relation name"));
        }
        cur.skip_ws();
        cur.expect(':')?;
        match key {
            "signature" => {
                if signature.is_some() {
                    return Err(Error::syntax(line, key_col, "duplicate `signature:` line"));
                }
                let mut symbols = Vec::new();
                loop {
                    cur.skip_ws();
                    if cur.at_end() {
                        break;
                    }
                    let col = cur.column();
                    let name = cur.word();
                    if !is_identifier(name) {
                        return Err(cur.err("expected a symbol name"));
                    }
                    cur.expect('/')?;
                    let arity = cur.number()?;
                    if arity == 0 {
                        return Err(Error::syntax(line, col, "arity must be positive"));
                    }
                    if symbols.iter().any(|s: &Symbol| s.name == name) {
                        return Err(Error::syntax(
                            line,
                            col,
                            format!("symbol `{name}` declared twice"),
                        ));
                    }
                    symbols.push(Symbol {
                        name: name.to_string(),
                        arity,
                    });
                }
                relations = vec![None; symbols.len()];
                signature = Some(Signature::new(symbols)?);
            }
            "size" => {
                if size.is_some() {
                    return Err(Error::syntax(line, key_col, "duplicate `size:` line"));
                }
                cur.skip_ws();
                let col = cur.column();
                let n = cur.number()?;
                cur.skip_ws();
                if !cur.at_end() {
                    return Err(cur.err("unexpected text after size"));
                }
                if n == 0 {
                    return Err(Error::syntax(line, col, "size must be at least 1"));
                }
                size = Some((n, line));
            }
            name => {
                let sig = signature.as_ref().ok_or_else(|| {
                    Error::syntax(line, key_col, "relation line before `signature:` line")
                })?;
                let rel = sig.index_of(name).ok_or_else(|| {
                    Error::syntax(line, key_col, format!("unknown relation symbol `{name}`"))
                })?;
                if relations[rel].is_some() {
                    return Err(Error::syntax(
                        line,
                        key_col,
                        format!("duplicate line for relation `{name}`"),
                    ));
                }
                let arity = sig.symbols()[rel].arity;
                let mut tuples = Vec::new();
                loop {
                    cur.skip_ws();
                    if cur.at_end() {
                        break;
                    }
                    let col = cur.column();
                    cur.expect('(')?;
                    let mut t = Vec::new();
                    loop {
                        cur.skip_ws();
                        t.push(cur.number()?);
                        cur.skip_ws();
                        if cur.peek() == Some(',') {
                            cur.pos += 1;
                        } else {
                            break;
                        }
                    }
                    cur.expect(')')?;
                    if t.len() != arity {
                        return Err(Error::syntax(
                            line,
                            col,
                            format!(
                                "arity mismatch: `{name}` has arity {arity}, tuple has {} entries",
                                t.len()
                            ),
                        ));
                    }
                    tuples.push((t, line, col));
                }
                relations[rel] = Some(tuples);
            }
        }
    }

    let signature =
        signature.ok_or_else(|| Error::syntax(last_line.max(1), 1, "missing `signature:` line"))?;
    let (n, _) = size.ok_or_else(|| Error::syntax(last_line.max(1), 1, "missing `size:` line"))?;
    let mut lists = Vec::with_capacity(relations.len());
    for tuples in relations {
        let tuples = tuples.unwrap_or_default();
        let mut list = Vec::with_capacity(tuples.len());
        for (t, line, col) in tuples {
            if let Some(&v) = t.iter().find(|&&v| v >= n) {
                return Err(Error::syntax(
                    line,
                    col,
                    format!("vertex {v} out of range for size {n}"),
                ));
            }
            list.push(t);
        }
        lists.push(list);
    }
    Structure::new(signature, n, lists)
}

/// Normal-form serialization; inverse of [`parse_structure`] up to normalization.
pub fn serialize_structure(s: &Structure) -> String {
    let mut out = String::new();
    if s.signature().is_empty() {
        out.push_str("signature:\n");
    } else {
        let _ = writeln!(out, "signature: {}", s.signature());
    }
    let _ = writeln!(out, "size: {}", s.size());
    for (rel, sym) in s.signature().symbols().iter().enumerate() {
        out.push_str(&sym.name);
        out.push(':');
        for t in s.tuples(rel) {
            out.push_str(" (");
            for (i, v) in t.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push(')');
        }
        out.push('\n');
    }
    out
}

impl serde::Serialize for Structure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&serialize_structure(self))
    }
}

impl<'de> serde::Deserialize<'de> for Structure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(d)?;
        parse_structure(&text).map_err(serde::de::Error::custom)
    }
}
