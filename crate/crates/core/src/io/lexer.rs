//! Line-oriented tokenizer shared by the text formats.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Word,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: Kind,
    pub text: &'a str,
    /// 1-based column in characters.
    pub col: usize,
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-' | '+')
}

/// Strips a `#!` comment.
fn strip_comment(line: &str) -> &str {
    match line.find("#!") {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Tokens of one line. `!=` is a single token; other punctuation is one
/// character per token.
pub fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token<'_>>> {
    let line = strip_comment(line);
    let mut out = Vec::new();
    let mut chars = line.char_indices().enumerate().peekable();
    while let Some((col0, (start, c))) = chars.next() {
        let col = col0 + 1;
        if c.is_whitespace() {
            continue;
        }
        if is_word(c) {
            let mut end = start + c.len_utf8();
            while let Some(&(_, (i, d))) = chars.peek() {
                if !is_word(d) {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            out.push(Token { kind: Kind::Word, text: &line[start..end], col });
        } else if c == '!' && line[start + 1..].starts_with('=') {
            chars.next();
            out.push(Token { kind: Kind::Punct, text: &line[start..start + 2], col });
        } else if "()[]{},=!|:#/<>^".contains(c) {
            out.push(Token { kind: Kind::Punct, text: &line[start..start + 1], col });
        } else {
            return Err(Error::Parse { line: line_no, col, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

/// Cursor over the tokens of one line with positioned diagnostics.
pub struct Cursor<'a> {
    toks: Vec<Token<'a>>,
    pos: usize,
    pub line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str, line: usize) -> Result<Self> {
        let toks = tokenize(text, line)?;
        Ok(Cursor { toks, pos: 0, line, end_col: text.chars().count() + 1 })
    }

    pub fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(self.diag(msg))
    }

    pub fn diag(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col(), msg: msg.into() }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn peek(&self) -> Option<&Token<'a>> {
        self.toks.get(self.pos)
    }

    pub fn peek_is(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    /// Consumes `text` if it is next.
    pub fn eat(&mut self, text: &str) -> bool {
        if self.peek_is(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, text: &str) -> Result<()> {
        if self.eat(text) {
            Ok(())
        } else {
            self.error(format!("expected `{text}`{}", self.found()))
        }
    }

    pub fn word(&mut self, what: &str) -> Result<&'a str> {
        match self.peek() {
            Some(t) if t.kind == Kind::Word => {
                let s = t.text;
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(format!("expected {what}{}", self.found())),
        }
    }

    pub fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let col = self.col();
        let w = self.word(what)?;
        w.parse().map_err(|_| Error::Parse { line: self.line, col, msg: format!("invalid {what} `{w}`") })
    }

    /// A finite non-negative real.
    pub fn real(&mut self, what: &str) -> Result<f64> {
        let col = self.col();
        let v: f64 = self.number(what)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Parse { line: self.line, col, msg: format!("{what} must be finite and non-negative") });
        }
        Ok(v)
    }

    pub fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error(format!("unexpected trailing input{}", self.found()))
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!(", found `{}`", t.text),
            None => ", found end of line".into(),
        }
    }

    /// Comma-separated items between `open` and `close`.
    pub fn list<T>(&mut self, open: &str, close: &str, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect(open)?;
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }
}

/// Attaches a position to an error that has none.
pub fn at(line: usize, col: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::Parse { line, col, msg: other.to_string() },
    }
}
