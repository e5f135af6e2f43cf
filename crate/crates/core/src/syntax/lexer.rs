use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError { line, col, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Byte offset of the token start in the source.
    pub start: usize,
    /// Byte offset one past the token end.
    pub end: usize,
}

// Longest first so that `|->` wins over `|-` and `|`.
const PUNCT: &[&str] = &[
    "|->", "->", "==", "~~", "|-", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "=", "*", "+", "@",
    "|",
];

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    let at = |i: usize| bytes.get(i).map(|p| p.1);
    let offset = |i: usize| bytes.get(i).map(|p| p.0).unwrap_or(src.len());
    while i < bytes.len() {
        let c = bytes[i].1;
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '-' && at(i + 1) == Some('-') {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let (tl, tc, start) = (line, col, i);
        if ident_start(c) {
            let mut j = i + 1;
            while let Some(d) = at(j) {
                if ident_continue(d) {
                    j += 1;
                } else if d == '-' && at(j + 1).is_some_and(|e| e.is_ascii_alphanumeric()) {
                    j += 1;
                } else {
                    break;
                }
            }
            let s: String = bytes[i..j].iter().map(|p| p.1).collect();
            col += j - i;
            i = j;
            out.push(Token { tok: Tok::Ident(s), line: tl, col: tc, start: offset(start), end: offset(i) });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while at(j).is_some_and(|d| d.is_ascii_digit()) {
                j += 1;
            }
            let s: String = bytes[i..j].iter().map(|p| p.1).collect();
            let n = s.parse::<u64>().map_err(|_| ParseError::new(tl, tc, "number too large"))?;
            col += j - i;
            i = j;
            out.push(Token { tok: Tok::Num(n), line: tl, col: tc, start: offset(start), end: offset(i) });
            continue;
        }
        let rest = &src[bytes[i].0..];
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                let n = p.chars().count();
                col += n;
                i += n;
                out.push(Token { tok: Tok::Punct(p), line: tl, col: tc, start: offset(start), end: offset(i) });
            }
            None => return Err(ParseError::new(tl, tc, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col, start: src.len(), end: src.len() });
    Ok(out)
}

/// Token cursor shared by all the text formats.
#[derive(Debug, Clone)]
pub struct Cursor<'s> {
    pub src: &'s str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'s> Cursor<'s> {
    pub fn new(src: &'s str) -> Result<Self, ParseError> {
        Ok(Cursor { src, toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn token(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn token_at(&self, pos: usize) -> &Token {
        &self.toks[pos.min(self.toks.len() - 1)]
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = self.token();
        ParseError::new(t.line, t.col, msg)
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(q) if q == s)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    pub fn expect_keyword(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_ident(s) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    pub fn expect_num(&mut self) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// Source text from token index `from` (inclusive) to the current token (exclusive).
    pub fn slice_from(&self, from: usize) -> &'s str {
        let a = self.toks[from].start;
        let b = if self.pos > from { self.toks[self.pos - 1].end } else { a };
        &self.src[a..b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyphenated_names_and_arrows() {
        let toks = tokenize("l-pair-eq.1 up-1 a->b -- trailing\n|-> |- x").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("l-pair-eq".into()),
                Tok::Punct("."),
                Tok::Num(1),
                Tok::Ident("up-1".into()),
                Tok::Ident("a".into()),
                Tok::Punct("->"),
                Tok::Ident("b".into()),
                Tok::Punct("|->"),
                Tok::Punct("|-"),
                Tok::Ident("x".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn reports_position() {
        let err = tokenize("ok\n  $").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }
}
