//! Hand-written lexer shared by every surface grammar.
//!
//! The lexer is pull-based so that parsers can switch to raw mode (waveform
//! text is not tokenizable with the formula rules: `01a:2x` must stay intact).

use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Str(String),
    /// `@sync`, `@null`
    At(String),
    /// `#implies`, `#lhrs`
    Hash(String),
    LBrack2,
    RBrack2,
    LBrack,
    RBrack,
    BoxOp,
    Diamond,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Caret,
    Bang,
    AndAnd,
    OrOr,
    Implies,
    Iff,
    Star,
    Dot,
    Comma,
    Colon,
    Semi,
    Slash,
    LeadsTo,
    Minus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Nat(n) => return write!(f, "number `{n}`"),
            Tok::Str(s) => return write!(f, "string {s:?}"),
            Tok::At(s) => return write!(f, "`@{s}`"),
            Tok::Hash(s) => return write!(f, "`#{s}`"),
            Tok::LBrack2 => "[[",
            Tok::RBrack2 => "]]",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::BoxOp => "[]",
            Tok::Diamond => "<>",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Caret => "^",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Implies => "=>",
            Tok::Iff => "<=>",
            Tok::Star => "*",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Slash => "/",
            Tok::LeadsTo => "~>",
            Tok::Minus => "-",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone)]
pub struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    col: usize,
    peeked: Option<Token>,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src, offset: 0, line: 1, col: 1, peeked: None }
    }

    pub fn source(&self) -> &'a str {
        self.src
    }

    fn here(&self) -> Pos {
        Pos { offset: self.offset, line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.offset..].chars().next()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn at(&self, k: usize) -> Option<char> {
        self.src[self.offset..].chars().nth(k)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.at(0) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.at(1) == Some('/') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn error_at(&self, pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: pos.line, col: pos.col, msg: msg.into() }
    }

    fn lex(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let pos = self.here();
        let Some(c) = self.at(0) else {
            return Ok(Token { tok: Tok::Eof, pos });
        };
        let two = |a: char, b: char, s: &Self| s.at(0) == Some(a) && s.at(1) == Some(b);
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            Tok::Ident(self.word())
        } else if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(d) = self.at(0).and_then(|d| d.to_digit(10)) {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(d as u64))
                    .ok_or_else(|| self.error_at(pos, "numeric constant overflows"))?;
                self.bump();
            }
            Tok::Nat(n)
        } else if c == '@' || c == '#' {
            self.bump();
            let w = self.word();
            if w.is_empty() {
                return Err(self.error_at(pos, format!("expected a keyword after `{c}`")));
            }
            if c == '@' {
                Tok::At(w)
            } else {
                Tok::Hash(w)
            }
        } else if c == '"' {
            self.bump();
            let mut s = String::new();
            loop {
                match self.bump() {
                    Some('"') => break,
                    Some(ch) => s.push(ch),
                    None => return Err(self.error_at(pos, "unterminated string")),
                }
            }
            Tok::Str(s)
        } else if two('[', '[', self) {
            self.bump();
            self.bump();
            Tok::LBrack2
        } else if two(']', ']', self) {
            self.bump();
            self.bump();
            Tok::RBrack2
        } else if two('[', ']', self) {
            self.bump();
            self.bump();
            Tok::BoxOp
        } else if self.src[self.offset..].starts_with("<=>") {
            self.bump();
            self.bump();
            self.bump();
            Tok::Iff
        } else if two('<', '>', self) {
            self.bump();
            self.bump();
            Tok::Diamond
        } else if two('<', '=', self) {
            self.bump();
            self.bump();
            Tok::Le
        } else if two('>', '=', self) {
            self.bump();
            self.bump();
            Tok::Ge
        } else if two('=', '>', self) {
            self.bump();
            self.bump();
            Tok::Implies
        } else if two('&', '&', self) {
            self.bump();
            self.bump();
            Tok::AndAnd
        } else if two('|', '|', self) {
            self.bump();
            self.bump();
            Tok::OrOr
        } else if two('~', '>', self) {
            self.bump();
            self.bump();
            Tok::LeadsTo
        } else {
            self.bump();
            match c {
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '=' => Tok::Eq,
                '^' => Tok::Caret,
                '!' => Tok::Bang,
                '*' => Tok::Star,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '/' => Tok::Slash,
                '-' => Tok::Minus,
                _ => return Err(self.error_at(pos, format!("unexpected character `{c}`"))),
            }
        };
        Ok(Token { tok, pos })
    }

    fn word(&mut self) -> String {
        let start = self.offset;
        while matches!(self.at(0), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        self.src[start..self.offset].to_string()
    }

    pub fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.peeked.is_none() {
            let t = self.lex()?;
            self.peeked = Some(t);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    pub fn next(&mut self) -> Result<Token, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    /// Raw source text up to (not including) the next `stop` character, which
    /// is consumed. Any peeked token is un-read first.
    pub fn raw_until(&mut self, stop: char) -> Result<(String, Pos), ParseError> {
        if let Some(t) = self.peeked.take() {
            self.offset = t.pos.offset;
            self.line = t.pos.line;
            self.col = t.pos.col;
        }
        self.skip_trivia();
        let pos = self.here();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some(c) if c == stop => return Ok((out.trim_end().to_string(), pos)),
                Some(c) => out.push(c),
                None => return Err(self.error_at(pos, format!("expected `{stop}`"))),
            }
        }
    }

    /// Raw text up to the `}` closing an already consumed `{`, which is
    /// consumed too.
    pub fn raw_block(&mut self) -> Result<(String, Pos), ParseError> {
        if let Some(t) = self.peeked.take() {
            self.offset = t.pos.offset;
            self.line = t.pos.line;
            self.col = t.pos.col;
        }
        let pos = self.here();
        let mut out = String::new();
        let mut depth = 0usize;
        loop {
            match self.bump() {
                Some('}') if depth == 0 => return Ok((out, pos)),
                Some(c) => {
                    match c {
                        '{' => depth += 1,
                        '}' => depth -= 1,
                        _ => {}
                    }
                    out.push(c);
                }
                None => return Err(self.error_at(pos, "unclosed `{`")),
            }
        }
    }

    pub fn error(&mut self, msg: impl Into<String>) -> ParseError {
        let pos = match self.peek() {
            Ok(t) => t.pos,
            Err(e) => return e,
        };
        self.error_at(pos, msg)
    }

    pub fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        let t = self.next()?;
        if t.tok == want {
            Ok(t.pos)
        } else {
            Err(self.error_at(t.pos, format!("expected {want}, found {}", t.tok)))
        }
    }

    pub fn eat(&mut self, want: &Tok) -> Result<bool, ParseError> {
        if &self.peek()?.tok == want {
            self.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            other => Err(self.error_at(t.pos, format!("expected identifier, found {other}"))),
        }
    }

    pub fn is_ident(&mut self, kw: &str) -> Result<bool, ParseError> {
        Ok(matches!(&self.peek()?.tok, Tok::Ident(s) if s == kw))
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        let t = self.next()?;
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.error_at(t.pos, format!("unexpected {} after end of expression", t.tok)))
        }
    }
}
