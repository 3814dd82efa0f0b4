//! Recursive-descent parser for the term grammar.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr   := term (('+' | '-') term)*          left-associative
//! term   := power (('*' | '/' | '%') power)*  left-associative
//! power  := atom ('^' power)?                 right-associative
//! atom   := literal | identifier | '(' expr ')'
//! ```
//!
//! Literals are non-negative decimal integers; there is no unary minus
//! (negation is written `0-a`). Whitespace is ignored everywhere.

use crate::term::Term;
use rug::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input where the error was detected.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(Integer),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        match c {
            b'0'..=b'9' => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value = digits.parse::<Integer>().map_err(|e| ParseError {
                    position: start,
                    message: format!("bad integer literal: {e}"),
                })?;
                Ok((Tok::Int(value), start))
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok((Tok::Ident(name.to_owned()), start))
            }
            b'+' | b'-' | b'*' | b'/' | b'%' | b'^' => {
                self.pos += 1;
                Ok((Tok::Op(c as char), start))
            }
            b'(' => {
                self.pos += 1;
                Ok((Tok::LParen, start))
            }
            b')' => {
                self.pos += 1;
                Ok((Tok::RParen, start))
            }
            other => Err(ParseError {
                position: start,
                message: format!("unexpected character {:?}", other as char),
            }),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.cursor].0
    }

    fn pos(&self) -> usize {
        self.toks[self.cursor].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.cursor].0.clone();
        if self.cursor + 1 < self.toks.len() {
            self.cursor += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = lhs.add(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = lhs.sub(self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = lhs.mul(self.power()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = lhs.div(self.power()?);
                }
                Tok::Op('%') => {
                    self.bump();
                    lhs = lhs.modulo(self.power()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Term, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Tok::Op('^')) {
            self.bump();
            // Right-recursion gives right-associativity: 2^3^2 = 2^(3^2).
            let exp = self.power()?;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(Term::Literal(v)),
            Tok::Ident(name) => Ok(Term::Variable(name)),
            Tok::LParen => {
                let inner = self.expr()?;
                let pos = self.pos();
                match self.bump() {
                    Tok::RParen => Ok(inner),
                    other => Err(ParseError {
                        position: pos,
                        message: format!("expected ')', found {}", describe(&other)),
                    }),
                }
            }
            other => Err(ParseError {
                position: pos,
                message: format!("expected literal, variable or '(', found {}", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("literal {v}"),
        Tok::Ident(n) => format!("identifier '{n}'"),
        Tok::Op(c) => format!("'{c}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a term from its textual form.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let (tok, pos) = lexer.next_tok()?;
        let done = tok == Tok::Eof;
        toks.push((tok, pos));
        if done {
            break;
        }
    }
    let mut p = Parser { toks, cursor: 0 };
    let t = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(t),
        other => Err(ParseError {
            position: p.pos(),
            message: format!("expected operator or end of input, found {}", describe(other)),
        }),
    }
}
