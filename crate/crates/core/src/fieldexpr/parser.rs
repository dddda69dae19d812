//! Recursive-descent parser for the field expression language.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* right associative *)
//! primary = number | variable | "pi"
//!         | func "(" expr ")" | "(" expr ")" ;
//! func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "tanh" | "abs" ;
//! variable = "x" digit { digit } | "x" | "y" | "z" ;
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{ExprAst, Func};
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: alloc::format!("malformed number `{text}`"),
            })?;
            out.push(Token { tok: Tok::Num(value), offset: start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), offset: start });
            continue;
        }
        // step over the whole UTF-8 character for the message
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax {
            offset: start,
            message: alloc::format!("unexpected character `{ch}`"),
        });
    }
    out.push(Token { tok: Tok::End, offset: src.len() });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => alloc::format!("number {v}"),
            Tok::Ident(s) => alloc::format!("`{s}`"),
            other => alloc::format!("`{}`", tok_text(other)),
        };
        ParseError::Syntax {
            offset: t.offset,
            message: alloc::format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            // `-2` is the literal −2 unless it is the base of a power
            if let (Tok::Num(v), Some(next)) = (&self.peek().tok, self.toks.get(self.pos + 1)) {
                if next.tok != Tok::Caret {
                    let v = -*v;
                    self.bump();
                    return Ok(ExprAst::Num(v));
                }
            }
            let inner = self.unary()?;
            return Ok(ExprAst::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(ExprAst::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExprAst, ParseError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(ExprAst::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func, tok.offset);
                }
                if self.peek().tok == Tok::LParen {
                    return Err(ParseError::UnknownIdentifier { name, offset: tok.offset });
                }
                self.identifier(name, tok.offset)
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn call(&mut self, func: Func, offset: usize) -> Result<ExprAst, ParseError> {
        if self.peek().tok != Tok::LParen {
            return Err(self.unexpected(&alloc::format!("`(` after `{}`", func.name())));
        }
        self.bump();
        if self.peek().tok == Tok::RParen {
            return Err(ParseError::Arity { name: func.name().to_string(), expected: 1, found: 0, offset });
        }
        let arg = self.expr()?;
        let mut found = 1;
        while self.peek().tok == Tok::Comma {
            self.bump();
            self.expr()?;
            found += 1;
        }
        if found != 1 {
            return Err(ParseError::Arity { name: func.name().to_string(), expected: 1, found, offset });
        }
        self.expect_rparen()?;
        Ok(ExprAst::Call(func, Box::new(arg)))
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<ExprAst, ParseError> {
        if name == "pi" {
            return Ok(ExprAst::Num(core::f64::consts::PI));
        }
        let index = match name.as_str() {
            "x" | "y" | "z" if self.dim <= 3 => Some(match name.as_str() {
                "x" => 0,
                "y" => 1,
                _ => 2,
            }),
            _ => name
                .strip_prefix('x')
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(|k| k - 1),
        };
        match index {
            Some(i) if i < self.dim => Ok(ExprAst::Var(i)),
            Some(_) => Err(ParseError::VariableOutOfRange { name, dim: self.dim, offset }),
            None => Err(ParseError::UnknownIdentifier { name, offset }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Caret => "^",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Comma => ",",
        _ => "?",
    }
}

pub(crate) fn parse(src: &str, dim: usize) -> Result<ExprAst, ParseError> {
    if dim == 0 {
        return Err(ParseError::InvalidDimension);
    }
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, dim };
    let ast = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(ast)
}
