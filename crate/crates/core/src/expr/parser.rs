use alloc::format;
use alloc::string::{String, ToString};

use super::{BinOp, Expr, Func};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Token, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Token::End, start));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => return self.number(start),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                return Ok((Token::Ident(self.src[start..self.pos].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Token::Op(c as char),
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b',' => Token::Comma,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<(Token, usize)> {
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let from = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos > from
        };
        let mut pos = self.pos;
        let mut any = digits(&mut pos);
        if pos < bytes.len() && bytes[pos] == b'.' {
            pos += 1;
            any |= digits(&mut pos);
        }
        if !any {
            return Err(Error::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            let mut p = pos + 1;
            if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                p += 1;
            }
            if !digits(&mut p) {
                return Err(Error::Syntax {
                    offset: pos,
                    message: "malformed exponent".into(),
                });
            }
            pos = p;
        }
        self.pos = pos;
        let value: f64 = self.src[start..pos].parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "malformed number".into(),
        })?;
        Ok((Token::Number(value), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Token,
    at: usize,
    dimension: usize,
    params: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let found = match &self.tok {
            Token::End => "end of input".to_string(),
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("`{s}`"),
            Token::Op(c) => format!("`{c}`"),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
        };
        Error::Syntax {
            offset: self.at,
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Token::Op(c @ ('+' | '-')) = self.tok {
            self.bump()?;
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Token::Op(c @ ('*' | '/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Token::Op('-') {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(Expr(alloc::sync::Arc::new(super::Node::Neg(inner))));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.tok == Token::Op('^') {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Token::Number(v) => {
                self.bump()?;
                Ok(Expr::constant(v))
            }
            Token::LParen => {
                self.bump()?;
                let e = self.sum()?;
                if self.tok != Token::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump()?;
                Ok(e)
            }
            Token::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if self.tok == Token::LParen {
                    return self.call(name, at);
                }
                self.identifier(name, at)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn identifier(&self, name: String, at: usize) -> Result<Expr> {
        if let Some(digits) = name.strip_prefix('x') {
            if let Ok(k) = digits.parse::<usize>() {
                if !digits.starts_with('0') && (1..=self.dimension).contains(&k) {
                    return Ok(Expr::var(k - 1));
                }
            }
        }
        if self.params.contains(&name.as_str()) {
            return Ok(Expr::param(&name));
        }
        Err(Error::UnknownIdentifier { name, offset: at })
    }

    fn call(&mut self, name: String, at: usize) -> Result<Expr> {
        let Some(func) = Func::from_name(&name) else {
            return Err(Error::UnknownIdentifier { name, offset: at });
        };
        self.bump()?;
        if self.tok == Token::RParen {
            return Err(Error::Arity {
                name,
                expected: 1,
                found: 0,
                offset: at,
            });
        }
        let arg = self.sum()?;
        let mut found = 1;
        while self.tok == Token::Comma {
            self.bump()?;
            self.sum()?;
            found += 1;
        }
        if found != 1 {
            return Err(Error::Arity {
                name,
                expected: 1,
                found,
                offset: at,
            });
        }
        if self.tok != Token::RParen {
            return Err(self.unexpected("`)`"));
        }
        self.bump()?;
        Ok(Expr::call(func, arg))
    }
}

/// Parses `text` over coordinates `x1..x{dimension}` and the named parameters.
pub fn parse(text: &str, dimension: usize, parameter_names: &[&str]) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        lexer: Lexer { src: text, pos: 0 },
        tok: Token::End,
        at: 0,
        dimension,
        params: parameter_names,
    };
    parser.bump()?;
    let e = parser.sum()?;
    if parser.tok != Token::End {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(e)
}
