//! Whitelisted frequency expressions for config files.
//!
//! Projection-matrix entries are written as exact expressions — "2*pi",
//! "2*pi*sqrt(2)", "pi*(1+sqrt(5))/2" — evaluated to full double precision,
//! so users cannot silently change the problem by typing truncated decimals.
//!
//! Grammar: numbers, `pi`, `sqrt(<expr>)`, `+ - * /`, unary minus and
//! parentheses. Nothing else.

use crate::error::{QpError, Result};

pub fn eval(input: &str) -> Result<f64> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { tokens, pos: 0 };
    let value = parser.expression()?;
    if parser.pos != parser.tokens.len() {
        return Err(QpError::Expr(format!(
            "trailing input after expression in {input:?}"
        )));
    }
    if !value.is_finite() {
        return Err(QpError::Expr(format!("{input:?} evaluates to {value}")));
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Pi,
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '(' => {
                tokens.push(Token::Open);
                i += 1;
            }
            ')' => {
                tokens.push(Token::Close);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, '0'..='9' | '.' | 'e' | 'E')
                {
                    // allow exponent sign
                    if matches!(bytes[i] as char, 'e' | 'E')
                        && i + 1 < bytes.len()
                        && matches!(bytes[i + 1] as char, '+' | '-')
                    {
                        i += 1;
                    }
                    i += 1;
                }
                let text = &input[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| QpError::Expr(format!("bad number {text:?}")))?;
                tokens.push(Token::Number(v));
            }
            'p' if input[i..].starts_with("pi") => {
                tokens.push(Token::Pi);
                i += 2;
            }
            's' if input[i..].starts_with("sqrt") => {
                tokens.push(Token::Sqrt);
                i += 4;
            }
            _ => {
                return Err(QpError::Expr(format!(
                    "unexpected character {c:?} in {input:?}"
                )))
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self) -> Result<f64> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek() {
            match op {
                Token::Plus => {
                    self.next();
                    acc += self.term()?;
                }
                Token::Minus => {
                    self.next();
                    acc -= self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64> {
        let mut acc = self.factor()?;
        while let Some(op) = self.peek() {
            match op {
                Token::Star => {
                    self.next();
                    acc *= self.factor()?;
                }
                Token::Slash => {
                    self.next();
                    let rhs = self.factor()?;
                    if rhs == 0.0 {
                        return Err(QpError::Expr("division by zero".into()));
                    }
                    acc /= rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<f64> {
        match self.next() {
            Some(Token::Number(v)) => Ok(v),
            Some(Token::Pi) => Ok(std::f64::consts::PI),
            Some(Token::Minus) => Ok(-self.factor()?),
            Some(Token::Plus) => self.factor(),
            Some(Token::Sqrt) => {
                match self.next() {
                    Some(Token::Open) => {}
                    _ => return Err(QpError::Expr("sqrt needs a parenthesized argument".into())),
                }
                let arg = self.expression()?;
                match self.next() {
                    Some(Token::Close) => {}
                    _ => return Err(QpError::Expr("unclosed sqrt(".into())),
                }
                if arg < 0.0 {
                    return Err(QpError::Expr(format!("sqrt of negative value {arg}")));
                }
                Ok(arg.sqrt())
            }
            Some(Token::Open) => {
                let v = self.expression()?;
                match self.next() {
                    Some(Token::Close) => Ok(v),
                    _ => Err(QpError::Expr("unclosed parenthesis".into())),
                }
            }
            other => Err(QpError::Expr(format!("unexpected token {other:?}"))),
        }
    }
}
