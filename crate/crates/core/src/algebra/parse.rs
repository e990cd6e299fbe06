//! Recursive-descent parser for translation expressions.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary ('*' unary)*
//! unary    := '-' unary | factor
//! factor   := atom ('^' uint)?
//! atom     := 'l' | rational | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```
//!
//! `λ` is accepted as a synonym for `l`. Whitespace is ignored between tokens.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{LambdaPoly, Rational};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {message}")]
pub struct SyntaxError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

pub fn parse_expr(text: &str) -> Result<LambdaPoly, SyntaxError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.error("empty expression"));
    }
    let poly = parser.expr()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.error(&format!("unexpected '{}'", parser.chars[parser.pos])));
    }
    Ok(poly)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> SyntaxError {
        SyntaxError {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    /// Consumes `c` (after whitespace) if present.
    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LambdaPoly, SyntaxError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LambdaPoly, SyntaxError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LambdaPoly, SyntaxError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<LambdaPoly, SyntaxError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.uint().ok_or_else(|| self.error("expected exponent"))?;
            let exp = digits
                .to_u32()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| SyntaxError {
                    column: start + 1,
                    message: format!("exponent exceeds {MAX_EXPONENT}"),
                })?;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<LambdaPoly, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            Some('l') | Some('λ') => {
                self.pos += 1;
                Ok(LambdaPoly::lambda())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational().map(LambdaPoly::constant),
            Some(c) => Err(self.error(&format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn rational(&mut self) -> Result<Rational, SyntaxError> {
        let num = self.uint().ok_or_else(|| self.error("expected integer"))?;
        if self.eat('/') {
            self.skip_ws();
            let at = self.pos;
            let den = self.uint().ok_or_else(|| self.error("expected denominator"))?;
            if den.is_zero() {
                return Err(SyntaxError {
                    column: at + 1,
                    message: "zero denominator".to_string(),
                });
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::from_integer(num))
    }

    fn uint(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().ok()
    }
}
