//! Infix text form of expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := 'x' | number | '-' number | '(' expr ')'
//!         | ('sin'|'cos'|'tan'|'exp'|'tanh') '(' expr ')'
//!         | ('min'|'max'|'pow') '(' expr ',' ['-'] number ')'
//! ```
//!
//! Binary operators are left-associative; `*` and `/` bind tighter than
//! `+` and `-`. [`to_text`] emits the fewest parentheses that preserve the
//! tree, so parsing its output gives back the same tree.

use std::fmt;

use thiserror::Error;

use super::{ActivationExpr, BinaryOp, BoundOp, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Constant(f64);

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{:?}` is the shortest text that reads back to the same f64
        write!(f, "{:?}", self.0)
    }
}

pub(crate) fn to_text(expr: &ActivationExpr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn write_expr(expr: &ActivationExpr, out: &mut String) {
    use ActivationExpr as E;
    match expr {
        E::Input => out.push('x'),
        E::Const(c) => {
            if c.is_sign_negative() {
                out.push_str(&format!("({})", Constant(*c)));
            } else {
                out.push_str(&Constant(*c).to_string());
            }
        }
        E::Unary(op, c) => {
            out.push_str(op.name());
            out.push('(');
            write_expr(c, out);
            out.push(')');
        }
        E::Bounded(op, c, bound) => {
            out.push_str(op.name());
            out.push('(');
            write_expr(c, out);
            out.push_str(&format!(",{})", Constant(*bound)));
        }
        E::Pow(c, e) => {
            out.push_str("pow(");
            write_expr(c, out);
            out.push_str(&format!(",{})", Constant(*e)));
        }
        E::Binary(op, l, r) => {
            let wrap_left = matches!(**l, E::Binary(lop, ..) if lop.precedence() < op.precedence());
            let wrap_right =
                matches!(**r, E::Binary(rop, ..) if rop.precedence() <= op.precedence());
            write_operand(l, wrap_left, out);
            out.push(op.symbol());
            write_operand(r, wrap_right, out);
        }
    }
}

fn write_operand(expr: &ActivationExpr, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        write_expr(expr, out);
        out.push(')');
    } else {
        write_expr(expr, out);
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn err(position: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '+' | '-' | '*' | '/' => {
                tokens.push((start, Token::Op(c)));
                i += 1;
            }
            '(' => {
                tokens.push((start, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((start, Token::RParen));
                i += 1;
            }
            ',' => {
                tokens.push((start, Token::Comma));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            c if c.is_ascii_digit() || c == '.' => {
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
                let literal = &text[start..i];
                let value: f64 = literal
                    .parse()
                    .map_err(|_| err(start, format!("malformed number {literal:?}")))?;
                tokens.push((start, Token::Number(value)));
            }
            other => return Err(err(start, format!("unexpected character {other:?}"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        let at = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(err(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<ActivationExpr, ParseError> {
        let mut left = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' {
                BinaryOp::Add
            } else {
                BinaryOp::Sub
            };
            self.pos += 1;
            let right = self.term()?;
            left = ActivationExpr::binary(op, left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<ActivationExpr, ParseError> {
        let mut left = self.factor()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' {
                BinaryOp::Mul
            } else {
                BinaryOp::Div
            };
            self.pos += 1;
            let right = self.factor()?;
            left = ActivationExpr::binary(op, left, right);
        }
        Ok(left)
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let at = self.offset();
        let negative = matches!(self.peek(), Some(Token::Op('-')));
        if negative {
            self.pos += 1;
        }
        match self.next() {
            Some(Token::Number(v)) => Ok(if negative { -v } else { v }),
            _ => Err(err(at, "expected a numeric constant")),
        }
    }

    fn factor(&mut self) -> Result<ActivationExpr, ParseError> {
        let at = self.offset();
        match self.next() {
            Some(Token::Number(v)) => Ok(ActivationExpr::Const(v)),
            Some(Token::Op('-')) => {
                self.pos -= 1;
                Ok(ActivationExpr::Const(self.signed_number()?))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if name == "x" {
                    return Ok(ActivationExpr::Input);
                }
                let unary = UnaryOp::ALL.iter().copied().find(|op| op.name() == name);
                let two_arg = match name.as_str() {
                    "min" => Some(Some(BoundOp::Min)),
                    "max" => Some(Some(BoundOp::Max)),
                    "pow" => Some(None),
                    _ => None,
                };
                if unary.is_none() && two_arg.is_none() {
                    return Err(err(at, format!("unknown identifier {name:?}")));
                }
                self.expect(Token::LParen, &format!("'(' after {name}"))?;
                let child = self.expr()?;
                let node = if let Some(op) = unary {
                    ActivationExpr::unary(op, child)
                } else {
                    self.expect(Token::Comma, &format!("',' in {name}(..)"))?;
                    let constant = self.signed_number()?;
                    match two_arg.flatten() {
                        Some(op) => ActivationExpr::bounded(op, child, constant),
                        None => ActivationExpr::pow(child, constant),
                    }
                };
                self.expect(Token::RParen, "')'")?;
                Ok(node)
            }
            Some(_) => Err(err(at, "unexpected token")),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

pub fn parse_text(text: &str) -> Result<ActivationExpr, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(err(parser.offset(), "unexpected trailing input"));
    }
    Ok(expr)
}
