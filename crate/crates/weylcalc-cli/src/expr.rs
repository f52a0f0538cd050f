//! Recursive-descent parser for operator, symbol, and polynomial
//! expressions over the tokens x_i, xi_i, d_i, rational literals, and
//! + - * ^ with parentheses. Operator products are compositions and are
//! normalized by construction; symbol and polynomial products commute.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use weylcalc::classical::PolySymbol;
use weylcalc::ratpoly::{Rational, RationalPoly};
use weylcalc::weyl::DiffOp;

#[derive(Debug)]
pub enum ParseError {
    Syntax { pos: usize, msg: String },
    Kind { msg: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, msg } => {
                write!(f, "syntax error at position {}: {}", pos, msg)
            }
            ParseError::Kind { msg } => write!(f, "kind error: {}", msg),
        }
    }
}

impl std::error::Error for ParseError {}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn kind_err(msg: impl Into<String>) -> ParseError {
    ParseError::Kind { msg: msg.into() }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarKind {
    X,
    Xi,
    D,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Num(Rational),
    /// 0-based axis.
    Var(VarKind, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Num(BigInt),
    Var(VarKind, usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Comma,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1;
            }
            ',' => {
                out.push((i, Token::Comma));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Token::Num(n)));
            }
            'x' | 'd' => {
                let start = i;
                let kind = if c == 'x' && i + 1 < bytes.len() && bytes[i + 1] == b'i' {
                    i += 2;
                    VarKind::Xi
                } else {
                    i += 1;
                    if c == 'x' {
                        VarKind::X
                    } else {
                        VarKind::D
                    }
                };
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return Err(syntax(start, "variable needs an index, e.g. x1"));
                }
                let idx: usize = text[digits_start..i]
                    .parse()
                    .map_err(|_| syntax(start, "index too large"))?;
                if idx == 0 {
                    return Err(syntax(start, "variable indices start at 1"));
                }
                out.push((start, Token::Var(kind, idx - 1)));
            }
            _ => return Err(syntax(i, format!("unexpected character '{}'", c))),
        }
    }
    Ok(out)
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

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.here(), format!("expected {}", what)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let pos = self.here();
            match self.bump() {
                Some(Token::Num(n)) => {
                    let e = n
                        .to_u32()
                        .ok_or_else(|| syntax(pos, "exponent out of range"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(syntax(pos, "expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Token::Num(n)) => {
                // rational literal p/q
                if self.peek() == Some(&Token::Slash) {
                    self.pos += 1;
                    let dpos = self.here();
                    match self.bump() {
                        Some(Token::Num(d)) => {
                            if d.is_zero() {
                                return Err(syntax(dpos, "zero denominator"));
                            }
                            Ok(Expr::Num(Rational::new(n, d)))
                        }
                        _ => Err(syntax(dpos, "expected an integer denominator")),
                    }
                } else {
                    Ok(Expr::Num(Rational::from(n)))
                }
            }
            Some(Token::Var(kind, axis)) => Ok(Expr::Var(kind, axis)),
            Some(Token::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(syntax(pos, "expected a value")),
        }
    }
}

/// Parse a single expression; trailing input is an error.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(syntax(p.here(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parse a comma-separated list of expressions (1-form components).
pub fn parse_list(text: &str) -> Result<Vec<Expr>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let mut out = vec![p.expr()?];
    while p.peek() == Some(&Token::Comma) {
        p.pos += 1;
        out.push(p.expr()?);
    }
    if p.pos != p.tokens.len() {
        return Err(syntax(p.here(), "unexpected trailing input"));
    }
    Ok(out)
}

/// Highest 1-based variable index mentioned, or 0.
pub fn max_index(e: &Expr) -> usize {
    match e {
        Expr::Num(_) => 0,
        Expr::Var(_, axis) => axis + 1,
        Expr::Neg(a) => max_index(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            max_index(a).max(max_index(b))
        }
        Expr::Pow(a, _) => max_index(a),
    }
}

/// Evaluate as a differential operator; `*` is composition.
pub fn eval_operator(e: &Expr, dim: usize) -> Result<DiffOp, ParseError> {
    Ok(match e {
        Expr::Num(c) => DiffOp::from_function(RationalPoly::constant(dim, c.clone())),
        Expr::Var(VarKind::X, axis) => DiffOp::from_function(RationalPoly::var(dim, *axis)),
        Expr::Var(VarKind::D, axis) => DiffOp::partial(dim, *axis),
        Expr::Var(VarKind::Xi, _) => {
            return Err(kind_err("xi variables are not allowed in an operator"))
        }
        Expr::Neg(a) => eval_operator(a, dim)?.neg(),
        Expr::Add(a, b) => eval_operator(a, dim)?
            .add(&eval_operator(b, dim)?)
            .expect("same dimension"),
        Expr::Sub(a, b) => eval_operator(a, dim)?
            .sub(&eval_operator(b, dim)?)
            .expect("same dimension"),
        Expr::Mul(a, b) => eval_operator(a, dim)?
            .compose(&eval_operator(b, dim)?)
            .expect("same dimension"),
        Expr::Pow(a, k) => {
            let base = eval_operator(a, dim)?;
            let mut acc = DiffOp::identity(dim);
            for _ in 0..*k {
                acc = acc.compose(&base).expect("same dimension");
            }
            acc
        }
    })
}

/// Evaluate as a polynomial symbol; `*` commutes.
pub fn eval_symbol(e: &Expr, dim: usize) -> Result<PolySymbol, ParseError> {
    Ok(match e {
        Expr::Num(c) => {
            PolySymbol::from_function(RationalPoly::constant(dim, c.clone()))
        }
        Expr::Var(VarKind::X, axis) => {
            PolySymbol::from_function(RationalPoly::var(dim, *axis))
        }
        Expr::Var(VarKind::Xi, axis) => PolySymbol::xi(dim, *axis),
        Expr::Var(VarKind::D, _) => {
            return Err(kind_err("d variables are not allowed in a symbol"))
        }
        Expr::Neg(a) => eval_symbol(a, dim)?.neg(),
        Expr::Add(a, b) => eval_symbol(a, dim)?
            .add(&eval_symbol(b, dim)?)
            .expect("same dimension"),
        Expr::Sub(a, b) => eval_symbol(a, dim)?
            .sub(&eval_symbol(b, dim)?)
            .expect("same dimension"),
        Expr::Mul(a, b) => eval_symbol(a, dim)?
            .mul(&eval_symbol(b, dim)?)
            .expect("same dimension"),
        Expr::Pow(a, k) => eval_symbol(a, dim)?.pow(*k),
    })
}

/// Evaluate as a polynomial in x only.
pub fn eval_poly(e: &Expr, dim: usize) -> Result<RationalPoly, ParseError> {
    Ok(match e {
        Expr::Num(c) => RationalPoly::constant(dim, c.clone()),
        Expr::Var(VarKind::X, axis) => RationalPoly::var(dim, *axis),
        Expr::Var(VarKind::Xi, _) | Expr::Var(VarKind::D, _) => {
            return Err(kind_err("only x variables are allowed in a polynomial"))
        }
        Expr::Neg(a) => eval_poly(a, dim)?.neg(),
        Expr::Add(a, b) => eval_poly(a, dim)?
            .add(&eval_poly(b, dim)?)
            .expect("same dimension"),
        Expr::Sub(a, b) => eval_poly(a, dim)?
            .sub(&eval_poly(b, dim)?)
            .expect("same dimension"),
        Expr::Mul(a, b) => eval_poly(a, dim)?
            .mul(&eval_poly(b, dim)?)
            .expect("same dimension"),
        Expr::Pow(a, k) => eval_poly(a, dim)?.pow(*k),
    })
}

/// Sanity helper: 1 for expressions with no variables.
pub fn inferred_dim(exprs: &[&Expr]) -> usize {
    exprs.iter().map(|e| max_index(e)).max().unwrap_or(0).max(1)
}
