//! Polynomial expressions in the chart variables `z1..zN`, `zb1..zbN`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := rational | var | '(' expr ')' | '-' base
//! ```

use std::fmt;

use kstar_core::algebra::{format_rational, parse_rational};
use kstar_core::{ChartFunction, HRational, Rational, ZPoly};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    /// `z{index}` or `zb{index}` with a 1-based index.
    Var { conj: bool, index: usize },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable {name} is out of range for dimension {dim}")]
    IndexOutOfRange { name: String, dim: usize },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { position: self.pos, message: message.into() })
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let Some(d) = self.digits() else {
            return self.error("expected a non-negative integer exponent");
        };
        match d.parse::<u32>() {
            Ok(e) => Ok(Expr::Pow(Box::new(base), e)),
            Err(_) => self.error("exponent too large"),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(b'z') => self.var(),
            Some(c) => self.error(format!("unexpected character '{}'", c as char)),
            None => self.error("unexpected end of input"),
        }
    }

    fn rational(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let num = self.digits().expect("caller saw a digit");
        let mut text = num.to_string();
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let Some(den) = self.digits() else {
                return self.error("expected a denominator");
            };
            text = format!("{num}/{den}");
        }
        match parse_rational(&text) {
            Ok(r) => Ok(Expr::Num(r)),
            Err(_) => Err(ParseError::Syntax { position: start, message: format!("invalid number {text}") }),
        }
    }

    fn var(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let conj = self.src.get(self.pos) == Some(&b'b');
        if conj {
            self.pos += 1;
        }
        let Some(d) = self.digits() else {
            return Err(ParseError::Syntax { position: start, message: "expected a variable index".into() });
        };
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        match d.parse::<usize>() {
            Ok(index) if index >= 1 && index <= self.dim => Ok(Expr::Var { conj, index }),
            _ => Err(ParseError::IndexOutOfRange { name, dim: self.dim }),
        }
    }
}

/// Parses `input` for a chart of dimension `dim`.
pub fn parse(input: &str, dim: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0, dim };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    /// The polynomial denoted by the expression.
    pub fn lower(&self, dim: usize) -> ChartFunction<HRational> {
        ChartFunction::polynomial(dim, self.poly(dim))
    }

    fn poly(&self, dim: usize) -> ZPoly<HRational> {
        use kstar_core::Ring;
        match self {
            Expr::Num(r) => ZPoly::constant(HRational::from_rational(r.clone())),
            Expr::Var { conj, index } => ZPoly::var(if *conj { dim + index - 1 } else { index - 1 }),
            Expr::Add(a, b) => a.poly(dim).add_ref(&b.poly(dim)),
            Expr::Sub(a, b) => a.poly(dim).sub_ref(&b.poly(dim)),
            Expr::Mul(a, b) => a.poly(dim).mul_ref(&b.poly(dim)),
            Expr::Neg(a) => a.poly(dim).neg_ref(),
            Expr::Pow(a, e) => a.poly(dim).pow(*e),
        }
    }

    fn is_base(&self) -> bool {
        matches!(self, Expr::Num(_) | Expr::Var { .. } | Expr::Neg(_))
    }

    fn is_sum(&self) -> bool {
        matches!(self, Expr::Add(..) | Expr::Sub(..))
    }
}

struct Paren<'a>(&'a Expr, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Prints with the fewest parentheses that parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{}", format_rational(r)),
            Expr::Var { conj, index } => write!(f, "z{}{index}", if *conj { "b" } else { "" }),
            Expr::Add(a, b) => write!(f, "{a} + {}", Paren(b, b.is_sum())),
            Expr::Sub(a, b) => write!(f, "{a} - {}", Paren(b, b.is_sum())),
            Expr::Mul(a, b) => {
                write!(f, "{}*{}", Paren(a, a.is_sum()), Paren(b, b.is_sum() || matches!(**b, Expr::Mul(..))))
            }
            Expr::Neg(a) => write!(f, "-{}", Paren(a, !a.is_base())),
            Expr::Pow(a, e) => write!(f, "{}^{e}", Paren(a, !a.is_base())),
        }
    }
}
