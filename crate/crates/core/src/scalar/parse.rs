//! Text syntax for polynomials and linear combinations.
//!
//! The grammar is shared between scalars and word combinations; only the
//! meaning of identifiers differs, so parsing yields an [`Expr`] tree that
//! callers evaluate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{Color, Param, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Num(BigRational),
    /// Identifier with an optional `[pos]` or `[color:pos]` tag.
    Ident {
        name: String,
        tag: Option<(Option<String>, u32)>,
        offset: usize,
    },
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    /// Division by a numeric constant.
    Div(Box<Expr>, BigRational),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    LBracket,
    RBracket,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

const MAX_DEPTH: usize = 64;
/// Bounds both exponent literals and the degree of any value, so that
/// everything the parser accepts prints back in a form it accepts.
const MAX_DEGREE: u32 = 1024;
const MAX_TERMS: usize = 20_000;
/// Monomial products allowed while expanding one expression.
const MAX_WORK: usize = 200_000;
const MAX_BITS: u64 = 4096;

pub(crate) fn rational_bits(c: &BigRational) -> u64 {
    c.numer().bits() + c.denom().bits()
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if d.is_ascii_digit() {
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let n: BigInt = src[i..end]
                .parse()
                .map_err(|_| ParseError::new(i, "bad number"))?;
            out.push((Tok::Num(n), i));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' {
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[i..end].to_string()), i));
            continue;
        }
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ':' => Tok::Colon,
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(ParseError::new(i, format!("unexpected character {c:?}"))),
        };
        it.next();
        out.push((tok, i));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(ParseError::new(off, format!("expected {what}"))),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(
                self.offset(),
                "expression nested too deeply",
            ));
        }
        let mut terms = Vec::new();
        let mut neg = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let t = self.product()?;
            terms.push(if neg { Expr::Neg(Box::new(t)) } else { t });
            match self.peek() {
                Some(Tok::Plus) => neg = false,
                Some(Tok::Minus) => neg = true,
                _ => break,
            }
            self.bump();
            // `a + -b`, `a - -b`
            while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
                neg ^= *t == Tok::Minus;
                self.bump();
            }
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::LParen))
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.power()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    factors.push(self.power()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let off = self.offset();
                    let d = match self.bump() {
                        Some(Tok::Num(n)) => n,
                        _ => {
                            return Err(ParseError::new(
                                off,
                                "only division by an integer is supported",
                            ))
                        }
                    };
                    if d.is_zero() {
                        return Err(ParseError::new(off, "division by zero"));
                    }
                    let last = factors.pop().unwrap();
                    factors.push(Expr::Div(Box::new(last), BigRational::from_integer(d)));
                }
                _ if self.starts_factor() => factors.push(self.power()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let off = self.offset();
            let e = match self.bump() {
                Some(Tok::Num(n)) => n,
                _ => {
                    return Err(ParseError::new(
                        off,
                        "expected a non-negative integer exponent",
                    ))
                }
            };
            let e: u32 = e
                .try_into()
                .ok()
                .filter(|e| *e <= MAX_DEGREE)
                .ok_or_else(|| ParseError::new(off, format!("exponent exceeds {MAX_DEGREE}")))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Expr::Num(BigRational::from_integer(n))),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let tag = if self.peek() == Some(&Tok::LBracket) {
                    self.bump();
                    let toff = self.offset();
                    let (color, pos) = match (self.bump(), self.peek().cloned()) {
                        (Some(Tok::Num(n)), _) => (None, n),
                        (Some(Tok::Ident(c)), Some(Tok::Colon)) => {
                            self.bump();
                            let poff = self.offset();
                            match self.bump() {
                                Some(Tok::Num(n)) => (Some(c), n),
                                _ => return Err(ParseError::new(poff, "expected strand position")),
                            }
                        }
                        _ => return Err(ParseError::new(toff, "expected strand position")),
                    };
                    let pos: u32 = pos.try_into().ok().filter(|p| *p > 0).ok_or_else(|| {
                        ParseError::new(toff, "strand positions are positive integers")
                    })?;
                    self.expect(Tok::RBracket, "']'")?;
                    Some((color, pos))
                } else {
                    None
                };
                Ok(Expr::Ident {
                    name,
                    tag,
                    offset: off,
                })
            }
            _ => Err(ParseError::new(off, "expected a number, identifier or '('")),
        }
    }
}

pub(crate) fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        depth: 0,
    };
    let e = p.sum()?;
    if p.pos < p.toks.len() {
        return Err(ParseError::new(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Evaluates an expression tree in any ring-like target given constants and
/// identifier resolution.
pub(crate) trait Evaluator {
    type Value: Clone;
    fn constant(&self, c: BigRational) -> Self::Value;
    fn ident(
        &self,
        name: &str,
        tag: Option<(Option<String>, u32)>,
        offset: usize,
    ) -> Result<Self::Value, ParseError>;
    fn add(&self, a: Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, a: &Self::Value, c: &BigRational) -> Self::Value;
    /// Term count, used to refuse expressions that expand explosively.
    fn size(&self, a: &Self::Value) -> usize;
    fn degree(&self, a: &Self::Value) -> u32;
    /// Largest coefficient size in bits.
    fn bits(&self, a: &Self::Value) -> u64;

    fn checked_mul(
        &self,
        a: &Self::Value,
        b: &Self::Value,
        work: &mut usize,
    ) -> Result<Self::Value, ParseError> {
        let (m, n) = (self.size(a), self.size(b));
        // products of single terms cost at most the input length
        if m > 1 || n > 1 {
            let width = 1 + (self.bits(a) + self.bits(b)) as usize / 64;
            *work += m.max(1) * n.max(1) * width;
        }
        if *work > MAX_WORK {
            return Err(ParseError::new(0, "expansion is too expensive"));
        }
        let v = self.mul(a, b);
        if self.size(&v) > MAX_TERMS {
            return Err(ParseError::new(
                0,
                format!("expansion exceeds {MAX_TERMS} terms"),
            ));
        }
        if self.degree(&v) > MAX_DEGREE {
            return Err(ParseError::new(0, format!("degree exceeds {MAX_DEGREE}")));
        }
        if self.bits(&v) > MAX_BITS {
            return Err(ParseError::new(
                0,
                format!("coefficient exceeds {MAX_BITS} bits"),
            ));
        }
        Ok(v)
    }

    fn eval(&self, e: &Expr) -> Result<Self::Value, ParseError> {
        self.eval_counted(e, &mut 0)
    }

    fn eval_counted(&self, e: &Expr, work: &mut usize) -> Result<Self::Value, ParseError> {
        Ok(match e {
            Expr::Num(c) => self.constant(c.clone()),
            Expr::Ident { name, tag, offset } => self.ident(name, tag.clone(), *offset)?,
            Expr::Neg(x) => self.scale(&self.eval_counted(x, work)?, &-BigRational::one()),
            Expr::Sum(ts) => {
                let mut acc = self.constant(BigRational::zero());
                for t in ts {
                    acc = self.add(acc, &self.eval_counted(t, work)?);
                }
                acc
            }
            Expr::Product(fs) => {
                let mut acc = self.constant(BigRational::one());
                for f in fs {
                    let f = self.eval_counted(f, work)?;
                    acc = self.checked_mul(&acc, &f, work)?;
                }
                acc
            }
            Expr::Pow(b, e) => {
                let mut b = self.eval_counted(b, work)?;
                let mut acc = self.constant(BigRational::one());
                if self.size(&b) <= 1 {
                    let mut e = *e;
                    while e > 0 {
                        if e & 1 == 1 {
                            acc = self.checked_mul(&acc, &b, work)?;
                        }
                        e >>= 1;
                        if e > 0 {
                            b = self.checked_mul(&b, &b, work)?;
                        }
                    }
                } else {
                    for _ in 0..*e {
                        acc = self.checked_mul(&acc, &b, work)?;
                    }
                }
                acc
            }
            Expr::Div(x, d) => self.scale(&self.eval_counted(x, work)?, &d.recip()),
        })
    }
}

struct ScalarEval;

impl Evaluator for ScalarEval {
    type Value = Scalar;
    fn constant(&self, c: BigRational) -> Scalar {
        Scalar::constant(c)
    }
    fn ident(
        &self,
        name: &str,
        tag: Option<(Option<String>, u32)>,
        _: usize,
    ) -> Result<Scalar, ParseError> {
        Ok(Scalar::param(match tag {
            None => Param::new(name),
            Some((color, pos)) => Param::tagged(
                name,
                color
                    .map(|c| Color::new(&c))
                    .unwrap_or_else(Color::unresolved),
                pos,
            ),
        }))
    }
    fn add(&self, a: Scalar, b: &Scalar) -> Scalar {
        let mut a = a;
        a += b;
        a
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
    fn scale(&self, a: &Scalar, c: &BigRational) -> Scalar {
        a.scale(c)
    }
    fn size(&self, a: &Scalar) -> usize {
        a.len()
    }
    fn degree(&self, a: &Scalar) -> u32 {
        a.degree()
    }
    fn bits(&self, a: &Scalar) -> u64 {
        a.terms().map(|(_, c)| rational_bits(c)).max().unwrap_or(0)
    }
}

/// Parses a polynomial such as `2*b`, `c*beta - 1/2`, `x[1]^2 + x[2]`.
///
/// Tagged identifiers `x[2]` denote dot-ring generators on strand 2; their
/// color is left unresolved unless written `x[red:2]`.
pub fn parse_scalar(src: &str) -> Result<Scalar, ParseError> {
    ScalarEval.eval(&parse_expr(src)?)
}
