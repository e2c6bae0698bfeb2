//! Recursive-descent parser for algebra elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^*')*
//! atom   := scalar | 'W' '[' int (',' int)* ']' | '(' expr ')' | '-' atom
//! scalar := rational 'i' ('z^' int)?
//!         | rational (('+' | '-') rational 'i')? ('z^' int)?
//! ```
//!
//! Whitespace is ignored between tokens. A `+`/`-` directly after a
//! rational is read as the imaginary part of the same literal when the
//! next rational is followed by `i`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{adjoint, multiply, AlgebraElement, PhaseContext};
use crate::error::Result;
use crate::lattice::{Int, LatticeVector};
use crate::scalar::{GaussianRational, PhaseScalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// `c ζ^k`.
    Scalar { value: GaussianRational, zeta: Int },
    Weyl(Vec<Int>),
    Sum(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Negation(Box<Expr>),
    Adjoint(Box<Expr>),
    Group(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

/// Parse `text`, checking every generator against the context dimension.
pub fn parse_element(text: &str, ctx: &PhaseContext) -> PResult<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim: ctx.dim(),
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Sum(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Difference(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        while self.eat(b'*') {
            lhs = Expr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        loop {
            let save = self.pos;
            if self.eat(b'^') {
                if self.eat(b'*') {
                    e = Expr::Adjoint(Box::new(e));
                    continue;
                }
                self.pos = save;
                return Err(self.error("expected '^*'"));
            }
            return Ok(e);
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Group(Box::new(e)))
            }
            Some(b'W') => self.weyl(),
            Some(b'-') => {
                let save = self.pos;
                self.pos += 1;
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos = save;
                    self.scalar()
                } else {
                    Ok(Expr::Negation(Box::new(self.atom()?)))
                }
            }
            Some(c) if c.is_ascii_digit() => self.scalar(),
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn weyl(&mut self) -> PResult<Expr> {
        let start = self.pos;
        self.expect(b'W')?;
        self.expect(b'[')?;
        let mut coords = vec![self.int()?];
        while self.eat(b',') {
            coords.push(self.int()?);
        }
        self.expect(b']')?;
        if coords.len() != self.dim {
            return Err(ParseError {
                offset: start,
                message: format!(
                    "generator has {} indices, the context needs {}",
                    coords.len(),
                    self.dim
                ),
            });
        }
        Ok(Expr::Weyl(coords))
    }

    fn digits(&mut self) -> PResult<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("ascii digits"))
    }

    fn sign(&mut self) -> bool {
        if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        }
    }

    fn int(&mut self) -> PResult<Int> {
        let neg = self.sign();
        let start = self.pos;
        let n = self.digits()?;
        let n = if neg { -n } else { n };
        Int::try_from(n).map_err(|_| ParseError {
            offset: start,
            message: "integer out of range".into(),
        })
    }

    fn rational(&mut self) -> PResult<BigRational> {
        let neg = self.sign();
        let num = self.digits()?;
        let r = if self.eat(b'/') {
            let at = self.pos;
            let den = self.digits()?;
            if den.is_zero() {
                return Err(ParseError {
                    offset: at,
                    message: "zero denominator".into(),
                });
            }
            BigRational::new(num, den)
        } else {
            BigRational::from_integer(num)
        };
        Ok(if neg { -r } else { r })
    }

    /// `('+' | '-') rational 'i'`, or `None` with the position restored.
    fn imaginary_tail(&mut self) -> Option<BigRational> {
        let save = self.pos;
        let neg = match self.peek() {
            Some(b'+') => false,
            Some(b'-') => true,
            _ => return None,
        };
        self.pos += 1;
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos = save;
            return None;
        }
        match self.rational() {
            Ok(r) if self.eat(b'i') => Some(if neg { -r } else { r }),
            _ => {
                self.pos = save;
                None
            }
        }
    }

    fn scalar(&mut self) -> PResult<Expr> {
        let first = self.rational()?;
        let value = if self.eat(b'i') {
            GaussianRational::new(BigRational::zero(), first)
        } else {
            match self.imaginary_tail() {
                Some(im) => GaussianRational::new(first, im),
                None => GaussianRational::real(first),
            }
        };
        let zeta = if self.peek() == Some(b'z') {
            self.pos += 1;
            self.expect(b'^')?;
            self.int()?
        } else {
            0
        };
        Ok(Expr::Scalar { value, zeta })
    }
}

impl Expr {
    /// Evaluate with the twisted product of `ctx`.
    pub fn eval(&self, ctx: &PhaseContext) -> Result<AlgebraElement> {
        let dim = ctx.dim();
        Ok(match self {
            Expr::Scalar { value, zeta } => {
                AlgebraElement::scalar(dim, PhaseScalar::monomial(value.clone(), *zeta))
            }
            Expr::Weyl(c) => crate::algebra::weyl(&LatticeVector::new(c.clone())?, ctx)?,
            Expr::Sum(a, b) => a.eval(ctx)?.add(&b.eval(ctx)?)?,
            Expr::Difference(a, b) => a.eval(ctx)?.sub(&b.eval(ctx)?)?,
            Expr::Product(a, b) => multiply(&a.eval(ctx)?, &b.eval(ctx)?, ctx)?,
            Expr::Negation(a) => a.eval(ctx)?.neg(),
            Expr::Adjoint(a) => adjoint(&a.eval(ctx)?),
            Expr::Group(a) => a.eval(ctx)?,
        })
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            Expr::Scalar { .. } | Expr::Weyl(_) | Expr::Group(_) | Expr::Negation(_) | Expr::Adjoint(_)
        )
    }

    fn is_term(&self) -> bool {
        self.is_atom() || matches!(self, Expr::Product(..))
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text; parsing it gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, e: &Expr, ok: bool| {
            if ok {
                write!(f, "{e}")
            } else {
                write!(f, "({e})")
            }
        };
        match self {
            Expr::Scalar { value, zeta } => {
                write_rational(f, &value.re)?;
                if !value.im.is_zero() {
                    f.write_str(if value.im.is_negative() { "-" } else { "+" })?;
                    write_rational(f, &value.im.abs())?;
                    f.write_str("i")?;
                }
                if *zeta != 0 {
                    write!(f, " z^{zeta}")?;
                }
                Ok(())
            }
            Expr::Weyl(c) => {
                let parts: Vec<String> = c.iter().map(Int::to_string).collect();
                write!(f, "W[{}]", parts.join(","))
            }
            Expr::Sum(a, b) | Expr::Difference(a, b) => {
                write!(f, "{a}")?;
                f.write_str(if matches!(self, Expr::Sum(..)) { " + " } else { " - " })?;
                paren(f, b, b.is_term())
            }
            Expr::Product(a, b) => {
                paren(f, a, a.is_term())?;
                f.write_str(" * ")?;
                paren(f, b, b.is_atom())
            }
            Expr::Negation(a) => {
                f.write_str("-")?;
                match a.as_ref() {
                    // `-` before a digit would fuse into a signed literal
                    Expr::Scalar { .. } => write!(f, "({a})"),
                    _ => paren(f, a, a.is_atom()),
                }
            }
            Expr::Adjoint(a) => {
                paren(f, a, a.is_atom())?;
                f.write_str("^*")
            }
            Expr::Group(a) => write!(f, "({a})"),
        }
    }
}
