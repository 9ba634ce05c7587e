//! Exact scalar expressions.
//!
//! Generator tables are written with literals such as `(-sqrt(5)-1)/4` or
//! `cospi(1/3)`. An [`ExactScalar`] keeps the expression tree exactly as
//! written and evaluates it to `f64` on demand. No simplification is done.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := rational | 'sqrt(' int ')' | 'cospi(' rational ')'
//!           | 'sinpi(' rational ')' | '-' factor | '(' expr ')'
//! rational := int | int '/' int      (no whitespace around '/')
//! ```
//!
//! Inside `cospi(..)`/`sinpi(..)` the rational may carry a leading sign.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::tolerance::EPS_SCALAR;

/// A rational number `num/den` with `den > 0`, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Some(Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Rational(Rational),
    Sqrt(u64),
    CosPi(Rational),
    SinPi(Rational),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
}

/// A real number given by an expression tree.
///
/// Construction rejects square roots of non-positive integers and division
/// by anything that evaluates to zero, so evaluation itself cannot fail.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactScalar {
    root: Node,
}

impl ExactScalar {
    pub fn rational(r: Rational) -> Self {
        ExactScalar {
            root: Node::Rational(r),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::integer(n))
    }

    pub fn sqrt(n: i64) -> Result<Self> {
        if n <= 0 {
            return Err(Error::Domain {
                offset: 0,
                message: format!("sqrt of non-positive integer {n}"),
            });
        }
        Ok(ExactScalar {
            root: Node::Sqrt(n as u64),
        })
    }

    pub fn cospi(t: Rational) -> Self {
        ExactScalar {
            root: Node::CosPi(t),
        }
    }

    pub fn sinpi(t: Rational) -> Self {
        ExactScalar {
            root: Node::SinPi(t),
        }
    }

    /// Quotient; fails when `rhs` evaluates to zero.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        let d = rhs.eval();
        if d.abs() <= EPS_SCALAR {
            return Err(Error::Domain {
                offset: 0,
                message: format!("division by an expression evaluating to {d:e}"),
            });
        }
        Ok(ExactScalar {
            root: Node::Div(Box::new(self.root), Box::new(rhs.root)),
        })
    }

    /// Evaluate to double precision.
    pub fn eval(&self) -> f64 {
        eval_node(&self.root)
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;

    fn neg(self) -> ExactScalar {
        ExactScalar {
            root: Node::Neg(Box::new(self.root)),
        }
    }
}

macro_rules! binary_node {
    ($trait:ident, $method:ident, $node:ident) => {
        impl $trait for ExactScalar {
            type Output = ExactScalar;

            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar {
                    root: Node::$node(Box::new(self.root), Box::new(rhs.root)),
                }
            }
        }
    };
}

binary_node!(Add, add, Add);
binary_node!(Sub, sub, Sub);
binary_node!(Mul, mul, Mul);

impl fmt::Display for ExactScalar {
    /// Fully parenthesized; the output parses back to a tree with the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

fn write_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Rational(r) if r.num < 0 => write!(f, "(-{})", Rational::new(-r.num, r.den).unwrap()),
        Node::Rational(r) if r.den != 1 => write!(f, "({r})"),
        Node::Rational(r) => write!(f, "{r}"),
        Node::Sqrt(n) => write!(f, "sqrt({n})"),
        Node::CosPi(t) => write!(f, "cospi({t})"),
        Node::SinPi(t) => write!(f, "sinpi({t})"),
        Node::Neg(a) => {
            f.write_str("-(")?;
            write_node(a, f)?;
            f.write_str(")")
        }
        Node::Add(a, b) => write_binary(a, "+", b, f),
        Node::Sub(a, b) => write_binary(a, "-", b, f),
        Node::Mul(a, b) => write_binary(a, "*", b, f),
        Node::Div(a, b) => write_binary(a, "/", b, f),
    }
}

fn write_binary(a: &Node, op: &str, b: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("(")?;
    write_node(a, f)?;
    write!(f, " {op} ")?;
    write_node(b, f)?;
    f.write_str(")")
}

fn eval_node(node: &Node) -> f64 {
    match node {
        Node::Rational(r) => r.to_f64(),
        Node::Sqrt(n) => (*n as f64).sqrt(),
        Node::CosPi(t) => cospi(*t),
        Node::SinPi(t) => sinpi(*t),
        Node::Neg(a) => -eval_node(a),
        Node::Add(a, b) => eval_node(a) + eval_node(b),
        Node::Sub(a, b) => eval_node(a) - eval_node(b),
        Node::Mul(a, b) => eval_node(a) * eval_node(b),
        Node::Div(a, b) => eval_node(a) / eval_node(b),
    }
}

/// `cos(pi * t)` with exact argument reduction on the rational.
pub fn cospi(t: Rational) -> f64 {
    // reduce t into [0, 2)
    let two_den = 2 * t.den as i128;
    let num = (t.num as i128).rem_euclid(two_den);
    let den = t.den as i128;
    // cos(pi t) = cos(pi (2 - t)), fold into [0, 1]
    let num = if num > den { two_den - num } else { num };
    // cos(pi t) = -cos(pi (1 - t)), fold into [0, 1/2]
    if 2 * num > den {
        -cos_first_quadrant(den - num, den)
    } else {
        cos_first_quadrant(num, den)
    }
}

/// `sin(pi * t)`, computed as `cos(pi (1/2 - t))`.
pub fn sinpi(t: Rational) -> f64 {
    let num = t.den as i128 - 2 * t.num as i128;
    let den = 2 * t.den as i128;
    let g = gcd(num.unsigned_abs() as u64, den as u64).max(1) as i128;
    cospi_i128(num / g, den / g)
}

fn cospi_i128(num: i128, den: i128) -> f64 {
    let two_den = 2 * den;
    let num = num.rem_euclid(two_den);
    let num = if num > den { two_den - num } else { num };
    if 2 * num > den {
        -cos_first_quadrant(den - num, den)
    } else {
        cos_first_quadrant(num, den)
    }
}

/// `cos(pi num/den)` for `0 <= num/den <= 1/2`.
fn cos_first_quadrant(num: i128, den: i128) -> f64 {
    let g = gcd(num as u64, den as u64).max(1) as i128;
    let (num, den) = (num / g, den / g);
    match (num, den) {
        (0, _) => 1.0,
        (1, 2) => 0.0,
        (1, 3) => 0.5,
        (1, 4) => std::f64::consts::FRAC_1_SQRT_2,
        (1, 6) => 3f64.sqrt() / 2.0,
        _ => {
            if 4 * num <= den {
                (std::f64::consts::PI * num as f64 / den as f64).cos()
            } else {
                // sin is better conditioned near pi/2
                let rest = den - 2 * num;
                (std::f64::consts::PI * rest as f64 / (2 * den) as f64).sin()
            }
        }
    }
}

/// Parse a complete scalar expression.
pub fn parse_scalar(text: &str) -> Result<ExactScalar> {
    let mut p = Parser::new(text, 0);
    let s = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(s)
}

/// Parse a scalar expression starting at byte `start`, stopping at the first
/// byte that cannot continue it. Returns the expression and the end offset.
pub(crate) fn parse_scalar_prefix(text: &str, start: usize) -> Result<(ExactScalar, usize)> {
    let mut p = Parser::new(text, start);
    let s = p.expr()?;
    p.skip_ws();
    Ok((s, p.pos))
}

/// Parse an optionally signed `int` or `int/int` starting at byte `start`.
pub(crate) fn parse_rational_prefix(text: &str, start: usize) -> Result<(Rational, usize)> {
    let mut p = Parser::new(text, start);
    let r = p.rational(true)?;
    p.skip_ws();
    Ok((r, p.pos))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, pos: usize) -> Self {
        Parser {
            src: text.as_bytes(),
            pos,
        }
    }

    fn syntax(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    /// Consume `name` followed by optional whitespace and `(`.
    fn eat_call(&mut self, name: &str) -> bool {
        self.skip_ws();
        let save = self.pos;
        if self.src[self.pos..].starts_with(name.as_bytes()) {
            self.pos += name.len();
            if self.eat(b'(') {
                return true;
            }
        }
        self.pos = save;
        false
    }

    fn expr(&mut self) -> Result<ExactScalar> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExactScalar> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.factor()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.factor()?;
                acc = acc.checked_div(rhs).map_err(|e| relocate(e, at))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ExactScalar> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.rational(false)?;
                Ok(ExactScalar::rational(r))
            }
            Some(_) => {
                let at = self.pos;
                if self.eat_call("sqrt") {
                    let n = self.signed_int()?;
                    self.expect(b')')?;
                    ExactScalar::sqrt(n).map_err(|e| relocate(e, at))
                } else if self.eat_call("cospi") {
                    let t = self.rational(true)?;
                    self.expect(b')')?;
                    Ok(ExactScalar::cospi(t))
                } else if self.eat_call("sinpi") {
                    let t = self.rational(true)?;
                    self.expect(b')')?;
                    Ok(ExactScalar::sinpi(t))
                } else {
                    Err(self.syntax("expected a number, sqrt(, cospi(, sinpi(, `-` or `(`"))
                }
            }
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn unsigned_int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse::<i64>().map_err(|_| Error::Syntax {
            offset: start,
            message: "integer literal out of range".into(),
        })
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let n = self.unsigned_int()?;
        Ok(if neg { -n } else { n })
    }

    fn rational(&mut self, signed: bool) -> Result<Rational> {
        let num = if signed { self.signed_int()? } else { self.unsigned_int()? };
        if !signed {
            // a literal `p/q` is written without spaces; `p / q` is a division
            let tight = self.src.get(self.pos) == Some(&b'/')
                && self.src.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit());
            if !tight {
                return Ok(Rational::integer(num));
            }
            self.pos += 1;
            let at = self.pos;
            let den = self.unsigned_int()?;
            return Rational::new(num, den).ok_or(Error::Domain {
                offset: at,
                message: "zero denominator".into(),
            });
        }
        // only consume '/' when an integer follows; otherwise it is a division
        let save = self.pos;
        if self.eat(b'/') {
            self.skip_ws();
            if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                let at = self.pos;
                let den = self.unsigned_int()?;
                return Rational::new(num, den).ok_or(Error::Domain {
                    offset: at,
                    message: "zero denominator".into(),
                });
            }
            if signed {
                return Err(self.syntax("expected an integer denominator"));
            }
            self.pos = save;
        }
        Ok(Rational::integer(num))
    }
}

fn relocate(e: Error, offset: usize) -> Error {
    match e {
        Error::Domain { message, .. } => Error::Domain { offset, message },
        other => other,
    }
}

/// A random well-formed expression of bounded depth, for round-trip testing.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> ExactScalar {
    loop {
        if let Some(s) = try_random(rng, depth) {
            return s;
        }
    }
}

fn try_random<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Option<ExactScalar> {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        let t = Rational::new(rng.gen_range(-24..=24), rng.gen_range(1..=12)).unwrap();
        return Some(match rng.gen_range(0..4) {
            0 => ExactScalar::rational(Rational::new(rng.gen_range(0..=99), rng.gen_range(1..=9)).unwrap()),
            1 => ExactScalar::sqrt(rng.gen_range(1..=50)).unwrap(),
            2 => ExactScalar::cospi(t),
            _ => ExactScalar::sinpi(t),
        });
    }
    let a = try_random(rng, depth - 1)?;
    match rng.gen_range(0..5) {
        0 => Some(-a),
        1 => Some(a + try_random(rng, depth - 1)?),
        2 => Some(a - try_random(rng, depth - 1)?),
        3 => Some(a * try_random(rng, depth - 1)?),
        _ => a.checked_div(try_random(rng, depth - 1)?).ok(),
    }
}
