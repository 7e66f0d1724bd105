//! Weight expressions: parsing, symbolic differentiation, evaluation.
//!
//! Weights like `1+1/(x+1)` enter as text in a small grammar over the single
//! variable `x`: `+ - * / ^`, unary minus, and the functions sin, cos, tan,
//! exp, log, sqrt, abs. `^` binds tightest and is right-associative; unary
//! minus binds looser than `^`. The derivative is taken symbolically at parse
//! time so the angle ODE sees exact values of m'/m and n'/n.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Functions usable in weight expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => math::sin(v),
            Func::Cos => math::cos(v),
            Func::Tan => math::tan(v),
            Func::Exp => math::exp(v),
            Func::Log => math::ln(v),
            Func::Sqrt => math::sqrt(v),
            Func::Abs => math::abs(v),
        }
    }
}

/// Expression tree over the single variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Where evaluation left the real domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    PowDomain,
    NonFinite,
}

/// Domain error carrying the offending subexpression in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subexpr: String,
    pub x: f64,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogNonPositive => "log of a non-positive value",
            EvalErrorKind::SqrtNegative => "sqrt of a negative value",
            EvalErrorKind::PowDomain => "power outside the real domain",
            EvalErrorKind::NonFinite => "non-finite result",
        };
        write!(f, "{} in `{}` at x = {}", what, self.subexpr, self.x)
    }
}

impl core::error::Error for EvalError {}

impl Expr {
    /// Evaluates without domain checks; invalid operations yield NaN/inf,
    /// which the callers in the ODE layer detect as non-finite state.
    pub fn eval_raw(&self, x: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval_raw(x),
            Expr::Add(a, b) => a.eval_raw(x) + b.eval_raw(x),
            Expr::Sub(a, b) => a.eval_raw(x) - b.eval_raw(x),
            Expr::Mul(a, b) => a.eval_raw(x) * b.eval_raw(x),
            Expr::Div(a, b) => a.eval_raw(x) / b.eval_raw(x),
            Expr::Pow(a, b) => math::powf(a.eval_raw(x), b.eval_raw(x)),
            Expr::Call(f, e) => f.apply(e.eval_raw(x)),
        }
    }

    /// Evaluates with domain checks; errors name the offending subexpression.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let err = |kind| {
            Err(EvalError {
                kind,
                subexpr: self.to_string(),
                x,
            })
        };
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return err(EvalErrorKind::DivisionByZero);
                }
                a.eval(x)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval(x)?;
                let exp = b.eval(x)?;
                if base < 0.0 && exp != math::floor(exp) {
                    return err(EvalErrorKind::PowDomain);
                }
                if base == 0.0 && exp < 0.0 {
                    return err(EvalErrorKind::PowDomain);
                }
                math::powf(base, exp)
            }
            Expr::Call(f, e) => {
                let v = e.eval(x)?;
                match f {
                    Func::Log if v <= 0.0 => return err(EvalErrorKind::LogNonPositive),
                    Func::Sqrt if v < 0.0 => return err(EvalErrorKind::SqrtNegative),
                    _ => {}
                }
                f.apply(v)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            err(EvalErrorKind::NonFinite)
        }
    }

    /// Exact symbolic derivative with constant folding.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Neg(e) => neg(e.derivative()),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                mul((**b).clone(), (**b).clone()),
            ),
            Expr::Pow(a, b) => {
                if let Expr::Const(c) = **b {
                    // c·a^(c-1)·a' avoids log(a) for negative bases
                    mul(
                        mul(Expr::Const(c), pow((**a).clone(), Expr::Const(c - 1.0))),
                        a.derivative(),
                    )
                } else {
                    // a^b · (b'·log a + b·a'/a)
                    mul(
                        self.clone(),
                        add(
                            mul(b.derivative(), call(Func::Log, (**a).clone())),
                            div(mul((**b).clone(), a.derivative()), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Call(f, e) => {
                let de = e.derivative();
                let inner = (**e).clone();
                match f {
                    Func::Sin => mul(call(Func::Cos, inner), de),
                    Func::Cos => neg(mul(call(Func::Sin, inner), de)),
                    Func::Tan => mul(
                        add(
                            Expr::Const(1.0),
                            pow(call(Func::Tan, inner), Expr::Const(2.0)),
                        ),
                        de,
                    ),
                    Func::Exp => mul(call(Func::Exp, inner), de),
                    Func::Log => div(de, inner),
                    Func::Sqrt => div(de, mul(Expr::Const(2.0), call(Func::Sqrt, inner))),
                    // sign(e)·e' written as e·e'/|e|; undefined exactly at zeros
                    Func::Abs => div(mul(inner.clone(), de), call(Func::Abs, inner)),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if *c < 0.0 => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{}", c),
            Expr::Var => write!(f, "x"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_prec(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "+")?;
                b.fmt_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "-")?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }
            Expr::Pow(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                b.fmt_prec(f, 4)
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

/// Canonical printer; output re-parses to an identically evaluating tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// Folding constructors used by the derivative.

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(0.0), e) | (e, Expr::Const(0.0)) => e,
        (a, b) => Expr::Add(bx(a), bx(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (e, Expr::Const(0.0)) => e,
        (Expr::Const(0.0), e) => neg(e),
        (a, b) => Expr::Sub(bx(a), bx(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(0.0), _) | (_, Expr::Const(0.0)) => Expr::Const(0.0),
        (Expr::Const(1.0), e) | (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Mul(bx(a), bx(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(0.0), _) => Expr::Const(0.0),
        (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Div(bx(a), bx(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (e, Expr::Const(1.0)) => e,
        (_, Expr::Const(0.0)) => Expr::Const(1.0),
        (a, b) => Expr::Pow(bx(a), bx(b)),
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        e => Expr::Neg(bx(e)),
    }
}

fn call(f: Func, e: Expr) -> Expr {
    Expr::Call(f, bx(e))
}

/// Parse failure with the byte position of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                let tok = match c {
                    b'+' => Token::Plus,
                    b'-' => Token::Minus,
                    b'*' => Token::Star,
                    b'/' => Token::Slash,
                    b'^' => Token::Caret,
                    b'(' => Token::LParen,
                    _ => Token::RParen,
                };
                toks.push((tok, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| ParseError {
                    position: start,
                    message: format!("invalid number `{}`", lit),
                })?;
                toks.push((Token::Num(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Token::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character `{}`", &text[i..][..1]),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: String) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            message,
        })
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::RParen) => {
                self.bump();
                Ok(())
            }
            _ => self.fail("expected `)`".to_string()),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    e = Expr::Add(bx(e), bx(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    e = Expr::Sub(bx(e), bx(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    e = Expr::Mul(bx(e), bx(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    e = Expr::Div(bx(e), bx(self.unary()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(bx(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            // right-associative; the exponent may carry a unary minus
            return Ok(Expr::Pow(bx(base), bx(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Const(v)),
            Some(Token::Ident(name)) => {
                if name == "x" {
                    return Ok(Expr::Var);
                }
                if let Some(func) = Func::from_name(&name) {
                    if !matches!(self.peek(), Some(Token::LParen)) {
                        return self.fail(format!(
                            "function `{}` needs a parenthesized argument",
                            name
                        ));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, bx(arg)));
                }
                self.pos -= 1;
                self.fail(format!("unknown identifier `{}`", name))
            }
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            other => {
                if other.is_some() {
                    self.pos -= 1;
                }
                self.fail("expected a number, `x`, a function call, or `(`".to_string())
            }
        }
    }
}

/// Parses expression text into an AST.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(ParseError {
            position: 0,
            message: "empty expression".to_string(),
        });
    }
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail("unexpected trailing input".to_string());
    }
    Ok(e)
}

/// A weight function and its exact symbolic derivative.
#[derive(Debug, Clone)]
pub struct WeightExpr {
    value: Expr,
    derivative: Expr,
    source_text: String,
}

/// Positivity-scan failure: the weight dips to `value` at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityError {
    pub x: f64,
    pub value: f64,
    pub source_text: String,
}

impl fmt::Display for PositivityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "weight `{}` is not positive: value {} at x = {}",
            self.source_text, self.value, self.x
        )
    }
}

impl core::error::Error for PositivityError {}

/// Number of points in the positivity/extrema scan grid.
pub const SCAN_POINTS: usize = 4097;

impl WeightExpr {
    /// Parses weight text; the derivative is computed symbolically here.
    pub fn parse(text: &str) -> Result<WeightExpr, ParseError> {
        let value = parse_expr(text)?;
        let derivative = value.derivative();
        Ok(WeightExpr {
            value,
            derivative,
            source_text: text.trim().to_string(),
        })
    }

    /// Wraps an already-built AST.
    pub fn from_expr(value: Expr) -> WeightExpr {
        let derivative = value.derivative();
        let source_text = value.to_string();
        WeightExpr {
            value,
            derivative,
            source_text,
        }
    }

    /// Constant weight.
    pub fn constant(c: f64) -> WeightExpr {
        WeightExpr::from_expr(Expr::Const(c))
    }

    pub fn value(&self) -> &Expr {
        &self.value
    }

    pub fn derivative(&self) -> &Expr {
        &self.derivative
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    /// Expression in canonical printed form (re-parseable).
    pub fn canonical(&self) -> String {
        self.value.to_string()
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.value.eval(x)
    }

    pub fn eval_derivative(&self, x: f64) -> Result<f64, EvalError> {
        self.derivative.eval(x)
    }

    #[inline]
    pub fn eval_raw(&self, x: f64) -> f64 {
        self.value.eval_raw(x)
    }

    #[inline]
    pub fn eval_derivative_raw(&self, x: f64) -> f64 {
        self.derivative.eval_raw(x)
    }

    /// Scans a 4097-point uniform grid on [0, length]; returns the smallest
    /// sampled value if everything is finite and positive.
    pub fn require_positive(&self, length: f64) -> Result<f64, PositivityError> {
        let mut lowest = f64::INFINITY;
        for i in 0..SCAN_POINTS {
            let x = length * (i as f64) / ((SCAN_POINTS - 1) as f64);
            let v = self.eval_raw(x);
            let ok = v.is_finite() && v > 0.0;
            if !ok {
                return Err(PositivityError {
                    x,
                    value: v,
                    source_text: self.source_text.clone(),
                });
            }
            if v < lowest {
                lowest = v;
            }
        }
        Ok(lowest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(text: &str, x: f64) -> f64 {
        WeightExpr::parse(text).unwrap().eval(x).unwrap()
    }

    fn dv(text: &str, x: f64) -> f64 {
        WeightExpr::parse(text).unwrap().eval_derivative(x).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1+1/(x+1)", 0.0), 2.0);
        assert_eq!(ev("1+1/(x+1)", 1.0), 1.5);
        assert_eq!(ev("1+cos(2*x)^2", 0.0), 2.0);
        assert_eq!(ev("2^3^2", 7.0), 512.0);
        assert_eq!(ev("2+3*4", 0.0), 14.0);
        assert_eq!(ev("2*3^2", 0.0), 18.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("sqrt(x)", 4.0), 2.0);
        assert_eq!(ev("1e-2+1", 0.0), 1.01);
        assert_eq!(ev("2.5E2", 0.0), 250.0);
        assert_eq!(ev("abs(-3*x)", 2.0), 6.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let w = WeightExpr::parse("1/x").unwrap();
        let e = w.eval(0.0).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::DivisionByZero);
        assert_eq!(e.subexpr, "1/x");

        let e = WeightExpr::parse("log(x-2)")
            .unwrap()
            .eval(1.0)
            .unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::LogNonPositive);

        let e = WeightExpr::parse("sqrt(-x)")
            .unwrap()
            .eval(1.0)
            .unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::SqrtNegative);

        let e = WeightExpr::parse("(-1)^x").unwrap().eval(0.5).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::PowDomain);

        let e = WeightExpr::parse("exp(x)").unwrap().eval(1e4).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::NonFinite);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(WeightExpr::parse("").is_err());
        assert!(WeightExpr::parse("   ").is_err());

        let e = WeightExpr::parse("1+y").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(e.message.contains("unknown identifier"));

        let e = WeightExpr::parse("sin x").unwrap_err();
        assert!(e.message.contains("parenthesized argument"));

        assert!(WeightExpr::parse("1+").is_err());
        assert!(WeightExpr::parse("(1+x").is_err());
        assert!(WeightExpr::parse("1 2").is_err());
        assert!(WeightExpr::parse("sin(1,2)").is_err());
        assert!(WeightExpr::parse("foo(x)").is_err());
        assert!(WeightExpr::parse("1+#").is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(dv("x^2", 3.0), 6.0);
        assert_eq!(dv("1+cos(2*x)^2", 0.0), 0.0);
        assert_eq!(dv("1+1/(x+1)", 0.0), -1.0);
        assert_eq!(dv("5", 1.0), 0.0);
        assert!((dv("exp(2*x)", 0.5) - 2.0 * f64::exp(1.0)).abs() < 1e-12);
    }

    // xorshift so the sample points are deterministic
    fn pseudo_uniform(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let cases = vec![
            "1+1/(x+1)",
            "1+cos(2*x)^2",
            "sin(x)*exp(-x/2)+x^3",
            "sqrt(x+2)/(1+x^2)",
            "log(x+1)+tan(x/4)",
            "2^x",
            "x^2.5",
            "abs(x-0.511)+1",
            "(x+1)^(x/3)",
        ];
        let mut state = 0x9e3779b97f4a7c15u64;
        for text in cases {
            let w = WeightExpr::parse(text).unwrap();
            for _ in 0..100 {
                let x = 0.05 + 0.9 * pseudo_uniform(&mut state);
                let h = 1e-6;
                let fd = (w.eval(x + h).unwrap() - w.eval(x - h).unwrap()) / (2.0 * h);
                let sym = w.eval_derivative(x).unwrap();
                let rel = (sym - fd).abs() / (1.0 + sym.abs());
                assert!(rel < 1e-6, "{text} at x={x}: sym={sym} fd={fd}");
            }
        }
    }

    #[test]
    fn printer_round_trips() {
        let cases = vec![
            "1+1/(x+1)",
            "1+cos(2*x)^2",
            "2^3^2",
            "-x^2+3",
            "2*(x+1)*(x-1)/(x^2+1)",
            "sqrt(abs(x)+1)",
            "x^-2+1",
            "2-(3-x)",
            "(2-3)-x",
            "-(x+1)",
            "1/(2*x+1)/3",
            "(x+1)^(x+2)",
        ];
        let mut state = 0x2545f4914f6cdd1du64;
        for text in cases {
            let w = WeightExpr::parse(text).unwrap();
            let printed = w.canonical();
            let reparsed = WeightExpr::parse(&printed).unwrap();
            let printed_again = reparsed.canonical();
            assert_eq!(printed, printed_again, "printer not canonical for {text}");
            for _ in 0..50 {
                let x = 3.0 * pseudo_uniform(&mut state) - 1.0;
                let a = w.eval_raw(x);
                let b = reparsed.eval_raw(x);
                assert!(
                    (a == b) || (a.is_nan() && b.is_nan()) || (a - b).abs() < 1e-12,
                    "{text} -> {printed}: {a} vs {b} at {x}"
                );
            }
        }
    }

    #[test]
    fn derivative_of_printed_derivative_still_matches() {
        // second derivative through the printer exercises folding paths
        let w = WeightExpr::parse("1+1/(x+1)").unwrap();
        let dw = WeightExpr::parse(&w.derivative().to_string()).unwrap();
        let d2 = dw.eval_derivative(0.0).unwrap();
        assert!((d2 - 2.0).abs() < 1e-12, "d2={d2}");
    }

    #[test]
    fn positivity_scan() {
        let w = WeightExpr::parse("1+cos(2*x)^2").unwrap();
        let low = w.require_positive(1.0).unwrap();
        assert!((1.0..1.01).contains(&low));

        assert!(WeightExpr::parse("x")
            .unwrap()
            .require_positive(1.0)
            .is_err());
        assert!(WeightExpr::parse("cos(x)")
            .unwrap()
            .require_positive(3.2)
            .is_err());
        let e = WeightExpr::parse("1/x").unwrap().require_positive(1.0);
        assert!(e.is_err());
    }

    #[test]
    fn weight_bound_examples() {
        let m = WeightExpr::parse("1+1/(x+1)").unwrap();
        assert!((m.eval(0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((m.eval(1.0).unwrap() - 1.5).abs() < 1e-15);
    }
}
