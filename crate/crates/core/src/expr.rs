//! Rational expressions in one complex variable `z`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := literal | 'z' | '(' expr ')'
//! ```
//!
//! Literals are decimals with an optional `i` suffix (`2`, `0.5`, `3i`, `i`).
//! `^` binds tighter than unary minus, so `-z^2` is `-(z^2)`. Exponents are
//! integers with `|n| <= 64`; a negative exponent may be written `z^-2` or
//! `z^(-2)`. Division is symbolic.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::ParseError;
use crate::poly::Polynomial;
use crate::rational::RationalFunction;

const MAX_EXPONENT: i64 = 64;
const MAX_DEPTH: usize = 200;

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Z,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Divisor position kept for error reporting.
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, i32, usize),
}

impl Expr {
    /// Direct complex evaluation of the tree.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Z => z,
            Expr::Neg(a) => -a.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b, _) => a.eval(z) / b.eval(z),
            Expr::Pow(a, k, _) => a.eval(z).powi(*k),
        }
    }

    /// Builds the rational function the tree denotes.
    pub fn lower(&self) -> Result<RationalFunction, ParseError> {
        Ok(match self {
            Expr::Const(c) => RationalFunction::constant(*c),
            Expr::Z => RationalFunction::z(),
            Expr::Neg(a) => a.lower()?.neg(),
            Expr::Add(a, b) => a.lower()?.add(&b.lower()?),
            Expr::Sub(a, b) => a.lower()?.sub(&b.lower()?),
            Expr::Mul(a, b) => a.lower()?.mul(&b.lower()?),
            Expr::Div(a, b, pos) => a
                .lower()?
                .div(&b.lower()?)
                .map_err(|_| ParseError::DivisionByZero { position: *pos })?,
            Expr::Pow(a, k, pos) => a
                .lower()?
                .powi(*k)
                .map_err(|_| ParseError::DivisionByZero { position: *pos })?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "({})", format_complex(*c)),
            Expr::Z => write!(f, "z"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b, _) => write!(f, "({a}/{b})"),
            Expr::Pow(a, k, _) => write!(f, "({a})^({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'z' => out.push((Tok::Z, start)),
            b'i' => {
                if text[i..].starts_with("inf") {
                    return Err(syntax(start, "'inf' is only allowed in puncture lists"));
                }
                out.push((Tok::Num(1.0, true), start));
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lit = &text[i..j];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number '{lit}'")))?;
                if !v.is_finite() {
                    return Err(syntax(start, format!("number '{lit}' is not finite")));
                }
                let imag = j < bytes.len() && bytes[j] == b'i' && !text[j..].starts_with("inf");
                if imag {
                    j += 1;
                }
                out.push((Tok::Num(v, imag), start));
                i = j;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character '{ch}'")));
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(self.at(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.at();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?), at);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.enter()?;
            self.bump();
            let inner = self.factor()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            let (_, at) = self.bump();
            let k = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), k, at));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let mut sign = 1i64;
        match self.peek() {
            Tok::Minus => {
                self.bump();
                sign = -1;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let at = self.at();
        let (tok, _) = self.bump();
        let value = match tok {
            Tok::Num(v, false) if v.fract() == 0.0 => {
                if v > MAX_EXPONENT as f64 {
                    return Err(ParseError::ExponentOverflow {
                        position: at,
                        exponent: if v < i64::MAX as f64 {
                            sign * v as i64
                        } else {
                            sign * i64::MAX
                        },
                    });
                }
                sign * v as i64
            }
            _ => return Err(syntax(at, "expected an integer exponent")),
        };
        if paren {
            if *self.peek() != Tok::RParen {
                return Err(syntax(self.at(), "expected ')' after exponent"));
            }
            self.bump();
        }
        if value.abs() > MAX_EXPONENT {
            return Err(ParseError::ExponentOverflow {
                position: at,
                exponent: value,
            });
        }
        Ok(value as i32)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v, imag) => Ok(Expr::Const(if imag {
                Complex64::new(0.0, v)
            } else {
                Complex64::new(v, 0.0)
            })),
            Tok::Z => Ok(Expr::Z),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(syntax(self.at(), "expected ')'"));
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses text into an expression tree.
pub fn parse_ast(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.at(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parses text into a reduced rational function.
pub fn parse_expression(text: &str) -> Result<RationalFunction, ParseError> {
    parse_ast(text)?.lower()
}

fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// Complex literal in the expression syntax: `a`, `bi`, or `(a+bi)`.
pub fn format_complex(c: Complex64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => fmt_real(c.re),
        (true, false) => format!("{}i", fmt_real(c.im)),
        (false, false) => {
            let sign = if c.im < 0.0 { '-' } else { '+' };
            format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs()))
        }
    }
}

/// One monomial as `(negative, text)`.
fn format_term(c: Complex64, k: usize) -> (bool, String) {
    let (neg, body) = if c.im == 0.0 {
        (c.re < 0.0, fmt_real(c.re.abs()))
    } else if c.re == 0.0 {
        (c.im < 0.0, format!("{}i", fmt_real(c.im.abs())))
    } else {
        (false, format_complex(c))
    };
    let var = match k {
        0 => String::new(),
        1 => "z".to_string(),
        _ => format!("z^{k}"),
    };
    let text = if k == 0 {
        body
    } else if body == "1" {
        var
    } else {
        format!("{body}*{var}")
    };
    (neg, text)
}

pub fn format_polynomial(p: &Polynomial) -> String {
    let mut out = String::new();
    for (k, &c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let (neg, text) = format_term(c, k);
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        out.push_str(&text);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn is_single_term(p: &Polynomial) -> bool {
    p.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1
}

/// Reparsable text for a rational function, e.g. `(z^2+1)/(z-1)`.
pub fn format_expression(f: &RationalFunction) -> String {
    let num = format_polynomial(f.num());
    if f.den() == &Polynomial::one() {
        return num;
    }
    let den = format_polynomial(f.den());
    let num_s = if is_single_term(f.num()) {
        num
    } else {
        format!("({num})")
    };
    let bare_den = is_single_term(f.den()) && !den.contains('*') && !den.starts_with('-');
    let den_s = if bare_den { den } else { format!("({den})") };
    format!("{num_s}/{den_s}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_function() {
        let f = parse_expression("z").unwrap();
        assert_eq!(f.num(), &Polynomial::z());
        assert_eq!(f.den(), &Polynomial::one());
    }

    #[test]
    fn unicity_fixture_height() {
        let f = parse_expression("1/(z*(z-2)*(2*z-1))").unwrap();
        assert_eq!(f.den().degree(), Some(3));
        assert_eq!(f.num().degree(), Some(0));
    }

    #[test]
    fn cancellation_gives_constant() {
        let f = parse_expression("(z^2-1)/(z^2-1)").unwrap();
        assert!(f.is_constant());
        assert_eq!(format_expression(&f), "1");
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let f = parse_expression("-z^2").unwrap();
        assert_eq!(f.eval(c(3.0, 0.0)), Some(c(-9.0, 0.0)));
        let f = parse_expression("(-z)^2").unwrap();
        assert_eq!(f.eval(c(3.0, 0.0)), Some(c(9.0, 0.0)));
    }

    #[test]
    fn imaginary_literals() {
        let f = parse_expression("3+4i").unwrap();
        assert_eq!(f.eval(Complex64::zero()), Some(c(3.0, 4.0)));
        let f = parse_expression("i*z").unwrap();
        assert_eq!(f.eval(c(1.0, 0.0)), Some(c(0.0, 1.0)));
    }

    #[test]
    fn negative_exponents() {
        let a = parse_expression("z^-3").unwrap();
        let b = parse_expression("z^(-3)").unwrap();
        let d = parse_expression("1/z^3").unwrap();
        assert_eq!(a, d);
        assert_eq!(b, d);
    }

    #[test]
    fn formatting_examples() {
        assert_eq!(format_expression(&RationalFunction::zero()), "0");
        let f = parse_expression("(z^2+1)/(z-1)").unwrap();
        assert_eq!(format_expression(&f), "(z^2+1)/(z-1)");
        let f = parse_expression("1/(z^3)").unwrap();
        assert_eq!(format_expression(&f), "1/z^3");
        assert_eq!(parse_expression(&format_expression(&f)).unwrap(), f);
        let f = parse_expression("(1.5-2i)*z^2 - 0.25i").unwrap();
        assert_eq!(parse_expression(&format_expression(&f)).unwrap(), f);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expression("z + * 2").unwrap_err();
        assert_eq!(e.position(), 4);
        let e = parse_expression("1/(z-z)").unwrap_err();
        assert!(matches!(e, ParseError::DivisionByZero { position: 2 }));
        let e = parse_expression("z^65").unwrap_err();
        assert!(matches!(
            e,
            ParseError::ExponentOverflow { exponent: 65, .. }
        ));
        let e = parse_expression("z^-99999999999999999999").unwrap_err();
        assert!(matches!(e, ParseError::ExponentOverflow { .. }));
        assert!(parse_expression("w").is_err());
        assert!(parse_expression("inf").is_err());
        assert!(parse_expression("(z").is_err());
        assert!(parse_expression("").is_err());
        assert!(parse_expression("2z").is_err());
        assert!(parse_expression("z^1.5").is_err());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let s = "(".repeat(10_000) + "z" + &")".repeat(10_000);
        assert!(parse_expression(&s).is_err());
        let s = "-".repeat(10_000) + "z";
        assert!(parse_expression(&s).is_err());
    }
}
