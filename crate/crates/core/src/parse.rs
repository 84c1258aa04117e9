//! Text syntax for jet expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := postfix ('^' exponent)*
//! exponent:= INT | '-' INT | '(' '-'? INT ('/' INT)? ')'
//! postfix := primary ("'"* | '^(' INT ')')
//! primary := INT | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers: `x`, `y`, `a0`..`a9`, `f`, `g`, `h`, `k1`..`k4`, `A`..`D`,
//! `eps`, plus any names bound by the caller. Primes (or `^(m)` directly
//! after a name) take total derivatives, so `a1^(3)` is `a1'''` while
//! `a1'^2` is the square of `a1'`. Implicit multiplication is rejected.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::jet::{exp_to_string, Exp, JetError, JetExpr, JetVar, Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("unknown symbol `{name}` at {line}:{col}")]
    UnknownSymbol { name: String, line: usize, col: usize },
    #[error("{source} at {line}:{col}")]
    Math { source: JetError, line: usize, col: usize },
}

/// Named sub-expressions usable inside a parsed text (`mu`, `B0`, ...).
pub type Bindings = BTreeMap<String, JetExpr>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    /// No whitespace between this token and the previous one.
    glued: bool,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut glued = false;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            glued = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            glued = false;
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[s..i].iter().collect();
            col += i - s;
            Tok::Int(digits.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - s;
            Tok::Ident(chars[s..i].iter().collect())
        } else {
            let t = match c {
                '\'' => Tok::Prime,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        expected: format!("an operator, number or identifier (found `{c}`)"),
                    })
                }
            };
            i += 1;
            col += 1;
            t
        };
        out.push(Token { tok, line: start_line, col: start_col, glued });
        glued = true;
    }
    out.push(Token { tok: Tok::End, line, col, glued: false });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    bindings: &'a Bindings,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, col: t.col, expected: expected.to_string() }
    }

    fn math(&self, at: &Token, e: JetError) -> ParseError {
        ParseError::Math { source: e, line: at.line, col: at.col }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.err(what))
        }
    }

    fn expr(&mut self) -> Result<JetExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            let op = self.peek().clone();
            match op.tok {
                Tok::Plus | Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = if op.tok == Tok::Plus { acc.checked_add(&rhs) } else { acc.checked_sub(&rhs) }
                        .map_err(|e| self.math(&op, e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<JetExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let op = self.peek().clone();
            match op.tok {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs).map_err(|e| self.math(&op, e))?;
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    return Err(self.err("an operator (implicit multiplication is not allowed)"))
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<JetExpr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<JetExpr, ParseError> {
        let mut base = self.postfix()?;
        while self.peek().tok == Tok::Caret {
            let at = self.bump();
            let q = self.exponent()?;
            base = base.pow_rational(q).map_err(|e| self.math(&at, e))?;
        }
        Ok(base)
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                i64::try_from(n).map_err(|_| ParseError::Syntax { line: t.line, col: t.col, expected: "a small integer".into() })
            }
            _ => Err(self.err("an integer")),
        }
    }

    fn exponent(&mut self) -> Result<Exp, ParseError> {
        match self.peek().tok {
            Tok::Int(_) => Ok(Exp::from_integer(self.small_int()?)),
            Tok::Minus => {
                self.bump();
                Ok(Exp::from_integer(-self.small_int()?))
            }
            Tok::LParen => {
                self.bump();
                let neg = if self.peek().tok == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let n = self.small_int()?;
                let d = if self.peek().tok == Tok::Slash {
                    self.bump();
                    let d = self.small_int()?;
                    if d == 0 {
                        return Err(ParseError::Math {
                            source: JetError::DivisionByZeroPolynomial,
                            line: self.peek().line,
                            col: self.peek().col,
                        });
                    }
                    d
                } else {
                    1
                };
                self.expect(Tok::RParen, "`)` closing the exponent")?;
                let n = if neg { -n } else { n };
                Ok(Exp::new(n, d))
            }
            _ => Err(self.err("an exponent: integer or parenthesised rational")),
        }
    }

    fn postfix(&mut self) -> Result<JetExpr, ParseError> {
        let start = self.peek().clone();
        let (value, is_name) = self.primary()?;
        let mut order = 0u32;
        while self.peek().tok == Tok::Prime {
            self.bump();
            order += 1;
        }
        // `name^(m)` with a bare integer is a derivative order
        if order == 0
            && is_name
            && self.peek().tok == Tok::Caret
            && self.peek().glued
            && self.peek_at(1).tok == Tok::LParen
            && matches!(self.peek_at(2).tok, Tok::Int(_))
            && self.peek_at(3).tok == Tok::RParen
        {
            self.bump();
            self.bump();
            order = self.small_int()? as u32;
            self.bump();
        }
        if order == 0 {
            return Ok(value);
        }
        if let Some(v) = value.as_single_var() {
            if v == JetVar::x() || v.is_param() {
                return Err(ParseError::Syntax {
                    line: start.line,
                    col: start.col,
                    expected: format!("a differentiable symbol (`{v}` has no derivatives)"),
                });
            }
        }
        value.total_derivative(order).map_err(|e| self.math(&start, e))
    }

    fn primary(&mut self) -> Result<(JetExpr, bool), ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok((JetExpr::constant(BigRational::from_integer(n)), false))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(e) = self.bindings.get(&name) {
                    return Ok((e.clone(), true));
                }
                match resolve(&name) {
                    Some(v) => Ok((JetExpr::var(v), true)),
                    None => Err(ParseError::UnknownSymbol { name, line: t.line, col: t.col }),
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok((e, false))
            }
            _ => Err(self.err("a number, identifier or `(`")),
        }
    }
}

/// Maps a built-in identifier to its coordinate.
pub fn resolve(name: &str) -> Option<JetVar> {
    match name {
        "x" => Some(JetVar::x()),
        "y" => Some(JetVar::y(0)),
        _ => {
            if let Some(idx) = name.strip_prefix('a') {
                if !idx.is_empty() && idx.chars().all(|c| c.is_ascii_digit()) && (idx == "0" || !idx.starts_with('0')) {
                    return idx.parse::<usize>().ok().filter(|&j| j < 256).map(|j| JetVar::coeff(j, 0));
                }
            }
            JetVar::func(name, 0).or_else(|| JetVar::param(name))
        }
    }
}

impl JetExpr {
    fn as_single_var(&self) -> Option<JetVar> {
        let mut it = self.factors();
        match (it.next(), it.next()) {
            (Some((p, e)), None) if e == Exp::from_integer(1) && self.coefficient().is_one() => p.as_var(),
            _ => None,
        }
    }
}

pub fn parse(text: &str) -> Result<JetExpr, ParseError> {
    parse_with(text, &Bindings::new())
}

pub fn parse_with(text: &str, bindings: &Bindings) -> Result<JetExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, bindings };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.err("an operator or end of input"));
    }
    Ok(e)
}

/// Parses `name = expr; name = expr; ...`, each definition may use the
/// earlier ones.
pub fn parse_bindings(text: &str, base: &Bindings) -> Result<Bindings, ParseError> {
    let mut out = base.clone();
    for def in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, body) = def.split_once('=').ok_or_else(|| ParseError::Syntax {
            line: 1,
            col: 1,
            expected: format!("`name = expression` in `{def}`"),
        })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ParseError::Syntax { line: 1, col: 1, expected: format!("a binding name, found `{name}`") });
        }
        let value = parse_with(body, &out)?;
        out.insert(name.to_string(), value);
    }
    Ok(out)
}

fn rational_str(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn monomial_str(m: &Monomial) -> String {
    m.pairs().iter().map(|&(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") }).collect::<Vec<_>>().join("*")
}

/// Prints a polynomial, highest degree first.
pub fn print_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let body = if m.is_one() {
            rational_str(&a)
        } else if a.is_one() {
            monomial_str(m)
        } else {
            format!("{}*{}", rational_str(&a), monomial_str(m))
        };
        match (i, neg) {
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (0, false) => out.push_str(&body),
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn factor_str(p: &Poly, e: Exp) -> String {
    let base = match p.as_var() {
        Some(v) if e.is_integer() => v.to_string(),
        _ => format!("({})", print_poly(p)),
    };
    if e == Exp::from_integer(1) {
        base
    } else if e.is_integer() {
        format!("{base}^{}", e.to_integer())
    } else {
        format!("{base}^({})", exp_to_string(e))
    }
}

/// Canonical text of an expression; `parse(print(e))` equals `e`.
pub fn print(e: &JetExpr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let c = e.coefficient();
    let factors: Vec<(&Poly, Exp)> = e.factors().collect();
    if factors.is_empty() {
        return rational_str(c);
    }
    let zero = Exp::from_integer(0);
    let nums: Vec<(&Poly, Exp)> = factors.iter().copied().filter(|(_, q)| *q > zero).collect();
    let dens: Vec<(&Poly, Exp)> = factors.iter().copied().filter(|(_, q)| *q < zero).map(|(p, q)| (p, -q)).collect();

    if dens.is_empty() && nums.len() == 1 && nums[0].1 == Exp::from_integer(1) {
        return print_poly(&nums[0].0.scale(c));
    }

    let mut s = String::new();
    if c.is_negative() {
        s.push('-');
    }
    let mut parts: Vec<String> = Vec::new();
    let n = BigRational::from_integer(c.numer().abs());
    if !n.is_one() || nums.is_empty() {
        parts.push(rational_str(&n));
    }
    parts.extend(nums.iter().map(|(p, q)| factor_str(p, *q)));
    s.push_str(&parts.join("*"));

    let mut den_parts: Vec<String> = Vec::new();
    if !c.denom().is_one() {
        den_parts.push(c.denom().to_string());
    }
    den_parts.extend(dens.iter().map(|(p, q)| factor_str(p, *q)));
    match den_parts.len() {
        0 => {}
        1 => {
            s.push('/');
            s.push_str(&den_parts[0]);
        }
        _ => {
            s.push_str("/(");
            s.push_str(&den_parts.join("*"));
            s.push(')');
        }
    }
    debug_assert!(!c.is_zero());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(j: usize, k: u32) -> JetExpr {
        JetExpr::coeff(j, k)
    }

    #[test]
    fn semi_invariant_text() {
        let mu = parse("-2*a0 + a1'").unwrap();
        assert_eq!(mu, &a(0, 0).scale(&BigRational::from_integer((-2).into())) + &a(1, 1));
        assert_eq!(print(&mu), "-2*a0 + a1'");
    }

    #[test]
    fn derivative_suffix_and_power() {
        assert_eq!(parse("a1^(3)").unwrap(), a(1, 3));
        assert_eq!(parse("a1'^2").unwrap(), a(1, 1).pow(2).unwrap());
        assert_eq!(parse("a1^2").unwrap(), a(1, 0).pow(2).unwrap());
        assert_eq!(parse("(a0*a1)'").unwrap(), parse("a0'*a1 + a0*a1'").unwrap());
    }

    #[test]
    fn precedence_rules() {
        assert_eq!(parse("-x^2").unwrap(), -&JetExpr::x().pow(2).unwrap());
        assert_eq!(parse("a0/a1/a2").unwrap(), parse("(a0/a1)/a2").unwrap());
        assert_eq!(parse("2^-1").unwrap(), JetExpr::rational(1, 2));
    }

    #[test]
    fn quintic_zeroth_order_invariant() {
        let e = parse("(3*a0*a2 - a1^2)^3 / (27*a2^8)").unwrap();
        let inner = &(&a(0, 0) * &a(2, 0)).scale(&BigRational::from_integer(3.into())) - &a(1, 0).pow(2).unwrap();
        let expected =
            inner.pow(3).unwrap().checked_div(&a(2, 0).pow(8).unwrap().scale(&BigRational::from_integer(27.into()))).unwrap();
        assert_eq!(e, expected);
        assert_eq!(parse(&print(&e)).unwrap(), e);
    }

    #[test]
    fn printing_of_zero_and_fractional_power() {
        assert_eq!(print(&JetExpr::zero()), "0");
        let mu = parse("a1 - a2'").unwrap();
        let w = mu.pow_rational(Exp::new(8, 3)).unwrap();
        assert_eq!(print(&w), "(a1 - a2')^(8/3)");
        let q = a(0, 0).checked_div(&(a(1, 0) * w)).unwrap();
        let text = print(&q);
        assert_eq!(text, "a0/((a1 - a2')^(8/3)*a1)");
        assert_eq!(parse(&text).unwrap(), q);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("a0 +\n  * a1"),
            Err(ParseError::Syntax { line: 2, col: 3, expected: "a number, identifier or `(`".into() })
        );
        assert!(matches!(parse("2 a0"), Err(ParseError::Syntax { line: 1, col: 3, .. })));
        assert!(matches!(parse("mu + 1"), Err(ParseError::UnknownSymbol { ref name, .. }) if name == "mu"));
        assert!(matches!(parse("x/0"), Err(ParseError::Math { source: JetError::DivisionByZeroPolynomial, .. })));
        assert!(matches!(parse("x'"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(a0"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn bindings_chain() {
        let b = parse_bindings("mu = -2*a0 + a1'; nu = mu'^2", &Bindings::new()).unwrap();
        assert_eq!(b["nu"], parse("(-2*a0' + a1'')^2").unwrap());
        assert_eq!(parse_with("mu''", &b).unwrap(), parse("-2*a0'' + a1'''").unwrap());
    }

    #[test]
    fn zero_constant_prints() {
        assert_eq!(print(&JetExpr::rational(-3, 4)), "-3/4");
        assert_eq!(parse("-3/4").unwrap(), JetExpr::rational(-3, 4));
        assert!(BigRational::zero().is_zero());
    }
}
