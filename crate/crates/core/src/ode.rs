//! Linear homogeneous ODEs `y^(n) + a_{n-1} y^(n-1) + ... + a_0 y = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::jet::{JetError, JetExpr, JetVar, Poly};

/// Canonical form of a linear equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// All coefficients free.
    Standard,
    /// `a_{n-1} = 0`.
    Normal,
    /// `a_{n-1} = a_{n-2} = 0`.
    W,
    /// No constraint and no generator attached.
    General,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Standard => "standard",
            Form::Normal => "normal",
            Form::W => "w",
            Form::General => "general",
        }
    }

    /// Coefficient indices that this form forces to vanish for order `n`.
    pub fn vanishing(self, n: usize) -> std::ops::Range<usize> {
        let free = self.free_count(n);
        free..n
    }

    /// Number of leading coefficients `a_0 .. a_{k-1}` left free.
    pub fn free_count(self, n: usize) -> usize {
        match self {
            Form::Standard | Form::General => n,
            Form::Normal => n.saturating_sub(1),
            Form::W => n.saturating_sub(2),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" | "s" => Ok(Form::Standard),
            "normal" | "n" => Ok(Form::Normal),
            "w" => Ok(Form::W),
            "general" | "g" => Ok(Form::General),
            _ => Err(format!("unknown form `{s}` (expected standard, normal, w or general)")),
        }
    }
}

/// A monic linear ODE of order `n`.
///
/// Coefficient expressions may contain the jets `a_j^(k)`; these stand for
/// `a_j^(k)` evaluated at `argument(x)`. A freshly built equation has
/// argument `x`; a change of variables `x = g(xbar)` composes it with `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearODE {
    pub n: usize,
    pub form: Form,
    pub coeffs: Vec<JetExpr>,
    pub argument: JetExpr,
}

impl LinearODE {
    pub fn new(n: usize, form: Form, coeffs: Vec<JetExpr>) -> Self {
        assert_eq!(coeffs.len(), n, "one coefficient per order below n");
        LinearODE { n, form, coeffs, argument: JetExpr::x() }
    }

    /// Equation with symbolic coefficients `a_j` for the free indices of
    /// `form` and zeros elsewhere.
    pub fn generic(form: Form, n: usize) -> Self {
        let free = form.free_count(n);
        let coeffs = (0..n).map(|j| if j < free { JetExpr::coeff(j, 0) } else { JetExpr::zero() }).collect();
        LinearODE::new(n, form, coeffs)
    }

    pub fn coeff(&self, j: usize) -> &JetExpr {
        &self.coeffs[j]
    }

    /// Whether the coefficients vanish where the form requires it.
    pub fn satisfies_form(&self) -> bool {
        self.form.vanishing(self.n).all(|j| self.coeffs[j].is_zero())
    }

    /// `Delta = y^(n) + sum a_j y^(j)` as an expression in the `y` jets.
    pub fn delta(&self) -> JetExpr {
        let mut terms = vec![JetExpr::y(self.n as u32)];
        for (j, a) in self.coeffs.iter().enumerate() {
            terms.push(a * &JetExpr::y(j as u32));
        }
        JetExpr::sum(terms.iter()).expect("polynomial in y")
    }

    /// `y^(n)` solved from the equation.
    pub fn solved_leading(&self) -> JetExpr {
        let terms: Vec<JetExpr> = self.coeffs.iter().enumerate().map(|(j, a)| -(a * &JetExpr::y(j as u32))).collect();
        JetExpr::sum(terms.iter()).expect("polynomial in y")
    }

    /// Derivative with respect to the equation's independent variable.
    pub fn derive(&self, e: &JetExpr) -> Result<JetExpr, JetError> {
        let psi_prime = self.argument.total_derivative(1)?;
        twisted_derivative(e, &psi_prime)
    }
}

/// Total derivative in which coefficient jets pick up the chain-rule factor
/// `psi'` (they are evaluated at `psi(x)`), while every other coordinate
/// differentiates as usual.
pub fn twisted_derivative(e: &JetExpr, psi_prime: &JetExpr) -> Result<JetExpr, JetError> {
    if psi_prime.is_one() {
        return e.total_derivative(1);
    }
    e.derive_with(|p| twisted_poly_derivative(p, psi_prime))
}

fn twisted_poly_derivative(p: &Poly, psi_prime: &JetExpr) -> Result<JetExpr, JetError> {
    let mut plain = Poly::zero();
    let mut chained = Poly::zero();
    for v in p.vars() {
        let d = p.partial(v);
        match v.successor() {
            None if v == JetVar::x() => plain.add_assign_ref(&d),
            None => {}
            Some(s) if v.is_coeff() => chained.add_assign_ref(&d.mul(&Poly::var(s))),
            Some(s) => plain.add_assign_ref(&d.mul(&Poly::var(s))),
        }
    }
    let chained = JetExpr::from_poly(&chained);
    JetExpr::from_poly(&plain).checked_add(&(&chained * psi_prime))
}

impl fmt::Display for LinearODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} form={}", self.n, self.form)?;
        for j in (0..self.n).rev() {
            write!(f, " a{j}=\"{}\"", self.coeffs[j])?;
        }
        Ok(())
    }
}
