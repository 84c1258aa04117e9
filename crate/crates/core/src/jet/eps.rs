//! First-order perturbations `zeroth + eps * first` with `eps^2 = 0`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::expr::JetExpr;
use super::var::JetVar;
use super::JetError;

#[derive(Clone, Debug, PartialEq)]
pub struct EpsExpr {
    pub zeroth: JetExpr,
    pub first: JetExpr,
}

impl EpsExpr {
    pub fn new(zeroth: JetExpr, first: JetExpr) -> Self {
        EpsExpr { zeroth, first }
    }

    pub fn constant(e: JetExpr) -> Self {
        EpsExpr { zeroth: e, first: JetExpr::zero() }
    }

    /// `1 + eps * first`.
    pub fn one_plus(first: JetExpr) -> Self {
        EpsExpr { zeroth: JetExpr::one(), first }
    }

    /// `(a, b)^-1 = (1/a, -b/a^2)`, defined when `a != 0`.
    pub fn inverse(&self) -> Result<EpsExpr, JetError> {
        let inv = self.zeroth.recip()?;
        let first = -&(&self.first * &(&inv * &inv));
        Ok(EpsExpr { zeroth: inv, first })
    }

    pub fn checked_div(&self, other: &EpsExpr) -> Result<EpsExpr, JetError> {
        Ok(self * &other.inverse()?)
    }

    pub fn scale(&self, c: &BigRational) -> EpsExpr {
        EpsExpr { zeroth: self.zeroth.scale(c), first: self.first.scale(c) }
    }

    /// Integer power by repeated multiplication (negative via inverse).
    pub fn pow(&self, k: i64) -> Result<EpsExpr, JetError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = EpsExpr::constant(JetExpr::one());
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Applies a linear operator on expressions componentwise; `eps` is a
    /// constant for every such operator.
    pub fn map<F>(&self, mut op: F) -> Result<EpsExpr, JetError>
    where
        F: FnMut(&JetExpr) -> Result<JetExpr, JetError>,
    {
        Ok(EpsExpr { zeroth: op(&self.zeroth)?, first: op(&self.first)? })
    }

    /// Evaluates `e` with some coordinates replaced by perturbed values,
    /// using dual-number arithmetic term by term.
    pub fn evaluate(e: &JetExpr, binding: &BTreeMap<JetVar, EpsExpr>) -> Result<EpsExpr, JetError> {
        let mut acc = EpsExpr::constant(JetExpr::constant(e.coefficient().clone()));
        for (p, q) in e.factors() {
            let mut value = EpsExpr::constant(JetExpr::zero());
            for (m, c) in p.terms() {
                let mut t = EpsExpr::constant(JetExpr::constant(c.clone()));
                for &(v, k) in m.pairs() {
                    let x = binding.get(&v).cloned().unwrap_or_else(|| EpsExpr::constant(JetExpr::var(v)));
                    t = &t * &x.pow(k as i64)?;
                }
                value = &value + &t;
            }
            // (z + eps w)^q = z^q + eps q z^(q-1) w
            let z = value.zeroth.pow_rational(q)?;
            let qc = BigRational::new((*q.numer()).into(), (*q.denom()).into());
            let w = if value.first.is_zero() {
                JetExpr::zero()
            } else {
                &value.zeroth.pow_rational(q - 1)? * &value.first.scale(&qc)
            };
            acc = &acc * &EpsExpr::new(z, w);
        }
        Ok(acc)
    }
}

impl Add for &EpsExpr {
    type Output = EpsExpr;
    fn add(self, rhs: &EpsExpr) -> EpsExpr {
        EpsExpr { zeroth: &self.zeroth + &rhs.zeroth, first: &self.first + &rhs.first }
    }
}

impl Sub for &EpsExpr {
    type Output = EpsExpr;
    fn sub(self, rhs: &EpsExpr) -> EpsExpr {
        EpsExpr { zeroth: &self.zeroth - &rhs.zeroth, first: &self.first - &rhs.first }
    }
}

impl Mul for &EpsExpr {
    type Output = EpsExpr;
    fn mul(self, rhs: &EpsExpr) -> EpsExpr {
        EpsExpr { zeroth: &self.zeroth * &rhs.zeroth, first: &(&self.zeroth * &rhs.first) + &(&self.first * &rhs.zeroth) }
    }
}

impl Neg for &EpsExpr {
    type Output = EpsExpr;
    fn neg(self) -> EpsExpr {
        EpsExpr { zeroth: -&self.zeroth, first: -&self.first }
    }
}
