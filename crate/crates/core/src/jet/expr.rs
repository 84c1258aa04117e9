//! Exact expressions in jet coordinates.
//!
//! A [`JetExpr`] is stored as `c * prod(P_i ^ e_i)` where `c` is a rational
//! constant, each `P_i` is an expanded polynomial in normalized form (coprime
//! integer coefficients, positive leading coefficient, no monomial content,
//! or a single coordinate) and each `e_i` is a non-zero rational exponent.
//! Integer exponents give the rational-function core, fractional ones the
//! power wraps. Sums expand only the factors the operands do not share, so
//! cubes and high powers of invariant numerators stay factored.
//!
//! Representations are not unique; equality is decided by expanding the
//! difference and testing the numerator for zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{Monomial, Poly};
use super::var::JetVar;
use super::JetError;

/// Rational exponent of a factor.
pub type Exp = Ratio<i64>;

#[derive(Clone, Debug)]
pub struct JetExpr {
    coeff: BigRational,
    factors: BTreeMap<Poly, Exp>,
}

fn exp_int(e: i64) -> Exp {
    Exp::from_integer(e)
}

/// Exact `k`-th root of a non-negative integer.
fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// `c^q` when it is rational.
fn rational_power(c: &BigRational, q: Exp) -> Result<Option<BigRational>, JetError> {
    let (num, den) = (*q.numer(), *q.denom());
    if c.is_zero() {
        return if num < 0 { Err(JetError::DivisionByZeroPolynomial) } else { Ok(Some(BigRational::zero())) };
    }
    let k = den as u32;
    let sign_neg = c.is_negative();
    if sign_neg && k.is_multiple_of(2) {
        return Err(JetError::BranchChoice);
    }
    let a = c.abs();
    let (rn, rd) = match (exact_root(a.numer(), k), exact_root(a.denom(), k)) {
        (Some(rn), Some(rd)) => (rn, rd),
        _ => return Ok(None),
    };
    let mut root = BigRational::new(rn, rd);
    if sign_neg {
        root = -root;
    }
    let p = num.unsigned_abs() as usize;
    let v = num_traits::pow(root, p);
    Ok(Some(if num < 0 { v.recip() } else { v }))
}

impl JetExpr {
    pub fn zero() -> Self {
        JetExpr { coeff: BigRational::zero(), factors: BTreeMap::new() }
    }

    pub fn one() -> Self {
        JetExpr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        JetExpr { coeff: c, factors: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        JetExpr::constant(BigRational::from_integer(n.into()))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        JetExpr::constant(BigRational::new(n.into(), d.into()))
    }

    pub fn var(v: JetVar) -> Self {
        let mut factors = BTreeMap::new();
        factors.insert(Poly::var(v), exp_int(1));
        JetExpr { coeff: BigRational::one(), factors }
    }

    pub fn x() -> Self {
        JetExpr::var(JetVar::x())
    }

    /// Coefficient jet `a_j^(k)`.
    pub fn coeff(j: usize, k: u32) -> Self {
        JetExpr::var(JetVar::coeff(j, k))
    }

    pub fn y(k: u32) -> Self {
        JetExpr::var(JetVar::y(k))
    }

    /// Parameter by name; panics on an unknown name.
    pub fn param(name: &str) -> Self {
        JetExpr::var(JetVar::param(name).unwrap_or_else(|| panic!("unknown parameter {name}")))
    }

    /// Arbitrary-function jet by name; panics on an unknown name.
    pub fn func(name: &str, k: u32) -> Self {
        JetExpr::var(JetVar::func(name, k).unwrap_or_else(|| panic!("unknown function {name}")))
    }

    pub fn from_poly(p: &Poly) -> Self {
        if p.is_zero() {
            return JetExpr::zero();
        }
        let (content, mono, rest) = p.primitive_decomposition();
        let mut factors = BTreeMap::new();
        for &(v, e) in mono.pairs() {
            factors.insert(Poly::var(v), exp_int(e as i64));
        }
        if rest.as_constant().is_none() {
            factors.insert(rest, exp_int(1));
        }
        JetExpr { coeff: content, factors }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.coeff.is_one()
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coeff
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Poly, Exp)> {
        self.factors.iter().map(|(p, e)| (p, *e))
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        self.factors.is_empty().then_some(&self.coeff)
    }

    /// True when every exponent is an integer (no power wraps).
    pub fn is_rational(&self) -> bool {
        self.factors.values().all(|e| e.is_integer())
    }

    /// True when the expression is a polynomial (no negative or fractional
    /// exponents).
    pub fn is_polynomial(&self) -> bool {
        self.factors.values().all(|e| e.is_integer() && *e > exp_int(0))
    }

    /// Integer-exponent part (the rational-function core).
    pub fn core(&self) -> JetExpr {
        JetExpr {
            coeff: self.coeff.clone(),
            factors: self.factors.iter().filter(|(_, e)| e.is_integer()).map(|(p, e)| (p.clone(), *e)).collect(),
        }
    }

    /// Fractional-exponent factors as `(base, exponent)` pairs.
    pub fn power_wraps(&self) -> Vec<(JetExpr, Exp)> {
        self.factors.iter().filter(|(_, e)| !e.is_integer()).map(|(p, e)| (JetExpr::from_poly(p), *e)).collect()
    }

    /// Total number of polynomial terms stored; a proxy for expression size.
    pub fn size(&self) -> usize {
        1 + self.factors.keys().map(Poly::len).sum::<usize>()
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        self.factors.keys().flat_map(|p| p.vars()).collect()
    }

    pub fn contains_var(&self, v: JetVar) -> bool {
        self.factors.keys().any(|p| p.contains_var(v))
    }

    /// Highest derivative order among coordinates satisfying `pred`.
    pub fn max_order(&self, pred: impl Fn(&JetVar) -> bool) -> Option<u32> {
        self.vars().into_iter().filter(|v| pred(v)).map(|v| v.order()).max()
    }

    fn insert_factor(factors: &mut BTreeMap<Poly, Exp>, p: Poly, e: Exp) {
        if e.is_zero() {
            return;
        }
        let entry = factors.entry(p).or_insert_with(|| exp_int(0));
        *entry += e;
        if entry.is_zero() {
            factors.retain(|_, e| !e.is_zero());
        }
    }

    /// Multiplies in `p^e` for an arbitrary non-zero polynomial `p`.
    fn mul_poly_power(&mut self, p: &Poly, e: Exp) -> Result<(), JetError> {
        if p.is_zero() {
            if e < exp_int(0) {
                return Err(JetError::DivisionByZeroPolynomial);
            }
            *self = JetExpr::zero();
            return Ok(());
        }
        let (content, mono, rest) = p.primitive_decomposition();
        self.mul_constant_power(&content, e)?;
        for &(v, k) in mono.pairs() {
            Self::insert_factor(&mut self.factors, Poly::var(v), e * exp_int(k as i64));
        }
        if rest.as_constant().is_none() {
            Self::insert_factor(&mut self.factors, rest, e);
        }
        Ok(())
    }

    fn mul_constant_power(&mut self, c: &BigRational, e: Exp) -> Result<(), JetError> {
        if e.is_integer() {
            let k = e.to_integer();
            if c.is_zero() && k < 0 {
                return Err(JetError::DivisionByZeroPolynomial);
            }
            let v = num_traits::pow(c.clone(), k.unsigned_abs() as usize);
            self.coeff *= if k < 0 { v.recip() } else { v };
            return Ok(());
        }
        if let Some(v) = rational_power(c, e)? {
            self.coeff *= v;
            return Ok(());
        }
        // Irrational constant: keep |numerator| and |denominator| as
        // constant bases with fractional exponents.
        if c.is_negative() {
            // odd root denominator (even ones were rejected above)
            if e.numer() % 2 != 0 {
                self.coeff = -self.coeff.clone();
            }
        }
        let a = c.abs();
        for (n, sign) in [(a.numer().clone(), 1i64), (a.denom().clone(), -1i64)] {
            if n.is_one() {
                continue;
            }
            Self::insert_factor(&mut self.factors, Poly::constant(BigRational::from_integer(n)), e * exp_int(sign));
        }
        Ok(())
    }

    /// Collapses pairs of numerator and denominator factors where one
    /// exactly divides the other.
    fn cancel(mut self) -> Self {
        loop {
            let mut changed = false;
            let nums: Vec<(Poly, Exp)> = self
                .factors
                .iter()
                .filter(|(p, e)| e.is_integer() && **e > exp_int(0) && p.as_var().is_none() && p.as_constant().is_none())
                .map(|(p, e)| (p.clone(), *e))
                .collect();
            let dens: Vec<(Poly, Exp)> = self
                .factors
                .iter()
                .filter(|(p, e)| e.is_integer() && **e < exp_int(0) && p.as_var().is_none() && p.as_constant().is_none())
                .map(|(p, e)| (p.clone(), *e))
                .collect();
            'outer: for (n, en) in &nums {
                for (d, ed) in &dens {
                    if n.degree() >= d.degree() {
                        if let Some(qt) = n.div_exact(d) {
                            // n^en d^ed = qt^en d^(en+ed)
                            self.factors.remove(n);
                            Self::insert_factor(&mut self.factors, d.clone(), *en);
                            self.mul_poly_power(&qt, *en).expect("non-zero quotient");
                            changed = true;
                            break 'outer;
                        }
                    } else if let Some(qt) = d.div_exact(n) {
                        // n^en d^ed = n^(en+ed) qt^ed
                        self.factors.remove(d);
                        Self::insert_factor(&mut self.factors, n.clone(), *ed);
                        self.mul_poly_power(&qt, *ed).expect("non-zero quotient");
                        changed = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                return self;
            }
        }
    }

    pub fn mul_ref(&self, other: &JetExpr) -> JetExpr {
        if self.is_zero() || other.is_zero() {
            return JetExpr::zero();
        }
        let mut out = self.clone();
        out.coeff *= &other.coeff;
        for (p, e) in &other.factors {
            Self::insert_factor(&mut out.factors, p.clone(), *e);
        }
        out.cancel()
    }

    pub fn scale(&self, c: &BigRational) -> JetExpr {
        if c.is_zero() {
            return JetExpr::zero();
        }
        let mut out = self.clone();
        out.coeff *= c;
        out
    }

    pub fn neg_ref(&self) -> JetExpr {
        let mut out = self.clone();
        out.coeff = -out.coeff;
        out
    }

    pub fn recip(&self) -> Result<JetExpr, JetError> {
        if self.is_zero() {
            return Err(JetError::DivisionByZeroPolynomial);
        }
        Ok(JetExpr { coeff: self.coeff.recip(), factors: self.factors.iter().map(|(p, e)| (p.clone(), -*e)).collect() })
    }

    pub fn checked_div(&self, other: &JetExpr) -> Result<JetExpr, JetError> {
        Ok(self.mul_ref(&other.recip()?))
    }

    pub fn pow(&self, k: i64) -> Result<JetExpr, JetError> {
        self.pow_rational(exp_int(k))
    }

    /// Raises to a rational power. Exponents multiply factorwise; a negative
    /// constant under an even root is rejected.
    pub fn pow_rational(&self, q: Exp) -> Result<JetExpr, JetError> {
        if q.is_zero() {
            if self.is_zero() {
                return Err(JetError::DivisionByZeroPolynomial);
            }
            return Ok(JetExpr::one());
        }
        if self.is_zero() {
            if q < exp_int(0) {
                return Err(JetError::DivisionByZeroPolynomial);
            }
            if !q.is_integer() && self.is_zero() {
                return Ok(JetExpr::zero());
            }
            return Ok(JetExpr::zero());
        }
        let mut out = JetExpr::one();
        out.mul_constant_power(&self.coeff, q)?;
        for (p, e) in &self.factors {
            Self::insert_factor(&mut out.factors, p.clone(), *e * q);
        }
        Ok(out)
    }

    /// Fractional power of an expression that must not be zero; used where a
    /// zero base would need a branch choice.
    pub fn root_power(&self, q: Exp) -> Result<JetExpr, JetError> {
        if self.is_zero() && !q.is_integer() {
            return Err(JetError::FractionalPowerDerivative);
        }
        self.pow_rational(q)
    }

    /// Least positive integer `L` making every exponent integral.
    pub fn rationalizing_exponent(&self) -> i64 {
        self.factors.values().fold(1i64, |acc, e| acc.lcm(e.denom()))
    }

    /// Raises to [`Self::rationalizing_exponent`], clearing power wraps.
    pub fn rationalize(&self) -> JetExpr {
        let l = self.rationalizing_exponent();
        if l == 1 {
            return self.clone();
        }
        self.pow(l).expect("non-zero by construction")
    }

    /// Sum of several expressions. Shared factors are pulled out; only the
    /// cofactors are expanded.
    pub fn sum<'a, I>(terms: I) -> Result<JetExpr, JetError>
    where
        I: IntoIterator<Item = &'a JetExpr>,
    {
        let terms: Vec<&JetExpr> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        match terms.len() {
            0 => return Ok(JetExpr::zero()),
            1 => return Ok(terms[0].clone()),
            _ => {}
        }
        // common exponent per base: minimum over terms, absent counts as 0
        let mut bases: BTreeMap<&Poly, Exp> = BTreeMap::new();
        for t in &terms {
            for (p, e) in &t.factors {
                let m = bases.entry(p).or_insert(*e);
                if *e < *m {
                    *m = *e;
                }
            }
        }
        for (p, m) in bases.iter_mut() {
            if terms.iter().any(|t| !t.factors.contains_key(*p)) && *m > exp_int(0) {
                *m = exp_int(0);
            }
        }
        let mut cache: HashMap<(&Poly, i64), Poly> = HashMap::new();
        let mut total = Poly::zero();
        for t in &terms {
            let mut prod = Poly::constant(t.coeff.clone());
            for (p, m) in &bases {
                let e = t.factors.get(*p).copied().unwrap_or(exp_int(0));
                let d = e - *m;
                if !d.is_integer() {
                    return Err(JetError::NonRationalSum);
                }
                let k = d.to_integer();
                if k == 0 {
                    continue;
                }
                let pk = cache.entry((*p, k)).or_insert_with(|| p.pow(k as u32)).clone();
                prod = prod.mul(&pk);
            }
            total.add_assign_ref(&prod);
        }
        if total.is_zero() {
            return Ok(JetExpr::zero());
        }
        let mut out = JetExpr::one();
        for (p, m) in bases {
            Self::insert_factor(&mut out.factors, p.clone(), m);
        }
        out.mul_poly_power(&total, exp_int(1))?;
        Ok(out.cancel())
    }

    pub fn checked_add(&self, other: &JetExpr) -> Result<JetExpr, JetError> {
        JetExpr::sum([self, other])
    }

    pub fn checked_sub(&self, other: &JetExpr) -> Result<JetExpr, JetError> {
        JetExpr::sum([self, &other.neg_ref()])
    }

    /// Expanded polynomial, if the expression has no negative or fractional
    /// exponents.
    pub fn to_poly(&self) -> Option<Poly> {
        if !self.is_polynomial() {
            return None;
        }
        let mut out = Poly::constant(self.coeff.clone());
        for (p, e) in &self.factors {
            out = out.mul(&p.pow(e.to_integer() as u32));
        }
        Some(out)
    }

    /// Splits a rational expression into expanded numerator and denominator.
    pub fn to_num_den(&self) -> Option<(Poly, Poly)> {
        if !self.is_rational() {
            return None;
        }
        let mut num = Poly::constant(self.coeff.clone());
        let mut den = Poly::one();
        for (p, e) in &self.factors {
            let k = e.to_integer();
            if k > 0 {
                num = num.mul(&p.pow(k as u32));
            } else {
                den = den.mul(&p.pow((-k) as u32));
            }
        }
        Some((num, den))
    }

    /// Denominator factors as expressions with positive exponents.
    pub fn denominator_factors(&self) -> Vec<(JetExpr, Exp)> {
        self.factors.iter().filter(|(_, e)| **e < exp_int(0)).map(|(p, e)| (JetExpr::from_poly(p), -*e)).collect()
    }

    /// Applies a derivation given by its action on polynomial factors:
    /// `D(c prod P^e) = c prod P^e * sum e D(P) / P`.
    pub fn derive_with<F>(&self, mut poly_derivative: F) -> Result<JetExpr, JetError>
    where
        F: FnMut(&Poly) -> Result<JetExpr, JetError>,
    {
        if self.is_zero() {
            return Ok(JetExpr::zero());
        }
        let mut moving: Vec<(&Poly, Exp, JetExpr)> = Vec::new();
        for (p, e) in &self.factors {
            let d = poly_derivative(p)?;
            if !d.is_zero() {
                moving.push((p, *e, d));
            }
        }
        if moving.is_empty() {
            return Ok(JetExpr::zero());
        }
        let mut pieces = Vec::with_capacity(moving.len());
        for (i, (_, e, d)) in moving.iter().enumerate() {
            let mut piece = d.scale(&BigRational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom())));
            for (j, (q, _, _)) in moving.iter().enumerate() {
                if i != j {
                    piece.mul_poly_power(q, exp_int(1))?;
                }
            }
            pieces.push(piece);
        }
        let s = JetExpr::sum(pieces.iter())?;
        if s.is_zero() {
            return Ok(JetExpr::zero());
        }
        let mut out = self.clone();
        for (p, _, _) in &moving {
            Self::insert_factor(&mut out.factors, (*p).clone(), exp_int(-1));
        }
        Ok(out.mul_ref(&s))
    }

    /// `D_x^k` with the formal total derivative.
    pub fn total_derivative(&self, k: u32) -> Result<JetExpr, JetError> {
        let mut cur = self.clone();
        for _ in 0..k {
            cur = cur.derive_with(|p| Ok(JetExpr::from_poly(&p.total_derivative())))?;
        }
        Ok(cur)
    }

    pub fn partial(&self, v: JetVar) -> Result<JetExpr, JetError> {
        self.derive_with(|p| Ok(JetExpr::from_poly(&p.partial(v))))
    }

    /// Simultaneous substitution of coordinates by expressions.
    pub fn substitute(&self, binding: &BTreeMap<JetVar, JetExpr>) -> Result<JetExpr, JetError> {
        if binding.is_empty() || self.is_zero() {
            return Ok(self.clone());
        }
        let mut out = JetExpr::constant(self.coeff.clone());
        for (p, e) in &self.factors {
            if !p.vars().iter().any(|v| binding.contains_key(v)) {
                Self::insert_factor(&mut out.factors, p.clone(), *e);
                continue;
            }
            let value = substitute_poly(p, binding)?;
            if value.is_zero() {
                if *e < exp_int(0) {
                    return Err(JetError::DivisionByZeroPolynomial);
                }
                return Ok(JetExpr::zero());
            }
            out = out.mul_ref(&value.pow_rational(*e)?);
        }
        Ok(out.cancel())
    }

    /// Exact value under a full assignment of the coordinates.
    pub fn eval_exact<F>(&self, assign: F) -> Result<BigRational, JetError>
    where
        F: Fn(JetVar) -> Option<BigRational>,
    {
        let mut acc = self.coeff.clone();
        if acc.is_zero() {
            return Ok(acc);
        }
        for (p, e) in &self.factors {
            let v = match p.eval(&assign) {
                Some(v) => v,
                None => {
                    let missing = p.vars().into_iter().find(|w| assign(*w).is_none()).expect("unbound");
                    return Err(JetError::UnboundVariable(missing));
                }
            };
            if v.is_zero() && *e < exp_int(0) {
                return Err(JetError::EvalDivisionByZero);
            }
            match rational_power(&v, *e) {
                Ok(Some(r)) => acc *= r,
                Ok(None) | Err(JetError::BranchChoice) => return Err(JetError::IrrationalPower),
                Err(JetError::DivisionByZeroPolynomial) => return Err(JetError::EvalDivisionByZero),
                Err(err) => return Err(err),
            }
        }
        Ok(acc)
    }

    pub fn eval_map(&self, assignment: &BTreeMap<JetVar, BigRational>) -> Result<BigRational, JetError> {
        self.eval_exact(|v| assignment.get(&v).cloned())
    }

    /// Exact equality, decided by expanding the difference.
    pub fn equals(&self, other: &JetExpr) -> bool {
        match self.checked_sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    /// Structural comparison of the stored representation.
    pub fn same_representation(&self, other: &JetExpr) -> bool {
        self.coeff == other.coeff && self.factors == other.factors
    }

    /// Expression with `factor`'s exponent shifted by `delta`; used for
    /// exponent mutations in tests and harness checks.
    pub fn with_factor_exponent_shifted(&self, base: &Poly, delta: i64) -> JetExpr {
        let mut out = self.clone();
        Self::insert_factor(&mut out.factors, base.clone(), exp_int(delta));
        out
    }
}

fn substitute_poly(p: &Poly, binding: &BTreeMap<JetVar, JetExpr>) -> Result<JetExpr, JetError> {
    // all-polynomial bindings: expand directly
    if p.vars().iter().all(|v| binding.get(v).is_none_or(JetExpr::is_polynomial)) {
        let mut cache: HashMap<(JetVar, u32), Poly> = HashMap::new();
        let mut value_polys: HashMap<JetVar, Poly> = HashMap::new();
        let mut total = Poly::zero();
        for (m, c) in p.terms() {
            let mut t = Poly::constant(c.clone());
            let mut plain = Vec::new();
            for &(v, e) in m.pairs() {
                match binding.get(&v) {
                    Some(val) => {
                        let vp = value_polys.entry(v).or_insert_with(|| val.to_poly().expect("polynomial")).clone();
                        let pw = cache.entry((v, e)).or_insert_with(|| vp.pow(e)).clone();
                        t = t.mul(&pw);
                    }
                    None => plain.push((v, e)),
                }
            }
            if !plain.is_empty() {
                t = t.mul_term(&Monomial::from_pairs(plain), &BigRational::one());
            }
            total.add_assign_ref(&t);
        }
        return Ok(JetExpr::from_poly(&total));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut t = JetExpr::constant(c.clone());
        for &(v, e) in m.pairs() {
            let val = binding.get(&v).cloned().unwrap_or_else(|| JetExpr::var(v));
            t = t.mul_ref(&val.pow(e as i64)?);
        }
        terms.push(t);
    }
    JetExpr::sum(terms.iter())
}

impl PartialEq for JetExpr {
    fn eq(&self, other: &Self) -> bool {
        self.same_representation(other) || self.equals(other)
    }
}

impl From<Poly> for JetExpr {
    fn from(p: Poly) -> Self {
        JetExpr::from_poly(&p)
    }
}

impl From<JetVar> for JetExpr {
    fn from(v: JetVar) -> Self {
        JetExpr::var(v)
    }
}

impl From<i64> for JetExpr {
    fn from(n: i64) -> Self {
        JetExpr::int(n)
    }
}

impl From<BigRational> for JetExpr {
    fn from(c: BigRational) -> Self {
        JetExpr::constant(c)
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::print(self))
    }
}

// Operator impls. Sums of expressions whose fractional exponents differ by a
// non-integer have no representation and panic; use `checked_add` for
// untrusted input.
impl Add for &JetExpr {
    type Output = JetExpr;
    fn add(self, rhs: &JetExpr) -> JetExpr {
        self.checked_add(rhs).expect("sum of incompatible fractional powers")
    }
}

impl Sub for &JetExpr {
    type Output = JetExpr;
    fn sub(self, rhs: &JetExpr) -> JetExpr {
        self.checked_sub(rhs).expect("difference of incompatible fractional powers")
    }
}

impl Mul for &JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: &JetExpr) -> JetExpr {
        self.mul_ref(rhs)
    }
}

impl Neg for &JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        self.neg_ref()
    }
}

impl Add for JetExpr {
    type Output = JetExpr;
    fn add(self, rhs: JetExpr) -> JetExpr {
        &self + &rhs
    }
}

impl Sub for JetExpr {
    type Output = JetExpr;
    fn sub(self, rhs: JetExpr) -> JetExpr {
        &self - &rhs
    }
}

impl Mul for JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: JetExpr) -> JetExpr {
        self.mul_ref(&rhs)
    }
}

impl Neg for JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        self.neg_ref()
    }
}

/// Convenience conversion of a small exponent to `f64`-free display.
pub(crate) fn exp_to_string(e: Exp) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

#[allow(dead_code)]
pub(crate) fn exp_as_i64(e: Exp) -> Option<i64> {
    e.is_integer().then(|| e.to_integer()).and_then(|v| v.to_i64())
}
