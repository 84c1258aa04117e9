//! Expanded multivariate polynomials over the rationals in jet coordinates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::var::JetVar;

/// A power product of jet coordinates, stored as `(var, exponent)` pairs
/// sorted by variable with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(JetVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(JetVar, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|p| p.0);
        let mut out: Vec<(JetVar, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(&v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(JetVar, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == v {
                let d = other.0[j].1;
                if d > e {
                    return None;
                }
                if e > d {
                    out.push((v, e - d));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < v {
                return None;
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes one factor of `v`; `None` if `v` is absent.
    fn lower(&self, v: JetVar) -> Option<(u32, Monomial)> {
        let i = self.0.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
        let e = self.0[i].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(i);
        } else {
            out[i].1 -= 1;
        }
        Some((e, Monomial(out)))
    }
}

/// Graded lexicographic order; for equal degree the monomial with the
/// larger exponent on the earliest differing variable is greater.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        while i < a.len() && i < b.len() {
            match a[i].0.cmp(&b[i].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[i].1.cmp(&b[i].1) {
                    Ordering::Equal => i += 1,
                    o => return o,
                },
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse expanded polynomial. The zero polynomial has no terms and no
/// stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: JetVar) -> Self {
        Poly::monomial(Monomial::var(v), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The single variable, if the polynomial is exactly that variable.
    pub fn as_var(&self) -> Option<JetVar> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        match m.pairs() {
            [(v, 1)] if c.is_one() => Some(*v),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        self.terms.keys().flat_map(|m| m.pairs().iter().map(|&(v, _)| v)).collect()
    }

    pub fn contains_var(&self, v: JetVar) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: JetVar) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect() }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        big.add_assign_ref(small);
        big
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut acc: std::collections::HashMap<Monomial, BigRational> =
            std::collections::HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to a single coordinate.
    pub fn partial(&self, v: JetVar) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lower(v) {
                out.add_term(rest, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Formal total derivative: `x -> 1`, jets to their successors,
    /// parameters to zero.
    pub fn total_derivative(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for &(v, e) in m.pairs() {
                let (_, rest) = m.lower(v).expect("variable present");
                let coeff = c * BigRational::from_integer(BigInt::from(e));
                if let Some(s) = v.successor() {
                    out.add_term(rest.mul(&Monomial::var(s)), coeff);
                } else if v == JetVar::x() {
                    out.add_term(rest, coeff);
                }
            }
        }
        out
    }

    /// Exact quotient by `d`, or `None` when `d` does not divide `self`.
    ///
    /// Aborts as soon as a remainder leading monomial is not divisible by the
    /// leading monomial of `d`, which is conclusive for a single divisor.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm_d, lc_d) = d.leading()?;
        let (lm_d, lc_d) = (lm_d.clone(), lc_d.clone());
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((lm_r, lc_r)) = r.leading() {
            let m = lm_r.div(&lm_d)?;
            let c = lc_r / &lc_d;
            for (dm, dc) in &d.terms {
                r.add_term(dm.mul(&m), -(dc * &c));
            }
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Splits `self = content * monomial * rest`, where `rest` has coprime
    /// integer coefficients, a positive leading coefficient and no monomial
    /// factor. The zero polynomial is not accepted.
    pub fn primitive_decomposition(&self) -> (BigRational, Monomial, Poly) {
        assert!(!self.is_zero(), "decomposition of zero polynomial");
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }

        let mut common: Option<Vec<(JetVar, u32)>> = None;
        for m in self.terms.keys() {
            common = Some(match common {
                None => m.pairs().to_vec(),
                Some(prev) => prev
                    .into_iter()
                    .filter_map(|(v, e)| {
                        let f = m.exponent(v);
                        (f > 0).then(|| (v, e.min(f)))
                    })
                    .collect(),
            });
        }
        let common = Monomial::from_pairs(common.unwrap_or_default());
        let rest = Poly {
            terms: self.terms.iter().map(|(m, c)| (m.div(&common).expect("common factor divides"), c / &content)).collect(),
        };
        (content, common, rest)
    }

    /// Value at a point; `None` if some variable is unbound.
    pub fn eval<F>(&self, assign: &F) -> Option<BigRational>
    where
        F: Fn(JetVar) -> Option<BigRational>,
    {
        let mut cache: BTreeMap<JetVar, BigRational> = BTreeMap::new();
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let val = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = assign(v)?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t *= num_traits::pow(val, e as usize);
            }
            total += t;
        }
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(j: usize, k: u32) -> Poly {
        Poly::var(JetVar::coeff(j, k))
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn grlex_is_multiplicative() {
        let m1 = Monomial::from_pairs(vec![(JetVar::coeff(0, 0), 2)]);
        let m2 = Monomial::from_pairs(vec![(JetVar::coeff(0, 0), 1), (JetVar::coeff(1, 0), 1)]);
        let w = Monomial::from_pairs(vec![(JetVar::x(), 3)]);
        assert!(m1 > m2);
        assert!(m1.mul(&w) > m2.mul(&w));
    }

    #[test]
    fn exact_division_cancels_factor() {
        let num = a(0, 0).mul(&a(0, 0)).sub(&a(1, 0).mul(&a(1, 0)));
        let den = a(0, 0).sub(&a(1, 0));
        assert_eq!(num.div_exact(&den), Some(a(0, 0).add(&a(1, 0))));
        assert_eq!(den.div_exact(&a(0, 0).add(&a(1, 0))), None);
    }

    #[test]
    fn primitive_decomposition_pulls_content_and_monomials() {
        // -6 a0^2 a1 + 4 a0 a1^2 = -2 * a0 a1 * (3 a0 - 2 a1)
        let p = a(0, 0).mul(&a(0, 0)).mul(&a(1, 0)).scale(&q(-6, 1)).add(&a(0, 0).mul(&a(1, 0)).mul(&a(1, 0)).scale(&q(4, 1)));
        let (c, m, r) = p.primitive_decomposition();
        assert_eq!(c, q(-2, 1));
        assert_eq!(m, Monomial::from_pairs(vec![(JetVar::coeff(0, 0), 1), (JetVar::coeff(1, 0), 1)]));
        assert_eq!(r, a(0, 0).scale(&q(3, 1)).sub(&a(1, 0).scale(&q(2, 1))));
    }

    #[test]
    fn total_derivative_leibniz() {
        let p = a(0, 0).mul(&a(1, 0));
        assert_eq!(p.total_derivative(), a(0, 1).mul(&a(1, 0)).add(&a(0, 0).mul(&a(1, 1))));
        let x = Poly::var(JetVar::x());
        assert_eq!(x.mul(&x).total_derivative(), x.scale(&q(2, 1)));
    }
}
