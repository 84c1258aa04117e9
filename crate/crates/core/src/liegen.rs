//! Vector fields on jet space: prolongation, Lie derivatives, annihilation
//! and symmetry checks, generator derivation, parameter splitting and
//! invariant counting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{EpsExpr, JetError, JetExpr, JetVar, Monomial, Poly, VarKind};
use crate::linalg;
use crate::ode::{Form, LinearODE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("order {0} is not supported (expected 3..=5)")]
    UnsupportedOrder(usize),
    #[error("form `{0}` is not supported here")]
    UnsupportedForm(Form),
    #[error("component {component} is not linear in {symbol}")]
    NonLinearParameter { component: JetVar, symbol: String },
    #[error("component {component} has a parameter-dependent denominator")]
    ParameterInDenominator { component: JetVar },
    #[error("invariant count mismatch at n={n}, p={p}: formula {formula}, rank {rank}")]
    CountMismatch { n: usize, p: usize, formula: usize, rank: usize },
    #[error("derived generator moves coefficient a{index}, which the form fixes to zero")]
    FormNotPreserved { index: usize },
}

/// A vector field `sum_v c_v d/dv`. Missing keys are zero components.
#[derive(Clone, Debug, Default)]
pub struct VectorField {
    components: BTreeMap<JetVar, JetExpr>,
}

impl VectorField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_components<I: IntoIterator<Item = (JetVar, JetExpr)>>(it: I) -> Self {
        let mut vf = VectorField::new();
        for (v, e) in it {
            vf.set(v, e);
        }
        vf
    }

    pub fn set(&mut self, v: JetVar, e: JetExpr) {
        if e.is_zero() {
            self.components.remove(&v);
        } else {
            self.components.insert(v, e);
        }
    }

    pub fn component(&self, v: JetVar) -> JetExpr {
        self.components.get(&v).cloned().unwrap_or_else(JetExpr::zero)
    }

    pub fn components(&self) -> impl Iterator<Item = (&JetVar, &JetExpr)> {
        self.components.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.components.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Parameters and arbitrary-function jets the components depend on.
    pub fn free_symbols(&self) -> BTreeSet<JetVar> {
        self.components.values().flat_map(|e| e.vars()).filter(|v| v.is_param() || v.is_arb_func()).collect()
    }

    /// Componentwise exact equality.
    pub fn equals(&self, other: &VectorField) -> bool {
        let keys: BTreeSet<JetVar> = self.keys().chain(other.keys()).collect();
        keys.into_iter().all(|k| self.component(k).equals(&other.component(k)))
    }

    /// Keeps only the components whose coordinate satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&JetVar) -> bool) -> VectorField {
        VectorField { components: self.components.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn scale_by(&self, e: &JetExpr) -> VectorField {
        VectorField::from_components(self.components.iter().map(|(k, v)| (*k, v * e)))
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, JetError> {
        let mut out = self.clone();
        for (k, v) in &other.components {
            let s = out.component(*k).checked_add(v)?;
            out.set(*k, s);
        }
        Ok(out)
    }

    /// Substitutes inside every component.
    pub fn substitute(&self, binding: &BTreeMap<JetVar, JetExpr>) -> Result<VectorField, JetError> {
        let mut out = VectorField::new();
        for (k, v) in &self.components {
            out.set(*k, v.substitute(binding)?);
        }
        Ok(out)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.components.iter().map(|(k, v)| format!("({v})*d[{k}]")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Outcome of an exact identity check.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Holds,
    Fails { residual: JetExpr },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    fn from_residual(residual: JetExpr) -> Self {
        if residual.is_zero() {
            Verdict::Holds
        } else {
            Verdict::Fails { residual }
        }
    }
}

/// Base coordinates that get prolonged: coefficients and `y`.
fn prolongable(v: &JetVar) -> bool {
    matches!(v.kind(), VarKind::Coeff(_) | VarKind::DepY)
}

/// Prolongs each base coordinate `c` with a non-zero order-zero component up
/// to order `order(c)`, using `phi^(k+1) = D(phi^(k)) - c^(k+1) D(xi)`.
fn prolong_with(vf: &VectorField, order: impl Fn(JetVar) -> u32) -> Result<VectorField, JetError> {
    let dxi = vf.component(JetVar::x()).total_derivative(1)?;
    let mut out = vf.clone();
    let bases: Vec<JetVar> = vf.keys().filter(|v| v.order() == 0 && prolongable(v)).collect();
    for base in bases {
        let target = order(base);
        let mut k = 0;
        let mut cur = vf.component(base);
        while k < target {
            let next_var = base.with_order(k + 1).expect("prolongable");
            let next = match vf.components.get(&next_var) {
                Some(existing) => existing.clone(),
                None => {
                    let d = cur.total_derivative(1)?;
                    d.checked_sub(&(&JetExpr::var(next_var) * &dxi))?
                }
            };
            out.set(next_var, next.clone());
            cur = next;
            k += 1;
        }
    }
    Ok(out)
}

/// `p`-th prolongation. Components already present are kept.
pub fn prolong(vf: &VectorField, p: u32) -> Result<VectorField, JetError> {
    prolong_with(vf, |_| p)
}

/// `sum_v c_v de/dv`.
pub fn lie_apply(vf: &VectorField, e: &JetExpr) -> Result<JetExpr, JetError> {
    e.derive_with(|p| {
        let mut terms = Vec::new();
        for v in p.vars() {
            if let Some(c) = vf.components.get(&v) {
                terms.push(c * &JetExpr::from_poly(&p.partial(v)));
            }
        }
        JetExpr::sum(terms.iter())
    })
}

/// Whether the `p`-th prolongation of `vf` annihilates `e`, identically in
/// all parameters and arbitrary functions.
pub fn verify_annihilates(vf: &VectorField, p: u32, e: &JetExpr) -> Result<Verdict, JetError> {
    let pr = prolong_for(vf, p, e)?;
    Ok(Verdict::from_residual(lie_apply(&pr, e)?))
}

/// Prolongation truncated to the jets `e` actually contains.
fn prolong_for(vf: &VectorField, p: u32, e: &JetExpr) -> Result<VectorField, JetError> {
    let vars = e.vars();
    prolong_with(vf, |base| {
        let needed = vars.iter().filter(|v| v.base() == base).map(|v| v.order()).max().unwrap_or(0);
        needed.min(p)
    })
}

/// Symmetry criterion for a field with `x`, `y` and coefficient components:
/// `pr(vf)(Delta)` must vanish once `y^(n)` is eliminated with the equation.
pub fn verify_symmetry(vf: &VectorField, ode: &LinearODE) -> Result<Verdict, JetError> {
    let delta = ode.delta();
    let pr = prolong_for(vf, ode.n as u32, &delta)?;
    let applied = lie_apply(&pr, &delta)?;
    let on_shell = applied.substitute(&[(JetVar::y(ode.n as u32), ode.solved_leading())].into())?;
    Ok(Verdict::from_residual(on_shell))
}

/// Infinitesimal point transformation `xbar = x + eps xi`, `ybar = y (1 + eps eta)`
/// used for each canonical form.
fn form_ansatz(form: Form, n: usize) -> Result<(JetExpr, JetExpr), LieError> {
    let f = JetExpr::func("f", 0);
    let half_weight = JetExpr::rational(n as i64 - 1, 2);
    match form {
        Form::Standard => Ok((f, JetExpr::func("g", 0))),
        Form::Normal => Ok((f, &half_weight * &JetExpr::func("f", 1))),
        Form::W => {
            let x = JetExpr::x();
            let xi = JetExpr::sum([&JetExpr::param("k1"), &(&JetExpr::param("k2") * &x), &(&JetExpr::param("k3") * &(&x * &x))])?;
            let eta = &half_weight * &xi.total_derivative(1)?;
            Ok((xi, eta))
        }
        Form::General => Err(LieError::UnsupportedForm(form)),
    }
}

/// Generator `X^0` of the induced action on the coefficients, derived by the
/// first-order expansion: the barred derivatives are built in dual
/// arithmetic, the original ones are recovered to first order and put into
/// the equation, which is then made monic again.
pub fn derive_coefficient_generator(form: Form, n: usize) -> Result<VectorField, LieError> {
    if !(3..=5).contains(&n) {
        return Err(LieError::UnsupportedOrder(n));
    }
    derive_generator_any_order(form, n)
}

pub(crate) fn derive_generator_any_order(form: Form, n: usize) -> Result<VectorField, LieError> {
    let (xi, eta) = form_ansatz(form, n)?;
    let ode = LinearODE::generic(form, n);

    // ybar^(k) = (D ybar^(k-1)) / (D xbar), to first order in eps
    let dxbar = EpsExpr::one_plus(xi.total_derivative(1)?);
    let y = JetExpr::y(0);
    let mut ybar = EpsExpr::new(y.clone(), &eta * &y);
    let mut zeta = vec![ybar.first.clone()];
    for _ in 0..n {
        ybar = ybar.map(|e| e.total_derivative(1))?.checked_div(&dxbar)?;
        zeta.push(ybar.first.clone());
    }

    // y^(j) = ybar^(j) - eps zeta_j; coefficient of ybar^(i) in the equation
    let coeff_of = |j: usize| if j == n { JetExpr::one() } else { ode.coeff(j).clone() };
    let mut collected = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut firsts = Vec::new();
        for (j, z) in zeta.iter().enumerate() {
            let c = z.partial(JetVar::y(i as u32))?;
            if !c.is_zero() {
                firsts.push(-(&coeff_of(j) * &c));
            }
        }
        collected.push(EpsExpr::new(coeff_of(i), JetExpr::sum(firsts.iter())?));
    }
    let lead = collected[n].clone();

    let mut vf = VectorField::new();
    vf.set(JetVar::x(), xi);
    for (i, c) in collected.iter().take(n).enumerate() {
        let phi = c.checked_div(&lead)?.first;
        if i >= form.free_count(n) {
            if !phi.is_zero() {
                return Err(LieError::FormNotPreserved { index: i });
            }
            continue;
        }
        vf.set(JetVar::coeff(i, 0), phi);
    }
    Ok(vf)
}

/// `X = sum_j K_j W_j` with parameter-free fields `W_j`.
#[derive(Clone, Debug, Default)]
pub struct ParamSplit {
    /// `None` collects terms free of every parameter.
    pub basis: Vec<(Option<JetVar>, VectorField)>,
}

impl ParamSplit {
    pub fn reassemble(&self) -> Result<VectorField, JetError> {
        let mut out = VectorField::new();
        for (k, w) in &self.basis {
            let scaled = match k {
                Some(v) => w.scale_by(&JetExpr::var(*v)),
                None => w.clone(),
            };
            out = out.add(&scaled)?;
        }
        Ok(out)
    }

    pub fn fields(&self) -> Vec<VectorField> {
        self.basis.iter().map(|(_, w)| w.clone()).collect()
    }
}

fn is_split_symbol(v: &JetVar) -> bool {
    v.is_param() || v.is_arb_func()
}

/// Collects the coefficient field of each parameter and arbitrary-function
/// jet.
pub fn split_by_parameters(vf: &VectorField) -> Result<ParamSplit, LieError> {
    let mut parts: BTreeMap<Option<JetVar>, VectorField> = BTreeMap::new();
    for (&comp, e) in vf.components() {
        let (num, den) = e.to_num_den().ok_or(LieError::Jet(JetError::NonRationalSum))?;
        if den.vars().iter().any(is_split_symbol) {
            return Err(LieError::ParameterInDenominator { component: comp });
        }
        let den = JetExpr::from_poly(&den);
        let mut grouped: BTreeMap<Option<JetVar>, Poly> = BTreeMap::new();
        for (m, c) in num.terms() {
            let (sym, rest): (Vec<_>, Vec<_>) = m.pairs().iter().copied().partition(|(v, _)| is_split_symbol(v));
            let key = match sym.as_slice() {
                [] => None,
                [(v, 1)] => Some(*v),
                _ => {
                    let symbol = sym.iter().map(|(v, k)| format!("{v}^{k}")).collect::<Vec<_>>().join("*");
                    return Err(LieError::NonLinearParameter { component: comp, symbol });
                }
            };
            grouped.entry(key).or_insert_with(Poly::zero).add_term(Monomial::from_pairs(rest), c.clone());
        }
        for (key, p) in grouped {
            let value = JetExpr::from_poly(&p).checked_div(&den)?;
            parts.entry(key).or_default().set(comp, value);
        }
    }
    Ok(ParamSplit { basis: parts.into_iter().filter(|(_, w)| !w.is_zero()).collect() })
}

/// Default number of random trials for rank estimates.
pub const RANK_TRIALS: usize = 8;
/// Default seed for rank estimates.
pub const RANK_SEED: u64 = 0x5eed_0de1;

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(-99..=99);
    let den: i64 = rng.gen_range(1..=99);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Evaluates `rows` at random points; `points` evaluations per row are
/// concatenated. Retries a point when a denominator vanishes.
fn sampled_matrix(rows: &[VectorField], coords: &[JetVar], points: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<BigRational>>> {
    let vars: BTreeSet<JetVar> = rows.iter().flat_map(|r| r.components().flat_map(|(_, e)| e.vars())).collect();
    let mut matrix = vec![Vec::with_capacity(points * coords.len()); rows.len()];
    for _ in 0..points {
        let mut ok = false;
        for _attempt in 0..32 {
            let assignment: BTreeMap<JetVar, BigRational> = vars.iter().map(|v| (*v, random_rational(rng))).collect();
            let evaluated: Result<Vec<Vec<BigRational>>, JetError> =
                rows.iter().map(|r| coords.iter().map(|c| r.component(*c).eval_map(&assignment)).collect()).collect();
            if let Ok(vals) = evaluated {
                for (row, v) in matrix.iter_mut().zip(vals) {
                    row.extend(v);
                }
                ok = true;
                break;
            }
        }
        if !ok {
            return None;
        }
    }
    Some(matrix)
}

/// Generic rank of the matrix whose rows are the components of `rows` on
/// `coords`: the maximum exact rank over `trials` random rational points.
pub fn generic_rank_of_rows(rows: &[VectorField], coords: &[JetVar], trials: usize, seed: u64) -> usize {
    if rows.is_empty() || coords.is_empty() {
        return 0;
    }
    (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            sampled_matrix(rows, coords, 1, &mut rng).map_or(0, linalg::rank)
        })
        .max()
        .unwrap_or(0)
}

/// Rank of the parameter split, as in the matrix of the fields `W_j`.
pub fn generic_rank(split: &ParamSplit, coords: &[JetVar], trials: usize) -> usize {
    generic_rank_of_rows(&split.fields(), coords, trials, RANK_SEED)
}

/// Dimension of the linear span of `fields` as functions, estimated by
/// sampling each field at several random points at once. Pointwise rank
/// cannot tell `d/dx` from `x d/dx`; stacking `points` evaluations can.
pub fn span_rank(fields: &[VectorField], coords: &[JetVar], points: usize, trials: usize, seed: u64) -> usize {
    if fields.is_empty() {
        return 0;
    }
    (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            sampled_matrix(fields, coords, points, &mut rng).map_or(0, linalg::rank)
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Formula,
    Rank,
    Both,
}

/// Closed-form count of fundamental invariants for the w-form.
pub fn count_formula(n: usize, p: usize) -> usize {
    if (n, p) == (3, 0) {
        0
    } else {
        n + p * (n - 2) - 4
    }
}

/// Jet coordinates of the `p`-th prolonged w-form generator:
/// `x` and `a_j^(k)` for `j < n-2`, `k <= p`.
pub fn w_coordinates(n: usize, p: usize) -> Vec<JetVar> {
    let mut coords = vec![JetVar::x()];
    for j in 0..n - 2 {
        for k in 0..=p {
            coords.push(JetVar::coeff(j, k as u32));
        }
    }
    coords
}

/// Number of fundamental invariants of the `p`-th prolongation for the
/// w-form of order `n`.
pub fn count_invariants(form: Form, n: usize, p: usize, method: CountMethod) -> Result<usize, LieError> {
    if form != Form::W {
        return Err(LieError::UnsupportedForm(form));
    }
    if n < 3 {
        return Err(LieError::UnsupportedOrder(n));
    }
    let by_rank = || -> Result<usize, LieError> {
        let gen = prolong(&derive_generator_any_order(Form::W, n)?, p as u32)?;
        let split = split_by_parameters(&gen)?;
        let coords = w_coordinates(n, p);
        Ok(coords.len() - generic_rank(&split, &coords, RANK_TRIALS))
    };
    match method {
        CountMethod::Formula => Ok(count_formula(n, p)),
        CountMethod::Rank => by_rank(),
        CountMethod::Both => {
            let (formula, rank) = (count_formula(n, p), by_rank()?);
            if formula != rank {
                return Err(LieError::CountMismatch { n, p, formula, rank });
            }
            Ok(formula)
        }
    }
}
