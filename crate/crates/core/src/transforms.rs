//! Changes of variables `x = g(xbar)`, `y = T(xbar) ybar` for linear ODEs.
//!
//! The scaling `T` only enters through `tau = T'/T`; for a homogeneous
//! equation the overall factor `T` drops out once the result is made monic.

use std::collections::BTreeMap;

use num_rational::BigRational;
use thiserror::Error;

use crate::jet::{EpsExpr, JetError, JetExpr, JetVar};
use crate::liegen::VectorField;
use crate::ode::{twisted_derivative, Form, LinearODE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("degenerate map: {0}")]
    DegenerateMap(String),
    #[error("expression size {size} exceeds the budget of {limit} nodes")]
    BudgetExceeded { size: usize, limit: usize },
    #[error("form `{0}` is not accepted here")]
    UnsupportedForm(Form),
    #[error("order {0} is not accepted here")]
    UnsupportedOrder(usize),
    #[error("group family has no closed form for T; cannot differentiate in {0}")]
    MissingScale(String),
}

/// `x = g(xbar)` and `y = T(xbar) ybar`, with `tau = T'/T`. Expressions use
/// `x` for the new variable `xbar`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransformation {
    pub x_map: JetExpr,
    pub log_t: JetExpr,
    /// `T` itself, when known in closed form.
    pub scale: Option<JetExpr>,
}

impl PointTransformation {
    pub fn new(x_map: JetExpr, log_t: JetExpr) -> Self {
        PointTransformation { x_map, log_t, scale: None }
    }

    pub fn identity() -> Self {
        PointTransformation { x_map: JetExpr::x(), log_t: JetExpr::zero(), scale: Some(JetExpr::one()) }
    }

    /// Builds the transformation from `g` and a closed-form `T`.
    pub fn with_scale(x_map: JetExpr, scale: JetExpr) -> Result<Self, JetError> {
        let log_t = scale.total_derivative(1)?.checked_div(&scale)?;
        Ok(PointTransformation { x_map, log_t, scale: Some(scale) })
    }

    /// `self` followed by `next`: first `x = g1(u)`, then `u = g2(xbar)`.
    pub fn then(&self, next: &PointTransformation) -> Result<PointTransformation, JetError> {
        let at_next: BTreeMap<JetVar, JetExpr> = [(JetVar::x(), next.x_map.clone())].into();
        let x_map = self.x_map.substitute(&at_next)?;
        let g2p = next.x_map.total_derivative(1)?;
        // T = T1(g2) T2, so tau = tau1(g2) g2' + tau2
        let log_t = (&self.log_t.substitute(&at_next)? * &g2p).checked_add(&next.log_t)?;
        let scale = match (&self.scale, &next.scale) {
            (Some(t1), Some(t2)) => Some(&t1.substitute(&at_next)? * t2),
            _ => None,
        };
        Ok(PointTransformation { x_map, log_t, scale })
    }
}

/// Result of [`transform_ode`].
#[derive(Clone, Debug, PartialEq)]
pub struct Transformed {
    pub ode: LinearODE,
    /// Coefficient of `ybar^(n)` before the monic normalization: `T / g'^n`
    /// when `T` is known, otherwise `1 / g'^n`.
    pub leading: JetExpr,
}

fn check_budget(exprs: &[JetExpr], budget: Option<usize>) -> Result<(), TransformError> {
    if let Some(limit) = budget {
        let size: usize = exprs.iter().map(JetExpr::size).sum();
        if size > limit {
            return Err(TransformError::BudgetExceeded { size, limit });
        }
    }
    Ok(())
}

/// Rewrites `ode` in the new variables. `y^(k) = T sum_i L_k[i] ybar^(i)`
/// with `L_{k+1}[i] = (tau L_k[i] + D L_k[i] + L_k[i-1]) / g'`.
pub fn transform_ode(ode: &LinearODE, t: &PointTransformation, budget: Option<usize>) -> Result<Transformed, TransformError> {
    let n = ode.n;
    let gp = t.x_map.total_derivative(1)?;
    if gp.is_zero() {
        return Err(TransformError::DegenerateMap("g' vanishes identically".into()));
    }
    let at_g: BTreeMap<JetVar, JetExpr> = [(JetVar::x(), t.x_map.clone())].into();
    let argument = ode.argument.substitute(&at_g)?;
    let psi_prime = argument.total_derivative(1)?;
    let inv_gp = gp.recip()?;

    let mut rows: Vec<Vec<JetExpr>> = vec![vec![JetExpr::one()]];
    for k in 0..n {
        let prev = &rows[k];
        let mut next = Vec::with_capacity(k + 2);
        for i in 0..=k + 1 {
            let mut parts = Vec::with_capacity(3);
            if i <= k {
                parts.push(&t.log_t * &prev[i]);
                parts.push(twisted_derivative(&prev[i], &psi_prime)?);
            }
            if i >= 1 {
                parts.push(prev[i - 1].clone());
            }
            next.push(&JetExpr::sum(parts.iter())? * &inv_gp);
        }
        check_budget(&next, budget)?;
        rows.push(next);
    }

    let composed: Vec<JetExpr> = ode.coeffs.iter().map(|a| a.substitute(&at_g)).collect::<Result<_, _>>()?;
    check_budget(&composed, budget)?;
    let lead = rows[n][n].clone();
    let mut coeffs = Vec::with_capacity(n);
    for (i, top) in rows[n].iter().enumerate().take(n) {
        let mut parts = vec![top.clone()];
        for (j, c) in composed.iter().enumerate() {
            if i <= j && !c.is_zero() {
                parts.push(c * &rows[j][i]);
            }
        }
        let e = JetExpr::sum(parts.iter())?.checked_div(&lead)?;
        check_budget(std::slice::from_ref(&e), budget)?;
        coeffs.push(e);
    }
    let leading = match &t.scale {
        Some(s) => s * &lead,
        None => lead,
    };
    let mut out = LinearODE { n, form: ode.form, coeffs, argument };
    if !out.satisfies_form() {
        out.form = Form::General;
    }
    Ok(Transformed { ode: out, leading })
}

/// New coefficients `B_j` of a transformed equation as functions of the
/// old coefficient jets, together with the argument the jets are taken at.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMap {
    pub targets: Vec<JetExpr>,
    pub argument: JetExpr,
}

impl CoefficientMap {
    pub fn identity(n: usize) -> Self {
        CoefficientMap { targets: (0..n).map(|j| JetExpr::coeff(j, 0)).collect(), argument: JetExpr::x() }
    }

    pub fn of(ode: &LinearODE) -> Self {
        CoefficientMap { targets: ode.coeffs.clone(), argument: ode.argument.clone() }
    }
}

/// Reduces a standard-form equation to normal form with `g = x`,
/// `tau = -a_{n-1}/n`.
pub fn reduce_to_normal(ode: &LinearODE, budget: Option<usize>) -> Result<(LinearODE, CoefficientMap), TransformError> {
    if ode.form != Form::Standard {
        return Err(TransformError::UnsupportedForm(ode.form));
    }
    let tau = ode.coeff(ode.n - 1).scale(&BigRational::new((-1).into(), (ode.n as i64).into()));
    let t = PointTransformation::new(JetExpr::x(), tau);
    let mut out = transform_ode(ode, &t, budget)?.ode;
    debug_assert!(out.coeffs[ode.n - 1].is_zero());
    out.form = Form::Normal;
    let cmap = CoefficientMap::of(&out);
    Ok((out, cmap))
}

/// The w-form structure group `x = (xbar - C(1 + A xbar)) / (B(1 + A xbar))`,
/// `y = ybar / (D (1 + A xbar)^(n-1))`.
pub fn w_group_transformation(n: usize, params: &[JetExpr; 4]) -> Result<PointTransformation, TransformError> {
    let [a, b, c, d] = params;
    for (name, v) in [("B", b), ("D", d)] {
        if v.is_zero() {
            return Err(TransformError::DegenerateMap(format!("group parameter {name} must be non-zero")));
        }
    }
    let x = JetExpr::x();
    let one_ax = JetExpr::one().checked_add(&(a * &x))?;
    let x_map = (x.checked_sub(&(c * &one_ax))?).checked_div(&(b * &one_ax))?;
    let scale = (d * &one_ax.pow(n as i64 - 1)?).recip()?;
    Ok(PointTransformation::with_scale(x_map, scale)?)
}

/// Applies the w-form structure group with parameters `(A, B, C, D)`.
pub fn apply_w_group(ode: &LinearODE, params: &[JetExpr; 4], budget: Option<usize>) -> Result<Transformed, TransformError> {
    if ode.form != Form::W {
        return Err(TransformError::UnsupportedForm(ode.form));
    }
    let t = w_group_transformation(ode.n, params)?;
    transform_ode(ode, &t, budget)
}

/// Replaces every `a_j^(k)` in `inv` by the `k`-th derivative of `B_j`.
pub fn pullback_invariant(inv: &JetExpr, cmap: &CoefficientMap) -> Result<JetExpr, JetError> {
    let psi_prime = cmap.argument.total_derivative(1)?;
    let mut binding = BTreeMap::new();
    let mut derivs: BTreeMap<usize, Vec<JetExpr>> = BTreeMap::new();
    for v in inv.vars() {
        let Some(j) = v.coeff_index() else { continue };
        let Some(target) = cmap.targets.get(j) else { continue };
        let chain = derivs.entry(j).or_insert_with(|| vec![target.clone()]);
        while chain.len() <= v.order() as usize {
            let next = twisted_derivative(chain.last().expect("non-empty"), &psi_prime)?;
            chain.push(next);
        }
        binding.insert(v, chain[v.order() as usize].clone());
    }
    inv.substitute(&binding)
}

/// `{g, x} = (g' g''' - (3/2) g''^2) / g'^2`.
pub fn schwarzian(g: &JetExpr) -> Result<JetExpr, TransformError> {
    let g1 = g.total_derivative(1)?;
    if g1.is_zero() {
        return Err(TransformError::DegenerateMap("g' vanishes identically".into()));
    }
    let g2 = g1.total_derivative(1)?;
    let g3 = g2.total_derivative(1)?;
    let num = (&g1 * &g3).checked_sub(&(&g2 * &g2).scale(&BigRational::new(3.into(), 2.into())))?;
    Ok(num.checked_div(&(&g1 * &g1))?)
}

/// Outcome of the semi-invariant test for order reduction.
#[derive(Clone, Debug, PartialEq)]
pub enum Brioschi {
    /// Third order: `y = ybar^2` turns the equation into `equation`.
    Reduced { equation: LinearODE, substitution: String },
    /// Fourth order: the semi-invariant vanishes, reduction is possible.
    Reducible { mu: JetExpr },
    /// The semi-invariant does not vanish.
    NotApplicable { mu: JetExpr },
}

/// The semi-invariant whose vanishing allows the order reduction.
pub fn brioschi_mu(ode: &LinearODE) -> Result<JetExpr, TransformError> {
    if ode.form != Form::Normal {
        return Err(TransformError::UnsupportedForm(ode.form));
    }
    match ode.n {
        3 => Ok(ode.derive(ode.coeff(1))?.checked_sub(&ode.coeff(0).scale(&BigRational::from_integer(2.into())))?),
        4 => Ok(ode.coeff(1).checked_sub(&ode.derive(ode.coeff(2))?)?),
        n => Err(TransformError::UnsupportedOrder(n)),
    }
}

pub fn brioschi_reduce(ode: &LinearODE) -> Result<Brioschi, TransformError> {
    let mu = brioschi_mu(ode)?;
    if !mu.is_zero() {
        return Ok(Brioschi::NotApplicable { mu });
    }
    if ode.n == 4 {
        return Ok(Brioschi::Reducible { mu });
    }
    let quarter = BigRational::new(1.into(), 4.into());
    let equation = LinearODE {
        n: 2,
        form: Form::General,
        coeffs: vec![ode.coeff(1).scale(&quarter), JetExpr::zero()],
        argument: ode.argument.clone(),
    };
    Ok(Brioschi::Reduced { equation, substitution: "y = ybar^2".into() })
}

/// Puts `y = u^2` into the third-order equation and eliminates `u''` and its
/// derivatives with the second-order equation `u'' = -c0 u - c1 u'`. The
/// result vanishes exactly when the reduction is valid.
pub fn brioschi_residual(ode: &LinearODE, reduced: &LinearODE) -> Result<JetExpr, JetError> {
    let u = JetExpr::y(0);
    let mut ys = vec![&u * &u];
    for _ in 0..ode.n {
        let next = ode.derive(ys.last().expect("non-empty"))?;
        ys.push(next);
    }
    let mut eq = ys[ode.n].clone();
    for (a, y) in ode.coeffs.iter().zip(&ys) {
        eq = eq.checked_add(&(a * y))?;
    }
    // u^(k) for k >= 2 by repeated differentiation of the reduced equation
    let top = ode.n as u32;
    let mut u_jets: BTreeMap<JetVar, JetExpr> = BTreeMap::new();
    let mut second = reduced.solved_leading();
    for k in 2..=top {
        let sub = second.substitute(&u_jets)?;
        u_jets.insert(JetVar::y(k), sub.clone());
        second = reduced.derive(&sub)?;
    }
    eq.substitute(&u_jets)
}

/// A parameterized family of point transformations.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFamily {
    pub form: Form,
    /// Parameter symbols with their values at the identity.
    pub params: Vec<(JetVar, JetExpr)>,
    pub x_map: JetExpr,
    pub log_t: JetExpr,
    pub closed_t: Option<JetExpr>,
}

impl GroupFamily {
    /// The w-form structure group of order `n`.
    pub fn w_group(n: usize) -> Self {
        let p = |s: &str| JetVar::param(s).expect("known parameter");
        let sym = [JetExpr::param("A"), JetExpr::param("B"), JetExpr::param("C"), JetExpr::param("D")];
        let t = w_group_transformation(n, &sym).expect("symbolic parameters are non-zero");
        GroupFamily {
            form: Form::W,
            params: vec![
                (p("A"), JetExpr::zero()),
                (p("B"), JetExpr::one()),
                (p("C"), JetExpr::zero()),
                (p("D"), JetExpr::one()),
            ],
            x_map: t.x_map,
            log_t: t.log_t,
            closed_t: t.scale,
        }
    }

    fn identity_binding(&self) -> BTreeMap<JetVar, JetExpr> {
        self.params.iter().cloned().collect()
    }

    /// Whether the family reduces to `x = xbar`, `tau = 0` at the identity.
    pub fn identity_holds(&self) -> Result<bool, JetError> {
        let id = self.identity_binding();
        Ok(self.x_map.substitute(&id)?.equals(&JetExpr::x()) && self.log_t.substitute(&id)?.is_zero())
    }
}

/// Differentiates the family in each parameter at the identity, giving one
/// field `xi d/dx + eta d/dy` per parameter.
pub fn group_to_algebra(family: &GroupFamily) -> Result<Vec<VectorField>, TransformError> {
    let mut out = Vec::with_capacity(family.params.len());
    for (param, _) in &family.params {
        let binding: BTreeMap<JetVar, EpsExpr> = family
            .params
            .iter()
            .map(|(q, at)| {
                let first = if q == param { JetExpr::one() } else { JetExpr::zero() };
                (*q, EpsExpr::new(at.clone(), first))
            })
            .collect();
        let xi = EpsExpr::evaluate(&family.x_map, &binding)?.first;
        let closed = family.closed_t.as_ref().ok_or_else(|| TransformError::MissingScale(param.to_string()))?;
        let t = EpsExpr::evaluate(closed, &binding)?;
        let eta = &JetExpr::y(0) * &t.first.checked_div(&t.zeroth)?;
        out.push(VectorField::from_components([(JetVar::x(), xi), (JetVar::y(0), eta)]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> JetExpr {
        parse(s).unwrap()
    }

    #[test]
    fn identity_transformation_is_a_no_op() {
        let ode = LinearODE::generic(Form::Standard, 3);
        let out = transform_ode(&ode, &PointTransformation::identity(), None).unwrap();
        assert_eq!(out.ode.coeffs, ode.coeffs);
        assert!(out.leading.is_one());
    }

    #[test]
    fn third_order_normal_reduction() {
        let (nf, cmap) = reduce_to_normal(&LinearODE::generic(Form::Standard, 3), None).unwrap();
        assert!(nf.coeffs[2].is_zero());
        assert_eq!(cmap.targets[0], p("(27*a0 - 9*a1*a2 + 2*a2^3 - 9*a2'')/27"));
        assert_eq!(cmap.targets[1], p("(27*a1 - 9*a2^2 - 27*a2')/27"));
    }

    #[test]
    fn normal_reduction_without_a2_is_identity() {
        let ode = LinearODE::new(3, Form::Standard, vec![p("a0"), p("a1"), JetExpr::zero()]);
        let (nf, _) = reduce_to_normal(&ode, None).unwrap();
        assert_eq!(nf.coeffs, ode.coeffs);
    }

    #[test]
    fn schwarzian_examples() {
        assert!(schwarzian(&p("x")).unwrap().is_zero());
        assert!(schwarzian(&p("(2*x + 1)/(x + 3)")).unwrap().is_zero());
        assert_eq!(schwarzian(&p("x^2")).unwrap(), p("-3/(2*x^2)"));
        assert!(matches!(schwarzian(&p("5")), Err(TransformError::DegenerateMap(_))));
    }

    #[test]
    fn w_group_rejects_singular_parameters() {
        let ode = LinearODE::generic(Form::W, 3);
        let params = [p("0"), p("0"), p("0"), p("1")];
        assert!(matches!(apply_w_group(&ode, &params, None), Err(TransformError::DegenerateMap(_))));
        let id = [p("0"), p("1"), p("0"), p("1")];
        assert_eq!(apply_w_group(&ode, &id, None).unwrap().ode.coeffs, ode.coeffs);
    }

    #[test]
    fn budget_is_enforced() {
        let ode = LinearODE::generic(Form::W, 5);
        let params = [p("A"), p("B"), p("C"), p("D")];
        let err = apply_w_group(&ode, &params, Some(10)).unwrap_err();
        assert!(matches!(err, TransformError::BudgetExceeded { limit: 10, .. }));
    }

    #[test]
    fn brioschi_cases() {
        let ode = LinearODE::new(3, Form::Normal, vec![p("a1'/2"), p("a1"), JetExpr::zero()]);
        let Brioschi::Reduced { equation, .. } = brioschi_reduce(&ode).unwrap() else { panic!("expected reduction") };
        assert_eq!(equation.coeffs[0], p("a1/4"));
        assert!(brioschi_residual(&ode, &equation).unwrap().is_zero());
        let other = LinearODE::new(3, Form::Normal, vec![JetExpr::zero(), p("x"), JetExpr::zero()]);
        assert_eq!(brioschi_reduce(&other).unwrap(), Brioschi::NotApplicable { mu: p("1") });
        let std = LinearODE::generic(Form::Standard, 3);
        assert!(matches!(brioschi_reduce(&std), Err(TransformError::UnsupportedForm(_))));
    }

    #[test]
    fn w_family_algebra_directions() {
        let fam = GroupFamily::w_group(3);
        assert!(fam.identity_holds().unwrap());
        let fields = group_to_algebra(&fam).unwrap();
        // C gives -d/dx, D gives -y d/dy
        assert_eq!(fields[2].component(JetVar::x()), p("-1"));
        assert!(fields[2].component(JetVar::y(0)).is_zero());
        assert_eq!(fields[3].component(JetVar::y(0)), p("-y"));
        assert_eq!(fields[0].component(JetVar::y(0)), p("-2*x*y"));
    }
}
