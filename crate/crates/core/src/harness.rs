//! Exact invariance trials: invariants are evaluated on concrete polynomial
//! coefficients before and after a concrete w-group element.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalogue::{Catalogue, InvariantRecord, Status};
use crate::jet::{JetError, JetExpr, JetVar};
use crate::ode::{Form, LinearODE};
use crate::parse::print;
use crate::transforms::{apply_w_group, pullback_invariant, CoefficientMap, TransformError};

/// Resampling attempts before a sample is declared degenerate.
pub const SAMPLE_ATTEMPTS: usize = 16;
/// Evaluation points tried per trial before it is reported undefined.
pub const POINT_ATTEMPTS: usize = 8;
/// Trials a single-exponent mutation gets to show a failure.
pub const MUTATION_TRIALS: usize = 5;
/// Degree of the coefficient polynomials used by [`run_suite`].
pub const SUITE_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("no non-degenerate sample after {attempts} attempts")]
    DegenerateSample { attempts: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Polynomial coefficients `a_j(x)`; `None` where the form forces zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSample {
    pub form: Form,
    pub n: usize,
    pub degree: usize,
    pub seed: u64,
    /// Ascending coefficient lists, one per `a_j`.
    pub coeffs: Vec<Option<Vec<BigRational>>>,
}

impl CoefficientSample {
    pub fn poly(&self, j: usize) -> JetExpr {
        let Some(cs) = &self.coeffs[j] else { return JetExpr::zero() };
        let terms: Vec<JetExpr> = cs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| JetExpr::x().pow(k as i64).expect("integer power").scale(c))
            .collect();
        JetExpr::sum(terms.iter()).expect("polynomial")
    }

    pub fn ode(&self) -> LinearODE {
        LinearODE::new(self.n, self.form, (0..self.n).map(|j| self.poly(j)).collect())
    }
}

impl fmt::Display for CoefficientSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ode())
    }
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-num..=num)), BigInt::from(rng.gen_range(1..=den)))
}

fn nonzero_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    loop {
        let r = small_rational(rng, num, den);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Denominator factors of every catalogued invariant of `(form, n)`.
pub fn catalogue_denominators(cat: &Catalogue, form: Form, n: usize) -> Vec<JetExpr> {
    let mut out: Vec<JetExpr> = Vec::new();
    for r in cat.invariants.iter().filter(|r| r.form == form && r.n == n) {
        for (d, _) in r.rationalized.denominator_factors() {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

/// Draws polynomial coefficients of degree `degree` for the free indices of
/// `form`, resampling until none of `denominators` vanishes identically.
pub fn sample_coefficients(
    form: Form,
    n: usize,
    degree: usize,
    seed: u64,
    denominators: &[JetExpr],
) -> Result<CoefficientSample, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free = form.free_count(n);
    for _ in 0..SAMPLE_ATTEMPTS {
        let coeffs = (0..n).map(|j| (j < free).then(|| (0..=degree).map(|_| small_rational(&mut rng, 9, 4)).collect())).collect();
        let sample = CoefficientSample { form, n, degree, seed, coeffs };
        let cmap = CoefficientMap::of(&sample.ode());
        let mut ok = true;
        for d in denominators {
            if pullback_invariant(d, &cmap)?.is_zero() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(sample);
        }
    }
    Err(HarnessError::DegenerateSample { attempts: SAMPLE_ATTEMPTS })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialVerdict {
    Pass,
    Fail,
    Undefined,
}

impl fmt::Display for TrialVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialVerdict::Pass => "pass",
            TrialVerdict::Fail => "fail",
            TrialVerdict::Undefined => "undefined",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub invariant: String,
    pub seed: u64,
    pub params: [String; 4],
    pub xbar0: String,
    pub before: Option<String>,
    pub after: Option<String>,
    pub verdict: TrialVerdict,
}

impl fmt::Display for TrialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &Option<String>| v.clone().unwrap_or_else(|| "undefined".into());
        write!(
            f,
            "trial id={} seed={} params={} xbar0={} before={} after={} verdict={}",
            self.invariant,
            self.seed,
            self.params.join(","),
            self.xbar0,
            show(&self.before),
            show(&self.after),
            self.verdict
        )
    }
}

/// Values of the coefficient jets `inv` needs, for coefficients given as
/// functions of `x` (no coefficient jets inside), at `x = point`.
fn jet_values(inv: &JetExpr, targets: &[JetExpr], point: &BigRational) -> Result<BTreeMap<JetVar, BigRational>, JetError> {
    let mut chains: BTreeMap<usize, Vec<JetExpr>> = BTreeMap::new();
    let mut values = BTreeMap::new();
    let at = |e: &JetExpr| e.eval_exact(|v| (v == JetVar::x()).then(|| point.clone()));
    for v in inv.vars() {
        let Some(j) = v.coeff_index() else { continue };
        let chain = chains.entry(j).or_insert_with(|| vec![targets.get(j).cloned().unwrap_or_else(JetExpr::zero)]);
        while chain.len() <= v.order() as usize {
            let next = chain.last().expect("non-empty").total_derivative(1)?;
            chain.push(next);
        }
        values.insert(v, at(&chain[v.order() as usize])?);
    }
    Ok(values)
}

fn evaluate_on(inv: &JetExpr, targets: &[JetExpr], point: &BigRational) -> Result<Option<BigRational>, JetError> {
    let values = match jet_values(inv, targets, point) {
        Ok(v) => v,
        Err(JetError::EvalDivisionByZero) => return Ok(None),
        Err(e) => return Err(e),
    };
    match inv.eval_map(&values) {
        Ok(v) => Ok(Some(v)),
        Err(JetError::EvalDivisionByZero) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The w-group element with rational parameters, applied to a sample.
pub struct Prepared {
    pub params: [BigRational; 4],
    original: Vec<JetExpr>,
    transformed: Vec<JetExpr>,
    x_map: JetExpr,
}

impl Prepared {
    pub fn new(sample: &CoefficientSample, params: &[BigRational; 4]) -> Result<Self, HarnessError> {
        if sample.form != Form::W {
            return Err(HarnessError::Precondition(format!("trials need a w-form sample, got {}", sample.form)));
        }
        let ode = sample.ode();
        let symbolic: [JetExpr; 4] = params.clone().map(JetExpr::constant);
        let t = crate::transforms::w_group_transformation(sample.n, &symbolic)?;
        let out = apply_w_group(&ode, &symbolic, None)?;
        // the sample is already a function of x, so the new coefficients are too
        let transformed = out.ode.coeffs;
        Ok(Prepared { params: params.clone(), original: ode.coeffs, transformed, x_map: t.x_map })
    }

    /// Compares `inv` before and after the transformation at `xbar0`.
    pub fn trial(&self, id: &str, inv: &JetExpr, seed: u64, xbar0: &BigRational) -> Result<TrialReport, HarnessError> {
        let one_ax = BigRational::one() + &self.params[0] * xbar0;
        if one_ax.is_zero() {
            return Err(HarnessError::Precondition("1 + A*xbar0 must be non-zero".into()));
        }
        let x0 = self.x_map.eval_exact(|v| (v == JetVar::x()).then(|| xbar0.clone()))?;
        let before = evaluate_on(inv, &self.original, &x0)?;
        let after = evaluate_on(inv, &self.transformed, xbar0)?;
        let verdict = match (&before, &after) {
            (Some(b), Some(a)) if a == b => TrialVerdict::Pass,
            (Some(_), Some(_)) => TrialVerdict::Fail,
            _ => TrialVerdict::Undefined,
        };
        Ok(TrialReport {
            invariant: id.to_string(),
            seed,
            params: self.params.clone().map(|p| p.to_string()),
            xbar0: xbar0.to_string(),
            before: before.map(|v| v.to_string()),
            after: after.map(|v| v.to_string()),
            verdict,
        })
    }
}

/// One invariance trial of a w-form invariant (its rationalized form) under
/// the group element `(A, B, C, D)` at `xbar0`.
pub fn invariance_trial(
    inv: &InvariantRecord,
    sample: &CoefficientSample,
    params: &[BigRational; 4],
    xbar0: &BigRational,
) -> Result<TrialReport, HarnessError> {
    if inv.form != Form::W {
        return Err(HarnessError::Precondition(format!("{} is not a w-form invariant", inv.id())));
    }
    if params[1].is_zero() || params[3].is_zero() {
        return Err(HarnessError::Precondition("group parameters B and D must be non-zero".into()));
    }
    Prepared::new(sample, params)?.trial(&inv.id(), &inv.rationalized, sample.seed, xbar0)
}

/// Deterministic sub-seed of trial `t`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    let mut z = seed.wrapping_add((t as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn draw_params(rng: &mut ChaCha8Rng) -> [BigRational; 4] {
    [small_rational(rng, 3, 4), nonzero_rational(rng, 5, 3), small_rational(rng, 5, 3), nonzero_rational(rng, 5, 3)]
}

/// Runs one trial per invariant with fresh sample and parameters drawn from
/// `sub_seed`, retrying the evaluation point when a side is undefined.
fn trial_batch(
    invs: &[(String, JetExpr)],
    n: usize,
    denominators: &[JetExpr],
    sub_seed: u64,
) -> Result<Vec<TrialReport>, HarnessError> {
    let sample = sample_coefficients(Form::W, n, SUITE_DEGREE, sub_seed, denominators)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed ^ 0x5a5a_5a5a);
    let params = draw_params(&mut rng);
    let prepared = Prepared::new(&sample, &params)?;
    let mut out = Vec::with_capacity(invs.len());
    for (id, inv) in invs {
        let mut last = None;
        for _ in 0..POINT_ATTEMPTS {
            let xbar0 = small_rational(&mut rng, 7, 3);
            if (BigRational::one() + &params[0] * &xbar0).is_zero() {
                continue;
            }
            let report = prepared.trial(id, inv, sub_seed, &xbar0)?;
            let done = report.verdict != TrialVerdict::Undefined;
            last = Some(report);
            if done {
                break;
            }
        }
        out.push(last.expect("at least one admissible point"));
    }
    Ok(out)
}

/// Result of perturbing one exponent of an invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutationReport {
    pub invariant: String,
    pub mutated: String,
    pub caught: bool,
    pub trials_used: usize,
}

/// Shifts the exponent of the invariant's dominant denominator factor by
/// one (or its largest numerator factor when there is no denominator).
pub fn mutate_exponent(inv: &JetExpr) -> JetExpr {
    let target = inv
        .factors()
        .filter(|(_, e)| *e < num_rational::Ratio::from_integer(0))
        .min_by_key(|(_, e)| *e)
        .or_else(|| inv.factors().max_by_key(|(_, e)| *e))
        .map(|(p, _)| p.clone());
    match target {
        Some(p) => inv.with_factor_exponent_shifted(&p, 1),
        None => inv.checked_add(&JetExpr::coeff(0, 0)).expect("polynomial sum"),
    }
}

/// Runs up to [`MUTATION_TRIALS`] trials on the mutated invariant and
/// reports whether any of them fails.
pub fn mutation_check(
    id: &str,
    inv: &JetExpr,
    n: usize,
    denominators: &[JetExpr],
    seed: u64,
) -> Result<MutationReport, HarnessError> {
    let mutated = mutate_exponent(inv);
    let mut dens = denominators.to_vec();
    for (d, _) in mutated.denominator_factors() {
        if !dens.contains(&d) {
            dens.push(d);
        }
    }
    let pair = vec![(format!("{id}/mutated"), mutated.clone())];
    for t in 0..MUTATION_TRIALS {
        let reports = trial_batch(&pair, n, &dens, trial_seed(seed ^ 0xdead_beef, t))?;
        if reports.iter().any(|r| r.verdict == TrialVerdict::Fail) {
            return Ok(MutationReport { invariant: id.into(), mutated: print(&mutated), caught: true, trials_used: t + 1 });
        }
    }
    Ok(MutationReport { invariant: id.into(), mutated: print(&mutated), caught: false, trials_used: MUTATION_TRIALS })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Skipped {
    pub invariant: String,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub form: Form,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub invariants: Vec<String>,
    pub skipped: Vec<Skipped>,
    pub reports: Vec<TrialReport>,
    pub mutations: Vec<MutationReport>,
    pub pass: usize,
    pub fail: usize,
    pub undefined: usize,
}

impl SuiteReport {
    /// Every defined trial passed and every mutation was caught.
    pub fn all_pass(&self) -> bool {
        self.fail == 0 && self.pass > 0 && self.mutations.iter().all(|m| m.caught)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        for m in &self.mutations {
            writeln!(f, "mutation id={} caught={} trials={} expr=\"{}\"", m.invariant, m.caught, m.trials_used, m.mutated)?;
        }
        for s in &self.skipped {
            writeln!(f, "skipped id={} status={}", s.invariant, s.status)?;
        }
        write!(
            f,
            "suite form={} n={} seed={}: {} invariants x {} trials, {} pass, {} fail, {} undefined; mutations caught {}/{}",
            self.form,
            self.n,
            self.seed,
            self.invariants.len(),
            self.trials,
            self.pass,
            self.fail,
            self.undefined,
            self.mutations.iter().filter(|m| m.caught).count(),
            self.mutations.len()
        )
    }
}

/// Invariance trials over every verified catalogued invariant of the given
/// w-form order. Records that fail their symbolic check are listed in
/// `skipped` instead.
pub fn run_suite(cat: &Catalogue, form: Form, n: usize, trials: usize, seed: u64) -> Result<SuiteReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Precondition("trials must be at least 1".into()));
    }
    if form != Form::W {
        return Err(HarnessError::Precondition(format!("suites run on w-form invariants, got {form}")));
    }
    let records: Vec<&InvariantRecord> =
        cat.invariants.iter().filter(|r| r.form == form && r.n == n && r.equals.is_none()).collect();
    let statuses: Vec<Status> = records
        .par_iter()
        .map(|r| if r.status == Status::Unchecked { cat.invariant_status(r) } else { r.status.clone() })
        .collect();
    let mut tested = Vec::new();
    let mut skipped = Vec::new();
    for (r, s) in records.iter().zip(statuses) {
        if s.is_verified() {
            tested.push((r.id(), r.rationalized.clone()));
        } else {
            skipped.push(Skipped { invariant: r.id(), status: s.to_string() });
        }
    }
    let denominators = catalogue_denominators(cat, form, n);
    let batches: Vec<Vec<TrialReport>> = (0..trials)
        .into_par_iter()
        .map(|t| trial_batch(&tested, n, &denominators, trial_seed(seed, t)))
        .collect::<Result<_, _>>()?;
    let reports: Vec<TrialReport> = batches.into_iter().flatten().collect();
    let mutations: Vec<MutationReport> = tested
        .par_iter()
        .enumerate()
        .map(|(i, (id, inv))| mutation_check(id, inv, n, &denominators, trial_seed(seed, trials + i)))
        .collect::<Result<_, _>>()?;
    let count = |v| reports.iter().filter(|r| r.verdict == v).count();
    Ok(SuiteReport {
        form,
        n,
        trials,
        seed,
        invariants: tested.into_iter().map(|(id, _)| id).collect(),
        skipped,
        pass: count(TrialVerdict::Pass),
        fail: count(TrialVerdict::Fail),
        undefined: count(TrialVerdict::Undefined),
        reports,
        mutations,
    })
}
