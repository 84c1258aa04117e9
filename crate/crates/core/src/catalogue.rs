//! Store of the known generators, invariants, semi-invariants, algebras and
//! group families, with their verification status.
//!
//! The shipped data lives in `data/catalogue.txt`; the format is described
//! at the top of that file.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hasher;

use fnv::FnvHasher;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jet::{JetError, JetExpr, JetVar};
use crate::liegen::{
    self, lie_apply, prolong, span_rank, split_by_parameters, verify_annihilates, verify_symmetry, VectorField, Verdict,
};
use crate::ode::{Form, LinearODE};
use crate::parse::{self, parse_bindings, parse_with, Bindings, ParseError};
use crate::transforms::{group_to_algebra, transform_ode, GroupFamily, PointTransformation, TransformError};

const BUILTIN: &str = include_str!("../data/catalogue.txt");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogueError {
    #[error("stanza at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("stanza at line {line}, field `{field}`: {source}")]
    Expr { line: usize, field: String, source: ParseError },
    #[error("nothing catalogued for form {form}, order {n}")]
    NotInCatalogue { form: Form, n: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Lie(#[from] liegen::LieError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Position of an invariant in the listing: prolongation order and index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Label {
    pub p: u32,
    pub index: u32,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.p, self.index)
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, i) = s.trim().split_once('.').ok_or_else(|| format!("expected p.index, found `{s}`"))?;
        Ok(Label {
            p: p.parse().map_err(|_| format!("bad order in `{s}`"))?,
            index: i.parse().map_err(|_| format!("bad index in `{s}`"))?,
        })
    }
}

/// Whether a record transcribes the source or corrects it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    Derived,
    /// Full symmetry generator including the `y` components.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Unchecked,
    Verified,
    FailsAsPrinted { fingerprint: String },
    Equals { other: String },
    UnverifiedAsPrinted,
}

impl Status {
    pub fn is_verified(&self) -> bool {
        matches!(self, Status::Verified | Status::Equals { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Status::Unchecked => "unchecked",
            Status::Verified => "verified",
            Status::FailsAsPrinted { .. } => "fails-as-printed",
            Status::Equals { .. } => "equals",
            Status::UnverifiedAsPrinted => "unverified-as-printed",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::FailsAsPrinted { fingerprint } => write!(f, "fails-as-printed ({fingerprint})"),
            Status::Equals { other } => write!(f, "equals {other}"),
            s => f.write_str(s.tag()),
        }
    }
}

/// FNV-1a fingerprint of an expression's printed form.
pub fn fingerprint(e: &JetExpr) -> String {
    let mut h = FnvHasher::default();
    h.write(parse::print(e).as_bytes());
    format!("{:016x}", h.finish())
}

#[derive(Clone, Debug)]
pub struct GeneratorRecord {
    pub form: Form,
    pub n: usize,
    pub variant: Variant,
    pub field: VectorField,
    /// Components kept as source text because they do not parse.
    pub unparsed: BTreeMap<String, String>,
    pub note: Option<String>,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct InvariantRecord {
    pub form: Form,
    pub n: usize,
    pub label: Label,
    pub aliases: Vec<Label>,
    pub variant: Variant,
    pub equals: Option<Label>,
    pub bindings_text: Option<String>,
    pub source: String,
    pub expr: JetExpr,
    /// Least integer power of `expr` without fractional exponents.
    pub rationalized: JetExpr,
    pub note: Option<String>,
    pub status: Status,
}

impl InvariantRecord {
    /// Lowest prolongation order the invariant is listed under.
    pub fn min_p(&self) -> u32 {
        self.aliases.iter().map(|l| l.p).chain([self.label.p]).min().expect("non-empty")
    }

    pub fn id(&self) -> String {
        let suffix = if self.variant == Variant::Derived { "/derived" } else { "" };
        format!("psi[{};{};{}]{suffix}", self.form, self.n, self.label)
    }
}

#[derive(Clone, Debug)]
pub struct SemiInvariantRecord {
    pub form: Form,
    pub n: usize,
    pub expr: JetExpr,
    pub consequence: String,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct AlgebraRecord {
    pub form: Form,
    pub n: usize,
    pub field: VectorField,
    pub status: Status,
}

/// Group family stored as text; `{n}`-style placeholders are filled per
/// order.
#[derive(Clone, Debug)]
pub struct GroupRecord {
    pub form: Form,
    pub params: Vec<(String, String)>,
    pub x_map: String,
    pub log_t: String,
    pub closed_t: Option<String>,
    pub note: Option<String>,
    pub status: Status,
}

fn fill_order(template: &str, n: usize) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = start + rest[start..].find('}').expect("closed placeholder");
        let inner = rest[start + 1..end].replace(' ', "");
        let value = match inner.strip_prefix('n') {
            Some("") => n as i64,
            Some(off) => n as i64 + off.parse::<i64>().expect("integer offset"),
            None => panic!("unknown placeholder {inner}"),
        };
        out.push_str(&value.to_string());
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    out
}

impl GroupRecord {
    /// The family for equations of order `n`.
    pub fn instantiate(&self, n: usize) -> Result<GroupFamily, ParseError> {
        let p = |t: &str| parse::parse(&fill_order(t, n));
        let mut params = Vec::new();
        for (name, at) in &self.params {
            let v = parse::resolve(name).filter(JetVar::is_param).ok_or_else(|| ParseError::UnknownSymbol {
                name: name.clone(),
                line: 1,
                col: 1,
            })?;
            params.push((v, p(at)?));
        }
        Ok(GroupFamily {
            form: self.form,
            params,
            x_map: p(&self.x_map)?,
            log_t: p(&self.log_t)?,
            closed_t: self.closed_t.as_deref().map(p).transpose()?,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Catalogue {
    pub generators: Vec<GeneratorRecord>,
    pub invariants: Vec<InvariantRecord>,
    pub semi_invariants: Vec<SemiInvariantRecord>,
    pub algebras: Vec<AlgebraRecord>,
    pub groups: Vec<GroupRecord>,
}

/// One `key=value` stanza with the line it starts on.
struct Stanza {
    line: usize,
    fields: Vec<(String, String)>,
}

impl Stanza {
    fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn err(&self, message: impl Into<String>) -> CatalogueError {
        CatalogueError::Format { line: self.line, message: message.into() }
    }

    fn require(&self, key: &str) -> Result<&str, CatalogueError> {
        self.get(key).ok_or_else(|| self.err(format!("missing `{key}`")))
    }

    fn number(&self, key: &str) -> Result<usize, CatalogueError> {
        self.require(key)?.parse().map_err(|_| self.err(format!("`{key}` must be a non-negative integer")))
    }

    fn form(&self) -> Result<Form, CatalogueError> {
        self.require("form")?.parse().map_err(|e: String| self.err(e))
    }

    fn variant(&self) -> Result<Variant, CatalogueError> {
        match self.get("variant").unwrap_or("printed") {
            "printed" => Ok(Variant::Printed),
            "derived" => Ok(Variant::Derived),
            "full" => Ok(Variant::Full),
            other => Err(self.err(format!("unknown variant `{other}`"))),
        }
    }

    fn bindings(&self) -> Result<Bindings, CatalogueError> {
        match self.get("let") {
            None => Ok(Bindings::new()),
            Some(text) => parse_bindings(text, &Bindings::new()).map_err(|source| CatalogueError::Expr {
                line: self.line,
                field: "let".into(),
                source,
            }),
        }
    }

    fn expr(&self, key: &str, bindings: &Bindings) -> Result<JetExpr, CatalogueError> {
        parse_with(self.require(key)?, bindings).map_err(|source| CatalogueError::Expr {
            line: self.line,
            field: key.into(),
            source,
        })
    }

    fn labels(&self, key: &str) -> Result<Vec<Label>, CatalogueError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(text) => text.split(',').map(|s| s.parse().map_err(|e: String| self.err(e))).collect(),
        }
    }

    /// Components keyed by coordinate names (`x`, `y`, `a0`, ...).
    fn field(&self, bindings: &Bindings) -> Result<(VectorField, BTreeMap<String, String>), CatalogueError> {
        let mut vf = VectorField::new();
        let mut unparsed = BTreeMap::new();
        for (k, v) in &self.fields {
            if let Some(name) = k.strip_prefix("unparsed_") {
                unparsed.insert(name.to_string(), v.clone());
                continue;
            }
            if let Some(var) = parse::resolve(k).filter(|v| !v.is_param() && !v.is_arb_func()) {
                vf.set(var, self.expr(k, bindings)?);
            }
        }
        Ok((vf, unparsed))
    }
}

fn stanzas(text: &str) -> Result<Vec<Stanza>, CatalogueError> {
    let mut out = Vec::new();
    let mut current: Option<Stanza> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            out.extend(current.take());
            continue;
        }
        let stanza = current.get_or_insert_with(|| Stanza { line: i + 1, fields: Vec::new() });
        let mut rest = line;
        loop {
            rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
            if rest.is_empty() {
                break;
            }
            let eq = rest
                .find('=')
                .ok_or(CatalogueError::Format { line: i + 1, message: format!("expected key=value in `{rest}`") })?;
            let key = rest[..eq].trim().to_string();
            rest = &rest[eq + 1..];
            let value;
            if let Some(quoted) = rest.strip_prefix('"') {
                let close =
                    quoted.find('"').ok_or(CatalogueError::Format { line: i + 1, message: "unterminated quote".into() })?;
                value = quoted[..close].to_string();
                rest = &quoted[close + 1..];
            } else {
                let end = rest.find(|c: char| c == ',' || c.is_whitespace()).unwrap_or(rest.len());
                value = rest[..end].to_string();
                rest = &rest[end..];
            }
            stanza.fields.push((key, value));
        }
    }
    out.extend(current);
    Ok(out)
}

fn parse_params(text: &str) -> Vec<(String, String)> {
    text.split(',').filter_map(|kv| kv.split_once('=')).map(|(k, v)| (k.trim().to_string(), v.trim().to_string())).collect()
}

impl Catalogue {
    /// The catalogue shipped with the crate.
    pub fn builtin() -> Self {
        Catalogue::parse(BUILTIN).expect("shipped catalogue parses")
    }

    pub fn parse(text: &str) -> Result<Self, CatalogueError> {
        let mut cat = Catalogue::default();
        for st in stanzas(text)? {
            match st.require("record")? {
                "generator" => {
                    let b = st.bindings()?;
                    let (field, unparsed) = st.field(&b)?;
                    cat.generators.push(GeneratorRecord {
                        form: st.form()?,
                        n: st.number("n")?,
                        variant: st.variant()?,
                        field,
                        unparsed,
                        note: st.get("note").map(String::from),
                        status: Status::Unchecked,
                    });
                }
                "invariant" => {
                    let b = st.bindings()?;
                    let expr = st.expr("expr", &b)?;
                    let rationalized = expr.rationalize();
                    let equals = st.labels("equals")?.into_iter().next();
                    cat.invariants.push(InvariantRecord {
                        form: st.form()?,
                        n: st.number("n")?,
                        label: Label { p: st.number("p")? as u32, index: st.number("index")? as u32 },
                        aliases: st.labels("aliases")?,
                        variant: st.variant()?,
                        equals,
                        bindings_text: st.get("let").map(String::from),
                        source: st.require("expr")?.to_string(),
                        expr,
                        rationalized,
                        note: st.get("note").map(String::from),
                        status: Status::Unchecked,
                    });
                }
                "semi" => {
                    let b = st.bindings()?;
                    cat.semi_invariants.push(SemiInvariantRecord {
                        form: st.form()?,
                        n: st.number("n")?,
                        expr: st.expr("expr", &b)?,
                        consequence: st.require("consequence")?.to_string(),
                        status: Status::Unchecked,
                    });
                }
                "algebra" => {
                    let (field, _) = st.field(&Bindings::new())?;
                    cat.algebras.push(AlgebraRecord { form: st.form()?, n: st.number("n")?, field, status: Status::Unchecked });
                }
                "group" => {
                    let rec = GroupRecord {
                        form: st.form()?,
                        params: st.get("params").map(parse_params).unwrap_or_default(),
                        x_map: st.require("xmap")?.to_string(),
                        log_t: st.require("logT")?.to_string(),
                        closed_t: st.get("T").map(String::from),
                        note: st.get("note").map(String::from),
                        status: Status::Unchecked,
                    };
                    // fail early on malformed templates
                    rec.instantiate(3).map_err(|source| CatalogueError::Expr { line: st.line, field: "group".into(), source })?;
                    cat.groups.push(rec);
                }
                other => return Err(st.err(format!("unknown record kind `{other}`"))),
            }
        }
        Ok(cat)
    }

    fn find_generator(&self, form: Form, n: usize, variant: Variant) -> Option<&GeneratorRecord> {
        self.generators.iter().find(|g| g.form == form && g.n == n && g.variant == variant)
    }

    /// The generator as transcribed.
    pub fn get_generator(&self, form: Form, n: usize) -> Result<&GeneratorRecord, CatalogueError> {
        self.find_generator(form, n, Variant::Printed).ok_or(CatalogueError::NotInCatalogue { form, n })
    }

    /// The generator used for checks: the derived correction when one is
    /// catalogued, the transcription otherwise.
    pub fn working_generator(&self, form: Form, n: usize) -> Result<&VectorField, CatalogueError> {
        self.find_generator(form, n, Variant::Derived)
            .or_else(|| self.find_generator(form, n, Variant::Printed))
            .map(|g| &g.field)
            .ok_or(CatalogueError::NotInCatalogue { form, n })
    }

    /// Printed invariants of the `p`-th prolongation: every record whose
    /// lowest listed order is at most `p`.
    pub fn get_invariants(&self, form: Form, n: usize, p: u32) -> Result<Vec<&InvariantRecord>, CatalogueError> {
        self.get_generator(form, n)?;
        Ok(self
            .invariants
            .iter()
            .filter(|r| r.form == form && r.n == n && r.variant == Variant::Printed && r.equals.is_none() && r.min_p() <= p)
            .collect())
    }

    pub fn invariant(&self, form: Form, n: usize, label: Label, variant: Variant) -> Option<&InvariantRecord> {
        self.invariants
            .iter()
            .find(|r| r.form == form && r.n == n && r.variant == variant && (r.label == label || r.aliases.contains(&label)))
    }

    /// Derived corrections catalogued next to printed records.
    pub fn corrections(&self) -> impl Iterator<Item = &InvariantRecord> {
        self.invariants.iter().filter(|r| r.variant == Variant::Derived)
    }

    pub fn group(&self, form: Form) -> Option<&GroupRecord> {
        self.groups.iter().find(|g| g.form == form)
    }

    /// Recomputes every status and returns the report.
    pub fn run_verification(&mut self) -> VerificationReport {
        let mut entries = Vec::new();

        let gen_status: Vec<Status> = self.generators.par_iter().map(check_generator).collect();
        for (g, s) in self.generators.iter_mut().zip(gen_status) {
            let suffix = match g.variant {
                Variant::Printed => "",
                Variant::Derived => "/derived",
                Variant::Full => "/full",
            };
            entries.push(ReportEntry::new("generator", format!("X[{};{}]{suffix}", g.form, g.n), &s));
            g.status = s;
        }

        let this = &*self;
        let inv_status: Vec<Status> = this.invariants.par_iter().map(|r| this.invariant_status(r)).collect();
        for (r, s) in self.invariants.iter_mut().zip(inv_status) {
            entries.push(ReportEntry::new("invariant", r.id(), &s));
            r.status = s;
        }

        let this = &*self;
        let semi_status: Vec<Status> = this.semi_invariants.iter().map(|r| this.check_semi(r)).collect();
        for (r, s) in self.semi_invariants.iter_mut().zip(semi_status) {
            entries.push(ReportEntry::new("semi", format!("mu[{};{}]", r.form, r.n), &s));
            r.status = s;
        }

        let this = &*self;
        let alg_status: Vec<Status> = this.algebras.iter().map(|r| this.check_algebra(r)).collect();
        for (r, s) in self.algebras.iter_mut().zip(alg_status) {
            entries.push(ReportEntry::new("algebra", format!("V0[{}]", r.n), &s));
            r.status = s;
        }

        let group_status: Vec<Status> = self.groups.par_iter().map(check_group).collect();
        for (g, s) in self.groups.iter_mut().zip(group_status) {
            entries.push(ReportEntry::new("group", format!("G[{}]", g.form), &s));
            g.status = s;
        }
        VerificationReport { entries }
    }

    /// Annihilation (or equality) status of one invariant record.
    pub fn invariant_status(&self, r: &InvariantRecord) -> Status {
        if let Some(target) = r.equals {
            return match self.invariant(r.form, r.n, target, Variant::Printed) {
                Some(t) if t.expr.equals(&r.expr) => Status::Equals { other: format!("{}", t.label) },
                Some(t) => Status::FailsAsPrinted {
                    fingerprint: fingerprint(&t.expr.checked_sub(&r.expr).unwrap_or_else(|_| JetExpr::one())),
                },
                None => Status::FailsAsPrinted { fingerprint: "missing-target".into() },
            };
        }
        let Ok(gen) = self.working_generator(r.form, r.n) else {
            return Status::FailsAsPrinted { fingerprint: "no-generator".into() };
        };
        match verify_annihilates(gen, r.min_p(), &r.rationalized) {
            Ok(Verdict::Holds) => Status::Verified,
            Ok(Verdict::Fails { residual }) => Status::FailsAsPrinted { fingerprint: fingerprint(&residual) },
            Err(e) => Status::FailsAsPrinted { fingerprint: e.to_string() },
        }
    }

    /// A semi-invariant is mapped to a multiple of itself by the first
    /// prolongation, with a weight free of coefficient jets.
    fn check_semi(&self, r: &SemiInvariantRecord) -> Status {
        let Ok(gen) = self.working_generator(r.form, r.n) else {
            return Status::FailsAsPrinted { fingerprint: "no-generator".into() };
        };
        let order = r.expr.max_order(JetVar::is_coeff).unwrap_or(0);
        let result = prolong(gen, order).and_then(|pr| lie_apply(&pr, &r.expr)).and_then(|img| img.checked_div(&r.expr));
        match result {
            Ok(w) if w.vars().iter().all(|v| !v.is_coeff()) => Status::Verified,
            Ok(w) => Status::FailsAsPrinted { fingerprint: fingerprint(&w) },
            Err(e) => Status::FailsAsPrinted { fingerprint: e.to_string() },
        }
    }

    fn check_algebra(&self, r: &AlgebraRecord) -> Status {
        let Some(fam) = self.group(r.form).and_then(|g| g.instantiate(r.n).ok()) else {
            return Status::FailsAsPrinted { fingerprint: "no-group".into() };
        };
        match algebra_matches_group(&r.field, &fam) {
            Ok(true) => Status::Verified,
            Ok(false) => Status::FailsAsPrinted { fingerprint: "span".into() },
            Err(e) => Status::FailsAsPrinted { fingerprint: e.to_string() },
        }
    }
}

/// Sample points per row in span comparisons.
const SPAN_POINTS: usize = 4;

/// Whether the parameter split of `algebra` and the fields obtained from
/// `family` span the same space.
pub fn algebra_matches_group(algebra: &VectorField, family: &GroupFamily) -> Result<bool, CatalogueError> {
    let coords = [JetVar::x(), JetVar::y(0)];
    let from_algebra = split_by_parameters(algebra)?.fields();
    let from_group = group_to_algebra(family)?;
    let rank = |fields: &[VectorField]| span_rank(fields, &coords, SPAN_POINTS, liegen::RANK_TRIALS, liegen::RANK_SEED);
    let (ra, rg) = (rank(&from_algebra), rank(&from_group));
    let stacked: Vec<VectorField> = from_algebra.iter().chain(&from_group).cloned().collect();
    Ok(ra == rg && rank(&stacked) == ra)
}

/// Form-specific `y` component of the point-transformation generator.
fn y_component(form: Form, n: usize, xi: &JetExpr) -> Result<JetExpr, JetError> {
    let y = JetExpr::y(0);
    Ok(match form {
        Form::Standard | Form::General => &JetExpr::func("g", 0) * &y,
        Form::Normal | Form::W => &(&JetExpr::rational(n as i64 - 1, 2) * &xi.total_derivative(1)?) * &y,
    })
}

fn check_generator(g: &GeneratorRecord) -> Status {
    if !g.unparsed.is_empty() {
        return Status::UnverifiedAsPrinted;
    }
    let ode = LinearODE::generic(g.form, g.n);
    let mut vf = g.field.clone();
    if vf.component(JetVar::y(0)).is_zero() {
        match y_component(g.form, g.n, &vf.component(JetVar::x())) {
            Ok(eta) => vf.set(JetVar::y(0), eta),
            Err(e) => return Status::FailsAsPrinted { fingerprint: e.to_string() },
        }
    }
    match verify_symmetry(&vf, &ode) {
        Ok(Verdict::Holds) => Status::Verified,
        Ok(Verdict::Fails { residual }) => Status::FailsAsPrinted { fingerprint: fingerprint(&residual) },
        Err(e) => Status::FailsAsPrinted { fingerprint: e.to_string() },
    }
}

/// A family with finite parameters must be the identity at its identity
/// values; every family must take generic equations of its form (standard
/// equations for the standard reduction) to equations of the target form.
fn check_group(g: &GroupRecord) -> Status {
    let target = if g.form == Form::Standard { Form::Normal } else { g.form };
    for n in 3..=5 {
        let fam = match g.instantiate(n) {
            Ok(f) => f,
            Err(e) => return Status::FailsAsPrinted { fingerprint: e.to_string() },
        };
        if !fam.params.is_empty() && !matches!(fam.identity_holds(), Ok(true)) {
            return Status::FailsAsPrinted { fingerprint: "identity".into() };
        }
        let t = PointTransformation { x_map: fam.x_map, log_t: fam.log_t, scale: fam.closed_t };
        let ode = LinearODE::generic(g.form, n);
        match transform_ode(&ode, &t, None) {
            Ok(out) => {
                let mut moved = target.vanishing(n).map(|j| &out.ode.coeffs[j]).filter(|c| !c.is_zero());
                if let Some(c) = moved.next() {
                    return Status::FailsAsPrinted { fingerprint: fingerprint(c) };
                }
            }
            Err(e) => return Status::FailsAsPrinted { fingerprint: e.to_string() },
        }
    }
    Status::Verified
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEntry {
    pub kind: &'static str,
    pub id: String,
    pub status: String,
    pub fingerprint: Option<String>,
}

impl ReportEntry {
    fn new(kind: &'static str, id: String, s: &Status) -> Self {
        let fingerprint = match s {
            Status::FailsAsPrinted { fingerprint } => Some(fingerprint.clone()),
            _ => None,
        };
        ReportEntry { kind, id, status: s.tag().to_string(), fingerprint }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn get(&self, id: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{:<10} {:<28} {}", e.kind, e.id, e.status)?;
            if let Some(fp) = &e.fingerprint {
                write!(f, " {fp}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stanza_reader_handles_quotes_and_commas() {
        let st = stanzas("# c\nrecord=x, a=\"1, 2\"\n b=3\n\nrecord=y\n").unwrap();
        assert_eq!(st.len(), 2);
        assert_eq!(st[0].get("a"), Some("1, 2"));
        assert_eq!(st[0].get("b"), Some("3"));
        assert_eq!(st[1].line, 5);
    }

    #[test]
    fn order_placeholders() {
        assert_eq!(fill_order("a{n-1}/{n} + {n+1}", 4), "a3/4 + 5");
    }

    #[test]
    fn builtin_lookup() {
        let cat = Catalogue::builtin();
        let w5 = cat.get_generator(Form::W, 5).unwrap();
        assert_eq!(w5.field.component(JetVar::coeff(2, 0)), parse::parse("-3*a2*(k2 + 2*k3*x)").unwrap());
        let n4 = cat.get_generator(Form::Normal, 4).unwrap();
        assert_eq!(n4.field.component(JetVar::coeff(2, 0)), parse::parse("-2*a2*f' - 5*f'''").unwrap());
        assert!(matches!(cat.get_generator(Form::Standard, 7), Err(CatalogueError::NotInCatalogue { .. })));
        let p0 = cat.get_invariants(Form::W, 5, 0).unwrap();
        assert_eq!(p0.len(), 1);
        assert_eq!(p0[0].expr, parse::parse("(3*a0*a2 - a1^2)^3/(27*a2^8)").unwrap());
        assert_eq!(cat.get_invariants(Form::Normal, 3, 3).unwrap().len(), 1);
        assert!(cat.get_invariants(Form::W, 3, 0).unwrap().is_empty());
    }

    #[test]
    fn malformed_stanzas_are_reported_with_lines() {
        let err = Catalogue::parse("record=invariant, form=w, n=3, p=2, index=1, expr=\"a0 +\"").unwrap_err();
        assert!(matches!(err, CatalogueError::Expr { line: 1, .. }));
        let err = Catalogue::parse("\nrecord=bogus").unwrap_err();
        assert!(matches!(err, CatalogueError::Format { line: 2, .. }));
    }
}
