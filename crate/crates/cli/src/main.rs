mod odefile;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use odeinv_core::catalogue::{fingerprint, Catalogue, CatalogueError};
use odeinv_core::harness::{run_suite, HarnessError, SuiteReport};
use odeinv_core::jet::JetExpr;
use odeinv_core::liegen::{
    count_invariants, derive_coefficient_generator, verify_annihilates, CountMethod, LieError, VectorField, Verdict,
};
use odeinv_core::ode::{Form, LinearODE};
use odeinv_core::parse::{parse, print};
use odeinv_core::transforms::{apply_w_group, brioschi_reduce, reduce_to_normal, Brioschi, TransformError};

use odefile::{parse_ode, write_ode};

#[derive(Parser, Debug)]
#[command(name = "odeinv", version, about = "Differential invariants of linear ODEs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    /// Ceiling on expression size (nodes) for changes of variables.
    #[arg(long, env = "ODEINV_BUDGET", global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Formula,
    Rank,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check catalogued invariants, or one expression, against the generator.
    Verify {
        #[arg(long)]
        form: Form,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
        /// Check this expression instead of the catalogue.
        #[arg(long)]
        expr: Option<String>,
        /// Treat records that fail as printed as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Number of fundamental w-form invariants of the p-th prolongation.
    Count {
        #[arg(long, value_parser = order_at_least_three)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
    },
    /// Change variables in an ODE file (`-` reads stdin).
    #[command(group(ArgGroup::new("how").required(true).args(["to", "w_group"])))]
    Transform {
        file: PathBuf,
        /// Target form; only `normal` is supported.
        #[arg(long, value_parser = ["normal"])]
        to: Option<String>,
        /// Structure group element `A,B,C,D` with rational entries.
        #[arg(long, value_name = "A,B,C,D", allow_hyphen_values = true)]
        w_group: Option<String>,
    },
    /// Derive the coefficient generator of a form.
    Derive {
        #[arg(long)]
        form: Form,
        #[arg(long)]
        n: usize,
    },
    /// Try the order reduction of a third- or fourth-order equation.
    Reduce { file: PathBuf },
    /// Exact invariance trials under random group elements.
    Suite {
        #[arg(long, default_value = "w")]
        form: Form,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn order_at_least_three(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not an order"))?;
    if n < 3 {
        return Err(format!("order must be at least 3, got {n}"));
    }
    Ok(n)
}

/// Why a command did not succeed; maps onto the exit code.
enum Failure {
    Usage(String),
    Math(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Math(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Math(m) | Failure::Usage(m) => m,
        }
    }
}

impl From<CatalogueError> for Failure {
    fn from(e: CatalogueError) -> Self {
        match e {
            CatalogueError::NotInCatalogue { .. } => Failure::Usage(e.to_string()),
            e => Failure::Math(e.to_string()),
        }
    }
}

impl From<LieError> for Failure {
    fn from(e: LieError) -> Self {
        match e {
            LieError::UnsupportedOrder(_) | LieError::UnsupportedForm(_) => Failure::Usage(e.to_string()),
            e => Failure::Math(e.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::UnsupportedForm(_) | TransformError::UnsupportedOrder(_) => Failure::Usage(e.to_string()),
            e => Failure::Math(e.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Precondition(_) => Failure::Usage(e.to_string()),
            e => Failure::Math(e.to_string()),
        }
    }
}

impl From<odeinv_core::jet::JetError> for Failure {
    fn from(e: odeinv_core::jet::JetError) -> Self {
        Failure::Math(e.to_string())
    }
}

#[derive(Serialize)]
struct RecordResult {
    id: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    fingerprint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<String>,
}

#[derive(Serialize)]
struct VerifyOutput {
    form: Form,
    n: usize,
    p: u32,
    strict: bool,
    records: Vec<RecordResult>,
}

#[derive(Serialize)]
struct CountOutput {
    n: usize,
    p: usize,
    method: &'static str,
    count: usize,
}

#[derive(Serialize)]
struct OdeJson {
    n: usize,
    form: Form,
    argument: String,
    coeffs: BTreeMap<String, String>,
}

impl From<&LinearODE> for OdeJson {
    fn from(ode: &LinearODE) -> Self {
        OdeJson {
            n: ode.n,
            form: ode.form,
            argument: print(&ode.argument),
            coeffs: ode.coeffs.iter().enumerate().map(|(j, e)| (format!("a{j}"), print(e))).collect(),
        }
    }
}

#[derive(Serialize)]
struct TransformOutput {
    ode: OdeJson,
    stanza: String,
}

#[derive(Serialize)]
struct DeriveOutput {
    form: Form,
    n: usize,
    generator: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct ReduceOutput {
    outcome: &'static str,
    mu: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    substitution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equation: Option<String>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Payload {
    Verify(VerifyOutput),
    Count(CountOutput),
    Transform(TransformOutput),
    Derive(DeriveOutput),
    Reduce(ReduceOutput),
    Suite(SuiteReport),
}

/// A finished command: what to print and whether the mathematics held up.
struct Report {
    command: &'static str,
    ok: bool,
    payload: Payload,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'static str,
    ok: bool,
    #[serde(flatten)]
    payload: &'a Payload,
}

impl Report {
    fn text(&self) -> String {
        match &self.payload {
            Payload::Verify(v) => {
                let mut out = String::new();
                for r in &v.records {
                    out.push_str(&format!("{:<28} {}", r.id, r.status));
                    if let Some(f) = &r.fingerprint {
                        out.push_str(&format!(" {f}"));
                    }
                    out.push('\n');
                    if let Some(res) = &r.residual {
                        out.push_str(&format!("  residual: {res}\n"));
                    }
                }
                let verified = v.records.iter().filter(|r| r.status == "verified" || r.status == "equals").count();
                out.push_str(&format!(
                    "checked {} records: {verified} verified, {} not",
                    v.records.len(),
                    v.records.len() - verified
                ));
                out
            }
            Payload::Count(c) => c.count.to_string(),
            Payload::Transform(t) => t.stanza.clone(),
            Payload::Derive(d) => d.generator.iter().map(|(k, v)| format!("d[{k}]: {v}")).collect::<Vec<_>>().join("\n"),
            Payload::Reduce(r) => {
                let mut lines = vec![format!("outcome: {}", r.outcome), format!("mu: {}", r.mu)];
                lines.extend(r.substitution.iter().map(|s| format!("substitution: {s}")));
                lines.extend(r.equation.iter().cloned());
                lines.join("\n")
            }
            Payload::Suite(s) => s.to_string(),
        }
    }

    fn json(&self) -> String {
        let j = JsonReport { command: self.command, ok: self.ok, payload: &self.payload };
        serde_json::to_string_pretty(&j).expect("serializable report")
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load_ode(path: &PathBuf) -> Result<LinearODE, Failure> {
    parse_ode(&read_input(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_group(text: &str) -> Result<[JetExpr; 4], Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::Usage(format!("--w-group takes four values A,B,C,D, got `{text}`")));
    }
    let mut out = Vec::with_capacity(4);
    for p in parts {
        let e = parse(p).map_err(|e| Failure::Usage(format!("--w-group `{p}`: {e}")))?;
        let c: BigRational =
            e.as_constant().cloned().ok_or_else(|| Failure::Usage(format!("--w-group entry `{p}` is not a rational number")))?;
        out.push(JetExpr::constant(c));
    }
    Ok(out.try_into().expect("four entries"))
}

fn field_map(vf: &VectorField) -> BTreeMap<String, String> {
    vf.components().map(|(k, v)| (k.to_string(), print(v))).collect()
}

fn cmd_verify(form: Form, n: usize, p: u32, expr: Option<String>, strict: bool) -> Result<Report, Failure> {
    let cat = Catalogue::builtin();
    let generator = cat.working_generator(form, n)?;
    let mut records = Vec::new();
    if let Some(text) = expr {
        let e = parse(&text).map_err(|e| Failure::Usage(format!("--expr: {e}")))?.rationalize();
        let (status, residual) = match verify_annihilates(generator, p, &e)? {
            Verdict::Holds => ("verified", None),
            Verdict::Fails { residual } => ("fails", Some(print(&residual))),
        };
        records.push(RecordResult { id: "expr".into(), status: status.into(), fingerprint: Some(fingerprint(&e)), residual });
    } else {
        for r in cat.invariants.iter().filter(|r| r.form == form && r.n == n && r.min_p() <= p) {
            let s = cat.invariant_status(r);
            let fp = match &s {
                odeinv_core::catalogue::Status::FailsAsPrinted { fingerprint } => Some(fingerprint.clone()),
                _ => None,
            };
            let status = match &s {
                odeinv_core::catalogue::Status::Equals { other } => format!("equals {other}"),
                s => s.tag().to_string(),
            };
            records.push(RecordResult { id: r.id(), status, fingerprint: fp, residual: None });
        }
    }
    let is_ok = |r: &RecordResult| {
        r.status == "verified" || r.status.starts_with("equals") || (!strict && r.status == "fails-as-printed")
    };
    let ok = records.iter().all(is_ok);
    Ok(Report { command: "verify", ok, payload: Payload::Verify(VerifyOutput { form, n, p, strict, records }) })
}

fn cmd_count(n: usize, p: usize, method: Method) -> Result<Report, Failure> {
    let (m, name) = match method {
        Method::Formula => (CountMethod::Formula, "formula"),
        Method::Rank => (CountMethod::Rank, "rank"),
        Method::Both => (CountMethod::Both, "both"),
    };
    let count = count_invariants(Form::W, n, p, m)?;
    Ok(Report { command: "count", ok: true, payload: Payload::Count(CountOutput { n, p, method: name, count }) })
}

fn cmd_transform(file: &PathBuf, to: Option<String>, w_group: Option<String>, budget: Option<usize>) -> Result<Report, Failure> {
    let ode = load_ode(file)?;
    let out = match (to, w_group) {
        (Some(_), _) => reduce_to_normal(&ode, budget)?.0,
        (None, Some(g)) => apply_w_group(&ode, &parse_group(&g)?, budget)?.ode,
        (None, None) => return Err(Failure::Usage("give --to or --w-group".into())),
    };
    let stanza = write_ode(&out);
    Ok(Report { command: "transform", ok: true, payload: Payload::Transform(TransformOutput { ode: (&out).into(), stanza }) })
}

fn cmd_derive(form: Form, n: usize) -> Result<Report, Failure> {
    let field = derive_coefficient_generator(form, n)?;
    Ok(Report { command: "derive", ok: true, payload: Payload::Derive(DeriveOutput { form, n, generator: field_map(&field) }) })
}

fn second_order_text(eq: &LinearODE) -> String {
    let mut text = String::from("ybar''");
    for (j, name) in [(1, "ybar'"), (0, "ybar")] {
        if !eq.coeffs[j].is_zero() {
            text.push_str(&format!(" + ({})*{name}", print(&eq.coeffs[j])));
        }
    }
    text + " = 0"
}

fn cmd_reduce(file: &PathBuf, budget: Option<usize>) -> Result<Report, Failure> {
    let mut ode = load_ode(file)?;
    if ode.form == Form::Standard {
        ode = reduce_to_normal(&ode, budget)?.0;
    }
    let payload = match brioschi_reduce(&ode)? {
        Brioschi::Reduced { equation, substitution } => ReduceOutput {
            outcome: "reduced",
            mu: "0".into(),
            substitution: Some(substitution),
            equation: Some(second_order_text(&equation)),
        },
        Brioschi::Reducible { mu } => ReduceOutput { outcome: "reducible", mu: print(&mu), substitution: None, equation: None },
        Brioschi::NotApplicable { mu } => {
            ReduceOutput { outcome: "not-applicable", mu: print(&mu), substitution: None, equation: None }
        }
    };
    let ok = payload.outcome != "not-applicable";
    Ok(Report { command: "reduce", ok, payload: Payload::Reduce(payload) })
}

fn cmd_suite(form: Form, n: usize, trials: usize, seed: u64) -> Result<Report, Failure> {
    let cat = Catalogue::builtin();
    if !cat.invariants.iter().any(|r| r.form == form && r.n == n) {
        return Err(Failure::Usage(format!("no catalogued invariants for form {form}, order {n}")));
    }
    let report = run_suite(&cat, form, n, trials, seed)?;
    Ok(Report { command: "suite", ok: report.all_pass(), payload: Payload::Suite(report) })
}

fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Verify { form, n, p, expr, strict } => cmd_verify(form, n, p, expr, strict),
        Command::Count { n, p, method } => cmd_count(n, p, method),
        Command::Transform { file, to, w_group } => cmd_transform(&file, to, w_group, cli.budget),
        Command::Derive { form, n } => cmd_derive(form, n),
        Command::Reduce { file } => cmd_reduce(&file, cli.budget),
        Command::Suite { form, n, trials, seed } => cmd_suite(form, n, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            match format {
                OutputFormat::Text => println!("{}", report.text()),
                OutputFormat::Json => println!("{}", report.json()),
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("odeinv: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
