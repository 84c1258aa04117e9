//! ODE stanza files: `n=3 form=standard a2="..." a1="..." a0="..."`.
//!
//! Tokens are shell-style words, so values with spaces are quoted and `#`
//! starts a comment. Coefficients that are left out are zero. An optional
//! `argument="..."` records the point the coefficient jets are taken at.

use odeinv_core::jet::JetExpr;
use odeinv_core::ode::{Form, LinearODE};
use odeinv_core::parse::{parse, print};

pub fn parse_ode(text: &str) -> Result<LinearODE, String> {
    let words = shlex::split(text).ok_or("unbalanced quotes")?;
    let mut n = None;
    let mut form = Form::Standard;
    let mut argument = None;
    let mut coeffs: Vec<(usize, String)> = Vec::new();
    for w in &words {
        let (key, value) = w.split_once('=').ok_or_else(|| format!("expected key=value, found `{w}`"))?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| format!("bad order `{value}`"))?),
            "form" => form = value.parse()?,
            "argument" => argument = Some(value.to_string()),
            _ => {
                let j =
                    key.strip_prefix('a').and_then(|d| d.parse::<usize>().ok()).ok_or_else(|| format!("unknown key `{key}`"))?;
                if coeffs.iter().any(|(i, _)| *i == j) {
                    return Err(format!("coefficient a{j} given twice"));
                }
                coeffs.push((j, value.to_string()));
            }
        }
    }
    let n = n.ok_or("missing n=")?;
    if n < 2 {
        return Err(format!("order {n} is too low"));
    }
    let mut exprs = vec![JetExpr::zero(); n];
    for (j, text) in coeffs {
        if j >= n {
            return Err(format!("a{j} does not exist for order {n}"));
        }
        exprs[j] = parse(&text).map_err(|e| format!("a{j}: {e}"))?;
    }
    let mut ode = LinearODE::new(n, form, exprs);
    if let Some(arg) = argument {
        ode.argument = parse(&arg).map_err(|e| format!("argument: {e}"))?;
    }
    if !ode.satisfies_form() {
        return Err(format!(
            "{form} form needs a{} = 0",
            form.vanishing(n).map(|j| j.to_string()).collect::<Vec<_>>().join(" = a")
        ));
    }
    Ok(ode)
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

pub fn write_ode(ode: &LinearODE) -> String {
    let mut out = format!("n={} form={}", ode.n, ode.form);
    if !ode.argument.equals(&JetExpr::x()) {
        out.push_str(&format!(" argument={}", quote(&print(&ode.argument))));
    }
    for j in (0..ode.n).rev() {
        out.push_str(&format!(" a{j}={}", quote(&print(&ode.coeffs[j]))));
    }
    out
}
