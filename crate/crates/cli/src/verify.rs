use qpv_core::checks::{run_suite, BoundReport, SUITES};

use crate::output::{csv_text, Context, Failure, Format, Provenance};

#[derive(serde::Serialize)]
struct Row<'a> {
    name: &'a str,
    lhs: f64,
    relation: &'a str,
    rhs: f64,
    margin: f64,
    tolerance: f64,
    pass: bool,
    trials: usize,
}

pub fn run(ctx: &Context, names: &[String]) -> Result<bool, Failure> {
    let selected: Vec<&str> = if names.iter().any(|n| n == "all") {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    if let Some(bad) = selected.iter().find(|n| !SUITES.contains(n)) {
        return Err(Failure::usage(format!("unknown suite `{bad}`; known: {}", SUITES.join(", "))));
    }
    let seed = ctx.seed.unwrap_or(0);
    let mut reports: Vec<BoundReport> = Vec::new();
    for name in &selected {
        reports.extend(run_suite(name, seed)?);
    }
    let ok = reports.iter().all(|r| r.pass);
    let text = match ctx.format {
        Format::Json => {
            let header = serde_json::json!({ "provenance": Provenance::new("verify", seed, selected.join(",").as_bytes()) });
            let mut out = header.to_string();
            out.push('\n');
            for r in &reports {
                out.push_str(&r.to_jsonl());
                out.push('\n');
            }
            out
        }
        Format::Csv => csv_text(reports.iter().map(|r| Row {
            name: &r.name,
            lhs: r.lhs,
            relation: r.relation.symbol(),
            rhs: r.rhs,
            margin: r.margin,
            tolerance: r.tolerance,
            pass: r.pass,
            trials: r.trials,
        }))?,
    };
    ctx.emit(&text)?;
    Ok(ok)
}
