use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use qpv_core::analysis::cc::smp_cc;
use qpv_core::analysis::counting::{
    attacker_qubit_bound, counting_bound, decimal, default_delta, delta_margin_check_at, delta_margin_value, net_size_report,
    CountingReport, NetSizeReport, QubitBoundInput,
};
use qpv_core::protocol::FunctionSpec;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{csv_text, parse_config, pretty, read_config, Context, Failure, Format, Provenance};

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    #[serde(default)]
    counting: Vec<NQ>,
    #[serde(default)]
    nets: Vec<u32>,
    #[serde(default)]
    qubit_bounds: Vec<QubitBoundInput>,
    /// Functions whose SMP complexity is found by brute force and fed into
    /// the qubit bound.
    #[serde(default)]
    cc: Vec<CcSpec>,
    /// Net radius as a decimal string; defaults to 0.00216.
    delta: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NQ {
    n: u32,
    q: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CcSpec {
    n: usize,
    f: FunctionSpec,
    #[serde(default = "quarter")]
    error: f64,
}

fn quarter() -> f64 {
    0.25
}

#[derive(Serialize)]
struct CountingEntry {
    #[serde(flatten)]
    report: CountingReport,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct CountingRow {
    n: u32,
    q: u32,
    k: f64,
    log2_bound: f64,
    log2_bound_upper: f64,
    threshold: f64,
    passes: bool,
    in_claimed_regime: bool,
}

fn notes(n: u32, q: u32) -> Vec<String> {
    let mut out = Vec::new();
    if n < 10 {
        out.push(format!("n = {n} < 10: the security statement assumes n >= 10"));
    }
    if 2 * q + 10 > n {
        out.push(format!("q = {q} exceeds n/2 - 5: outside the claimed regime"));
    }
    out
}

fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn run(ctx: &Context, config: Option<&Path>, flags: Option<(u32, u32)>) -> Result<bool, Failure> {
    let (bytes, cfg) = match (config, flags) {
        (Some(path), _) => {
            let bytes = read_config(path)?;
            let cfg: BoundsConfig = parse_config(&bytes)?;
            (bytes, cfg)
        }
        (None, Some((n, q))) => {
            let cfg = BoundsConfig {
                counting: vec![NQ { n, q }],
                nets: vec![q],
                qubit_bounds: vec![QubitBoundInput::Random { n: n as u64 }],
                ..Default::default()
            };
            (serde_json::to_vec(&cfg).expect("config serializes"), cfg)
        }
        (None, None) => return Err(Failure::usage("bounds needs --config or both --n and --q")),
    };

    let mut ok = true;
    let mut counting = Vec::new();
    for &NQ { n, q } in &cfg.counting {
        let report = counting_bound(n, q)?;
        ok &= report.passes || !report.in_claimed_regime;
        counting.push(CountingEntry {
            report,
            notes: notes(n, q),
        });
    }
    let nets: Vec<NetSizeReport> = cfg.nets.iter().map(|&q| net_size_report(q)).collect();
    let mut qubits = Vec::new();
    for &input in &cfg.qubit_bounds {
        qubits.push(json!({ "input": input, "q_max": attacker_qubit_bound(input)? }));
    }
    for spec in &cfg.cc {
        let f = spec.f.build(spec.n)?;
        let k = smp_cc(&f, spec.error)?;
        let input = QubitBoundInput::Cc { k: k as u64 };
        qubits.push(json!({ "input": input, "function": f.bit_string(), "error": spec.error, "q_max": attacker_qubit_bound(input)? }));
    }
    let delta = match &cfg.delta {
        Some(s) => decimal(s)?,
        None => default_delta(),
    };
    let margin_ok = delta_margin_check_at(&delta);
    ok &= margin_ok;
    let value = delta_margin_value(&delta);

    match ctx.format {
        Format::Json => {
            let doc = json!({
                "provenance": Provenance::new("bounds", ctx.seed.unwrap_or(0), &bytes),
                "counting": counting,
                "nets": nets,
                "qubit_bounds": qubits,
                "delta_margin": {
                    "delta": delta.to_string(),
                    "delta_approx": approx(&delta),
                    "value": value.to_string(),
                    "value_approx": approx(&value),
                    "limit": 0.0065,
                    "passes": margin_ok,
                },
            });
            ctx.emit(&pretty(&doc))?;
        }
        Format::Csv => {
            let rows = counting.iter().map(|c| CountingRow {
                n: c.report.n,
                q: c.report.q,
                k: c.report.k,
                log2_bound: c.report.log2_bound,
                log2_bound_upper: c.report.log2_bound_upper,
                threshold: c.report.threshold,
                passes: c.report.passes,
                in_claimed_regime: c.report.in_claimed_regime,
            });
            ctx.emit(&csv_text(rows)?)?;
        }
    }
    Ok(ok)
}
