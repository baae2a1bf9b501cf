use std::path::Path;

use qpv_core::attacks::strategy::standard_start;
use qpv_core::attacks::{
    attack_report, epsilon_l_report, seesaw_optimize, AttackKind, AttackReport, AttackStrategy, GardenHose, SeesawConfig,
    Shape, StartMode,
};
use qpv_core::protocol::FunctionSpec;
use qpv_core::{BooleanFunction, SeedStream};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::output::{csv_text, parse_config, pretty, read_config, Context, Failure, Format, Provenance};

#[derive(Debug, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
enum AttackConfig {
    Seesaw(SeesawSpec),
    GardenHose(GardenHoseSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeesawSpec {
    kind: AttackKind,
    n: usize,
    f: FunctionSpec,
    shape: ShapeSpec,
    #[serde(default)]
    start: StartSpec,
    #[serde(default = "default_restarts")]
    restarts: usize,
    #[serde(default = "default_iters")]
    iters: usize,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    epsilon: Option<f64>,
    #[serde(default)]
    seed: u64,
}

fn default_restarts() -> usize {
    20
}

fn default_iters() -> usize {
    500
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeSpec {
    alice_kept: usize,
    alice_sent: usize,
    bob_kept: usize,
    bob_sent: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum StartSpec {
    /// `|Omega>_{RA}`, everything else `|0>`: no shared entanglement.
    #[default]
    Standard,
    /// `|Omega>_{RA}` times an optimized state on the attackers' registers.
    Entangled,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GardenHoseSpec {
    protocol: GardenHose,
    /// Checked against the function the pipes compute, if given.
    f: Option<FunctionSpec>,
    epsilon: Option<f64>,
}

#[derive(serde::Serialize)]
struct PairRow {
    x: usize,
    y: usize,
    f: u8,
    success: f64,
}

fn report_for(s: &AttackStrategy, f: &BooleanFunction, epsilon: Option<f64>) -> Result<AttackReport, Failure> {
    Ok(match epsilon {
        Some(e) => epsilon_l_report(s, f, e)?,
        None => attack_report(s, f)?,
    })
}

pub fn run(ctx: &Context, path: &Path) -> Result<bool, Failure> {
    let bytes = read_config(path)?;
    let cfg: AttackConfig = parse_config(&bytes)?;
    let (seed, report, strategy, extra) = match cfg {
        AttackConfig::Seesaw(spec) => {
            let seed = ctx.seed.unwrap_or(spec.seed);
            let f = spec.f.build(spec.n)?;
            let s = &spec.shape;
            let shape = Shape::new(spec.n, s.alice_kept, s.alice_sent, s.bob_kept, s.bob_sent)?;
            let start = match spec.start {
                StartSpec::Standard => StartMode::Fixed(standard_start(&shape)?),
                StartSpec::Entangled => StartMode::Entangled,
            };
            let sc = SeesawConfig {
                restarts: spec.restarts,
                iters: spec.iters,
                tolerance: spec.tolerance,
                ..SeesawConfig::new(spec.kind, shape, start)
            };
            let result = seesaw_optimize(&f, &sc, SeedStream::new(seed))?;
            let report = report_for(&result.strategy, &f, spec.epsilon)?;
            let extra = json!({ "restarts": result.restarts, "history": result.history });
            (seed, report, result.strategy, extra)
        }
        AttackConfig::GardenHose(spec) => {
            let gh = spec.protocol;
            gh.validate()?;
            let f = BooleanFunction::from_fn(gh.n(), |x, y| gh.water_exit(x, y))?;
            if let Some(want) = &spec.f {
                if want.build(gh.n())? != f {
                    return Err(Failure::usage("the garden-hose protocol does not compute the given function"));
                }
            }
            let strategy = gh.compile()?;
            let report = report_for(&strategy, &f, spec.epsilon)?;
            (ctx.seed.unwrap_or(0), report, strategy, json!({ "function": f.bit_string() }))
        }
    };
    match ctx.format {
        Format::Json => {
            let strategy: Value = serde_json::from_str(&strategy.to_json()?).expect("strategy JSON");
            let doc = json!({
                "provenance": Provenance::new("attack-optimize", seed, &bytes),
                "report": report,
                "details": extra,
                "strategy": strategy,
            });
            ctx.emit(&pretty(&doc))?;
        }
        Format::Csv => {
            let rows = report.per_pair.iter().map(|p| PairRow {
                x: p.x,
                y: p.y,
                f: p.f as u8,
                success: p.success,
            });
            ctx.emit(&csv_text(rows)?)?;
        }
    }
    Ok(true)
}
