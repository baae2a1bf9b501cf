use std::path::Path;

use qpv_core::protocol::{run_experiment, ExperimentConfig};
use serde_json::json;

use crate::output::{csv_text, pretty, read_config, Context, Failure, Format, Provenance};

/// Per-round rows kept in memory for CSV output.
const ROW_BUDGET: usize = 20_000_000;

pub fn run(ctx: &Context, path: &Path) -> Result<bool, Failure> {
    let bytes = read_config(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::usage("config is not UTF-8"))?;
    let mut cfg = ExperimentConfig::from_json(text)?;
    if let Some(seed) = ctx.seed {
        cfg.seed = seed;
    }
    let rows = ctx.format == Format::Csv;
    if rows && cfg.rounds.saturating_mul(cfg.trials) > ROW_BUDGET {
        return Err(Failure::budget(format!("{} rows exceed the budget of {ROW_BUDGET}", cfg.rounds * cfg.trials)));
    }
    let result = run_experiment(&cfg, path.parent(), rows)?;
    let doc = json!({
        "provenance": Provenance::new("simulate", cfg.seed, &bytes),
        "summary": result.summary,
    });
    match ctx.format {
        Format::Json => ctx.emit(&pretty(&doc))?,
        Format::Csv => {
            ctx.emit(&csv_text(&result.rows)?)?;
            eprint!("{}", pretty(&doc));
        }
    }
    Ok(true)
}
