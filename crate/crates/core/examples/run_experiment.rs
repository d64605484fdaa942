//! Runs one experiment with its default parameters, optionally patched by a
//! JSON object, and prints the verdict lines.
//!
//! ```text
//! cargo run --example run_experiment -- intertwining '{"n": 2000}'
//! ```

use hardedge::experiments::{default_params, run_named};
use hardedge::RandomSource;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "intertwining".into());
    let mut params = default_params(&name)?;
    if let Some(patch) = args.next() {
        let patch: serde_json::Value = serde_json::from_str(&patch)?;
        for (k, v) in patch.as_object().ok_or("patch must be a JSON object")? {
            params[k] = v.clone();
        }
    }
    let start = std::time::Instant::now();
    let report = run_named(&name, params, RandomSource::new(20240611, 0))?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    for (k, v) in &report.statistics {
        println!("  {k} = {v}");
    }
    for (name, table) in &report.tables {
        println!("[{name}]\n{}", table.to_csv());
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
