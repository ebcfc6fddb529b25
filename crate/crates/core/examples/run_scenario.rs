//! Runs a scenario file (default: the dichotomy demo) and prints the
//! verdict; `cargo run --example run_scenario -- path/to/spec.json`.

use std::path::PathBuf;

use charge_komlos::scenario::{run, ScenarioSpec};

fn main() -> charge_komlos::Result<()> {
    let path = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios/dichotomy.json")
    });
    let spec = ScenarioSpec::from_path(&path)?;
    let report = run(&spec)?;
    println!(
        "{}: {} via {} -> {}",
        report.name,
        report.generator,
        report.pipeline,
        if report.passed { "pass" } else { "FAIL" }
    );
    for f in &report.failures {
        println!("  {}: {} (limit {})", f.check, f.value, f.limit);
    }
    print!("{}", report.certificates_csv.lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
