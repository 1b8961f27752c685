//! Runs a small ESN sweep through the harness into a temporary directory,
//! then prints the summary table and the reports of the selected point.
//!
//! ```bash
//! cargo run --release --example esn_sweep
//! ```

use cogscale::harness::{run_sweep, summary_csv, Manifest};

const MANIFEST: &str = r#"
version = 1
experiment = "example"
tasks = ["discrete_postcasting", "adding_problem"]
difficulties = ["small"]
budgets = [1000]
seeds = [0, 1]

[grid]
leaking_rates = [0.3, 0.8]
spectral_radii = [0.5, 0.9]
input_scalings = [1.0]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let manifest = Manifest::from_toml(MANIFEST)?;
    let dir = std::env::temp_dir().join("cogscale-esn-sweep-example");
    let outcome = run_sweep(&manifest, &dir, |unit, computed, reused| {
        println!(
            "{}/{}/budget={}/seed={}: {computed} computed, {reused} reused",
            unit.task, unit.difficulty, unit.budget, unit.seed
        );
    })?;
    println!("\n{}", summary_csv(&outcome.summary));
    let best = outcome
        .reports
        .iter()
        .filter(|r| r.is_ok())
        .min_by(|a, b| a.score.partial_cmp(&b.score).unwrap())
        .expect("at least one successful report");
    println!("best single run: {}", serde_json::to_string(best)?);
    println!("results in {}", outcome.out_dir.display());
    Ok(())
}
