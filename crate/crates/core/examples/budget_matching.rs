//! Finds the widest model that fits a parameter budget, for the ESN readout
//! and for a made-up two-layer network.
//!
//! ```bash
//! cargo run --example budget_matching
//! ```

use cogscale::budget::{esn_readout_count, BudgetSpec, WidthTable, BUDGETS};
use cogscale::{Difficulty, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for d_out in [1, 3, 8] {
        let widths: Vec<String> = BUDGETS
            .iter()
            .map(|&b| {
                let spec = BudgetSpec::new(b, |n| esn_readout_count(d_out, n), 1..=b as usize);
                spec.match_width()
                    .map(|n| format!("{b}: n={n} ({} params)", esn_readout_count(d_out, n)))
                    .unwrap_or_else(|e| format!("{b}: {e}"))
            })
            .collect();
        println!("ESN readout, d_out={d_out}: {}", widths.join(", "));
    }

    // input 10, two hidden layers of width h, output 4
    let mlp = |h: usize| (10 * h + h + h * h + h + h * 4 + 4) as u64;
    let h = BudgetSpec::new(10_000, mlp, 1..=1000).match_width()?;
    println!(
        "two-layer network under 10k: width {h} uses {} parameters",
        mlp(h)
    );

    let table = WidthTable::esn(&BUDGETS);
    let entry = table
        .lookup(TaskId::SimpleCopy, Difficulty::Medium, 10_000)
        .expect("simple copy fits the 10k budget");
    println!(
        "width table: simple copy MD at 10k uses {} units ({} parameters); {} entries in total",
        entry.width,
        entry.count,
        table.entries.len()
    );
    Ok(())
}
