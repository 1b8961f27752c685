//! Generates every task at both difficulties and prints the shape of each
//! dataset along with its content hash.
//!
//! ```bash
//! cargo run --release --example generate_tasks -- [seed]
//! ```

use cogscale::io::content_hash;
use cogscale::tasks::channel_layout;
use cogscale::{generate, preset, Difficulty, Seed, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = Seed(std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?);
    println!(
        "{:<32} {:>3} {:>13} {:>5} {:>5} {:>6} {:>6}  hash",
        "task", "lvl", "samples", "d_in", "d_out", "T", "masked"
    );
    for task in TaskId::ALL {
        for difficulty in Difficulty::ALL {
            let config = preset(task, difficulty);
            let ds = generate(&config, seed)?;
            let first = &ds.train[0];
            println!(
                "{:<32} {:>3} {:>4}/{:>3}/{:>4} {:>5} {:>5} {:>6} {:>6}  {}",
                task.name(),
                difficulty.tag(),
                ds.train.len(),
                ds.valid.len(),
                ds.test.len(),
                ds.d_in,
                ds.d_out,
                first.len(),
                first.n_masked(),
                &content_hash(&ds)[..16]
            );
        }
    }

    let layout = channel_layout(&preset(TaskId::SelectiveCopy, Difficulty::Small));
    println!("\nselective copy input channels:");
    for c in &layout.input {
        println!("  {:<8} width {:>2}  {}", c.name, c.width, c.doc);
    }
    Ok(())
}
