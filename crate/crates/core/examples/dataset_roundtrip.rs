//! Writes a dataset to a `.cgsd` file, reads it back, and prints the header
//! and the content hash.
//!
//! ```bash
//! cargo run --example dataset_roundtrip -- [path]
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter};

use cogscale::io::{content_hash, read_dataset, write_dataset, Header};
use cogscale::{generate, preset, Difficulty, Seed, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("sorting_sm.cgsd")
            .display()
            .to_string()
    });
    let ds = generate(&preset(TaskId::SortingProblem, Difficulty::Small), Seed(9))?;

    let header = Header::of(&ds);
    println!(
        "header: task {}, metric {}, d_in {}, d_out {}, payload {} bytes",
        header.task,
        header.metric,
        header.d_in,
        header.d_out,
        header.payload_len()
    );
    for split in &header.splits {
        println!(
            "  {:<5} {:>3} samples of length {}",
            split.name, split.n_samples, split.lengths[0]
        );
    }

    let bytes = write_dataset(&ds, BufWriter::new(File::create(&path)?))?;
    println!("wrote {bytes} bytes to {path}");

    let back = read_dataset(BufReader::new(File::open(&path)?))?;
    assert_eq!(back, ds);
    println!(
        "read back identical dataset, content hash {}",
        content_hash(&back)
    );
    Ok(())
}
