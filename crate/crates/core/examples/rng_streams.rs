//! Shows that every sample owns its own random stream: a sample drawn alone
//! equals the same sample inside a full dataset, and streams with different
//! labels do not overlap.
//!
//! ```bash
//! cargo run --example rng_streams
//! ```

use cogscale::rng::sample_stream_id;
use cogscale::tasks::sample_stream;
use cogscale::{derive_stream, generate, preset, Difficulty, Seed, Split, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = Seed(2024);
    let task = TaskId::DiscretePostcasting;

    let mut s = derive_stream(seed, sample_stream_id(task.index(), Split::Test.index(), 7));
    let draws: Vec<usize> = (0..10).map(|_| s.draw_index(3)).collect::<Result<_, _>>()?;
    println!("first ten symbols of test sample 7: {draws:?}");

    let mut again = sample_stream(task, seed, Split::Test, 7);
    let same: Vec<usize> = (0..10)
        .map(|_| again.draw_index(3))
        .collect::<Result<_, _>>()?;
    assert_eq!(draws, same);

    let ds = generate(&preset(task, Difficulty::Small), seed)?;
    let from_dataset: Vec<usize> = (0..10)
        .map(|t| {
            ds.test[7]
                .input
                .row(t)
                .iter()
                .position(|v| *v == 1.0)
                .unwrap()
        })
        .collect();
    println!("same steps read back from the dataset: {from_dataset:?}");
    assert_eq!(draws, from_dataset);

    let ids: Vec<u64> = (0..4)
        .map(|i| sample_stream_id(task.index(), Split::Train.index(), i))
        .collect();
    println!("stream ids of train samples 0..4: {ids:x?}");

    let mut u = derive_stream(seed, 1);
    let uniform: Vec<String> = (0..4)
        .map(|_| u.draw_uniform(-0.8, 0.8).map(|v| format!("{v:.4}")))
        .collect::<Result<_, _>>()?;
    println!("uniform draws in [-0.8, 0.8): {}", uniform.join(" "));
    Ok(())
}
