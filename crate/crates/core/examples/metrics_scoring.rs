//! Scores hand-made predictions (exact, all zeros, and nudged off target) with the three masked metrics and pools a
//! split-level score.
//!
//! ```bash
//! cargo run --example metrics_scoring
//! ```

use cogscale::metrics::{score, score_split};
use cogscale::{generate, preset, Difficulty, MetricKind, Seed, TaskId};
use ndarray::Array2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for task in [
        TaskId::ContinuousPostcasting,
        TaskId::SimpleCopy,
        TaskId::CrossSituation,
    ] {
        let ds = generate(&preset(task, Difficulty::Small), Seed(1))?;
        let s = &ds.test[0];
        let perfect = s.target.mapv(f64::from);
        let zeros = Array2::<f64>::zeros(s.target.dim());
        let nudged = if s.metric == MetricKind::RegressionMse {
            &perfect + 0.1
        } else {
            let mut p = perfect.clone();
            // rotate every row one column to the right
            for mut row in p.rows_mut() {
                let last = row[row.len() - 1];
                for j in (1..row.len()).rev() {
                    row[j] = row[j - 1];
                }
                row[0] = last;
            }
            p
        };
        println!(
            "{:<24} {:<28} perfect {:.4}  zeros {:.4}  nudged {:.4}  ({} masked steps)",
            task.name(),
            s.metric.name(),
            score(perfect.view(), s)?,
            score(zeros.view(), s)?,
            score(nudged.view(), s)?,
            s.n_masked()
        );
    }

    let ds = generate(
        &preset(TaskId::DiscretePostcasting, Difficulty::Small),
        Seed(1),
    )?;
    let preds: Vec<Array2<f64>> = ds
        .test
        .iter()
        .enumerate()
        .map(|(i, s)| {
            // every fourth sample predicts nothing useful
            if i % 4 == 0 {
                Array2::zeros(s.target.dim())
            } else {
                s.target.mapv(f64::from)
            }
        })
        .collect();
    let (split_score, n) = score_split(preds.iter().map(|p| p.view()), &ds.test)?;
    println!("discrete postcasting test split, a quarter of the samples blank: {split_score:.4} over {n} steps");
    Ok(())
}
