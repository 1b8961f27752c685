//! Builds radar-chart data from a handful of reports: peak accuracy per
//! model and task, with missing tasks listed.
//!
//! ```bash
//! cargo run --example radar_data
//! ```

use std::collections::BTreeMap;

use cogscale::harness::{radar, DEFAULT_RADAR_TASKS};
use cogscale::metrics::{EvalReport, RunMetadata};
use cogscale::{Difficulty, Split, TaskId};

fn report(model: &str, task: TaskId, score: f64, seed: u64) -> EvalReport {
    EvalReport {
        task,
        split: Split::Test,
        metric: task.metric(),
        score: Some(score),
        n_evaluated: 100,
        validation_score: Some(score),
        metadata: RunMetadata {
            model: model.into(),
            difficulty: Some(Difficulty::Small),
            seed,
            budget: Some(10_000),
            config_hash: "example".into(),
            config_key: format!("{model}:default"),
            params: BTreeMap::new(),
        },
        error: None,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reports = vec![
        report("esn", TaskId::SimpleCopy, 0.25, 0),
        report("esn", TaskId::SimpleCopy, 0.31, 1),
        report("esn", TaskId::AddingProblem, 0.01, 0),
        report("esn", TaskId::SortingProblem, 0.62, 0),
        report("gru", TaskId::SimpleCopy, 0.0, 0),
        report("gru", TaskId::SelectiveCopy, 0.12, 0),
    ];
    let data = radar(&reports, &DEFAULT_RADAR_TASKS);
    for series in &data.series {
        let axes: Vec<String> = series
            .axes
            .iter()
            .map(|a| format!("{} {:.2}", a.task, a.accuracy))
            .collect();
        println!("{}: {}", series.model, axes.join(", "));
    }
    println!("missing: {}", data.missing.join(", "));
    println!("{}", serde_json::to_string(&data)?);
    Ok(())
}
