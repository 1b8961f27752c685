//! Masked evaluation metrics and score aggregation.
//!
//! All three metric kinds only look at the timesteps flagged in a sample's
//! `eval_mask`. Argmax ties resolve to the lowest index.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::config::{Difficulty, TaskId};
use crate::model::{argmax, MetricKind, Sample, Slot, Split};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("prediction shape {pred:?} does not match target shape {target:?}")]
    ShapeMismatch {
        pred: (usize, usize),
        target: (usize, usize),
    },
    #[error("evaluation mask selects no timestep")]
    EmptyMask,
    #[error("label error rate needs a slot layout")]
    MissingSlotLayout,
    #[error("predictions given for {preds} samples but the split has {samples}")]
    CountMismatch { preds: usize, samples: usize },
    #[error("cannot aggregate an empty group")]
    EmptyGroup,
    #[error("group `{0}` mixes metric kinds")]
    MixedMetrics(String),
}

/// Sum of per-unit errors and the number of units they were taken over.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    error: f64,
    count: usize,
}

impl Tally {
    fn add(&mut self, other: Tally) {
        self.error += other.error;
        self.count += other.count;
    }

    fn score(self) -> Result<f64, MetricError> {
        if self.count == 0 {
            Err(MetricError::EmptyMask)
        } else {
            Ok(self.error / self.count as f64)
        }
    }
}

fn check_shape(pred: &ArrayView2<f64>, sample: &Sample) -> Result<(), MetricError> {
    if pred.dim() != sample.target.dim() {
        return Err(MetricError::ShapeMismatch {
            pred: pred.dim(),
            target: sample.target.dim(),
        });
    }
    if sample.n_masked() == 0 {
        return Err(MetricError::EmptyMask);
    }
    Ok(())
}

fn mse_tally(pred: &ArrayView2<f64>, sample: &Sample) -> Tally {
    let mut t = Tally::default();
    for step in sample.masked_steps() {
        for (p, y) in pred.row(step).iter().zip(sample.target.row(step)) {
            let d = p - *y as f64;
            t.error += d * d;
        }
        t.count += sample.d_out();
    }
    t
}

fn slot_tally(pred: &ArrayView2<f64>, sample: &Sample, slots: &[Slot]) -> Tally {
    let mut t = Tally::default();
    for step in sample.masked_steps() {
        let p = pred.row(step);
        let y = sample.target.row(step);
        for slot in slots {
            let range = slot.offset..slot.offset + slot.width;
            let pa = argmax(p.slice(ndarray::s![range.clone()]).iter().copied());
            let ya = argmax(y.slice(ndarray::s![range]).iter().copied());
            if pa != ya {
                t.error += 1.0;
            }
            t.count += 1;
        }
    }
    t
}

/// Mean squared error over masked steps and all output dimensions.
pub fn score_mse(pred: ArrayView2<f64>, sample: &Sample) -> Result<f64, MetricError> {
    check_shape(&pred, sample)?;
    mse_tally(&pred, sample).score()
}

/// Fraction of masked steps whose argmax over the whole row is wrong.
pub fn score_error_rate(pred: ArrayView2<f64>, sample: &Sample) -> Result<f64, MetricError> {
    check_shape(&pred, sample)?;
    let whole = [Slot {
        offset: 0,
        width: sample.d_out(),
    }];
    slot_tally(&pred, sample, &whole).score()
}

/// Fraction of (masked step, slot) pairs whose per-slot argmax is wrong.
pub fn score_label_error_rate(pred: ArrayView2<f64>, sample: &Sample) -> Result<f64, MetricError> {
    check_shape(&pred, sample)?;
    let slots = sample
        .slot_layout
        .as_ref()
        .ok_or(MetricError::MissingSlotLayout)?;
    slot_tally(&pred, sample, slots).score()
}

/// Scores one sample with its own metric kind.
pub fn score(pred: ArrayView2<f64>, sample: &Sample) -> Result<f64, MetricError> {
    match sample.metric {
        MetricKind::RegressionMse => score_mse(pred, sample),
        MetricKind::ClassificationErrorRate => score_error_rate(pred, sample),
        MetricKind::MultiLabelLabelErrorRate => score_label_error_rate(pred, sample),
    }
}

/// Split-level score: errors pooled over every masked unit of every sample,
/// so samples with more evaluated steps weigh proportionally more.
///
/// Returns the score and the number of masked timesteps it covers.
pub fn score_split<'a, P>(preds: P, samples: &[Sample]) -> Result<(f64, usize), MetricError>
where
    P: IntoIterator<Item = ArrayView2<'a, f64>>,
{
    let mut total = Tally::default();
    let mut steps = 0;
    let mut n_preds = 0;
    for (pred, sample) in preds.into_iter().zip(samples) {
        n_preds += 1;
        check_shape(&pred, sample)?;
        steps += sample.n_masked();
        total.add(match sample.metric {
            MetricKind::RegressionMse => mse_tally(&pred, sample),
            MetricKind::ClassificationErrorRate => slot_tally(
                &pred,
                sample,
                &[Slot {
                    offset: 0,
                    width: sample.d_out(),
                }],
            ),
            MetricKind::MultiLabelLabelErrorRate => slot_tally(
                &pred,
                sample,
                sample
                    .slot_layout
                    .as_ref()
                    .ok_or(MetricError::MissingSlotLayout)?,
            ),
        });
    }
    if n_preds != samples.len() {
        return Err(MetricError::CountMismatch {
            preds: n_preds,
            samples: samples.len(),
        });
    }
    Ok((total.score()?, steps))
}

/// Provenance of one evaluated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub model: String,
    pub difficulty: Option<Difficulty>,
    pub seed: u64,
    pub budget: Option<u64>,
    /// Hash of the dataset configuration.
    pub config_hash: String,
    /// Canonical label of the hyperparameter point (everything except the seed).
    pub config_key: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// Score of one run on one split. A failed run carries `error` and no score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: TaskId,
    pub split: Split,
    pub metric: MetricKind,
    pub score: Option<f64>,
    pub n_evaluated: usize,
    /// Validation score of the same run, used for configuration selection.
    pub validation_score: Option<f64>,
    pub metadata: RunMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EvalReport {
    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.score.is_some()
    }

    /// Unique identity of the run: hyperparameter point plus seed.
    pub fn run_key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}",
            self.task,
            self.metadata.difficulty.map_or("-", |d| d.tag()),
            self.metadata.model,
            self.metadata.budget.map_or("-".into(), |b| b.to_string()),
            self.metadata.config_key,
            self.metadata.seed
        )
    }
}

/// Fields reports can be grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Task,
    Difficulty,
    Model,
    Budget,
}

/// One aggregated row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    /// Values of the grouping keys, in the order requested.
    pub group: Vec<(GroupKey, String)>,
    pub metric: MetricKind,
    /// Minimum test score over every run in the group.
    pub best_overall: f64,
    /// Mean and population std of test scores of the selected configuration.
    pub mean: f64,
    pub std: f64,
    /// Configuration whose mean validation score is lowest.
    pub selected: String,
    pub n_runs: usize,
}

impl AggregateRow {
    pub fn key(&self, k: GroupKey) -> Option<&str> {
        self.group
            .iter()
            .find(|(g, _)| *g == k)
            .map(|(_, v)| v.as_str())
    }
}

fn group_value(r: &EvalReport, k: GroupKey) -> String {
    match k {
        GroupKey::Task => r.task.to_string(),
        GroupKey::Difficulty => r
            .metadata
            .difficulty
            .map_or_else(|| "-".to_string(), |d| d.name().to_string()),
        GroupKey::Model => r.metadata.model.clone(),
        GroupKey::Budget => r
            .metadata
            .budget
            .map_or_else(|| "-".to_string(), |b| b.to_string()),
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups successful reports by `group_by` and computes best-overall and the
/// mean/std of the validation-selected configuration.
///
/// Inside a group a configuration is every field except the seed (budget and
/// hyperparameter point). The selected configuration has the lowest mean
/// validation score across its seeds; runs without a validation score fall
/// back to their test score for selection. Failed reports are ignored; a
/// group left with no successful run is an error.
pub fn aggregate(
    reports: &[EvalReport],
    group_by: &[GroupKey],
) -> Result<Vec<AggregateRow>, MetricError> {
    if reports.is_empty() {
        return Err(MetricError::EmptyGroup);
    }
    let mut groups: BTreeMap<Vec<String>, Vec<&EvalReport>> = BTreeMap::new();
    for r in reports {
        let key = group_by.iter().map(|k| group_value(r, *k)).collect();
        groups.entry(key).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for (key, members) in groups {
        let label = key.join("/");
        let ok: Vec<&EvalReport> = members.into_iter().filter(|r| r.is_ok()).collect();
        let Some(first) = ok.first() else {
            return Err(MetricError::EmptyGroup);
        };
        let metric = first.metric;
        if ok.iter().any(|r| r.metric != metric) {
            return Err(MetricError::MixedMetrics(label));
        }
        let best_overall = ok
            .iter()
            .map(|r| r.score.unwrap())
            .fold(f64::INFINITY, f64::min);

        let mut configs: BTreeMap<String, Vec<&EvalReport>> = BTreeMap::new();
        for r in &ok {
            let budget = r.metadata.budget.map_or("-".into(), |b| b.to_string());
            configs
                .entry(format!("budget={budget}|{}", r.metadata.config_key))
                .or_default()
                .push(r);
        }
        let (selected, runs) = configs
            .iter()
            .map(|(name, runs)| {
                let vals: Vec<f64> = runs
                    .iter()
                    .map(|r| r.validation_score.unwrap_or(r.score.unwrap()))
                    .collect();
                (name, runs, mean_std(&vals).0)
            })
            // strict < keeps the first (lexicographically smallest) config on ties
            .fold(
                None,
                |best: Option<(&String, &Vec<&EvalReport>, f64)>, cur| match best {
                    Some(b) if b.2 <= cur.2 => Some(b),
                    _ => Some(cur),
                },
            )
            .map(|(n, r, _)| (n.clone(), r))
            .unwrap();
        let tests: Vec<f64> = runs.iter().map(|r| r.score.unwrap()).collect();
        let (mean, std) = mean_std(&tests);
        rows.push(AggregateRow {
            group: group_by.iter().copied().zip(key).collect(),
            metric,
            best_overall,
            mean,
            std,
            selected,
            n_runs: ok.len(),
        });
    }
    Ok(rows)
}
