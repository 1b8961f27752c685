//! Samples, datasets and metric kinds shared by every module.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::config::{TaskConfig, TaskId};
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "regression_mse")]
    RegressionMse,
    #[serde(rename = "classification_error_rate")]
    ClassificationErrorRate,
    #[serde(rename = "multilabel_label_error_rate")]
    MultiLabelLabelErrorRate,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::RegressionMse => "regression_mse",
            MetricKind::ClassificationErrorRate => "classification_error_rate",
            MetricKind::MultiLabelLabelErrorRate => "multilabel_label_error_rate",
        }
    }

    pub fn is_error_rate(self) -> bool {
        !matches!(self, MetricKind::RegressionMse)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A contiguous group of output columns holding one one-hot label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub offset: usize,
    pub width: usize,
}

/// One sequence: inputs, targets and the timesteps the metrics look at.
///
/// Values are stored as `f32`, the precision of the on-disk format, so that a
/// dataset read back from a file equals the one that was written.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Array2<f32>,
    pub target: Array2<f32>,
    pub eval_mask: Array1<bool>,
    pub metric: MetricKind,
    pub slot_layout: Option<Vec<Slot>>,
}

impl Sample {
    pub fn len(&self) -> usize {
        self.input.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.input.nrows() == 0
    }

    pub fn d_in(&self) -> usize {
        self.input.ncols()
    }

    pub fn d_out(&self) -> usize {
        self.target.ncols()
    }

    pub fn n_masked(&self) -> usize {
        self.eval_mask.iter().filter(|m| **m).count()
    }

    pub fn masked_steps(&self) -> impl Iterator<Item = usize> + '_ {
        self.eval_mask
            .iter()
            .enumerate()
            .filter_map(|(t, m)| m.then_some(t))
    }

    /// Slot groups for argmax scoring: the declared layout, or one group spanning `d_out`.
    pub fn slots(&self) -> Vec<Slot> {
        self.slot_layout.clone().unwrap_or_else(|| {
            vec![Slot {
                offset: 0,
                width: self.d_out(),
            }]
        })
    }

    /// Checks the structural invariants: shared T, a non-empty mask, and
    /// one-hot masked targets (per slot) for classification kinds.
    pub fn check_invariants(&self) -> Result<(), String> {
        let t = self.input.nrows();
        if self.target.nrows() != t || self.eval_mask.len() != t {
            return Err(format!(
                "length mismatch: input {t}, target {}, mask {}",
                self.target.nrows(),
                self.eval_mask.len()
            ));
        }
        if self.n_masked() == 0 {
            return Err("eval_mask has no true entry".into());
        }
        if self.metric.is_error_rate() {
            for step in self.masked_steps() {
                for slot in self.slots() {
                    let row = self.target.row(step);
                    let group = &row.as_slice().unwrap()[slot.offset..slot.offset + slot.width];
                    let ones = group.iter().filter(|v| **v == 1.0).count();
                    let zeros = group.iter().filter(|v| **v == 0.0).count();
                    if ones != 1 || ones + zeros != group.len() {
                        return Err(format!("target row {step} is not one-hot in slot {slot:?}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A generated benchmark instance with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub task: TaskId,
    pub config: TaskConfig,
    pub seed: Seed,
    pub train: Vec<Sample>,
    pub valid: Vec<Sample>,
    pub test: Vec<Sample>,
    pub metric: MetricKind,
    pub d_in: usize,
    pub d_out: usize,
    pub slot_layout: Option<Vec<Slot>>,
}

impl Dataset {
    pub fn split(&self, split: Split) -> &[Sample] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn splits(&self) -> [(Split, &[Sample]); 3] {
        [
            (Split::Train, &self.train),
            (Split::Valid, &self.valid),
            (Split::Test, &self.test),
        ]
    }

    pub fn n_samples(&self) -> usize {
        self.train.len() + self.valid.len() + self.test.len()
    }
}

/// Writes a one-hot `index` into `row[offset..]`.
pub(crate) fn set_one_hot(mut row: ndarray::ArrayViewMut1<f32>, offset: usize, index: usize) {
    row[offset + index] = 1.0;
}

/// Argmax with ties broken toward the lowest index.
pub fn argmax<I>(values: I) -> usize
where
    I: IntoIterator,
    I::Item: Into<f64>,
{
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        let v = v.into();
        if v > best_v || (i == 0 && v.is_nan()) {
            best = i;
            best_v = v;
        }
    }
    best
}
