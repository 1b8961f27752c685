//! Task identifiers, per-task configurations and the shipped small/medium presets.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::model::MetricKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown difficulty `{0}` (expected `small` or `medium`)")]
    UnknownDifficulty(String),
    #[error("invalid task configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// The fourteen benchmark tasks, in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    SinusForecasting,
    ChaoticForecasting,
    DiscretePostcasting,
    ContinuousPostcasting,
    DiscretePatternCompletion,
    ContinuousPatternCompletion,
    BracketMatching,
    SimpleCopy,
    SelectiveCopy,
    AddingProblem,
    SortingProblem,
    CrossSituation,
    AssociativeRecall,
    InductionHeads,
}

impl TaskId {
    pub const ALL: [TaskId; 14] = [
        TaskId::SinusForecasting,
        TaskId::ChaoticForecasting,
        TaskId::DiscretePostcasting,
        TaskId::ContinuousPostcasting,
        TaskId::DiscretePatternCompletion,
        TaskId::ContinuousPatternCompletion,
        TaskId::BracketMatching,
        TaskId::SimpleCopy,
        TaskId::SelectiveCopy,
        TaskId::AddingProblem,
        TaskId::SortingProblem,
        TaskId::CrossSituation,
        TaskId::AssociativeRecall,
        TaskId::InductionHeads,
    ];

    /// Stable registry index, used to label random streams.
    pub fn index(self) -> u8 {
        TaskId::ALL.iter().position(|t| *t == self).unwrap() as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskId::SinusForecasting => "sinus_forecasting",
            TaskId::ChaoticForecasting => "chaotic_forecasting",
            TaskId::DiscretePostcasting => "discrete_postcasting",
            TaskId::ContinuousPostcasting => "continuous_postcasting",
            TaskId::DiscretePatternCompletion => "discrete_pattern_completion",
            TaskId::ContinuousPatternCompletion => "continuous_pattern_completion",
            TaskId::BracketMatching => "bracket_matching",
            TaskId::SimpleCopy => "simple_copy",
            TaskId::SelectiveCopy => "selective_copy",
            TaskId::AddingProblem => "adding_problem",
            TaskId::SortingProblem => "sorting_problem",
            TaskId::CrossSituation => "cross_situation",
            TaskId::AssociativeRecall => "associative_recall",
            TaskId::InductionHeads => "induction_heads",
        }
    }

    pub fn metric(self) -> MetricKind {
        match self {
            TaskId::SinusForecasting
            | TaskId::ChaoticForecasting
            | TaskId::ContinuousPostcasting
            | TaskId::ContinuousPatternCompletion => MetricKind::RegressionMse,
            TaskId::CrossSituation => MetricKind::MultiLabelLabelErrorRate,
            _ => MetricKind::ClassificationErrorRate,
        }
    }

    /// Forecasting tasks produce one series split contiguously by ratios.
    pub fn is_forecasting(self) -> bool {
        matches!(self, TaskId::SinusForecasting | TaskId::ChaoticForecasting)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskId::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| ConfigError::UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    #[serde(alias = "SM", alias = "sm")]
    Small,
    #[serde(alias = "MD", alias = "md")]
    Medium,
}

impl Difficulty {
    pub const ALL: [Difficulty; 2] = [Difficulty::Small, Difficulty::Medium];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Small => "small",
            Difficulty::Medium => "medium",
        }
    }

    /// Short tag used in result tables (`SM` / `MD`).
    pub fn tag(self) -> &'static str {
        match self {
            Difficulty::Small => "SM",
            Difficulty::Medium => "MD",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Difficulty {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small" | "sm" | "SM" => Ok(Difficulty::Small),
            "medium" | "md" | "MD" => Ok(Difficulty::Medium),
            other => Err(ConfigError::UnknownDifficulty(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub sequence_length: usize,
    pub forecast_length: usize,
    pub training_ratio: f64,
    pub validation_ratio: f64,
    pub testing_ratio: f64,
}

/// Shared by discrete postcasting and simple copy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDelayConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub delay: usize,
    pub n_symbols: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuousPostcastingConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub delay: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePatternConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub n_symbols: usize,
    pub base_length: usize,
    pub mask_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPatternConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub base_length: usize,
    pub mask_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectiveCopyConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub delay: usize,
    pub n_markers: usize,
    pub n_symbols: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddingConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub max_number: usize,
}

/// Shared by sorting and induction heads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSequenceConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub n_symbols: usize,
}

/// Vocabulary of cross situation: each label is a list of synonymous surface words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossSituationConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub objects: Vec<Vec<String>>,
    pub colors: Vec<Vec<String>>,
    pub positions: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociativeRecallConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub sequence_length: usize,
    pub num_pairs: usize,
    pub n_symbols: usize,
}

/// Per-task configuration, tagged by task name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum TaskConfig {
    SinusForecasting(ForecastConfig),
    ChaoticForecasting(ForecastConfig),
    DiscretePostcasting(SymbolDelayConfig),
    ContinuousPostcasting(ContinuousPostcastingConfig),
    DiscretePatternCompletion(DiscretePatternConfig),
    ContinuousPatternCompletion(ContinuousPatternConfig),
    BracketMatching(BracketConfig),
    SimpleCopy(SymbolDelayConfig),
    SelectiveCopy(SelectiveCopyConfig),
    AddingProblem(AddingConfig),
    SortingProblem(SymbolSequenceConfig),
    CrossSituation(CrossSituationConfig),
    AssociativeRecall(AssociativeRecallConfig),
    InductionHeads(SymbolSequenceConfig),
}

fn words(list: &[&str]) -> Vec<Vec<String>> {
    list.iter().map(|w| vec![w.to_string()]).collect()
}

fn forecast(sequence_length: usize, forecast_length: usize) -> ForecastConfig {
    ForecastConfig {
        sequence_length,
        forecast_length,
        training_ratio: 0.45,
        validation_ratio: 0.1,
        testing_ratio: 0.45,
    }
}

/// Returns the shipped small/medium parameter set for `task`.
pub fn preset(task: TaskId, difficulty: Difficulty) -> TaskConfig {
    let md = difficulty == Difficulty::Medium;
    let (n_train, n_valid, n_test) = if md {
        (1000, 200, 1000)
    } else {
        (100, 20, 100)
    };
    let pick = |sm: usize, md_v: usize| if md { md_v } else { sm };
    match task {
        TaskId::SinusForecasting => {
            TaskConfig::SinusForecasting(forecast(pick(200, 2000), pick(5, 15)))
        }
        TaskId::ChaoticForecasting => {
            TaskConfig::ChaoticForecasting(forecast(pick(200, 2000), pick(5, 15)))
        }
        TaskId::DiscretePostcasting => TaskConfig::DiscretePostcasting(SymbolDelayConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(50, 100),
            delay: pick(5, 15),
            n_symbols: pick(3, 8),
        }),
        TaskId::ContinuousPostcasting => {
            TaskConfig::ContinuousPostcasting(ContinuousPostcastingConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length: pick(50, 100),
                delay: pick(5, 15),
            })
        }
        TaskId::DiscretePatternCompletion => {
            TaskConfig::DiscretePatternCompletion(DiscretePatternConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length: pick(60, 150),
                n_symbols: pick(3, 8),
                base_length: pick(4, 10),
                mask_ratio: 0.2,
            })
        }
        TaskId::ContinuousPatternCompletion => {
            TaskConfig::ContinuousPatternCompletion(ContinuousPatternConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length: pick(60, 150),
                base_length: pick(4, 10),
                mask_ratio: 0.2,
            })
        }
        TaskId::BracketMatching => TaskConfig::BracketMatching(BracketConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(50, 100),
            max_depth: pick(5, 10),
        }),
        TaskId::SimpleCopy => TaskConfig::SimpleCopy(SymbolDelayConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(22, 50),
            delay: pick(5, 10),
            n_symbols: pick(3, 8),
        }),
        TaskId::SelectiveCopy => TaskConfig::SelectiveCopy(SelectiveCopyConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(40, 80),
            delay: pick(5, 10),
            n_markers: pick(5, 10),
            n_symbols: pick(3, 8),
        }),
        TaskId::AddingProblem => TaskConfig::AddingProblem(AddingConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(10, 20),
            max_number: pick(3, 8),
        }),
        TaskId::SortingProblem => TaskConfig::SortingProblem(SymbolSequenceConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(10, 20),
            n_symbols: pick(3, 8),
        }),
        TaskId::CrossSituation => {
            let (objects, colors, mut positions) = if md {
                (
                    words(&["glass", "orange", "cup", "bowl"]),
                    words(&["blue", "orange", "green", "red"]),
                    words(&["left", "right"]),
                )
            } else {
                (
                    words(&["glass", "orange"]),
                    words(&["blue", "orange"]),
                    words(&["left", "right"]),
                )
            };
            if md {
                positions.push(vec!["center".to_string(), "middle".to_string()]);
            }
            TaskConfig::CrossSituation(CrossSituationConfig {
                n_train,
                n_valid,
                n_test,
                objects,
                colors,
                positions,
            })
        }
        TaskId::AssociativeRecall => TaskConfig::AssociativeRecall(AssociativeRecallConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(16, 32),
            num_pairs: pick(3, 7),
            n_symbols: pick(5, 16),
        }),
        TaskId::InductionHeads => TaskConfig::InductionHeads(SymbolSequenceConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: pick(40, 100),
            n_symbols: pick(3, 8),
        }),
    }
}

/// Looks up a preset by task name.
pub fn preset_by_name(task: &str, difficulty: Difficulty) -> Result<TaskConfig, ConfigError> {
    Ok(preset(task.parse()?, difficulty))
}

struct Checker(Vec<String>);

impl Checker {
    fn require(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.0.push(msg.into());
        }
    }

    fn counts(&mut self, n_train: usize, n_valid: usize, n_test: usize) {
        self.require(n_train >= 1, "n_train >= 1");
        self.require(n_valid >= 1, "n_valid >= 1");
        self.require(n_test >= 1, "n_test >= 1");
    }

    fn mask_ratio(&mut self, r: f64) {
        self.require(r > 0.0 && r < 1.0, "mask_ratio in (0,1)");
    }

    fn vocab(&mut self, what: &str, labels: &[Vec<String>]) {
        self.require(labels.len() >= 2, format!("at least 2 {what}"));
        self.require(
            labels
                .iter()
                .all(|l| !l.is_empty() && l.iter().all(|w| !w.is_empty())),
            format!("every {what} label has at least one non-empty word"),
        );
        let mut seen: Vec<&str> = labels.iter().flatten().map(String::as_str).collect();
        let n = seen.len();
        seen.sort_unstable();
        seen.dedup();
        self.require(
            seen.len() == n,
            format!("{what} words are unique within the category"),
        );
    }
}

impl TaskConfig {
    pub fn task(&self) -> TaskId {
        match self {
            TaskConfig::SinusForecasting(_) => TaskId::SinusForecasting,
            TaskConfig::ChaoticForecasting(_) => TaskId::ChaoticForecasting,
            TaskConfig::DiscretePostcasting(_) => TaskId::DiscretePostcasting,
            TaskConfig::ContinuousPostcasting(_) => TaskId::ContinuousPostcasting,
            TaskConfig::DiscretePatternCompletion(_) => TaskId::DiscretePatternCompletion,
            TaskConfig::ContinuousPatternCompletion(_) => TaskId::ContinuousPatternCompletion,
            TaskConfig::BracketMatching(_) => TaskId::BracketMatching,
            TaskConfig::SimpleCopy(_) => TaskId::SimpleCopy,
            TaskConfig::SelectiveCopy(_) => TaskId::SelectiveCopy,
            TaskConfig::AddingProblem(_) => TaskId::AddingProblem,
            TaskConfig::SortingProblem(_) => TaskId::SortingProblem,
            TaskConfig::CrossSituation(_) => TaskId::CrossSituation,
            TaskConfig::AssociativeRecall(_) => TaskId::AssociativeRecall,
            TaskConfig::InductionHeads(_) => TaskId::InductionHeads,
        }
    }

    /// Sample counts per split, or `None` for forecasting tasks whose split
    /// lengths derive from ratios.
    pub fn split_counts(&self) -> Option<[usize; 3]> {
        let c = match self {
            TaskConfig::SinusForecasting(_) | TaskConfig::ChaoticForecasting(_) => return None,
            TaskConfig::DiscretePostcasting(c) | TaskConfig::SimpleCopy(c) => {
                [c.n_train, c.n_valid, c.n_test]
            }
            TaskConfig::ContinuousPostcasting(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::DiscretePatternCompletion(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::ContinuousPatternCompletion(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::BracketMatching(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::SelectiveCopy(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::AddingProblem(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::SortingProblem(c) | TaskConfig::InductionHeads(c) => {
                [c.n_train, c.n_valid, c.n_test]
            }
            TaskConfig::CrossSituation(c) => [c.n_train, c.n_valid, c.n_test],
            TaskConfig::AssociativeRecall(c) => [c.n_train, c.n_valid, c.n_test],
        };
        Some(c)
    }

    /// Every violated invariant, as human-readable constraint strings.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut ck = Checker(Vec::new());
        match self {
            TaskConfig::SinusForecasting(c) | TaskConfig::ChaoticForecasting(c) => {
                ck.require(c.sequence_length >= 1, "sequence_length >= 1");
                let ratios = [c.training_ratio, c.validation_ratio, c.testing_ratio];
                ck.require(
                    ratios.iter().all(|r| r.is_finite() && *r > 0.0),
                    "ratios positive",
                );
                ck.require(
                    (ratios.iter().sum::<f64>() - 1.0).abs() <= 1e-9,
                    "ratios sum to 1",
                );
                if ck.0.is_empty() {
                    let lens = forecast_split_lengths(c);
                    ck.require(
                        lens.iter().all(|&l| l > c.forecast_length),
                        "every split length > forecast_length",
                    );
                }
            }
            TaskConfig::DiscretePostcasting(c) | TaskConfig::SimpleCopy(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 1, "sequence_length >= 1");
                ck.require(c.delay < c.sequence_length, "delay < sequence_length");
                ck.require(c.n_symbols >= 2, "n_symbols >= 2");
            }
            TaskConfig::ContinuousPostcasting(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 1, "sequence_length >= 1");
                ck.require(c.delay < c.sequence_length, "delay < sequence_length");
            }
            TaskConfig::DiscretePatternCompletion(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.n_symbols >= 2, "n_symbols >= 2");
                ck.require(c.base_length >= 1, "base_length >= 1");
                ck.require(
                    c.base_length <= c.sequence_length,
                    "base_length <= sequence_length",
                );
                ck.mask_ratio(c.mask_ratio);
            }
            TaskConfig::ContinuousPatternCompletion(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.base_length >= 1, "base_length >= 1");
                ck.require(
                    c.base_length <= c.sequence_length,
                    "base_length <= sequence_length",
                );
                ck.mask_ratio(c.mask_ratio);
            }
            TaskConfig::BracketMatching(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 2, "sequence_length >= 2");
                ck.require(c.sequence_length % 2 == 0, "sequence_length even");
                ck.require(c.max_depth >= 1, "max_depth >= 1");
            }
            TaskConfig::SelectiveCopy(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 1, "sequence_length >= 1");
                ck.require(c.n_symbols >= 2, "n_symbols >= 2");
                ck.require(c.n_markers >= 1, "n_markers >= 1");
                ck.require(
                    c.n_markers <= c.sequence_length,
                    "n_markers <= sequence_length",
                );
                ck.require(c.delay < c.sequence_length, "delay < sequence_length");
            }
            TaskConfig::AddingProblem(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 3, "sequence_length >= 3");
                ck.require(c.max_number >= 2, "max_number >= 2");
            }
            TaskConfig::SortingProblem(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 1, "sequence_length >= 1");
                ck.require(c.n_symbols >= 2, "n_symbols >= 2");
            }
            TaskConfig::InductionHeads(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.sequence_length >= 2, "sequence_length >= 2");
                ck.require(c.sequence_length % 2 == 0, "sequence_length even");
                ck.require(c.n_symbols >= 2, "n_symbols >= 2");
            }
            TaskConfig::CrossSituation(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.vocab("objects", &c.objects);
                ck.vocab("colors", &c.colors);
                ck.vocab("positions", &c.positions);
            }
            TaskConfig::AssociativeRecall(c) => {
                ck.counts(c.n_train, c.n_valid, c.n_test);
                ck.require(c.n_symbols >= 2, "n_symbols >= 2");
                ck.require(c.num_pairs >= 1, "num_pairs >= 1");
                ck.require(c.num_pairs <= c.n_symbols, "num_pairs <= n_symbols");
                ck.require(
                    2 * c.num_pairs < c.sequence_length,
                    "num_pairs*2 + 1 <= sequence_length",
                );
            }
        }
        if ck.0.is_empty() {
            Ok(())
        } else {
            Err(ck.0)
        }
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        self.validate().map_err(ConfigError::Invalid)
    }
}

/// Train/valid/test lengths of a forecasting timeline; the test split absorbs rounding.
pub fn forecast_split_lengths(c: &ForecastConfig) -> [usize; 3] {
    let l = c.sequence_length as f64;
    let train = (l * c.training_ratio).round() as usize;
    let valid = (l * c.validation_ratio).round() as usize;
    let test = c.sequence_length.saturating_sub(train + valid);
    [train, valid, test]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn postcasting_small_preset() {
        let c = preset(TaskId::DiscretePostcasting, Difficulty::Small);
        assert_eq!(
            c,
            TaskConfig::DiscretePostcasting(SymbolDelayConfig {
                n_train: 100,
                n_valid: 20,
                n_test: 100,
                sequence_length: 50,
                delay: 5,
                n_symbols: 3
            })
        );
    }

    #[test]
    fn adding_medium_preset() {
        let c = preset(TaskId::AddingProblem, Difficulty::Medium);
        assert_eq!(
            c,
            TaskConfig::AddingProblem(AddingConfig {
                n_train: 1000,
                n_valid: 200,
                n_test: 1000,
                sequence_length: 20,
                max_number: 8
            })
        );
    }

    #[test]
    fn sinus_small_preset() {
        let TaskConfig::SinusForecasting(c) = preset(TaskId::SinusForecasting, Difficulty::Small)
        else {
            panic!("wrong variant")
        };
        assert_eq!(c.sequence_length, 200);
        assert_eq!(c.forecast_length, 5);
        assert_eq!(
            (c.training_ratio, c.validation_ratio, c.testing_ratio),
            (0.45, 0.1, 0.45)
        );
        assert_eq!(forecast_split_lengths(&c), [90, 20, 90]);
    }

    #[test]
    fn every_preset_validates() {
        for task in TaskId::ALL {
            for d in Difficulty::ALL {
                let c = preset(task, d);
                assert_eq!(c.task(), task);
                assert_eq!(c.validate(), Ok(()), "{task} {d}");
            }
        }
    }

    #[test]
    fn delay_boundary_is_rejected() {
        let c = TaskConfig::DiscretePostcasting(SymbolDelayConfig {
            n_train: 1,
            n_valid: 1,
            n_test: 1,
            sequence_length: 50,
            delay: 50,
            n_symbols: 3,
        });
        let errs = c.validate().unwrap_err();
        assert!(errs.contains(&"delay < sequence_length".to_string()));
    }

    #[test]
    fn ratios_must_sum_to_one() {
        let c = TaskConfig::SinusForecasting(ForecastConfig {
            sequence_length: 200,
            forecast_length: 5,
            training_ratio: 0.5,
            validation_ratio: 0.5,
            testing_ratio: 0.5,
        });
        let errs = c.validate().unwrap_err();
        assert!(errs.contains(&"ratios sum to 1".to_string()));
    }

    #[test]
    fn reports_every_violation() {
        let c = TaskConfig::AssociativeRecall(AssociativeRecallConfig {
            n_train: 0,
            n_valid: 1,
            n_test: 1,
            sequence_length: 6,
            num_pairs: 4,
            n_symbols: 3,
        });
        let errs = c.validate().unwrap_err();
        assert_eq!(errs.len(), 3, "{errs:?}");
    }

    #[test]
    fn names_round_trip_and_unknown_fails() {
        for t in TaskId::ALL {
            assert_eq!(t.name().parse::<TaskId>().unwrap(), t);
        }
        assert_eq!(
            "unknown".parse::<TaskId>(),
            Err(ConfigError::UnknownTask("unknown".into()))
        );
    }

    #[test]
    fn config_json_is_tagged_by_task() {
        let c = preset(TaskId::SimpleCopy, Difficulty::Small);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.starts_with(r#"{"task":"simple_copy""#), "{json}");
        let back: TaskConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
