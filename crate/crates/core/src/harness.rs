//! Experiment orchestration behind the `cogscale` command line: manifests,
//! resumable ESN sweeps, summary tables and radar data.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::budget::{esn_units_for_budget, WidthTable};
use crate::config::{preset, Difficulty, TaskId};
use crate::esn::{esn_sweep_missing, EsnGrid, SweepSpec};
use crate::io::{config_hash, content_hash};
use crate::metrics::{aggregate, EvalReport, GroupKey, RunMetadata};
use crate::model::Split;
use crate::rng::Seed;
use crate::tasks::generate;

pub const MANIFEST_VERSION: u32 = 1;
pub const REPORTS_FILE: &str = "reports.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const WIDTHS_FILE: &str = "widths.json";
pub const RADAR_FILE: &str = "radar.json";
/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "COGSCALE_THREADS";

/// Tasks shown on the radar when no subset is given.
pub const DEFAULT_RADAR_TASKS: [TaskId; 6] = [
    TaskId::SimpleCopy,
    TaskId::SelectiveCopy,
    TaskId::AddingProblem,
    TaskId::SortingProblem,
    TaskId::InductionHeads,
    TaskId::BracketMatching,
];

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad invocation or manifest; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The run itself failed; exit code 1.
    #[error("{0}")]
    Run(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn default_tasks() -> Vec<TaskId> {
    TaskId::ALL.to_vec()
}

fn default_difficulties() -> Vec<Difficulty> {
    Difficulty::ALL.to_vec()
}

fn default_budgets() -> Vec<u64> {
    vec![1_000, 10_000]
}

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

fn default_bias_scaling() -> f64 {
    0.1
}

/// Reservoir settings shared by every sweep of a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnOptions {
    /// Connection probability; the size-dependent default when absent.
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default = "default_bias_scaling")]
    pub bias_scaling: f64,
}

impl Default for EsnOptions {
    fn default() -> Self {
        EsnOptions {
            density: None,
            bias_scaling: default_bias_scaling(),
        }
    }
}

/// A versioned experiment description, read from TOML.
///
/// ```toml
/// version = 1
/// experiment = "esn-small"
/// tasks = ["discrete_postcasting", "simple_copy"]
/// difficulties = ["small"]
/// budgets = [10000]
/// seeds = [0, 1, 2]
///
/// [grid]
/// leaking_rates = [0.5, 0.8]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub experiment: String,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<TaskId>,
    #[serde(default = "default_difficulties")]
    pub difficulties: Vec<Difficulty>,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<u64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub grid: EsnGrid,
    #[serde(default)]
    pub esn: EsnOptions,
    /// Output directory, relative to the manifest file.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Expected dataset content hashes keyed `task/difficulty/seed`.
    #[serde(default)]
    pub artifacts: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(experiment: &str) -> Self {
        Manifest {
            version: MANIFEST_VERSION,
            experiment: experiment.into(),
            tasks: default_tasks(),
            difficulties: default_difficulties(),
            budgets: default_budgets(),
            seeds: default_seeds(),
            grid: EsnGrid::default(),
            esn: EsnOptions::default(),
            out_dir: None,
            artifacts: BTreeMap::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let m: Manifest = toml::from_str(text)
            .map_err(|e| HarnessError::Usage(format!("invalid manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut m = Manifest::from_toml(&text)?;
        if let (Some(dir), Some(parent)) = (&m.out_dir, path.parent()) {
            if dir.is_relative() {
                m.out_dir = Some(parent.join(dir));
            }
        }
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut bad = Vec::new();
        if self.version != MANIFEST_VERSION {
            bad.push(format!(
                "unsupported manifest version {} (expected {MANIFEST_VERSION})",
                self.version
            ));
        }
        for (name, empty) in [
            ("tasks", self.tasks.is_empty()),
            ("difficulties", self.difficulties.is_empty()),
            ("budgets", self.budgets.is_empty()),
            ("seeds", self.seeds.is_empty()),
            ("grid", self.grid.is_empty()),
        ] {
            if empty {
                bad.push(format!("{name} must not be empty"));
            }
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            bad.push("seeds must be distinct".into());
        }
        if self.budgets.contains(&0) {
            bad.push("budgets must be positive".into());
        }
        if let Some(d) = self.esn.density {
            if !(d > 0.0 && d <= 1.0) {
                bad.push("esn.density must lie in (0, 1]".into());
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Usage(format!(
                "invalid manifest: {}",
                bad.join("; ")
            )))
        }
    }

    /// Every (task, difficulty, budget, seed) sweep, in canonical order.
    pub fn units(&self) -> Vec<SweepUnit> {
        let mut out = Vec::new();
        for &task in &self.tasks {
            for &difficulty in &self.difficulties {
                for &budget in &self.budgets {
                    for &seed in &self.seeds {
                        out.push(SweepUnit {
                            task,
                            difficulty,
                            budget,
                            seed,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One ESN sweep: a dataset, a reservoir size and a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SweepUnit {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub budget: u64,
    pub seed: u64,
}

impl SweepUnit {
    pub fn artifact_key(&self) -> String {
        format!("{}/{}/{}", self.task, self.difficulty, self.seed)
    }
}

/// Canonical report order: task, difficulty, budget, seed, configuration.
pub fn sort_reports(reports: &mut [EvalReport]) {
    reports.sort_by(|a, b| {
        let key = |r: &EvalReport| {
            (
                r.task,
                r.metadata.difficulty,
                r.metadata.budget,
                r.metadata.seed,
                r.metadata.model.clone(),
                r.metadata.config_key.clone(),
            )
        };
        key(a).cmp(&key(b))
    });
}

pub fn read_reports(path: &Path) -> Result<Vec<EvalReport>, HarnessError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let report = serde_json::from_str(&line).map_err(|e| {
            HarnessError::Usage(format!(
                "{}:{}: malformed report: {e}",
                path.display(),
                i + 1
            ))
        })?;
        out.push(report);
    }
    Ok(out)
}

/// Writes reports one JSON object per line, through a temporary file so a
/// crash never leaves a half-written report file behind.
pub fn write_reports(path: &Path, reports: &[EvalReport]) -> Result<(), HarnessError> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let file = File::create(&tmp).map_err(io_err(&tmp))?;
        let mut w = BufWriter::new(file);
        for r in reports {
            serde_json::to_writer(&mut w, r).expect("report serializes");
            w.write_all(b"\n").map_err(io_err(&tmp))?;
        }
        w.flush().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub task: TaskId,
    pub difficulty: Option<Difficulty>,
    pub budget: Option<u64>,
    pub best_overall: f64,
    pub mean: f64,
    pub std: f64,
}

/// Per (task, difficulty, budget) best-overall and selected-configuration
/// statistics. Groups without a single successful run are returned by name
/// in the second list.
pub fn summarize(reports: &[EvalReport]) -> (Vec<SummaryRow>, Vec<String>) {
    let mut groups: BTreeMap<(TaskId, Option<Difficulty>, Option<u64>), Vec<EvalReport>> =
        BTreeMap::new();
    for r in reports {
        groups
            .entry((r.task, r.metadata.difficulty, r.metadata.budget))
            .or_default()
            .push(r.clone());
    }
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for ((task, difficulty, budget), members) in groups {
        match aggregate(&members, &[GroupKey::Task]) {
            Ok(agg) => {
                let a = &agg[0];
                rows.push(SummaryRow {
                    task,
                    difficulty,
                    budget,
                    best_overall: a.best_overall,
                    mean: a.mean,
                    std: a.std,
                });
            }
            Err(_) => failed.push(format!(
                "{task}/{}/{}",
                difficulty.map_or("-", |d| d.name()),
                budget.map_or("-".into(), |b| b.to_string())
            )),
        }
    }
    (rows, failed)
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("task,difficulty,budget,best_overall,mean,std\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.task,
            r.difficulty.map_or("", |d| d.name()),
            r.budget.map_or(String::new(), |b| b.to_string()),
            r.best_overall,
            r.mean,
            r.std
        ));
    }
    out
}

/// Result of [`run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub out_dir: PathBuf,
    /// All reports of the manifest, canonically sorted.
    pub reports: Vec<EvalReport>,
    pub summary: Vec<SummaryRow>,
    /// Reports computed by this invocation (the rest were already on disk).
    pub computed: usize,
    /// Reports that carry an error.
    pub failed_points: usize,
    /// Summary groups with no successful run.
    pub failed_groups: Vec<String>,
}

fn infeasible_report(unit: &SweepUnit, d_out: usize, hash: String, err: String) -> EvalReport {
    EvalReport {
        task: unit.task,
        split: Split::Test,
        metric: unit.task.metric(),
        score: None,
        n_evaluated: 0,
        validation_score: None,
        metadata: RunMetadata {
            model: "esn".into(),
            difficulty: Some(unit.difficulty),
            seed: unit.seed,
            budget: Some(unit.budget),
            config_hash: hash,
            config_key: format!("esn:infeasible:d_out={d_out}"),
            params: BTreeMap::new(),
        },
        error: Some(err),
    }
}

/// Task, difficulty, budget and seed of the reports of one sweep.
type UnitKey = (TaskId, Option<Difficulty>, Option<u64>, u64);

/// Runs every sweep of `manifest` into `out_dir`.
///
/// Reports are appended to `reports.jsonl` as each sweep finishes, so an
/// interrupted run resumes by recomputing only the grid points whose
/// configuration key is missing for that task, difficulty, budget and seed.
/// At the end the report file is rewritten in canonical order and the
/// summary table and ESN width table are written next to it.
pub fn run_sweep(
    manifest: &Manifest,
    out_dir: &Path,
    mut progress: impl FnMut(&SweepUnit, usize, usize),
) -> Result<SweepOutcome, HarnessError> {
    manifest.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let reports_path = out_dir.join(REPORTS_FILE);
    let mut existing = if reports_path.exists() {
        read_reports(&reports_path)?
    } else {
        Vec::new()
    };
    let mut done: BTreeMap<UnitKey, BTreeSet<String>> = BTreeMap::new();
    for r in &existing {
        done.entry((
            r.task,
            r.metadata.difficulty,
            r.metadata.budget,
            r.metadata.seed,
        ))
        .or_default()
        .insert(r.metadata.config_key.clone());
    }

    let mut appender = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&reports_path)
        .map_err(io_err(&reports_path))?;
    let mut computed = 0;
    for unit in manifest.units() {
        let config = preset(unit.task, unit.difficulty);
        let data = generate(&config, Seed(unit.seed)).map_err(|e| {
            HarnessError::Run(format!("{}: generation failed: {e}", unit.artifact_key()))
        })?;
        if let Some(expected) = manifest.artifacts.get(&unit.artifact_key()) {
            let actual = content_hash(&data);
            if &actual != expected {
                return Err(HarnessError::Run(format!(
                    "{}: dataset hash {actual} does not match manifest artifact {expected}",
                    unit.artifact_key()
                )));
            }
        }
        let key = (
            unit.task,
            Some(unit.difficulty),
            Some(unit.budget),
            unit.seed,
        );
        let already = done.get(&key).cloned().unwrap_or_default();
        let new = match esn_units_for_budget(data.d_out, unit.budget) {
            Ok(n_units) => {
                let spec = SweepSpec {
                    n_units,
                    density: manifest.esn.density,
                    bias_scaling: manifest.esn.bias_scaling,
                    seed: Seed(unit.seed),
                    budget: Some(unit.budget),
                    difficulty: Some(unit.difficulty),
                };
                esn_sweep_missing(&data, &manifest.grid, &spec, &already)
                    .map_err(|e| HarnessError::Run(format!("{}: {e}", unit.artifact_key())))?
            }
            Err(e) => {
                let r = infeasible_report(&unit, data.d_out, config_hash(&config), e.to_string());
                if already.contains(&r.metadata.config_key) {
                    Vec::new()
                } else {
                    vec![r]
                }
            }
        };
        for r in &new {
            serde_json::to_writer(&mut appender, r).expect("report serializes");
            appender.write_all(b"\n").map_err(io_err(&reports_path))?;
        }
        appender.flush().map_err(io_err(&reports_path))?;
        computed += new.len();
        progress(&unit, new.len(), already.len());
        existing.extend(new);
    }
    drop(appender);

    let units: BTreeSet<_> = manifest
        .units()
        .iter()
        .map(|u| (u.task, Some(u.difficulty), Some(u.budget), u.seed))
        .collect();
    let mut reports: Vec<EvalReport> = existing
        .into_iter()
        .filter(|r| {
            units.contains(&(
                r.task,
                r.metadata.difficulty,
                r.metadata.budget,
                r.metadata.seed,
            ))
        })
        .collect();
    sort_reports(&mut reports);
    reports.dedup_by(|a, b| a.run_key() == b.run_key());
    write_reports(&reports_path, &reports)?;

    let (summary, failed_groups) = summarize(&reports);
    let summary_path = out_dir.join(SUMMARY_FILE);
    fs::write(&summary_path, summary_csv(&summary)).map_err(io_err(&summary_path))?;
    let widths_path = out_dir.join(WIDTHS_FILE);
    fs::write(&widths_path, WidthTable::esn(&manifest.budgets).to_json())
        .map_err(io_err(&widths_path))?;

    Ok(SweepOutcome {
        out_dir: out_dir.to_path_buf(),
        failed_points: reports.iter().filter(|r| !r.is_ok()).count(),
        reports,
        summary,
        computed,
        failed_groups,
    })
}

/// One axis of a radar chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarAxis {
    pub task: TaskId,
    pub best_overall: f64,
    /// `1 - best_overall`, clamped to [0, 1].
    pub accuracy: f64,
}

/// Radar axes of one model at one difficulty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarSeries {
    pub model: String,
    pub difficulty: Option<Difficulty>,
    pub axes: Vec<RadarAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarData {
    pub version: u32,
    pub tasks: Vec<TaskId>,
    pub series: Vec<RadarSeries>,
    /// `model/difficulty/task` combinations without a successful run.
    pub missing: Vec<String>,
}

/// Peak accuracy per model, difficulty and task: the best test score over
/// every budget, configuration and seed, turned into `1 - error`.
pub fn radar(reports: &[EvalReport], tasks: &[TaskId]) -> RadarData {
    let mut best: BTreeMap<(String, Option<Difficulty>), BTreeMap<TaskId, f64>> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.is_ok()) {
        let entry = best
            .entry((r.metadata.model.clone(), r.metadata.difficulty))
            .or_default()
            .entry(r.task)
            .or_insert(f64::INFINITY);
        *entry = entry.min(r.score.unwrap());
    }
    let mut missing = Vec::new();
    let series = best
        .into_iter()
        .map(|((model, difficulty), scores)| {
            let axes = tasks
                .iter()
                .filter_map(|&task| match scores.get(&task) {
                    Some(&b) => Some(RadarAxis {
                        task,
                        best_overall: b,
                        accuracy: (1.0 - b).clamp(0.0, 1.0),
                    }),
                    None => {
                        missing.push(format!(
                            "{model}/{}/{task}",
                            difficulty.map_or("-", |d| d.name())
                        ));
                        None
                    }
                })
                .collect();
            RadarSeries {
                model,
                difficulty,
                axes,
            }
        })
        .collect();
    RadarData {
        version: 1,
        tasks: tasks.to_vec(),
        series,
        missing,
    }
}

/// Thread count from `COGSCALE_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, HarnessError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}
