//! `cogscale` command line: dataset generation, ESN sweeps, aggregation and
//! radar data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cogscale::budget::{WidthTable, BUDGETS};
use cogscale::harness::{
    radar, read_reports, run_sweep, summarize, summary_csv, threads_from_env, HarnessError,
    Manifest, DEFAULT_RADAR_TASKS, RADAR_FILE, REPORTS_FILE, SUMMARY_FILE,
};
use cogscale::io::{sha256_hex, write_dataset, EXTENSION};
use cogscale::{generate, preset, Difficulty, Seed, TaskConfig, TaskId};

#[derive(Parser)]
#[command(
    name = "cogscale",
    version,
    about = "Synthetic cognitive benchmark engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset file and print its content hash.
    Generate {
        #[arg(long)]
        task: Option<TaskId>,
        #[arg(long)]
        difficulty: Option<Difficulty>,
        /// Task configuration file (JSON or TOML) instead of a preset.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file, or a directory to place `<task>_<difficulty>_<seed>.cgsd` in.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run ESN hyperparameter sweeps from a manifest or from flags.
    EsnSweep {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Restrict to these tasks.
        #[arg(long)]
        task: Vec<TaskId>,
        #[arg(long)]
        difficulty: Vec<Difficulty>,
        #[arg(long)]
        budget: Vec<u64>,
        #[arg(long)]
        seed: Vec<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit per-model, per-task peak accuracy for radar charts.
    Radar {
        /// Report files; defaults to `<out>/reports.jsonl`.
        reports: Vec<PathBuf>,
        #[arg(long)]
        task: Vec<TaskId>,
        /// Output directory or `.json` file.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Rebuild the summary table from report files.
    Aggregate {
        /// Report files; defaults to `<out>/reports.jsonl`.
        reports: Vec<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output directory or `.csv` file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| HarnessError::Run(format!("thread pool: {e}")))?;
        }
        match cli.command {
            Command::Generate {
                task,
                difficulty,
                config,
                seed,
                out,
            } => cmd_generate(task, difficulty, config, seed, &out),
            Command::EsnSweep {
                manifest,
                task,
                difficulty,
                budget,
                seed,
                out,
            } => cmd_esn_sweep(manifest, task, difficulty, budget, seed, out),
            Command::Radar { reports, task, out } => cmd_radar(reports, task, &out),
            Command::Aggregate {
                reports,
                manifest,
                out,
            } => cmd_aggregate(reports, manifest, out),
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_config(path: &Path) -> Result<TaskConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_generate(
    task: Option<TaskId>,
    difficulty: Option<Difficulty>,
    config: Option<PathBuf>,
    seed: u64,
    out: &Path,
) -> Result<ExitCode, HarnessError> {
    let difficulty_or_small = difficulty.unwrap_or(Difficulty::Small);
    let config = match (config, task) {
        (Some(path), _) => read_config(&path)?,
        (None, Some(task)) => preset(task, difficulty_or_small),
        (None, None) => return Err(usage("generate needs --task or --config")),
    };
    if let Err(violations) = config.validate() {
        return Err(usage(format!(
            "invalid configuration:\n  - {}",
            violations.join("\n  - ")
        )));
    }
    let task = config.task();
    let data = generate(&config, Seed(seed)).map_err(|e| HarnessError::Run(e.to_string()))?;
    let path = if out.is_dir() {
        out.join(format!(
            "{task}_{}_{seed}.{EXTENSION}",
            difficulty_or_small.tag().to_lowercase()
        ))
    } else {
        out.to_path_buf()
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io(parent))?;
    }
    let mut bytes = Vec::new();
    write_dataset(&data, &mut bytes).map_err(|e| HarnessError::Run(e.to_string()))?;
    fs::write(&path, &bytes).map_err(io(&path))?;
    let widths = WidthTable::esn_for(
        &[(task, difficulty_or_small, data.d_in, data.d_out)],
        &BUDGETS,
    );
    let sidecar = path.with_extension("widths.json");
    fs::write(&sidecar, widths.to_json()).map_err(io(&sidecar))?;
    println!("{}  {}", sha256_hex(&bytes), path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_esn_sweep(
    manifest_path: Option<PathBuf>,
    tasks: Vec<TaskId>,
    difficulties: Vec<Difficulty>,
    budgets: Vec<u64>,
    seeds: Vec<u64>,
    out: Option<PathBuf>,
) -> Result<ExitCode, HarnessError> {
    let mut manifest = match &manifest_path {
        Some(p) => Manifest::load(p)?,
        None if tasks.is_empty() => return Err(usage("esn-sweep needs --manifest or --task")),
        None => Manifest::new("cli"),
    };
    if !tasks.is_empty() {
        manifest.tasks = tasks;
    }
    if !difficulties.is_empty() {
        manifest.difficulties = difficulties;
    }
    if !budgets.is_empty() {
        manifest.budgets = budgets;
    }
    if !seeds.is_empty() {
        manifest.seeds = seeds;
    }
    manifest.validate()?;
    let out_dir = out
        .or_else(|| manifest.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(&manifest.experiment));
    let n_units = manifest.units().len();
    let mut finished = 0;
    let outcome = run_sweep(&manifest, &out_dir, |unit, computed, reused| {
        finished += 1;
        eprintln!(
            "[{finished}/{n_units}] {}/{}/budget={}/seed={}: {computed} computed, {reused} reused",
            unit.task, unit.difficulty, unit.budget, unit.seed
        );
    })?;
    print!("{}", summary_csv(&outcome.summary));
    if outcome.failed_points > 0 {
        eprintln!(
            "warning: {} grid points failed (see {REPORTS_FILE})",
            outcome.failed_points
        );
    }
    if !outcome.failed_groups.is_empty() {
        eprintln!(
            "error: no successful run for {}",
            outcome.failed_groups.join(", ")
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_reports(
    files: &[PathBuf],
    dir: &Path,
) -> Result<Vec<cogscale::metrics::EvalReport>, HarnessError> {
    let files = if files.is_empty() {
        vec![dir.join(REPORTS_FILE)]
    } else {
        files.to_vec()
    };
    let mut all = Vec::new();
    for f in &files {
        all.extend(read_reports(f)?);
    }
    Ok(all)
}

fn cmd_radar(
    files: Vec<PathBuf>,
    tasks: Vec<TaskId>,
    out: &Path,
) -> Result<ExitCode, HarnessError> {
    let is_file = out.extension().is_some_and(|e| e == "json");
    let dir = if is_file {
        out.parent().unwrap_or(Path::new("."))
    } else {
        out
    };
    let reports = load_reports(&files, dir)?;
    let tasks = if tasks.is_empty() {
        DEFAULT_RADAR_TASKS.to_vec()
    } else {
        tasks
    };
    let data = radar(&reports, &tasks);
    for m in &data.missing {
        eprintln!("missing: {m}");
    }
    let path = if is_file {
        out.to_path_buf()
    } else {
        out.join(RADAR_FILE)
    };
    let text = serde_json::to_string_pretty(&data).expect("radar serializes");
    fs::write(&path, text + "\n").map_err(io(&path))?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_aggregate(
    files: Vec<PathBuf>,
    manifest: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<ExitCode, HarnessError> {
    let manifest_dir = match &manifest {
        Some(p) => Manifest::load(p)?.out_dir,
        None => None,
    };
    let out = out
        .or(manifest_dir)
        .ok_or_else(|| usage("aggregate needs --out or --manifest"))?;
    let is_file = out.extension().is_some_and(|e| e == "csv");
    let dir = if is_file {
        out.parent().unwrap_or(Path::new("."))
    } else {
        &out
    };
    let reports = load_reports(&files, dir)?;
    let (rows, failed) = summarize(&reports);
    let csv = summary_csv(&rows);
    let path = if is_file {
        out.clone()
    } else {
        out.join(SUMMARY_FILE)
    };
    fs::write(&path, &csv).map_err(io(&path))?;
    print!("{csv}");
    if !failed.is_empty() {
        eprintln!("error: no successful run for {}", failed.join(", "));
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
