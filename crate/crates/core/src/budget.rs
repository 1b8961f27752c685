//! Parameter-budget matching: pick the widest model whose trainable
//! parameter count does not exceed a budget.

use serde::{Deserialize, Serialize};
use std::ops::RangeInclusive;
use thiserror::Error;

use crate::config::{preset, Difficulty, TaskId};
use crate::tasks::channel_layout;

/// The standard budgets.
pub const BUDGETS: [u64; 3] = [1_000, 10_000, 100_000];

/// Number of widths sampled by the monotonicity probe.
pub const PROBE_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetError {
    #[error(
        "infeasible budget {budget}: the smallest width {width} already needs {count} parameters"
    )]
    Infeasible {
        budget: u64,
        width: usize,
        count: u64,
    },
    #[error("count function is not monotone: count({w0}) = {c0} > count({w1}) = {c1}")]
    NonMonotone {
        w0: usize,
        c0: u64,
        w1: usize,
        c1: u64,
    },
    #[error("empty width range {lo}..={hi}")]
    EmptyRange { lo: usize, hi: usize },
}

/// A budget together with the model's width-to-count map.
pub struct BudgetSpec<F> {
    pub budget: u64,
    pub count_fn: F,
    pub width_range: RangeInclusive<usize>,
}

impl<F: Fn(usize) -> u64> BudgetSpec<F> {
    pub fn new(budget: u64, count_fn: F, width_range: RangeInclusive<usize>) -> Self {
        BudgetSpec {
            budget,
            count_fn,
            width_range,
        }
    }

    /// Largest width in range whose count does not exceed the budget.
    pub fn match_width(&self) -> Result<usize, BudgetError> {
        match_width(self)
    }
}

/// Evenly spaced probe widths covering both ends of the range.
fn probe_widths(lo: usize, hi: usize) -> Vec<usize> {
    let span = (hi - lo) as u128;
    let mut ws: Vec<usize> = (0..PROBE_POINTS as u128)
        .map(|k| lo + (span * k / (PROBE_POINTS as u128 - 1)) as usize)
        .collect();
    ws.dedup();
    ws
}

/// Integer binary search for the largest width with `count_fn(width) <= budget`.
pub fn match_width<F: Fn(usize) -> u64>(spec: &BudgetSpec<F>) -> Result<usize, BudgetError> {
    let (lo, hi) = (*spec.width_range.start(), *spec.width_range.end());
    if lo > hi {
        return Err(BudgetError::EmptyRange { lo, hi });
    }
    let count = &spec.count_fn;
    let probes: Vec<(usize, u64)> = probe_widths(lo, hi)
        .into_iter()
        .map(|w| (w, count(w)))
        .collect();
    for pair in probes.windows(2) {
        let ((w0, c0), (w1, c1)) = (pair[0], pair[1]);
        if c0 > c1 {
            return Err(BudgetError::NonMonotone { w0, c0, w1, c1 });
        }
    }
    let c_lo = probes[0].1;
    if c_lo > spec.budget {
        return Err(BudgetError::Infeasible {
            budget: spec.budget,
            width: lo,
            count: c_lo,
        });
    }
    // invariant: count(a) <= budget, and every width above b exceeds it
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a).div_ceil(2);
        if count(mid) <= spec.budget {
            a = mid;
        } else {
            b = mid - 1;
        }
    }
    Ok(a)
}

/// Trainable parameters of an ESN readout: one weight per unit plus a bias,
/// for each output channel.
pub fn esn_readout_count(d_out: usize, n_units: usize) -> u64 {
    d_out as u64 * (n_units as u64 + 1)
}

/// Reservoir size of an ESN whose readout fits the budget.
pub fn esn_units_for_budget(d_out: usize, budget: u64) -> Result<usize, BudgetError> {
    BudgetSpec::new(budget, |n| esn_readout_count(d_out, n), 1..=budget as usize).match_width()
}

/// One row of a width table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthEntry {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub d_in: usize,
    pub d_out: usize,
    pub budget: u64,
    pub width: usize,
    pub count: u64,
}

/// Width-for-budget table written as a JSON sidecar next to generated data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthTable {
    pub version: u32,
    pub model: String,
    pub count_formula: String,
    pub entries: Vec<WidthEntry>,
}

impl WidthTable {
    /// ESN reservoir sizes for every task preset and budget.
    pub fn esn(budgets: &[u64]) -> Self {
        let mut dims = Vec::new();
        for task in TaskId::ALL {
            for difficulty in Difficulty::ALL {
                let layout = channel_layout(&preset(task, difficulty));
                dims.push((task, difficulty, layout.d_in(), layout.d_out()));
            }
        }
        WidthTable::esn_for(&dims, budgets)
    }

    /// ESN reservoir sizes for explicit `(task, difficulty, d_in, d_out)`
    /// rows. Infeasible budgets are left out.
    pub fn esn_for(dims: &[(TaskId, Difficulty, usize, usize)], budgets: &[u64]) -> Self {
        let mut entries = Vec::new();
        for &(task, difficulty, d_in, d_out) in dims {
            for &budget in budgets {
                if let Ok(width) = esn_units_for_budget(d_out, budget) {
                    entries.push(WidthEntry {
                        task,
                        difficulty,
                        d_in,
                        d_out,
                        budget,
                        width,
                        count: esn_readout_count(d_out, width),
                    });
                }
            }
        }
        WidthTable {
            version: 1,
            model: "esn".into(),
            count_formula: "d_out * (n_units + 1)".into(),
            entries,
        }
    }

    pub fn lookup(&self, task: TaskId, difficulty: Difficulty, budget: u64) -> Option<&WidthEntry> {
        self.entries
            .iter()
            .find(|e| e.task == task && e.difficulty == difficulty && e.budget == budget)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("width table serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
