//! Grid search over leaking rate, spectral radius and input scaling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use super::readout::{fit_readout, MaskedDesign};
use super::reservoir::{default_density, run_states, RawReservoir, Reservoir};
use super::EsnError;
use crate::config::Difficulty;
use crate::io::config_hash;
use crate::metrics::{score_split, EvalReport, RunMetadata};
use crate::model::{Dataset, Split};
use crate::rng::Seed;

/// Hyperparameter grids. Every combination of the first three lists is one
/// grid point; the ridge list is searched inside each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsnGrid {
    pub leaking_rates: Vec<f64>,
    pub spectral_radii: Vec<f64>,
    pub input_scalings: Vec<f64>,
    pub ridges: Vec<f64>,
}

impl Default for EsnGrid {
    fn default() -> Self {
        EsnGrid {
            leaking_rates: (1..=8).map(|k| k as f64 / 10.0).collect(),
            spectral_radii: (0..8).map(|k| (1 + 2 * k) as f64 / 10.0).collect(),
            input_scalings: vec![0.1, 1.0, 10.0],
            ridges: vec![0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2],
        }
    }
}

impl EsnGrid {
    /// Grid points in canonical order: leaking rate, then spectral radius,
    /// then input scaling.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &leaking_rate in &self.leaking_rates {
            for &spectral_radius in &self.spectral_radii {
                for &input_scaling in &self.input_scalings {
                    out.push(GridPoint {
                        leaking_rate,
                        spectral_radius,
                        input_scaling,
                    });
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.leaking_rates.len() * self.spectral_radii.len() * self.input_scalings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0 || self.ridges.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub leaking_rate: f64,
    pub spectral_radius: f64,
    pub input_scaling: f64,
}

/// Everything about a sweep that is fixed across grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_units: usize,
    /// Defaults to [`default_density`] of `n_units`.
    pub density: Option<f64>,
    pub bias_scaling: f64,
    /// Reservoir seed; also reported as the run seed.
    pub seed: Seed,
    pub budget: Option<u64>,
    pub difficulty: Option<Difficulty>,
}

impl SweepSpec {
    pub fn new(n_units: usize, seed: Seed) -> Self {
        SweepSpec {
            n_units,
            density: None,
            bias_scaling: 0.1,
            seed,
            budget: None,
            difficulty: None,
        }
    }

    pub fn density(&self) -> f64 {
        self.density
            .unwrap_or_else(|| default_density(self.n_units))
    }
}

/// Outcome of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub test_score: f64,
    pub n_evaluated: usize,
    pub validation_score: f64,
    pub ridge: f64,
}

/// Builds, runs, fits and scores one grid point.
pub fn evaluate_point(
    data: &Dataset,
    raw: &RawReservoir,
    point: GridPoint,
    ridges: &[f64],
) -> Result<PointResult, EsnError> {
    let res: Reservoir = raw.scale(
        point.leaking_rate,
        point.spectral_radius,
        point.input_scaling,
    );
    let n = res.n_units();
    let states = |s: &crate::model::Sample| run_states(&res, s.input.view());
    let train = MaskedDesign::collect(&data.train, n, states)?;
    let valid = MaskedDesign::collect(&data.valid, n, states)?;
    let readout = fit_readout(&train, &valid, &data.valid, ridges)?;
    drop(train);
    let preds = data
        .test
        .iter()
        .map(|s| Ok(readout.predict(states(s)?.view())))
        .collect::<Result<Vec<_>, EsnError>>()?;
    let (test_score, n_evaluated) = score_split(preds.iter().map(|p| p.view()), &data.test)?;
    Ok(PointResult {
        test_score,
        n_evaluated,
        validation_score: readout.validation_score,
        ridge: readout.ridge,
    })
}

/// Configuration key of a grid point, shared by every seed.
pub fn point_key(n_units: usize, p: &GridPoint) -> String {
    format!(
        "esn:n={n_units}:alpha={}:rho={}:sigma={}",
        p.leaking_rate, p.spectral_radius, p.input_scaling
    )
}

/// Evaluates every grid point of `grid` on `data` and returns one test-split
/// report per point, in grid order. Points run in parallel on the current
/// rayon pool; each point is sequential, so results do not depend on the
/// number of threads. A failing point yields a report carrying the error.
pub fn esn_sweep(
    data: &Dataset,
    grid: &EsnGrid,
    spec: &SweepSpec,
) -> Result<Vec<EvalReport>, EsnError> {
    esn_sweep_missing(data, grid, spec, &BTreeSet::new())
}

/// Like [`esn_sweep`] but skips grid points whose [`point_key`] is in `done`.
pub fn esn_sweep_missing(
    data: &Dataset,
    grid: &EsnGrid,
    spec: &SweepSpec,
    done: &BTreeSet<String>,
) -> Result<Vec<EvalReport>, EsnError> {
    if grid.is_empty() {
        return Err(EsnError::InvalidConfig(
            "every grid list must be non-empty".into(),
        ));
    }
    let todo: Vec<GridPoint> = grid
        .points()
        .into_iter()
        .filter(|p| !done.contains(&point_key(spec.n_units, p)))
        .collect();
    if todo.is_empty() {
        return Ok(Vec::new());
    }
    let density = spec.density();
    let raw = RawReservoir::draw(
        spec.n_units,
        data.d_in,
        density,
        spec.bias_scaling,
        spec.seed,
    );
    let hash = config_hash(&data.config);
    let reports = todo
        .into_par_iter()
        .map(|point| {
            let outcome = raw
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|raw| evaluate_point(data, raw, point, &grid.ridges));
            let mut params = BTreeMap::from([
                ("leaking_rate".to_string(), point.leaking_rate),
                ("spectral_radius".to_string(), point.spectral_radius),
                ("input_scaling".to_string(), point.input_scaling),
                ("n_units".to_string(), spec.n_units as f64),
                ("density".to_string(), density),
                ("bias_scaling".to_string(), spec.bias_scaling),
            ]);
            let metadata = |params| RunMetadata {
                model: "esn".into(),
                difficulty: spec.difficulty,
                seed: spec.seed.0,
                budget: spec.budget,
                config_hash: hash.clone(),
                config_key: point_key(spec.n_units, &point),
                params,
            };
            match outcome {
                Ok(r) => {
                    params.insert("ridge".into(), r.ridge);
                    EvalReport {
                        task: data.task,
                        split: Split::Test,
                        metric: data.metric,
                        score: Some(r.test_score),
                        n_evaluated: r.n_evaluated,
                        validation_score: Some(r.validation_score),
                        metadata: metadata(params),
                        error: None,
                    }
                }
                Err(e) => EvalReport {
                    task: data.task,
                    split: Split::Test,
                    metric: data.metric,
                    score: None,
                    n_evaluated: 0,
                    validation_score: None,
                    metadata: metadata(params),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(reports)
}
