//! Fits an echo state network to the small discrete postcasting task with a
//! reservoir sized to the 10k parameter budget, for one hyperparameter point.
//!
//! ```bash
//! cargo run --release --example esn_postcasting -- [alpha] [rho] [sigma]
//! ```

use std::time::Instant;

use cogscale::budget::esn_units_for_budget;
use cogscale::esn::{default_density, evaluate_point, EsnGrid, GridPoint, RawReservoir};
use cogscale::{generate, preset, Difficulty, Seed, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let point = GridPoint {
        leaking_rate: args.first().copied().unwrap_or(0.8),
        spectral_radius: args.get(1).copied().unwrap_or(0.9),
        input_scaling: args.get(2).copied().unwrap_or(1.0),
    };

    let config = preset(TaskId::DiscretePostcasting, Difficulty::Small);
    let data = generate(&config, Seed(0))?;
    let n_units = esn_units_for_budget(data.d_out, 10_000)?;
    println!(
        "discrete postcasting SM: d_in={} d_out={} -> {} reservoir units for a 10k readout",
        data.d_in, data.d_out, n_units
    );

    let started = Instant::now();
    let raw = RawReservoir::draw(n_units, data.d_in, default_density(n_units), 0.1, Seed(0))?;
    println!(
        "reservoir drawn, raw spectral radius {:.4} ({:.2?})",
        raw.radius,
        started.elapsed()
    );

    let started = Instant::now();
    let result = evaluate_point(&data, &raw, point, &EsnGrid::default().ridges)?;
    println!(
        "alpha={} rho={} sigma={}: ridge={:e} valid error={:.4} test error={:.4} over {} steps ({:.2?})",
        point.leaking_rate,
        point.spectral_radius,
        point.input_scaling,
        result.ridge,
        result.validation_score,
        result.test_score,
        result.n_evaluated,
        started.elapsed()
    );
    Ok(())
}
