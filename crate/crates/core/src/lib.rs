//! Synthetic cognitive benchmark tasks with reproducible generation, masked
//! evaluation metrics, a portable dataset format and an echo state network
//! baseline with parameter-budget matching.

pub mod budget;
pub mod config;
pub mod esn;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod tasks;

pub use config::{preset, Difficulty, TaskConfig, TaskId};
pub use model::{Dataset, MetricKind, Sample, Slot, Split};
pub use rng::{derive_stream, RngStream, Seed};
pub use tasks::generate;
