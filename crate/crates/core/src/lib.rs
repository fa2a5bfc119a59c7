//! Crayfish optimization (COA), its multi-strategy enhancement (MCOA), and
//! the UAV and grid path-planning scenarios used to benchmark them.

// Validation uses `!(a < b)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod coa;
pub mod config;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod mcoa;
pub mod objective;
pub mod population;
pub mod result;
pub mod rng;
pub mod schedule;
pub mod space;
pub mod uav;

pub use coa::{run_coa, CoaState};
pub use config::{McoaConfig, RunConfig, Strategies, TemperatureMode};
pub use error::{Error, Result};
pub use mcoa::run_mcoa;
pub use objective::{Objective, Sphere};
pub use population::{Individual, Population};
pub use result::{ConvergenceTrace, ReplicateResult};
pub use rng::RngStream;
pub use space::{clamp_to_bounds, SearchSpace};
