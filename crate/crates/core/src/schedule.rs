//! Iteration schedules and the environment model (temperature, food intake).

use std::f64::consts::PI;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::rng::RngStream;

fn check_iteration(t: usize, max_iterations: usize) -> Result<f64> {
    if max_iterations == 0 {
        return Err(Error::invalid("max iterations must be at least 1"));
    }
    if t > max_iterations {
        return Err(Error::invalid(format!(
            "iteration {t} exceeds max iterations {max_iterations}"
        )));
    }
    Ok(t as f64 / max_iterations as f64)
}

/// Exploration step coefficient `C2 = 2 - t/T`, decreasing from 2 to 1.
pub fn c2_schedule(t: usize, max_iterations: usize) -> Result<f64> {
    Ok(2.0 - check_iteration(t, max_iterations)?)
}

/// Adaptive competition coefficient `CC = (1 - t/T)^(2t/T)`, decreasing
/// from 1 to 0.
pub fn cc_schedule(t: usize, max_iterations: usize) -> Result<f64> {
    let u = check_iteration(t, max_iterations)?;
    Ok((1.0 - u).powf(2.0 * u))
}

/// Water temperature, uniform on `[temp_min, temp_max)`.
pub fn sample_temperature(rng: &mut RngStream, config: &RunConfig) -> f64 {
    rng.uniform_in(config.temp_min, config.temp_max)
}

/// Food intake `p` at temperature `temp`: a Gaussian bump peaking at
/// `intake_mu` with height `intake_c1 / (sigma sqrt(2 pi))`.
pub fn sample_food_intake(temp: f64, config: &RunConfig) -> Result<f64> {
    let sigma = config.intake_sigma;
    if !(sigma > 0.0) {
        return Err(Error::invalid("intake sigma must be positive"));
    }
    let z = temp - config.intake_mu;
    Ok(config.intake_c1 / (sigma * (2.0 * PI).sqrt()) * (-z * z / (2.0 * sigma * sigma)).exp())
}
