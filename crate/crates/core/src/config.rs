//! Run parameters for COA and MCOA.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How often the water temperature is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemperatureMode {
    /// One temperature per iteration, shared by every crayfish.
    #[default]
    PerIteration,
    /// A fresh temperature for each crayfish.
    PerIndividual,
}

/// Parameters shared by both optimizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Food factor `C3`; the tearing threshold is `(C3 + 1) / 2`.
    pub food_factor: f64,
    pub seed: u64,
    /// Temperature sampling range in °C.
    pub temp_min: f64,
    pub temp_max: f64,
    /// Food-intake Gaussian: `c1 / (sigma * sqrt(2 pi)) * exp(-(temp - mu)^2 / (2 sigma^2))`.
    pub intake_c1: f64,
    pub intake_mu: f64,
    pub intake_sigma: f64,
    pub temperature_mode: TemperatureMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            max_iterations: 1000,
            food_factor: 3.0,
            seed: 0,
            temp_min: 20.0,
            temp_max: 35.0,
            intake_c1: 0.2,
            intake_mu: 25.0,
            intake_sigma: 3.0,
            temperature_mode: TemperatureMode::PerIteration,
        }
    }
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("population size must be at least 2"));
        }
        if self.max_iterations < 1 {
            return Err(Error::invalid("max iterations must be at least 1"));
        }
        if !(self.food_factor > 1.0) {
            return Err(Error::invalid("food factor C3 must exceed 1"));
        }
        if !(self.temp_min < self.temp_max) {
            return Err(Error::invalid("temp_min must be below temp_max"));
        }
        if !(self.intake_sigma > 0.0) {
            return Err(Error::invalid("intake sigma must be positive"));
        }
        Ok(())
    }
}

/// Toggles for the three MCOA strategies. All off reproduces plain COA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategies {
    pub opposition: bool,
    pub centroid: bool,
    pub adaptive_competition: bool,
}

impl Strategies {
    pub const ALL: Strategies = Strategies {
        opposition: true,
        centroid: true,
        adaptive_competition: true,
    };
    pub const NONE: Strategies = Strategies {
        opposition: false,
        centroid: false,
        adaptive_competition: false,
    };
}

impl Default for Strategies {
    fn default() -> Self {
        Self::ALL
    }
}

/// MCOA configuration: the shared run parameters plus strategy controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McoaConfig {
    pub run: RunConfig,
    pub strategies: Strategies,
    /// Also apply opposition selection after every iteration, not only at
    /// initialization.
    pub opposition_every_iteration: bool,
    /// Inclusive subset-size range for the small centroid `X_pmean`.
    pub p_subset: (usize, usize),
    /// Inclusive lower bound of the subset size for `X_qmean`; the upper
    /// bound is always the population size.
    pub q_subset_min: usize,
}

impl Default for McoaConfig {
    fn default() -> Self {
        Self::from_run(RunConfig::default())
    }
}

impl McoaConfig {
    pub fn from_run(run: RunConfig) -> Self {
        Self {
            run,
            strategies: Strategies::ALL,
            opposition_every_iteration: false,
            p_subset: (2, 5),
            q_subset_min: 10,
        }
    }

    pub fn with_strategies(mut self, strategies: Strategies) -> Self {
        self.strategies = strategies;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.run.validate()?;
        let (lo, hi) = self.p_subset;
        if lo < 1 || lo > hi {
            return Err(Error::invalid(format!("bad p-subset range [{lo}, {hi}]")));
        }
        if self.q_subset_min < 1 {
            return Err(Error::invalid("q-subset minimum must be at least 1"));
        }
        Ok(())
    }

    /// p-subset range clipped to a population of `n`.
    pub(crate) fn p_range(&self, n: usize) -> (usize, usize) {
        let hi = self.p_subset.1.min(n);
        (self.p_subset.0.min(hi), hi)
    }

    /// q-subset range `{min(q_min, n)..n}`.
    pub(crate) fn q_range(&self, n: usize) -> (usize, usize) {
        (self.q_subset_min.min(n), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_protocol() {
        let c = RunConfig::default();
        assert_eq!(c.population_size, 50);
        assert_eq!(c.max_iterations, 1000);
        assert_eq!(c.food_factor, 3.0);
        c.validate().unwrap();
        McoaConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            RunConfig {
                population_size: 1,
                ..Default::default()
            },
            RunConfig {
                max_iterations: 0,
                ..Default::default()
            },
            RunConfig {
                food_factor: 1.0,
                ..Default::default()
            },
            RunConfig {
                temp_min: 35.0,
                temp_max: 20.0,
                ..Default::default()
            },
            RunConfig {
                intake_sigma: 0.0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn subset_ranges_collapse_for_small_populations() {
        let cfg = McoaConfig::default();
        assert_eq!(cfg.p_range(4), (2, 4));
        assert_eq!(cfg.q_range(4), (4, 4));
        assert_eq!(cfg.p_range(50), (2, 5));
        assert_eq!(cfg.q_range(50), (10, 50));
    }
}
