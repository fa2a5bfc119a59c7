//! Individuals, populations and best-so-far tracking.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::objective::{sanitized_eval, Objective};
use crate::rng::RngStream;
use crate::space::SearchSpace;

/// A position together with its cached cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub fitness_valid: bool,
}

impl Individual {
    pub fn unevaluated(position: Vec<f64>) -> Self {
        Self {
            position,
            fitness: f64::INFINITY,
            fitness_valid: false,
        }
    }

    pub fn evaluated(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            position,
            fitness,
            fitness_valid: true,
        }
    }
}

/// The crayfish population plus the global best (`X_G`) and the best of
/// the current iteration (`X_L`).
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub global_best: Individual,
    pub local_best: Individual,
}

impl Population {
    /// Wraps unevaluated members; best trackers start at `+inf`.
    pub fn new(members: Vec<Individual>) -> Self {
        let placeholder = Individual::unevaluated(members.first().map(|m| m.position.clone()).unwrap_or_default());
        Self {
            members,
            global_best: placeholder.clone(),
            local_best: placeholder,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.global_best.position.len()
    }

    /// Recomputes `local_best` from the members' cached fitness and folds
    /// it into `global_best`. Ties keep the earlier member.
    pub fn refresh_bests(&mut self) {
        let Some(best) =
            self.members
                .iter()
                .filter(|m| m.fitness_valid)
                .reduce(|a, b| if b.fitness < a.fitness { b } else { a })
        else {
            return;
        };
        self.local_best = best.clone();
        if !self.global_best.fitness_valid || best.fitness < self.global_best.fitness {
            self.global_best = best.clone();
        }
    }
}

/// Draws `N` positions uniformly inside `space`.
pub fn init_population_uniform(space: &SearchSpace, config: &RunConfig, rng: &mut RngStream) -> Result<Population> {
    if config.population_size < 2 {
        return Err(Error::invalid("population size must be at least 2"));
    }
    let members = (0..config.population_size)
        .map(|_| {
            let position = space
                .lower()
                .iter()
                .zip(space.upper())
                .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
                .collect();
            Individual::unevaluated(position)
        })
        .collect();
    Ok(Population::new(members))
}

/// Evaluates every member and updates both best trackers. Non-finite costs
/// are recorded as `+inf`.
pub fn evaluate_and_track<O: Objective + ?Sized>(pop: &mut Population, objective: &O) {
    for m in &mut pop.members {
        m.fitness = sanitized_eval(objective, &m.position);
        m.fitness_valid = true;
    }
    pop.refresh_bests();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{FnObjective, Sphere};

    #[test]
    fn uniform_init_within_bounds_and_deterministic() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let cfg = RunConfig {
            population_size: 3,
            ..Default::default()
        };
        let a = init_population_uniform(&space, &cfg, &mut RngStream::new(9)).unwrap();
        let b = init_population_uniform(&space, &cfg, &mut RngStream::new(9)).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a
            .members
            .iter()
            .all(|m| space.contains(&m.position) && !m.fitness_valid));
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_init_many_seeds() {
        let space = SearchSpace::new(
            (0..30).map(|j| -(j as f64) - 1.0).collect(),
            (0..30).map(|j| 2.0 * j as f64 + 0.5).collect(),
        )
        .unwrap();
        let cfg = RunConfig::default();
        for seed in 0..100 {
            let pop = init_population_uniform(&space, &cfg, &mut RngStream::new(seed)).unwrap();
            assert_eq!(pop.len(), 50);
            for m in &pop.members {
                assert_eq!(m.position.len(), 30);
                assert!(space.contains(&m.position));
            }
        }
    }

    #[test]
    fn init_rejects_tiny_population() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let cfg = RunConfig {
            population_size: 1,
            ..Default::default()
        };
        assert!(init_population_uniform(&space, &cfg, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn degenerate_population_local_best() {
        let mut pop = Population::new(vec![Individual::unevaluated(vec![1.0, 1.0]); 4]);
        evaluate_and_track(&mut pop, &Sphere { dim: 2 });
        assert_eq!(pop.local_best.position, vec![1.0, 1.0]);
        assert_eq!(pop.local_best.fitness, 2.0);
        assert_eq!(pop.global_best.fitness, 2.0);
    }

    #[test]
    fn global_best_never_worsens() {
        let mut pop = Population::new(vec![Individual::unevaluated(vec![7.0]); 2]);
        pop.global_best = Individual::evaluated(vec![5.0], 5.0);
        evaluate_and_track(&mut pop, &FnObjective::new(1, |x: &[f64]| x[0]));
        assert_eq!(pop.local_best.fitness, 7.0);
        assert_eq!(pop.global_best.fitness, 5.0);
    }

    #[test]
    fn local_best_is_minimum() {
        let mut pop = Population::new(
            [3.0, 1.0, 2.0]
                .iter()
                .map(|&v| Individual::unevaluated(vec![v]))
                .collect(),
        );
        evaluate_and_track(&mut pop, &FnObjective::new(1, |x: &[f64]| x[0]));
        assert_eq!(pop.local_best.fitness, 1.0);
        assert_eq!(pop.global_best.position, vec![1.0]);
    }

    #[test]
    fn non_finite_fitness_becomes_infinity() {
        let mut pop = Population::new([0.0, 1.0].iter().map(|&v| Individual::unevaluated(vec![v])).collect());
        let f = FnObjective::new(1, |x: &[f64]| if x[0] == 0.0 { f64::NAN } else { 4.0 });
        evaluate_and_track(&mut pop, &f);
        assert_eq!(pop.members[0].fitness, f64::INFINITY);
        assert_eq!(pop.global_best.fitness, 4.0);
    }
}
