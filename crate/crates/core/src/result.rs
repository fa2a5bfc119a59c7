use serde::{Deserialize, Serialize};

/// Global-best cost after each iteration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub points: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_fitness: f64,
}

impl ConvergenceTrace {
    pub fn push(&mut self, iteration: usize, best_fitness: f64) {
        self.points.push(TracePoint {
            iteration,
            best_fitness,
        });
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].best_fitness <= w[0].best_fitness)
    }
}

/// Outcome of one seeded optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub seed: u64,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub trace: ConvergenceTrace,
    /// Wall-clock seconds spent inside the optimizer.
    pub wall_time_s: f64,
}

impl ReplicateResult {
    /// True when both runs found the same optimum along the same trace,
    /// bit for bit. Timing is ignored.
    pub fn same_outcome(&self, other: &ReplicateResult) -> bool {
        let bits = |t: &ConvergenceTrace| -> Vec<(usize, u64)> {
            t.points
                .iter()
                .map(|p| (p.iteration, p.best_fitness.to_bits()))
                .collect()
        };
        self.seed == other.seed
            && self.best_fitness.to_bits() == other.best_fitness.to_bits()
            && self
                .best_position
                .iter()
                .map(|v| v.to_bits())
                .eq(other.best_position.iter().map(|v| v.to_bits()))
            && bits(&self.trace) == bits(&other.trace)
    }
}
