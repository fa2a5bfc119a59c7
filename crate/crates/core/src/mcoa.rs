//! Multi-strategy enhanced COA (MCOA).
//!
//! Three changes on top of the baseline, each of which can be switched off:
//!
//! * refractive opposition: after initialization every crayfish is mirrored
//!   through `K * (upper + lower)` and the better of the pair is kept;
//! * centroid-guided exploration: the summer-resort move targets one of six
//!   anchors (global best, local best, cave, population mean and the means
//!   of two random subsets) instead of always the cave;
//! * adaptive competition: the competition move becomes
//!   `X_shade + CC * (X_i - X_z) * randn`, with `CC` decaying to 0.
//!
//! Foraging is unchanged. With every strategy disabled the draw sequence is
//! exactly that of [`run_coa`](crate::coa::run_coa).

use std::time::Instant;

use crate::coa::{
    competition_update, competitor_index, run_iteration, summer_resort_update, CoaState, IterationReport, MemberRules,
    StepContext,
};
use crate::config::McoaConfig;
use crate::error::{Error, Result};
use crate::objective::{sanitized_eval, Objective};
use crate::population::{Individual, Population};
use crate::result::{ConvergenceTrace, ReplicateResult};
use crate::rng::RngStream;
use crate::schedule::cc_schedule;
use crate::space::SearchSpace;

/// `K * (upper + lower) - x` for explicit `K`, unclamped.
pub fn refractive_reverse(x: &[f64], space: &SearchSpace, k: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(k)
        .zip(space.lower().iter().zip(space.upper()))
        .map(|((xi, ki), (lo, hi))| ki * (hi + lo) - xi)
        .collect()
}

/// Refractive opposite of `x` with a fresh `K ~ U[0,1)^dim`, clamped.
pub fn refractive_opposition(x: &[f64], space: &SearchSpace, rng: &mut RngStream) -> Vec<f64> {
    let k: Vec<f64> = (0..x.len()).map(|_| rng.uniform()).collect();
    let mut out = refractive_reverse(x, space, &k);
    space.clamp_in_place(&mut out);
    out
}

/// Replaces each member by its refractive opposite when the opposite is
/// strictly better; ties keep the original. Unevaluated members are
/// evaluated first. Updates both best trackers.
pub fn opposition_select<O: Objective + ?Sized>(
    pop: &mut Population,
    objective: &O,
    space: &SearchSpace,
    rng: &mut RngStream,
) {
    for member in &mut pop.members {
        if !member.fitness_valid {
            member.fitness = sanitized_eval(objective, &member.position);
            member.fitness_valid = true;
        }
        let reverse = refractive_opposition(&member.position, space, rng);
        let fitness = sanitized_eval(objective, &reverse);
        if fitness < member.fitness {
            *member = Individual::evaluated(reverse, fitness);
        }
    }
    pop.refresh_bests();
}

/// The six exploration anchors, in fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    pub candidates: [Vec<f64>; 6],
}

impl CentroidSet {
    pub const GLOBAL_BEST: usize = 0;
    pub const LOCAL_BEST: usize = 1;
    pub const SHADE: usize = 2;
    pub const MEAN: usize = 3;
    pub const P_MEAN: usize = 4;
    pub const Q_MEAN: usize = 5;

    pub fn get(&self, k: usize) -> &[f64] {
        &self.candidates[k]
    }
}

fn mean_of<'a>(dim: usize, points: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    let mut count = 0usize;
    for p in points {
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
        count += 1;
    }
    sum.iter().map(|s| s / count as f64).collect()
}

fn subset_mean(pop: &Population, rng: &mut RngStream, (lo, hi): (usize, usize)) -> Vec<f64> {
    let size = rng.int_inclusive(lo, hi);
    let picked = rng.sample_indices(pop.len(), size);
    mean_of(pop.dim(), picked.iter().map(|&i| pop.members[i].position.as_slice()))
}

/// Builds `{X_G, X_L, X_shade, X_mean, X_pmean, X_qmean}`. Subset sizes are
/// drawn uniformly from the configured ranges; subsets are sampled without
/// replacement.
pub fn build_centroid_set(pop: &Population, shade: &[f64], rng: &mut RngStream, cfg: &McoaConfig) -> CentroidSet {
    let mean = mean_of(pop.dim(), pop.members.iter().map(|m| m.position.as_slice()));
    let p_mean = subset_mean(pop, rng, cfg.p_range(pop.len()));
    let q_mean = subset_mean(pop, rng, cfg.q_range(pop.len()));
    CentroidSet {
        candidates: [
            pop.global_best.position.clone(),
            pop.local_best.position.clone(),
            shade.to_vec(),
            mean,
            p_mean,
            q_mean,
        ],
    }
}

/// Moves toward a uniformly chosen anchor: `X + C2 * r (X_central(k) - X)`.
/// Returns the clamped position and the 0-based anchor index.
pub fn centroid_exploration_update(
    x: &[f64],
    centroids: &CentroidSet,
    c2: f64,
    rng: &mut RngStream,
    space: &SearchSpace,
) -> (Vec<f64>, usize) {
    let k = rng.int_inclusive(0, 5);
    let anchor = centroids.get(k);
    let mut out: Vec<f64> = x
        .iter()
        .zip(anchor)
        .map(|(xi, ai)| xi + c2 * rng.uniform() * (ai - xi))
        .collect();
    space.clamp_in_place(&mut out);
    (out, k)
}

/// `X_shade + CC * (X_i - X_z) * n` for explicit normals, unclamped.
pub fn adaptive_competition_move(shade: &[f64], cc: f64, x_i: &[f64], x_z: &[f64], normals: &[f64]) -> Vec<f64> {
    shade
        .iter()
        .zip(x_i.iter().zip(x_z))
        .zip(normals)
        .map(|((s, (a, b)), n)| s + cc * (a - b) * n)
        .collect()
}

/// Adaptive competition against a random crayfish with one standard normal
/// per coordinate and `CC = cc_schedule(t, T)`.
pub fn adaptive_competition_update(
    i: usize,
    pop: &Population,
    shade: &[f64],
    cc: f64,
    rng: &mut RngStream,
    space: &SearchSpace,
) -> Vec<f64> {
    let z = competitor_index(rng, pop.len());
    let (x_i, x_z) = (&pop.members[i].position, &pop.members[z].position);
    let mut out: Vec<f64> = shade
        .iter()
        .zip(x_i.iter().zip(x_z))
        .map(|(s, (a, b))| s + cc * (a - b) * rng.standard_normal())
        .collect();
    space.clamp_in_place(&mut out);
    out
}

struct McoaRules<'a> {
    cfg: &'a McoaConfig,
    // Built on first use within an iteration.
    centroids: Option<CentroidSet>,
}

impl MemberRules for McoaRules<'_> {
    fn begin_iteration(&mut self) {
        self.centroids = None;
    }

    fn explore(&mut self, ctx: &StepContext<'_>, i: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        let x = &ctx.pop.members[i].position;
        if !self.cfg.strategies.centroid {
            return Ok(summer_resort_update(x, ctx.shade, ctx.c2, rng, ctx.space));
        }
        let centroids = self
            .centroids
            .get_or_insert_with(|| build_centroid_set(ctx.pop, ctx.shade, rng, self.cfg));
        Ok(centroid_exploration_update(x, centroids, ctx.c2, rng, ctx.space).0)
    }

    fn compete(&mut self, ctx: &StepContext<'_>, i: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        if !self.cfg.strategies.adaptive_competition {
            return Ok(competition_update(i, ctx.pop, ctx.shade, rng, ctx.space));
        }
        let cc = cc_schedule(ctx.t, ctx.max_iterations)?;
        Ok(adaptive_competition_update(i, ctx.pop, ctx.shade, cc, rng, ctx.space))
    }
}

fn mcoa_step<O: Objective + ?Sized>(
    state: &mut CoaState,
    objective: &O,
    cfg: &McoaConfig,
    forced_temperature: Option<f64>,
) -> Result<IterationReport> {
    let mut rules = McoaRules { cfg, centroids: None };
    let report = run_iteration(state, objective, &mut rules, forced_temperature)?;
    if cfg.strategies.opposition && cfg.opposition_every_iteration {
        opposition_select(&mut state.pop, objective, &state.space, &mut state.rng);
    }
    Ok(report)
}

/// One MCOA iteration: baseline dispatch with the enabled strategies
/// substituted for exploration and competition.
pub fn mcoa_iteration<O: Objective + ?Sized>(
    state: &mut CoaState,
    objective: &O,
    cfg: &McoaConfig,
) -> Result<IterationReport> {
    mcoa_step(state, objective, cfg, None)
}

/// One MCOA iteration with the temperature pinned for every member.
pub fn mcoa_iteration_at_temperature<O: Objective + ?Sized>(
    state: &mut CoaState,
    objective: &O,
    cfg: &McoaConfig,
    temperature: f64,
) -> Result<IterationReport> {
    mcoa_step(state, objective, cfg, Some(temperature))
}

/// Initial MCOA state: uniform population, evaluated, then opposition
/// selection when enabled.
pub fn mcoa_initial_state<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    cfg: &McoaConfig,
) -> Result<CoaState> {
    cfg.validate()?;
    let mut state = CoaState::new(objective, space.clone(), cfg.run.clone())?;
    if cfg.strategies.opposition {
        let CoaState { pop, space, rng, .. } = &mut state;
        opposition_select(pop, objective, space, rng);
    }
    Ok(state)
}

/// Runs MCOA for `cfg.run.max_iterations` iterations.
pub fn run_mcoa<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    cfg: &McoaConfig,
) -> Result<ReplicateResult> {
    if objective.dim() != space.dim() {
        return Err(Error::invalid("objective and search space dimensions differ"));
    }
    let start = Instant::now();
    let mut state = mcoa_initial_state(objective, space, cfg)?;
    let mut trace = ConvergenceTrace::default();
    while !state.is_finished() {
        let report = mcoa_iteration(&mut state, objective, cfg)?;
        trace.push(report.iteration, state.pop.global_best.fitness);
    }
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(ReplicateResult {
        seed: cfg.run.seed,
        best_position: state.pop.global_best.position,
        best_fitness: state.pop.global_best.fitness,
        trace,
        wall_time_s,
    })
}
