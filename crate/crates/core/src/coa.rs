//! Baseline crayfish optimization (COA).
//!
//! Each iteration draws a water temperature. Above 30 °C a crayfish either
//! heads for the cave (summer resort, `rand < 0.5`) or fights another
//! crayfish for it (competition). At or below 30 °C it forages around the
//! global best, tearing large food before eating it.
//!
//! The cave is the midpoint of the global best `X_G` and the best member of
//! the current population `X_L`. Updates are synchronous: every new position
//! is computed from the population as it stood at the start of the
//! iteration, then the whole population is re-evaluated.

use std::f64::consts::PI;
use std::time::Instant;

use crate::config::{RunConfig, TemperatureMode};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::population::{evaluate_and_track, init_population_uniform, Population};
use crate::result::{ConvergenceTrace, ReplicateResult};
use crate::rng::RngStream;
use crate::schedule::{c2_schedule, sample_food_intake, sample_temperature};
use crate::space::SearchSpace;

/// Temperature above which crayfish seek shelter instead of foraging.
pub const HOT_THRESHOLD: f64 = 30.0;

/// Replaces a zero food fitness in the food-size ratio.
pub const FOOD_FITNESS_EPSILON: f64 = 1e-12;

/// Which update rule moved a crayfish during an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    SummerResort,
    Competition,
    Foraging,
}

/// Mutable state of one optimizer run.
#[derive(Debug, Clone)]
pub struct CoaState {
    pub pop: Population,
    pub space: SearchSpace,
    pub config: RunConfig,
    pub rng: RngStream,
    /// Iteration about to run, 1-based.
    pub t: usize,
}

impl CoaState {
    /// Seeds the stream, draws a uniform population and evaluates it.
    pub fn new<O: Objective + ?Sized>(objective: &O, space: SearchSpace, config: RunConfig) -> Result<Self> {
        config.validate()?;
        if objective.dim() != space.dim() {
            return Err(Error::invalid(format!(
                "objective dimension {} does not match search space dimension {}",
                objective.dim(),
                space.dim()
            )));
        }
        let mut rng = RngStream::new(config.seed);
        let mut pop = init_population_uniform(&space, &config, &mut rng)?;
        evaluate_and_track(&mut pop, objective);
        Ok(Self {
            pop,
            space,
            config,
            rng,
            t: 1,
        })
    }

    pub fn is_finished(&self) -> bool {
        self.t > self.config.max_iterations
    }
}

/// What happened during one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    /// Temperature seen by each member.
    pub temperatures: Vec<f64>,
    pub phases: Vec<Phase>,
}

/// Cave position `(X_G + X_L) / 2`.
pub fn shade_position(pop: &Population) -> Vec<f64> {
    pop.global_best
        .position
        .iter()
        .zip(&pop.local_best.position)
        .map(|(g, l)| 0.5 * (g + l))
        .collect()
}

/// `X + C2 * r (target - X)` with one draw per coordinate, unclamped.
pub fn summer_resort_move(x: &[f64], target: &[f64], c2: f64, draws: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(target)
        .zip(draws)
        .map(|((xi, ti), r)| xi + c2 * r * (ti - xi))
        .collect()
}

/// Summer resort: move toward the cave.
pub fn summer_resort_update(x: &[f64], shade: &[f64], c2: f64, rng: &mut RngStream, space: &SearchSpace) -> Vec<f64> {
    let draws: Vec<f64> = (0..x.len()).map(|_| rng.uniform()).collect();
    let mut out = summer_resort_move(x, shade, c2, &draws);
    space.clamp_in_place(&mut out);
    out
}

/// Random opponent index `round(rand * (N - 1))`, 0-based.
pub fn competitor_index(rng: &mut RngStream, n: usize) -> usize {
    (rng.uniform() * (n - 1) as f64).round() as usize
}

/// `X_i - X_z + X_shade`, unclamped.
pub fn competition_move(x_i: &[f64], x_z: &[f64], shade: &[f64]) -> Vec<f64> {
    x_i.iter().zip(x_z).zip(shade).map(|((a, b), s)| a - b + s).collect()
}

/// Competition for the cave against a randomly chosen crayfish (which may
/// be `i` itself).
pub fn competition_update(
    i: usize,
    pop: &Population,
    shade: &[f64],
    rng: &mut RngStream,
    space: &SearchSpace,
) -> Vec<f64> {
    let z = competitor_index(rng, pop.len());
    let mut out = competition_move(&pop.members[i].position, &pop.members[z].position, shade);
    space.clamp_in_place(&mut out);
    out
}

/// Food size `Q = C3 * draw * fitness_i / fitness_food` for an explicit draw.
pub fn food_size_from_draw(fitness_i: f64, fitness_food: f64, draw: f64, c3: f64) -> f64 {
    let denom = if fitness_food == 0.0 {
        FOOD_FITNESS_EPSILON
    } else {
        fitness_food
    };
    c3 * draw * (fitness_i / denom)
}

pub fn food_size(fitness_i: f64, fitness_food: f64, rng: &mut RngStream, c3: f64) -> f64 {
    food_size_from_draw(fitness_i, fitness_food, rng.uniform(), c3)
}

/// Large food (`Q > (C3 + 1) / 2`) is torn before feeding.
pub fn food_is_large(q: f64, c3: f64) -> bool {
    q > (c3 + 1.0) / 2.0
}

/// Torn food `exp(-1/Q) * X_food`.
pub fn tear_food(food: &[f64], q: f64) -> Vec<f64> {
    let scale = (-1.0 / q).exp();
    food.iter().map(|f| scale * f).collect()
}

/// Alternate feeding on torn food; `cos_draw` and `sin_draw` are shared by
/// all coordinates.
pub fn feed_torn_move(x: &[f64], food: &[f64], p: f64, cos_draw: f64, sin_draw: f64) -> Vec<f64> {
    let c = (2.0 * PI * cos_draw).cos();
    let s = (2.0 * PI * sin_draw).sin();
    x.iter()
        .zip(food)
        .map(|(xi, fi)| xi + fi * p * c - fi * p * s)
        .collect()
}

/// Direct feeding `(X - X_food) p + p r X` with one draw per coordinate.
pub fn feed_direct_move(x: &[f64], food: &[f64], p: f64, draws: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(food)
        .zip(draws)
        .map(|((xi, fi), r)| (xi - fi) * p + p * r * xi)
        .collect()
}

/// Foraging toward the global best. Food larger than `(C3 + 1) / 2` is torn
/// first.
pub fn forage_update(
    i: usize,
    pop: &Population,
    p: f64,
    c3: f64,
    rng: &mut RngStream,
    space: &SearchSpace,
) -> Vec<f64> {
    let me = &pop.members[i];
    let food = &pop.global_best.position;
    let q = food_size(me.fitness, pop.global_best.fitness, rng, c3);
    // NaN (inf/inf) falls through to direct feeding.
    let mut out = if food_is_large(q, c3) {
        let torn = tear_food(food, q);
        let cos_draw = rng.uniform();
        let sin_draw = rng.uniform();
        feed_torn_move(&me.position, &torn, p, cos_draw, sin_draw)
    } else {
        let draws: Vec<f64> = (0..me.position.len()).map(|_| rng.uniform()).collect();
        feed_direct_move(&me.position, food, p, &draws)
    };
    space.clamp_in_place(&mut out);
    out
}

/// Read-only view of the population handed to the exploration and
/// competition rules.
pub(crate) struct StepContext<'a> {
    pub pop: &'a Population,
    pub space: &'a SearchSpace,
    pub shade: &'a [f64],
    pub t: usize,
    pub max_iterations: usize,
    pub c2: f64,
}

/// Pluggable exploration and competition rules; foraging is shared.
pub(crate) trait MemberRules {
    fn begin_iteration(&mut self) {}

    fn explore(&mut self, ctx: &StepContext<'_>, i: usize, rng: &mut RngStream) -> Result<Vec<f64>>;

    fn compete(&mut self, ctx: &StepContext<'_>, i: usize, rng: &mut RngStream) -> Result<Vec<f64>>;
}

pub(crate) struct BaselineRules;

impl MemberRules for BaselineRules {
    fn explore(&mut self, ctx: &StepContext<'_>, i: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        Ok(summer_resort_update(
            &ctx.pop.members[i].position,
            ctx.shade,
            ctx.c2,
            rng,
            ctx.space,
        ))
    }

    fn compete(&mut self, ctx: &StepContext<'_>, i: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        Ok(competition_update(i, ctx.pop, ctx.shade, rng, ctx.space))
    }
}

/// Shared iteration driver: temperature, dispatch, synchronous update,
/// evaluation.
pub(crate) fn run_iteration<O, R>(
    state: &mut CoaState,
    objective: &O,
    rules: &mut R,
    forced_temperature: Option<f64>,
) -> Result<IterationReport>
where
    O: Objective + ?Sized,
    R: MemberRules,
{
    let max_iterations = state.config.max_iterations;
    let t = state.t;
    if t > max_iterations {
        return Err(Error::invalid(format!(
            "run already finished ({max_iterations} iterations)"
        )));
    }
    let c2 = c2_schedule(t, max_iterations)?;
    let shade = shade_position(&state.pop);
    rules.begin_iteration();

    let shared_temp = match (forced_temperature, state.config.temperature_mode) {
        (Some(temp), _) => Some(temp),
        (None, TemperatureMode::PerIteration) => Some(sample_temperature(&mut state.rng, &state.config)),
        (None, TemperatureMode::PerIndividual) => None,
    };

    let n = state.pop.len();
    let mut next = Vec::with_capacity(n);
    let mut report = IterationReport {
        iteration: t,
        temperatures: Vec::with_capacity(n),
        phases: Vec::with_capacity(n),
    };
    {
        let ctx = StepContext {
            pop: &state.pop,
            space: &state.space,
            shade: &shade,
            t,
            max_iterations,
            c2,
        };
        let rng = &mut state.rng;
        for i in 0..n {
            let temp = match shared_temp {
                Some(temp) => temp,
                None => sample_temperature(rng, &state.config),
            };
            let phase = if temp > HOT_THRESHOLD {
                if rng.uniform() < 0.5 {
                    Phase::SummerResort
                } else {
                    Phase::Competition
                }
            } else {
                Phase::Foraging
            };
            let position = match phase {
                Phase::SummerResort => rules.explore(&ctx, i, rng)?,
                Phase::Competition => rules.compete(&ctx, i, rng)?,
                Phase::Foraging => {
                    let p = sample_food_intake(temp, &state.config)?;
                    forage_update(i, ctx.pop, p, state.config.food_factor, rng, ctx.space)
                }
            };
            next.push(position);
            report.temperatures.push(temp);
            report.phases.push(phase);
        }
    }

    for (member, position) in state.pop.members.iter_mut().zip(next) {
        member.position = position;
        member.fitness_valid = false;
    }
    evaluate_and_track(&mut state.pop, objective);
    state.t += 1;
    Ok(report)
}

/// One COA iteration with a sampled temperature.
pub fn coa_iteration<O: Objective + ?Sized>(state: &mut CoaState, objective: &O) -> Result<IterationReport> {
    run_iteration(state, objective, &mut BaselineRules, None)
}

/// One COA iteration with the temperature pinned for every member.
pub fn coa_iteration_at_temperature<O: Objective + ?Sized>(
    state: &mut CoaState,
    objective: &O,
    temperature: f64,
) -> Result<IterationReport> {
    run_iteration(state, objective, &mut BaselineRules, Some(temperature))
}

/// Runs baseline COA for `config.max_iterations` iterations.
pub fn run_coa<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    config: &RunConfig,
) -> Result<ReplicateResult> {
    let start = Instant::now();
    let mut state = CoaState::new(objective, space.clone(), config.clone())?;
    let mut trace = ConvergenceTrace::default();
    while !state.is_finished() {
        let report = coa_iteration(&mut state, objective)?;
        trace.push(report.iteration, state.pop.global_best.fitness);
    }
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(ReplicateResult {
        seed: config.seed,
        best_position: state.pop.global_best.position,
        best_fitness: state.pop.global_best.fitness,
        trace,
        wall_time_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Sphere;
    use crate::population::Individual;
    use approx::assert_abs_diff_eq;

    fn small_state(seed: u64) -> CoaState {
        let space = SearchSpace::uniform(3, -10.0, 10.0).unwrap();
        let cfg = RunConfig {
            population_size: 12,
            max_iterations: 20,
            seed,
            ..Default::default()
        };
        CoaState::new(&Sphere { dim: 3 }, space, cfg).unwrap()
    }

    #[test]
    fn shade_is_midpoint() {
        let mut pop = Population::new(vec![Individual::unevaluated(vec![0.0, 0.0]); 2]);
        pop.global_best = Individual::evaluated(vec![0.0, 0.0], 0.0);
        pop.local_best = Individual::evaluated(vec![2.0, 4.0], 1.0);
        assert_eq!(shade_position(&pop), vec![1.0, 2.0]);
        pop.local_best = pop.global_best.clone();
        assert_eq!(shade_position(&pop), vec![0.0, 0.0]);
    }

    #[test]
    fn summer_resort_fixed_point_and_full_step() {
        let x = [1.0, -2.0];
        assert_eq!(summer_resort_move(&x, &x, 1.7, &[0.3, 0.9]), x.to_vec());
        // C2 * r = 1 lands exactly on the target.
        let target = [4.0, 5.0];
        assert_eq!(summer_resort_move(&x, &target, 2.0, &[0.5, 0.5]), target.to_vec());
    }

    #[test]
    fn summer_resort_stays_in_step_envelope() {
        let space = SearchSpace::uniform(4, -100.0, 100.0).unwrap();
        let mut rng = RngStream::new(8);
        let x = [1.0, -3.0, 10.0, 0.0];
        let shade = [2.0, -5.0, 10.0, 7.0];
        for t in [1usize, 250, 500, 1000] {
            let c2 = c2_schedule(t, 1000).unwrap();
            for _ in 0..1000 {
                let out = summer_resort_update(&x, &shade, c2, &mut rng, &space);
                for j in 0..4 {
                    let far = x[j] + 2.0 * (shade[j] - x[j]);
                    let (lo, hi) = if far < x[j] { (far, x[j]) } else { (x[j], far) };
                    assert!(lo <= out[j] && out[j] <= hi);
                }
            }
        }
    }

    #[test]
    fn competition_arithmetic() {
        assert_eq!(competition_move(&[4.0], &[1.0], &[2.0]), vec![5.0]);
        assert_eq!(
            competition_move(&[3.0, 1.0], &[3.0, 1.0], &[0.5, 0.25]),
            vec![0.5, 0.25]
        );
    }

    #[test]
    fn competitor_index_covers_population() {
        let mut rng = RngStream::new(1);
        let n = 7;
        let mut seen = vec![0usize; n];
        for _ in 0..10_000 {
            let z = competitor_index(&mut rng, n);
            assert!(z < n);
            seen[z] += 1;
        }
        assert!(seen.iter().all(|&c| c > 0));
        // Rounding halves the weight of the two end indices.
        assert!(seen[0] < seen[3] && seen[n - 1] < seen[3]);
    }

    #[test]
    fn food_size_examples() {
        assert_eq!(food_size_from_draw(5.0, 5.0, 1.0, 3.0), 3.0);
        assert_eq!(food_size_from_draw(5.0, 5.0, 0.0, 3.0), 0.0);
        assert_eq!(food_size_from_draw(4.0, 2.0, 0.5, 3.0), 3.0);
        let q = food_size_from_draw(1.0, 0.0, 1.0, 3.0);
        assert!(q.is_finite() && q > 0.0);
        assert_abs_diff_eq!(q, 3.0 / FOOD_FITNESS_EPSILON, epsilon = 1.0);
    }

    #[test]
    fn tearing_factor() {
        let torn = tear_food(&[1.0, -2.0], 3.0);
        assert_abs_diff_eq!(torn[0], 0.716_531_310_573_789_2, epsilon = 1e-12);
        assert_abs_diff_eq!(torn[1], -2.0 * 0.716_531_310_573_789_2, epsilon = 1e-12);
        for q in [0.01, 0.5, 2.0, 3.0, 1e6] {
            let f = (-1.0f64 / q).exp();
            assert!(f > 0.0 && f < 1.0);
        }
    }

    #[test]
    fn direct_feed_origin_fixed_point() {
        assert_eq!(
            feed_direct_move(&[0.0, 0.0], &[0.0, 0.0], 0.02, &[0.4, 0.9]),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn tearing_branch_boundary_is_strict() {
        assert!(!food_is_large(2.0, 3.0));
        assert!(food_is_large(2.0 + 1e-12, 3.0));
        assert!(food_is_large(3.0, 3.0));
        assert!(!food_is_large(f64::NAN, 3.0));
    }

    #[test]
    fn hot_iteration_dispatch() {
        let mut state = small_state(4);
        let report = coa_iteration_at_temperature(&mut state, &Sphere { dim: 3 }, 35.0).unwrap();
        assert!(report.phases.iter().all(|p| *p != Phase::Foraging));
        assert!(report.phases.contains(&Phase::SummerResort));
        assert!(report.phases.contains(&Phase::Competition));
    }

    #[test]
    fn cool_iteration_forages() {
        let mut state = small_state(4);
        let report = coa_iteration_at_temperature(&mut state, &Sphere { dim: 3 }, 25.0).unwrap();
        assert!(report.phases.iter().all(|p| *p == Phase::Foraging));
    }

    #[test]
    fn hot_iteration_summer_resort_follows_member_draw() {
        // Replay the stream to find each member's dispatch draw: summer
        // resort members consume 3 uniforms, competitors consume one.
        let mut state = small_state(10);
        let mut replay = state.rng.clone();
        let report = coa_iteration_at_temperature(&mut state, &Sphere { dim: 3 }, 35.0).unwrap();
        for phase in report.phases {
            let r = replay.uniform();
            if r < 0.5 {
                assert_eq!(phase, Phase::SummerResort);
                for _ in 0..3 {
                    replay.uniform();
                }
            } else {
                assert_eq!(phase, Phase::Competition);
                replay.uniform();
            }
        }
    }

    #[test]
    fn iterations_keep_members_in_box_and_best_monotone() {
        let mut state = small_state(21);
        let mut prev = state.pop.global_best.fitness;
        while !state.is_finished() {
            let report = coa_iteration(&mut state, &Sphere { dim: 3 }).unwrap();
            assert_eq!(report.phases.len(), 12);
            assert!(state.pop.members.iter().all(|m| state.space.contains(&m.position)));
            assert!(state.pop.global_best.fitness <= prev);
            prev = state.pop.global_best.fitness;
        }
        assert!(coa_iteration(&mut state, &Sphere { dim: 3 }).is_err());
    }

    #[test]
    fn per_individual_temperatures_vary() {
        let space = SearchSpace::uniform(2, -5.0, 5.0).unwrap();
        let cfg = RunConfig {
            population_size: 20,
            max_iterations: 5,
            temperature_mode: TemperatureMode::PerIndividual,
            ..Default::default()
        };
        let mut state = CoaState::new(&Sphere { dim: 2 }, space, cfg).unwrap();
        let report = coa_iteration(&mut state, &Sphere { dim: 2 }).unwrap();
        let first = report.temperatures[0];
        assert!(report.temperatures.iter().any(|&t| t != first));
    }

    #[test]
    fn run_is_deterministic() {
        let space = SearchSpace::uniform(5, -100.0, 100.0).unwrap();
        let cfg = RunConfig {
            max_iterations: 50,
            seed: 77,
            ..Default::default()
        };
        let a = run_coa(&Sphere { dim: 5 }, &space, &cfg).unwrap();
        let b = run_coa(&Sphere { dim: 5 }, &space, &cfg).unwrap();
        assert!(a.same_outcome(&b));
        assert_eq!(a.trace.len(), 50);
        assert!(a.trace.is_non_increasing());
    }

    #[test]
    fn run_rejects_bad_inputs() {
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let zero_t = RunConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(run_coa(&Sphere { dim: 2 }, &space, &zero_t).is_err());
        assert!(run_coa(&Sphere { dim: 3 }, &space, &RunConfig::default()).is_err());
    }
}
