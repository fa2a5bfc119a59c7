//! Seeded replicate batches, aggregate statistics and report files.
//!
//! Replicate `i` of an experiment always runs with seed `base_seed + i`, so
//! any single row can be reproduced in isolation. Reports land in
//! `<output>/<experiment>/` as `summary.csv`, `replicates.csv`, `run.json`
//! and, on request, `best_trajectory.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{McoaConfig, RunConfig, Strategies};
use crate::error::{Error, Result};
use crate::grid::{grid_path_length, load_grid_map_file, turning_points, GridScenario};
use crate::objective::{Objective, Sphere};
use crate::result::ReplicateResult;
use crate::space::SearchSpace;
use crate::uav::{UavScenario, DEFAULT_SCENARIO_JSON};
use crate::{run_coa, run_mcoa};

/// Exact header of `summary.csv`.
pub const SUMMARY_HEADER: &str = "algorithm,scenario,replicates,mean,optimal,worst,mean_time_s";
/// Exact header of `replicates.csv`.
pub const REPLICATES_HEADER: &str = "algorithm,scenario,replicate,seed,best_fitness,wall_time_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Coa,
    Mcoa {
        strategies: Strategies,
        opposition_every_iteration: bool,
    },
}

impl Algorithm {
    /// MCOA with every strategy enabled.
    pub const MCOA: Algorithm = Algorithm::Mcoa {
        strategies: Strategies::ALL,
        opposition_every_iteration: false,
    };

    /// `COA`, `MCOA`, or `MCOA[no-centroid,...]` for ablations.
    pub fn label(&self) -> String {
        match self {
            Algorithm::Coa => "COA".into(),
            Algorithm::Mcoa {
                strategies,
                opposition_every_iteration,
            } => {
                let mut tags = Vec::new();
                if !strategies.opposition {
                    tags.push("no-opposition");
                }
                if !strategies.centroid {
                    tags.push("no-centroid");
                }
                if !strategies.adaptive_competition {
                    tags.push("no-adaptive-competition");
                }
                if *opposition_every_iteration && strategies.opposition {
                    tags.push("opposition-every-iteration");
                }
                if tags.is_empty() {
                    "MCOA".into()
                } else {
                    format!("MCOA[{}]", tags.join(","))
                }
            }
        }
    }

    /// Lower-case, filesystem-friendly form of [`Algorithm::label`].
    pub fn slug(&self) -> String {
        slugify(&self.label())
    }
}

fn slugify(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

/// Where an experiment's objective comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioRef {
    /// `sum x_i^2` on `[-100, 100]^dim`.
    Sphere { dim: usize },
    /// The shipped UAV scenario, or one loaded from a JSON file.
    Uav { file: Option<PathBuf> },
    /// `grid20`, `grid40` or `grid60`.
    GridBuiltin { name: String },
    /// A grid map file.
    GridFile { path: PathBuf },
}

impl ScenarioRef {
    /// Parses the names accepted by `bench --scenario`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sphere" => Ok(ScenarioRef::Sphere { dim: 10 }),
            "uav" => Ok(ScenarioRef::Uav { file: None }),
            "grid20" | "grid40" | "grid60" => Ok(ScenarioRef::GridBuiltin { name: name.into() }),
            other => Err(Error::invalid(format!(
                "unknown scenario {other:?}; expected sphere, uav, grid20, grid40 or grid60"
            ))),
        }
    }

    pub fn load(&self) -> Result<LoadedScenario> {
        Ok(match self {
            ScenarioRef::Sphere { dim } => {
                if *dim == 0 {
                    return Err(Error::invalid("sphere dimension must be at least 1"));
                }
                LoadedScenario::Sphere(Sphere { dim: *dim })
            }
            ScenarioRef::Uav { file: None } => LoadedScenario::Uav(
                UavScenario::from_json(DEFAULT_SCENARIO_JSON).map_err(|source| Error::Json {
                    path: "scenarios/uav_default.json".into(),
                    source,
                })?,
            ),
            ScenarioRef::Uav { file: Some(path) } => LoadedScenario::Uav(UavScenario::load(path)?),
            ScenarioRef::GridBuiltin { name } => LoadedScenario::Grid(GridScenario::builtin(name)?),
            ScenarioRef::GridFile { path } => {
                let map = load_grid_map_file(path)?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "grid".into());
                LoadedScenario::Grid(GridScenario::new(name, map, GridScenario::DEFAULT_INTERIOR)?)
            }
        })
    }
}

/// A parsed, ready-to-evaluate scenario.
#[derive(Debug, Clone)]
pub enum LoadedScenario {
    Sphere(Sphere),
    Uav(UavScenario),
    Grid(GridScenario),
}

impl LoadedScenario {
    pub fn name(&self) -> String {
        match self {
            LoadedScenario::Sphere(s) => format!("sphere{}", s.dim),
            LoadedScenario::Uav(_) => "uav".into(),
            LoadedScenario::Grid(g) => g.name.clone(),
        }
    }

    pub fn objective(&self) -> &dyn Objective {
        match self {
            LoadedScenario::Sphere(s) => s,
            LoadedScenario::Uav(u) => u,
            LoadedScenario::Grid(g) => g,
        }
    }

    pub fn search_space(&self) -> SearchSpace {
        match self {
            LoadedScenario::Sphere(s) => SearchSpace::uniform(s.dim, -100.0, 100.0).expect("dim >= 1"),
            LoadedScenario::Uav(u) => u.search_space(),
            LoadedScenario::Grid(g) => g.search_space(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub algorithm: Algorithm,
    pub scenario: ScenarioRef,
    pub replicates: usize,
    pub base_seed: u64,
    /// Run parameters; `seed` is replaced per replicate.
    pub run: RunConfig,
    /// Worker threads; 0 means available parallelism.
    pub jobs: usize,
}

impl ExperimentSpec {
    /// Paper protocol defaults: 30 replicates, population 50, 1000
    /// iterations, base seed 0.
    pub fn new(algorithm: Algorithm, scenario: ScenarioRef) -> Self {
        Self {
            name: String::new(),
            algorithm,
            scenario,
            replicates: 30,
            base_seed: 0,
            run: RunConfig::default(),
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        self.run.validate()
    }

    /// Seed of replicate `index`.
    pub fn replicate_seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    fn run_config(&self, index: usize) -> RunConfig {
        self.run.clone().with_seed(self.replicate_seed(index))
    }
}

/// Runs one replicate against an already-loaded scenario.
pub fn run_replicate(spec: &ExperimentSpec, scenario: &LoadedScenario, index: usize) -> Result<ReplicateResult> {
    let objective = scenario.objective();
    let space = scenario.search_space();
    let run = spec.run_config(index);
    match spec.algorithm {
        Algorithm::Coa => run_coa(objective, &space, &run),
        Algorithm::Mcoa {
            strategies,
            opposition_every_iteration,
        } => {
            let cfg = McoaConfig {
                opposition_every_iteration,
                ..McoaConfig::from_run(run).with_strategies(strategies)
            };
            run_mcoa(objective, &space, &cfg)
        }
    }
}

/// Statistics over the best fitness of each replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub algorithm: String,
    pub scenario: String,
    pub replicates: usize,
    pub mean: f64,
    pub optimal: f64,
    pub worst: f64,
    pub mean_time_s: f64,
    /// One entry per replicate, in replicate order.
    pub rows: Vec<ReplicateResult>,
}

impl AggregateStats {
    /// Folds replicate results in index order.
    pub fn from_results(algorithm: &str, scenario: &str, rows: Vec<ReplicateResult>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("no replicate results to aggregate"));
        }
        let n = rows.len() as f64;
        let mut sum = 0.0;
        let mut time = 0.0;
        let mut optimal = f64::INFINITY;
        let mut worst = f64::NEG_INFINITY;
        for r in &rows {
            sum += r.best_fitness;
            time += r.wall_time_s;
            optimal = optimal.min(r.best_fitness);
            worst = worst.max(r.best_fitness);
        }
        // Rounding in the sum can push the mean a hair outside [min, max].
        let mean = (sum / n).clamp(optimal, worst);
        Ok(Self {
            algorithm: algorithm.into(),
            scenario: scenario.into(),
            replicates: rows.len(),
            mean,
            optimal,
            worst,
            mean_time_s: time / n,
            rows,
        })
    }

    /// `worst - optimal`.
    pub fn spread(&self) -> f64 {
        self.worst - self.optimal
    }

    /// The replicate with the lowest best fitness; ties keep the earliest.
    pub fn best(&self) -> &ReplicateResult {
        self.rows
            .iter()
            .reduce(|a, b| if b.best_fitness < a.best_fitness { b } else { a })
            .expect("at least one replicate")
    }
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub scenario: LoadedScenario,
    pub stats: AggregateStats,
}

fn worker_count(jobs: usize) -> usize {
    if jobs > 0 {
        jobs
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

/// Loads the scenario, runs every replicate (in parallel up to `spec.jobs`
/// workers) and aggregates by replicate index. A load failure aborts before
/// any replicate starts.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let scenario = spec.scenario.load()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(spec.jobs))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        (0..spec.replicates)
            .into_par_iter()
            .map(|i| run_replicate(spec, &scenario, i))
            .collect::<Result<Vec<_>>>()
    })?;
    let stats = AggregateStats::from_results(&spec.algorithm.label(), &scenario.name(), rows)?;
    Ok(ExperimentOutcome {
        spec: spec.clone(),
        scenario,
        stats,
    })
}

/// Rounds to 6 significant digits and prints the shortest form that parses
/// back to the rounded value.
pub fn format_6sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("valid float");
    format!("{rounded}")
}

/// `summary.csv` text: header plus one row per experiment.
pub fn summary_csv(stats: &[&AggregateStats]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&s.algorithm),
            csv_field(&s.scenario),
            s.replicates,
            format_6sig(s.mean),
            format_6sig(s.optimal),
            format_6sig(s.worst),
            format_6sig(s.mean_time_s)
        );
    }
    out
}

/// `replicates.csv` text: one row per replicate of every experiment.
pub fn replicates_csv(stats: &[&AggregateStats]) -> String {
    let mut out = String::from(REPLICATES_HEADER);
    out.push('\n');
    for s in stats {
        for (i, r) in s.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&s.algorithm),
                csv_field(&s.scenario),
                i,
                r.seed,
                format_6sig(r.best_fitness),
                format_6sig(r.wall_time_s)
            );
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One parsed `summary.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub scenario: String,
    pub replicates: usize,
    pub mean: f64,
    pub optimal: f64,
    pub worst: f64,
    pub mean_time_s: f64,
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

/// Parses text produced by [`summary_csv`].
pub fn parse_summary_csv(text: &str, source_name: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SUMMARY_HEADER) {
        return Err(Error::Parse {
            source_name: source_name.into(),
            line: 1,
            column: 1,
            message: "unexpected summary header".into(),
        });
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let err = |message: String| Error::Parse {
                source_name: source_name.into(),
                line: i + 2,
                column: 1,
                message,
            };
            let f = split_csv_line(line);
            if f.len() != 7 {
                return Err(err(format!("expected 7 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            Ok(SummaryRow {
                algorithm: f[0].clone(),
                scenario: f[1].clone(),
                replicates: f[2].parse().map_err(|e| err(format!("{:?}: {e}", f[2])))?,
                mean: num(&f[3])?,
                optimal: num(&f[4])?,
                worst: num(&f[5])?,
                mean_time_s: num(&f[6])?,
            })
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `summary.csv`, `replicates.csv` and `run.json` into `dir`,
/// creating it if needed.
pub fn export_csv(outcome: &ExperimentOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stats = [&outcome.stats];
    write_file(&dir.join("summary.csv"), &summary_csv(&stats))?;
    write_file(&dir.join("replicates.csv"), &replicates_csv(&stats))?;
    let meta = json!({
        "experiment": outcome.spec.name,
        "algorithm": outcome.stats.algorithm,
        "scenario": outcome.stats.scenario,
        "seed_derivation": "seed = base_seed + replicate",
        "base_seed": outcome.spec.base_seed,
        "spec": outcome.spec,
    });
    write_file(
        &dir.join("run.json"),
        &serde_json::to_string_pretty(&meta).expect("serializable"),
    )
}

/// Decoded path, costs and full convergence trace of one result.
pub fn trajectory_json(result: &ReplicateResult, scenario: &LoadedScenario) -> Result<serde_json::Value> {
    let trace: Vec<_> = result
        .trace
        .points
        .iter()
        .map(|p| json!({"iteration": p.iteration, "best_fitness": p.best_fitness}))
        .collect();
    let mut doc = json!({
        "scenario": scenario.name(),
        "seed": result.seed,
        "best_fitness": result.best_fitness,
        "trace": trace,
    });
    let extra = match scenario {
        LoadedScenario::Sphere(_) => json!({ "position": result.best_position }),
        LoadedScenario::Uav(u) => {
            let path = u.decode(&result.best_position)?;
            let costs = u.path_costs(&path);
            let terrain = u.terrain();
            let heights: Vec<f64> = path.waypoints.iter().map(|w| terrain.height(w[0], w[1])).collect();
            json!({
                "waypoints": path.waypoints,
                "costs": {
                    "length": costs.length,
                    "threat": costs.threat,
                    "altitude": costs.altitude,
                    "angle": costs.angle,
                },
                "total": costs.total,
                "feasible": u.is_feasible(&path),
                "terrain_heights": heights,
            })
        }
        LoadedScenario::Grid(g) => {
            let path = g.decode(&result.best_position)?;
            json!({
                "points": path.points,
                "length": grid_path_length(&path.points),
                "feasible": path.feasible,
                "turning_points": turning_points(&path.points),
            })
        }
    };
    let (serde_json::Value::Object(base), serde_json::Value::Object(more)) = (&mut doc, extra) else {
        unreachable!("both are objects");
    };
    base.extend(more);
    Ok(doc)
}

/// Writes [`trajectory_json`] to `path`.
pub fn export_trajectory(result: &ReplicateResult, scenario: &LoadedScenario, path: &Path) -> Result<()> {
    let doc = trajectory_json(result, scenario)?;
    write_file(path, &serde_json::to_string_pretty(&doc).expect("serializable"))
}
