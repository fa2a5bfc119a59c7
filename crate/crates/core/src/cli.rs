//! Command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 when a scenario or map
//! cannot be loaded or a report cannot be written.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{export_csv, export_trajectory, run_experiment, Algorithm, ExperimentSpec, ScenarioRef};
use crate::config::{RunConfig, Strategies};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "mcoa",
    version,
    about = "Crayfish optimization (COA) and multi-strategy COA (MCOA) path-planning benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// 3D UAV path planning over synthetic terrain with cylindrical threats.
    Uav {
        /// Scenario JSON; defaults to the shipped scenario.
        #[arg(long, value_name = "PATH")]
        scenario_file: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// 2D grid-map path planning from (1,1) to (n,n).
    Grid {
        /// Map file of '0'/'1' rows.
        #[arg(long, alias = "map", value_name = "PATH", conflicts_with = "builtin")]
        map_file: Option<PathBuf>,
        /// Shipped map used when no map file is given.
        #[arg(long, default_value = "grid20", value_parser = ["grid20", "grid40", "grid60"])]
        builtin: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sphere function on [-100, 100]^dim, a quick optimizer self-check.
    Sphere {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        dim: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Benchmark protocol on a named scenario.
    Bench {
        #[arg(long, value_parser = ["sphere", "uav", "grid20", "grid40", "grid60"])]
        scenario: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmChoice {
    Coa,
    Mcoa,
    Both,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_enum, default_value_t = AlgorithmChoice::Both)]
    algorithm: AlgorithmChoice,
    /// Base seed; replicate i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    replicates: u64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    population: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    iterations: u64,
    /// Reports go to <output-dir>/<experiment>/.
    #[arg(long, env = "MCOA_OUTPUT_DIR", default_value = "results", value_name = "DIR")]
    output_dir: PathBuf,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// MCOA ablation: skip refractive opposition.
    #[arg(long)]
    no_opposition: bool,
    /// MCOA ablation: use the plain cave move instead of centroid exploration.
    #[arg(long)]
    no_centroid: bool,
    /// MCOA ablation: use the baseline competition move.
    #[arg(long)]
    no_adaptive_competition: bool,
    /// MCOA: also apply opposition after every iteration.
    #[arg(long)]
    opposition_every_iteration: bool,
    /// Write best_trajectory.json for the best replicate.
    #[arg(long)]
    emit_trajectory: bool,
}

impl CommonArgs {
    fn algorithms(&self) -> Vec<Algorithm> {
        let mcoa = Algorithm::Mcoa {
            strategies: Strategies {
                opposition: !self.no_opposition,
                centroid: !self.no_centroid,
                adaptive_competition: !self.no_adaptive_competition,
            },
            opposition_every_iteration: self.opposition_every_iteration,
        };
        match self.algorithm {
            AlgorithmChoice::Coa => vec![Algorithm::Coa],
            AlgorithmChoice::Mcoa => vec![mcoa],
            AlgorithmChoice::Both => vec![Algorithm::Coa, mcoa],
        }
    }

    fn jobs(&self) -> usize {
        self.jobs
            .map(|j| j as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

/// Parses `argv` (including the program name), runs the requested
/// experiments and returns the process exit status.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let (scenario, common) = match cli.command {
        Command::Uav { scenario_file, common } => (ScenarioRef::Uav { file: scenario_file }, common),
        Command::Grid {
            map_file,
            builtin,
            common,
        } => {
            let scenario = match map_file {
                Some(path) => ScenarioRef::GridFile { path },
                None => ScenarioRef::GridBuiltin { name: builtin },
            };
            (scenario, common)
        }
        Command::Sphere { dim, common } => (ScenarioRef::Sphere { dim: dim as usize }, common),
        Command::Bench { scenario, common } => (ScenarioRef::from_name(&scenario)?, common),
    };
    // Fail on a bad scenario before printing or running anything.
    let scenario_name = scenario.load()?.name();

    let run = RunConfig {
        population_size: common.population as usize,
        max_iterations: common.iterations as usize,
        seed: common.seed,
        ..RunConfig::default()
    };
    let specs: Vec<ExperimentSpec> = common
        .algorithms()
        .into_iter()
        .map(|algorithm| ExperimentSpec {
            name: format!("{scenario_name}-{}", algorithm.slug()),
            algorithm,
            scenario: scenario.clone(),
            replicates: common.replicates as usize,
            base_seed: common.seed,
            run: run.clone(),
            jobs: common.jobs(),
        })
        .collect();

    let effective = serde_json::json!({
        "output_dir": common.output_dir,
        "emit_trajectory": common.emit_trajectory,
        "experiments": specs,
    });
    println!("effective configuration:");
    println!("{}", serde_json::to_string_pretty(&effective).expect("serializable"));

    for spec in &specs {
        let outcome = run_experiment(spec)?;
        let dir = common.output_dir.join(&spec.name);
        export_csv(&outcome, &dir)?;
        if common.emit_trajectory {
            export_trajectory(
                outcome.stats.best(),
                &outcome.scenario,
                &dir.join("best_trajectory.json"),
            )?;
        }
        let s = &outcome.stats;
        println!(
            "{} on {}: mean {} optimal {} worst {} mean_time_s {:.4} ({} replicates) -> {}",
            s.algorithm,
            s.scenario,
            s.mean,
            s.optimal,
            s.worst,
            s.mean_time_s,
            s.replicates,
            dir.display()
        );
    }
    Ok(())
}
