//! Builds the problem sequence for a configuration, runs the selected
//! algorithms and writes the results file and run metadata.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use openm::baselines::{run_baseline, Baseline, BaselineParams};
use openm::benchmark::{NetworkBenchmark, RNG_NAME};
use openm::instances::QuadraticFamily;
use openm::linalg::distance;
use openm::metrics::{constraint_violation, dynamic_regret, path_length};
use openm::online::{
    compute_optima, run_oen_m_with_parameters, run_with_optima, AffineEqualityConstraint, Algorithm, OptimumSolver,
    ProblemSequence, RoundOptimum, Trajectory,
};
use serde::Serialize;

use crate::config::{AlgoName, ExperimentConfig, Scenario};

pub const RESULTS_FILE: &str = "results.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const COLUMNS: [&str; 6] = ["algorithm", "t", "loss", "opt_loss", "cum_regret", "cum_violation"];

const OPTIMUM_TOL: f64 = 1e-11;
/// Neighbourhood used for the network's local curvature estimate.
const NETWORK_BALL: f64 = 1.0;

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Row {
    pub algorithm: String,
    pub t: usize,
    pub loss: f64,
    pub opt_loss: f64,
    pub cum_regret: f64,
    pub cum_violation: f64,
}

/// Problem sequence, offline optima and starting point shared by all algorithms.
#[derive(Debug, Clone)]
pub struct Setup {
    pub problems: ProblemSequence,
    pub optima: Vec<RoundOptimum>,
    pub x0: Vec<f64>,
    /// Constraint frozen into OEN-M, taken from the first round.
    pub oen_parameters: AffineEqualityConstraint,
    /// Estimated radius around the first optimum where Newton contracts.
    pub contraction_radius: f64,
}

impl Setup {
    pub fn build(config: &ExperimentConfig) -> anyhow::Result<Self> {
        let (problems, optima, x0, radius) = match config.scenario {
            Scenario::Network => {
                let bench = NetworkBenchmark::new(config.seed, config.epsilon)?;
                let problems = bench.problems(config.horizon)?;
                let guess = bench.even_split_flow(&bench.params(1)?.loads);
                let optima = compute_optima(&problems, &guess, &OptimumSolver::relative(OPTIMUM_TOL))
                    .context("computing offline optima")?;
                let radius = bench.gamma_estimate(1, &optima[0].x, NETWORK_BALL)?;
                let x0 = bench.perturbed_start(&optima[0].x, config.start_fraction * radius)?;
                (problems, optima, x0, radius)
            }
            Scenario::QuadraticFixed | Scenario::QuadraticVarying => {
                let varying = config.scenario == Scenario::QuadraticVarying;
                let base = QuadraticFamily::default();
                let family = QuadraticFamily {
                    horizon: config.horizon - 1,
                    varying_constraints: varying,
                    constraint_drift: if varying { 0.1 } else { 0.0 },
                    start_radius: config.start_fraction * base.beta,
                    ..base
                };
                let inst = family.generate(config.seed)?;
                let radius = inst.constants.gamma();
                (inst.problems, inst.optima, inst.x0, radius)
            }
        };
        let oen_parameters = problems.rounds()[0].constraint().clone();
        Ok(Self {
            problems,
            optima,
            x0,
            oen_parameters,
            contraction_radius: radius,
        })
    }

    pub fn run(&self, algo: AlgoName, config: &ExperimentConfig) -> anyhow::Result<Trajectory> {
        let optima = Some(self.optima.as_slice());
        let baseline = |kind| {
            let p = self.oen_parameters.num_constraints();
            let params = BaselineParams {
                primal: config.baseline_primal_step,
                dual: config.baseline_dual_step,
                sense: config.relaxation.into(),
            };
            run_baseline(kind, &self.problems, &self.x0, &vec![0.0; p], &params, optima)
        };
        let traj = match algo {
            AlgoName::OenM => run_oen_m_with_parameters(&self.problems, &self.x0, &self.oen_parameters, optima),
            AlgoName::OpenM => run_with_optima(Algorithm::OpenM, &self.problems, &self.x0, optima),
            AlgoName::MospStyle => baseline(Baseline::SaddlePoint),
            AlgoName::MalmStyle => baseline(Baseline::AugmentedLagrangian),
        };
        traj.with_context(|| format!("running {algo}"))
    }
}

/// Per-algorithm trajectories in configuration order.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub setup: Setup,
    pub runs: Vec<(AlgoName, Trajectory)>,
}

impl ExperimentOutput {
    pub fn trajectory(&self, algo: AlgoName) -> Option<&Trajectory> {
        self.runs.iter().find(|(a, _)| *a == algo).map(|(_, t)| t)
    }

    pub fn rows(&self) -> anyhow::Result<Vec<Row>> {
        let mut rows = Vec::new();
        for (algo, traj) in &self.runs {
            let regret = dynamic_regret(traj)?;
            let violation = constraint_violation(traj);
            for (i, rec) in traj.records().iter().enumerate() {
                let opt = rec.optimum.as_ref().ok_or_else(|| anyhow!("round {} lacks an optimum", rec.t))?;
                rows.push(Row {
                    algorithm: algo.as_str().to_string(),
                    t: rec.t,
                    loss: rec.loss,
                    opt_loss: opt.value,
                    cum_regret: regret[i],
                    cum_violation: violation[i],
                });
            }
        }
        Ok(rows)
    }
}

/// Runs every selected algorithm, one worker thread per algorithm.
pub fn simulate(config: &ExperimentConfig) -> anyhow::Result<ExperimentOutput> {
    config.validate()?;
    let setup = Setup::build(config)?;
    let runs = std::thread::scope(|s| {
        let handles: Vec<_> = config
            .algorithms
            .iter()
            .map(|&algo| {
                let setup = &setup;
                s.spawn(move || setup.run(algo, config).map(|t| (algo, t)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| anyhow!("worker thread panicked"))?)
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    Ok(ExperimentOutput { setup, runs })
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    rng: &'static str,
    seed: u64,
    config: &'a ExperimentConfig,
    columns: [&'static str; 6],
    rows: usize,
    setup: SetupSummary,
    results: Vec<RunSummary>,
}

#[derive(Debug, Serialize)]
struct SetupSummary {
    dimension: usize,
    constraints: usize,
    rounds: usize,
    path_length: f64,
    contraction_radius: f64,
    start_distance: f64,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    algorithm: &'static str,
    cum_regret: f64,
    cum_violation: f64,
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub results: PathBuf,
    pub metadata: PathBuf,
    pub plots: Vec<PathBuf>,
}

pub fn write_results(rows: &[Row], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> anyhow::Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(anyhow!("{} has header {:?}, expected {:?}", path.display(), header, COLUMNS));
    }
    r.deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

/// Runs the experiment and writes the results file, the metadata file and,
/// when requested, the charts.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<Artifacts> {
    let output = simulate(config)?;
    let rows = output.rows()?;
    fs::create_dir_all(&config.out_dir).with_context(|| format!("creating {}", config.out_dir.display()))?;
    let results = config.out_dir.join(RESULTS_FILE);
    write_results(&rows, &results)?;

    let setup = &output.setup;
    let optima: Vec<&[f64]> = setup.optima.iter().map(|o| o.x.as_slice()).collect();
    let mut results_summary = Vec::new();
    for (algo, traj) in &output.runs {
        results_summary.push(RunSummary {
            algorithm: algo.as_str(),
            cum_regret: dynamic_regret(traj)?.last().copied().unwrap_or(0.0),
            cum_violation: constraint_violation(traj).last().copied().unwrap_or(0.0),
        });
    }
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        library_version: openm::VERSION,
        rng: match config.scenario {
            Scenario::Network => RNG_NAME,
            _ => "ChaCha8 (rand_chacha 0.9) seeded with the configured seed",
        },
        seed: config.seed,
        config,
        columns: COLUMNS,
        rows: rows.len(),
        setup: SetupSummary {
            dimension: setup.problems.dim(),
            constraints: setup.oen_parameters.num_constraints(),
            rounds: setup.problems.len(),
            path_length: path_length(&optima),
            contraction_radius: setup.contraction_radius,
            start_distance: distance(&setup.x0, &setup.optima[0].x),
        },
        results: results_summary,
    };
    let metadata = config.out_dir.join(METADATA_FILE);
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    fs::write(&metadata, text).with_context(|| format!("writing {}", metadata.display()))?;

    let plots = if config.plot {
        crate::plot::plot_results(&results, &config.out_dir)?
    } else {
        Vec::new()
    };
    Ok(Artifacts {
        results,
        metadata,
        plots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scenario: Scenario) -> ExperimentConfig {
        ExperimentConfig {
            horizon: 10,
            scenario,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn smoke_run_has_one_row_per_round_per_algorithm() {
        for scenario in [Scenario::Network, Scenario::QuadraticFixed, Scenario::QuadraticVarying] {
            let out = simulate(&small(scenario)).unwrap();
            let rows = out.rows().unwrap();
            assert_eq!(rows.len(), 40);
            for algo in AlgoName::ALL {
                assert_eq!(rows.iter().filter(|r| r.algorithm == algo.as_str()).count(), 10);
            }
        }
    }

    #[test]
    fn cumulative_columns_accumulate() {
        let out = simulate(&small(Scenario::QuadraticVarying)).unwrap();
        let rows = out.rows().unwrap();
        for w in rows.windows(2).filter(|w| w[0].algorithm == w[1].algorithm) {
            let step = w[1].loss - w[1].opt_loss;
            assert!((w[1].cum_regret - w[0].cum_regret - step).abs() <= 1e-12 * (1.0 + w[1].cum_regret.abs()));
            assert!(w[1].cum_violation >= w[0].cum_violation);
        }
    }

    #[test]
    fn network_start_is_inside_contraction_radius() {
        let out = simulate(&small(Scenario::Network)).unwrap();
        let s = &out.setup;
        let d = distance(&s.x0, &s.optima[0].x);
        // The radius is far below one ulp of the flows, so x0 may equal x1* exactly.
        assert!(d <= 0.5 * s.contraction_radius * (1.0 + 1e-9));
        assert!(s.problems.rounds()[0].constraint().residual_norm(&s.x0) <= 1e-8 * 150.0);
    }

    #[test]
    fn single_round_horizon() {
        for scenario in [Scenario::Network, Scenario::QuadraticFixed] {
            let out = simulate(&ExperimentConfig { horizon: 1, ..small(scenario) }).unwrap();
            assert_eq!(out.rows().unwrap().len(), 4);
        }
    }

    #[test]
    fn results_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = simulate(&small(Scenario::QuadraticFixed)).unwrap().rows().unwrap();
        let path = dir.path().join("r.csv");
        write_results(&rows, &path).unwrap();
        assert_eq!(read_results(&path).unwrap(), rows);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
    }
}
