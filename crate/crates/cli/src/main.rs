use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use openm_cli::config::{parse_algorithms, ConfigError};
use openm_cli::{plot, run_experiment, AlgoName, ExperimentConfig, FileConfig, Relaxation, Scenario};

#[derive(Debug, Parser)]
#[command(name = "openm", version, about = "Online Newton methods under time-varying equality constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write results.csv and metadata.json.
    Run(RunArgs),
    /// Draw regret and violation charts from a results file.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Algorithms to run (comma separated or repeated).
    #[arg(long, value_enum, value_delimiter = ',')]
    algo: Vec<AlgoName>,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// Number of rounds T.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Smoothing of |x| in the network costs.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sets both baseline step constants (steps are c/√T).
    #[arg(long)]
    baseline_step: Option<f64>,
    #[arg(long)]
    baseline_primal_step: Option<f64>,
    #[arg(long)]
    baseline_dual_step: Option<f64>,
    /// Direction of the inequality the baselines see.
    #[arg(long, value_enum)]
    relaxation: Option<Relaxation>,
    /// Distance of x0 from the first optimum, as a fraction of the contraction radius.
    #[arg(long)]
    start_fraction: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write regret.svg and violation.svg.
    #[arg(long)]
    plot: bool,
    /// TOML file with any of the settings above (flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Results file written by `openm run`.
    #[arg(long, default_value = "results/results.csv")]
    input: PathBuf,
    /// Defaults to the directory holding the input.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig, ConfigError> {
        let mut c = ExperimentConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(FileConfig::load(path)?)?;
        }
        if !self.algo.is_empty() {
            let names: Vec<&str> = self.algo.iter().map(|a| a.as_str()).collect();
            c.algorithms = parse_algorithms(&names)?;
        }
        if let Some(v) = self.baseline_step {
            c.baseline_primal_step = v;
            c.baseline_dual_step = v;
        }
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { c.$field = v; })* };
        }
        take!(scenario, horizon, seed, epsilon, baseline_primal_step, baseline_dual_step, relaxation, start_fraction, out_dir);
        c.plot |= self.plot;
        c.validate().map_err(ConfigError::Other)?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => match args.into_config() {
            Err(e @ ConfigError::Algorithm(_)) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            Err(e) => Err(anyhow::anyhow!("{e}")),
            Ok(config) => run_experiment(&config).map(|a| {
                println!("results: {}", a.results.display());
                println!("metadata: {}", a.metadata.display());
                for p in &a.plots {
                    println!("chart: {}", p.display());
                }
            }),
        },
        Command::Plot(args) => {
            let out_dir = args.out_dir.unwrap_or_else(|| {
                args.input.parent().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
            });
            plot::plot_results(&args.input, &out_dir).map(|paths| {
                for p in &paths {
                    println!("chart: {}", p.display());
                }
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
