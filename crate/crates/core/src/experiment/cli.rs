//! Command-line front end: `simulate`, `filter` and `experiment`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::io::{
    read_data_file, write_boxplot_file, write_data_file, write_filtered_file, write_summary_file, ModelConfig,
};
use super::metrics::rmse;
use super::study::{comparison_cells, run_study, shifted_cells, Cell, StudySpec};
use crate::error::{Error, Result};
use crate::filters::{Algorithm, FilterConfig, ResamplePolicy, ResampleScheme};
use crate::kernels::{KernelKind, KernelSpec};
use crate::proposals::{ProposalKind, ProposalSpec};
use crate::svm::{simulate_seeded, SvmParams};

#[derive(Debug, Parser)]
#[command(
    name = "stablesv",
    version,
    about = "Likelihood-free particle filtering for alpha-stable stochastic volatility"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a log-volatility path and its observations.
    Simulate(SimulateArgs),
    /// Run one filter over a data file.
    Filter(FilterArgs),
    /// Run a replicated comparison and write a summary table.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON model config (mu, phi, sigma_h, alpha, beta, sigma_v).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgoArg {
    AbcApf,
    AbcSmc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProposalArg {
    CentralT,
    ShiftedT,
    NoncentralT,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Multinomial,
    Systematic,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long, value_enum, default_value = "shifted-t")]
    pub proposal: ProposalArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub kernel: KernelArg,
    /// Kernel bandwidth for abc-apf.
    #[arg(long, conflicts_with = "smc_percentile")]
    pub eps: Option<f64>,
    /// Fraction of closest pseudo-observations kept by abc-smc.
    #[arg(long)]
    pub smc_percentile: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    pub particles: usize,
    /// `every` or `ess:N0`.
    #[arg(long, default_value = "every")]
    pub resample: String,
    #[arg(long, value_enum, default_value = "multinomial")]
    pub scheme: SchemeArg,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Model config; defaults to the reference model.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GridArg {
    /// Every (eps, proposal) pair plus the percentile baseline.
    Comparison,
    /// Shifted-t at eps = 0.25 only.
    Shifted,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub boxplot_out: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub horizon: usize,
    #[arg(long, default_value_t = 5000)]
    pub particles: usize,
    #[arg(long, value_enum, default_value = "comparison")]
    pub grid: GridArg,
}

fn load_model(path: Option<&PathBuf>) -> Result<SvmParams> {
    match path {
        Some(p) => ModelConfig::load(p)?.to_params(),
        None => Ok(SvmParams::reference()),
    }
}

impl FilterArgs {
    pub fn cell(&self) -> Result<Cell> {
        let kind = match self.proposal {
            ProposalArg::CentralT => ProposalKind::CentralT,
            ProposalArg::ShiftedT => ProposalKind::ShiftedT,
            ProposalArg::NoncentralT => ProposalKind::NoncentralT,
        };
        let scheme = match self.scheme {
            SchemeArg::Multinomial => ResampleScheme::Multinomial,
            SchemeArg::Systematic => ResampleScheme::Systematic,
        };
        let policy: ResamplePolicy = self.resample.parse()?;
        let (algorithm, kernel, percentile) = match self.algo {
            AlgoArg::AbcApf => {
                let eps = self
                    .eps
                    .ok_or_else(|| Error::InvalidParameter("abc-apf needs --eps".into()))?;
                let kk = match self.kernel {
                    KernelArg::Gaussian => KernelKind::Gaussian,
                    KernelArg::Uniform => KernelKind::Uniform,
                };
                (Algorithm::AbcApf, KernelSpec::new(kk, eps)?, 0.25)
            }
            AlgoArg::AbcSmc => {
                let p = self
                    .smc_percentile
                    .ok_or_else(|| Error::InvalidParameter("abc-smc needs --smc-percentile".into()))?;
                (Algorithm::AbcSmc, KernelSpec::uniform(1.0)?, p)
            }
        };
        let config = FilterConfig::new(
            self.particles,
            kernel,
            ProposalSpec::with_default_dof(kind),
            policy,
            scheme,
            percentile,
        )?;
        Ok(Cell { algorithm, config })
    }
}

pub fn run_simulate(args: &SimulateArgs) -> Result<String> {
    let model = ModelConfig::load(&args.config)?.to_params()?;
    let traj = simulate_seeded(&model, args.horizon, args.seed)?;
    write_data_file(&traj, &args.out)?;
    Ok(format!(
        "wrote {} observations to {}",
        traj.horizon(),
        args.out.display()
    ))
}

pub fn run_filter(args: &FilterArgs) -> Result<String> {
    let model = load_model(args.config.as_ref())?;
    let cell = args.cell()?;
    let data = read_data_file(&args.data)?;
    let out = cell.run(&data.y, &model, args.seed)?;
    write_filtered_file(&out, &args.out)?;
    let mut msg = format!(
        "{} over {} steps in {:.3} s, {} resamples, {} degenerate steps",
        cell.label(),
        data.y.len(),
        out.elapsed,
        out.resample_count,
        out.degeneracy_count
    );
    if let Some(h) = &data.h_true {
        msg.push_str(&format!(", rmse {:.4}", rmse(&out.filtered_mean, &h[1..])?));
    }
    Ok(msg)
}

pub fn run_experiment(args: &ExperimentArgs) -> Result<String> {
    let model = ModelConfig::load(&args.config)?.to_params()?;
    let cells = match args.grid {
        GridArg::Comparison => comparison_cells(args.particles)?,
        GridArg::Shifted => shifted_cells(args.particles)?,
    };
    let spec = StudySpec {
        model,
        horizon: args.horizon,
        cells,
        replicates: args.replicates,
        base_seed: args.seed,
    };
    let table = run_study(&spec)?;
    write_summary_file(&table, &args.out)?;
    if let Some(path) = &args.boxplot_out {
        write_boxplot_file(&table, path)?;
    }
    Ok(format!(
        "{} cells x {} replicates written to {}",
        table.cells.len(),
        args.replicates,
        args.out.display()
    ))
}

/// 2 for bad input, 3 for numerical failure.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Filter(a) => run_filter(a),
        Command::Experiment(a) => run_experiment(a),
    };
    match result {
        Ok(msg) => {
            eprintln!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_map_to_three() {
        let quad = Error::Quadrature {
            tol: 1e-10,
            panels: 10,
            estimate: 0.5,
            error: 1e-3,
        };
        assert_eq!(exit_code(&quad), 3);
        assert_eq!(exit_code(&Error::SeriesDivergence { terms: 9 }), 3);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
