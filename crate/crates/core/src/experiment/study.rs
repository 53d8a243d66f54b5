//! Replicated filter comparisons on shared simulated data.
//!
//! For replicate r the data is simulated from `derive(base, r, "data")` and
//! every grid cell runs on that same path with `derive(base, r, cell.label())`.
//! Cells and replicates run on the rayon pool; results are independent of the
//! pool size because no stream is shared.

use rayon::prelude::*;

use super::metrics::{abs_error, rmse, RunMetrics};
use super::seed::{derive, rng_from_seed};
use crate::error::{invalid, Result};
use crate::filters::{abc_apf_run, abc_smc_run, Algorithm, FilterConfig, FilterOutput};
use crate::kernels::KernelKind;
use crate::proposals::ProposalKind;
use crate::stats::median;
use crate::svm::{simulate_seeded, StateSpaceModel, SvmParams, Trajectory};

/// One column of a comparison: an algorithm and its configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub config: FilterConfig,
}

impl Cell {
    pub fn apf(config: FilterConfig) -> Self {
        Self {
            algorithm: Algorithm::AbcApf,
            config,
        }
    }

    pub fn smc(config: FilterConfig) -> Self {
        Self {
            algorithm: Algorithm::AbcSmc,
            config,
        }
    }

    pub fn proposal_label(&self) -> &'static str {
        match self.algorithm {
            Algorithm::AbcApf => self.config.proposal.kind.label(),
            Algorithm::AbcSmc => "none",
        }
    }

    pub fn kernel_label(&self) -> &'static str {
        match (self.algorithm, self.config.kernel.kind) {
            (Algorithm::AbcSmc, _) | (_, KernelKind::Uniform) => "uniform",
            (_, KernelKind::Gaussian) => "gaussian",
        }
    }

    /// ε for the auxiliary filter, P_ε for the baseline.
    pub fn eps_value(&self) -> f64 {
        match self.algorithm {
            Algorithm::AbcApf => self.config.kernel.epsilon,
            Algorithm::AbcSmc => self.config.smc_percentile,
        }
    }

    /// Canonical description; identical configurations share a label and so
    /// share their random stream.
    pub fn label(&self) -> String {
        let c = &self.config;
        format!(
            "{}/{}/dof={}/{}/eps={}/n={}/{}/{:?}",
            self.algorithm.label(),
            self.proposal_label(),
            c.proposal.dof,
            self.kernel_label(),
            self.eps_value(),
            c.n_particles,
            c.resample_policy,
            c.resample_scheme,
        )
    }

    pub fn run<M: StateSpaceModel>(&self, data: &[f64], model: &M, seed: u64) -> Result<FilterOutput> {
        let mut rng = rng_from_seed(seed);
        match self.algorithm {
            Algorithm::AbcApf => abc_apf_run(data, model, &self.config, &mut rng),
            Algorithm::AbcSmc => abc_smc_run(data, model, &self.config, &mut rng),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudySpec<M> {
    pub model: M,
    pub horizon: usize,
    pub cells: Vec<Cell>,
    pub replicates: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateRecord {
    pub cell: usize,
    pub replicate: usize,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        Self {
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            median: median(xs),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellAggregate {
    pub rmse: Summary,
    pub ae: Summary,
    pub seconds: Summary,
    pub degeneracies: Summary,
}

#[derive(Debug, Clone)]
pub struct StudyTable {
    pub cells: Vec<Cell>,
    /// Ordered by cell, then replicate.
    pub records: Vec<ReplicateRecord>,
    pub aggregates: Vec<CellAggregate>,
}

impl StudyTable {
    pub fn cell_records(&self, cell: usize) -> impl Iterator<Item = &ReplicateRecord> {
        self.records.iter().filter(move |r| r.cell == cell)
    }

    pub fn cell_metric(&self, cell: usize, f: impl Fn(&RunMetrics) -> f64) -> Vec<f64> {
        self.cell_records(cell).map(|r| f(&r.metrics)).collect()
    }

    /// Records with the wall-clock field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Vec<ReplicateRecord> {
        self.records
            .iter()
            .map(|r| ReplicateRecord {
                metrics: RunMetrics {
                    elapsed: 0.0,
                    ..r.metrics
                },
                ..*r
            })
            .collect()
    }
}

/// Simulated data for replicate `r`.
pub fn replicate_data<M: StateSpaceModel>(
    model: &M,
    horizon: usize,
    base_seed: u64,
    replicate: usize,
) -> Result<Trajectory> {
    simulate_seeded(model, horizon, derive(base_seed, replicate as u64, "data"))
}

pub fn run_study<M: StateSpaceModel>(spec: &StudySpec<M>) -> Result<StudyTable> {
    if spec.replicates < 1 {
        return Err(invalid("at least one replicate is required"));
    }
    if spec.cells.is_empty() {
        return Err(invalid("study grid is empty"));
    }
    for cell in &spec.cells {
        cell.config.validate()?;
    }
    let data: Vec<Trajectory> = (0..spec.replicates)
        .into_par_iter()
        .map(|r| replicate_data(&spec.model, spec.horizon, spec.base_seed, r))
        .collect::<Result<_>>()?;

    let labels: Vec<String> = spec.cells.iter().map(Cell::label).collect();
    let jobs: Vec<(usize, usize)> = (0..spec.cells.len())
        .flat_map(|c| (0..spec.replicates).map(move |r| (c, r)))
        .collect();
    let records: Vec<ReplicateRecord> = jobs
        .into_par_iter()
        .map(|(c, r)| {
            let traj = &data[r];
            let seed = derive(spec.base_seed, r as u64, &labels[c]);
            let out = spec.cells[c].run(&traj.y, &spec.model, seed)?;
            Ok(ReplicateRecord {
                cell: c,
                replicate: r,
                metrics: RunMetrics {
                    rmse: rmse(&out.filtered_mean, traj.states())?,
                    ae: abs_error(&out.filtered_mean, traj.states())?,
                    elapsed: out.elapsed,
                    degeneracy_count: out.degeneracy_count,
                },
            })
        })
        .collect::<Result<_>>()?;

    let aggregates = aggregate(&records, spec.cells.len());
    Ok(StudyTable {
        cells: spec.cells.clone(),
        records,
        aggregates,
    })
}

pub fn aggregate(records: &[ReplicateRecord], n_cells: usize) -> Vec<CellAggregate> {
    (0..n_cells)
        .map(|c| {
            let rows: Vec<&RunMetrics> = records.iter().filter(|r| r.cell == c).map(|r| &r.metrics).collect();
            let pick = |f: fn(&RunMetrics) -> f64| Summary::of(&rows.iter().map(|m| f(m)).collect::<Vec<_>>());
            CellAggregate {
                rmse: pick(|m| m.rmse),
                ae: pick(|m| m.ae),
                seconds: pick(|m| m.elapsed),
                degeneracies: pick(|m| m.degeneracy_count as f64),
            }
        })
        .collect()
}

/// Average of the filtered means over `runs` independent filter runs on one
/// fixed data path, alongside the true states.
pub fn trajectory_overlay<M: StateSpaceModel>(
    model: &M,
    traj: &Trajectory,
    cell: &Cell,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    if runs < 1 {
        return Err(invalid("at least one run is required"));
    }
    let label = cell.label();
    let outputs: Vec<FilterOutput> = (0..runs)
        .into_par_iter()
        .map(|r| cell.run(&traj.y, model, derive(base_seed, r as u64, &label)))
        .collect::<Result<_>>()?;
    let t = traj.horizon();
    Ok((0..t)
        .map(|i| outputs.iter().map(|o| o.filtered_mean[i]).sum::<f64>() / runs as f64)
        .collect())
}

pub const COMPARISON_EPSILONS: [f64; 4] = [0.25, 0.5, 0.75, 1.5];
pub const COMPARISON_PERCENTILES: [f64; 3] = [0.25, 0.5, 0.75];

/// Auxiliary filter for every (ε, proposal) pair plus the baseline at each
/// percentile.
pub fn comparison_cells(n_particles: usize) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for kind in [
        ProposalKind::CentralT,
        ProposalKind::ShiftedT,
        ProposalKind::NoncentralT,
    ] {
        for eps in COMPARISON_EPSILONS {
            cells.push(Cell::apf(FilterConfig::apf(n_particles, eps, kind)?));
        }
    }
    for p in COMPARISON_PERCENTILES {
        cells.push(Cell::smc(FilterConfig::smc(n_particles, p)?));
    }
    Ok(cells)
}

/// Shifted-t auxiliary filter at ε = 0.25 only.
pub fn shifted_cells(n_particles: usize) -> Result<Vec<Cell>> {
    Ok(vec![Cell::apf(FilterConfig::apf(
        n_particles,
        0.25,
        ProposalKind::ShiftedT,
    )?)])
}

/// The (α, β) pairs of the sensitivity study. β is irrelevant at α = 2 and set to 0.
pub const SENSITIVITY_STABLE: [(f64, f64); 5] = [(2.0, 0.0), (1.9, 0.9), (1.2, 0.3), (0.8, -0.2), (0.1, -0.8)];

/// (σ_h, σ_v) noise regimes of the sensitivity study.
pub const SENSITIVITY_REGIMES: [(f64, f64); 2] = [(0.2, 0.1), (1.0, 1.0)];

/// ((α, β), (σ_h, σ_v), model) for one sensitivity-study row.
pub type SensitivityRow = ((f64, f64), (f64, f64), SvmParams);

/// Sensitivity-study models with μ = 0 and φ = 0.9.
pub fn sensitivity_models() -> Result<Vec<SensitivityRow>> {
    let mut out = Vec::new();
    for regime in SENSITIVITY_REGIMES {
        for ab in SENSITIVITY_STABLE {
            out.push((ab, regime, SvmParams::new(0.0, 0.9, regime.0, ab.0, ab.1, regime.1)?));
        }
    }
    Ok(out)
}
