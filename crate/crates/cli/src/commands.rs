//! Implementations of the five subcommands.

use crate::csvio::{self, FidelityRow, ResultRow};
use crate::manifest::RunManifest;
use crate::{CliError, CliResult};
use purikit::adaptive::{run_adaptive_protocol, OptimizerConfig};
use purikit::dump;
use purikit::metrics::{aggregate, concurrence, conditional_fidelity, histogram, IterationStats};
use purikit::protocols::{trajectory, ProtocolKind};
use purikit::sampler::{collect_bloch, BlochVector, ChainConfig};
use purikit::variational::MeasurementPolicy;
use purikit::DensityMatrix;
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Protocol selector for evaluation sweeps; `Ultimate` scores the ceiling
/// rule (concurrence 1 for every entangled state) instead of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalProtocol {
    Fixed(ProtocolKind),
    Ultimate,
}

impl std::str::FromStr for EvalProtocol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("ultimate") {
            return Ok(EvalProtocol::Ultimate);
        }
        s.parse::<ProtocolKind>()
            .map(EvalProtocol::Fixed)
            .map_err(|e| e.to_string())
    }
}

impl EvalProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            EvalProtocol::Fixed(kind) => kind.name(),
            EvalProtocol::Ultimate => "ultimate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub n: usize,
    pub chains: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
    pub paper_scale: bool,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

pub fn run_sample(spec: &SampleSpec) -> CliResult<()> {
    let started = Instant::now();
    let n_per_chain = if spec.paper_scale { 1_000_000 } else { spec.n };
    if spec.chains == 0 || n_per_chain == 0 {
        return Err(CliError::Usage("need chains >= 1 and n >= 1".into()));
    }

    // Chains run in parallel on derived seeds; pooling order is the chain
    // order, so the output does not depend on scheduling.
    let chains: Vec<CliResult<Vec<BlochVector>>> = (0..spec.chains)
        .into_par_iter()
        .map(|chain| {
            let cfg = ChainConfig {
                seed: spec.seed + chain as u64,
                burn_in: spec.burn_in,
                thinning: spec.thinning,
                n_samples: n_per_chain,
            };
            Ok(collect_bloch(cfg)?)
        })
        .collect();
    let mut vectors = Vec::with_capacity(spec.chains * n_per_chain);
    for chain in chains {
        vectors.extend(chain?);
    }

    dump::write_dump(&spec.out, spec.seed, &vectors)?;

    let concurrences: Vec<f64> = vectors
        .par_iter()
        .map(|v| concurrence(&v.to_density()?))
        .collect::<purikit::error::Result<_>>()?;
    let separable =
        concurrences.iter().filter(|&&c| c == 0.0).count() as f64 / concurrences.len() as f64;
    let (mean, _, err) = aggregate(&concurrences).map_err(purikit::Error::from)?;
    println!(
        "sampled {} states ({} chains x {}): mean concurrence {:.5} +- {:.5}, separable fraction {:.4}",
        vectors.len(),
        spec.chains,
        n_per_chain,
        mean,
        err,
        separable
    );

    let mut manifest = RunManifest::new("sample");
    manifest.seed = Some(spec.seed);
    manifest.chains = Some(spec.chains);
    manifest.n_per_chain = Some(n_per_chain);
    manifest.burn_in = Some(spec.burn_in);
    manifest.thinning = Some(spec.thinning);
    manifest.threads = spec.threads;
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write_next_to(&spec.out)?;
    Ok(())
}

pub fn load_states(path: &Path) -> CliResult<Vec<DensityMatrix>> {
    let (_, vectors) = dump::read_dump(path)?;
    if vectors.is_empty() {
        return Err(CliError::Usage(format!(
            "dump {} holds no states",
            path.display()
        )));
    }
    let states = vectors
        .par_iter()
        .map(|v| v.to_density())
        .collect::<purikit::error::Result<Vec<_>>>()?;
    Ok(states)
}

#[derive(Debug, Clone)]
pub struct EvaluateSpec {
    pub protocol: EvalProtocol,
    pub iters: usize,
    pub input: PathBuf,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

pub fn run_evaluate(spec: &EvaluateSpec) -> CliResult<()> {
    let started = Instant::now();
    let states = load_states(&spec.input)?;
    let n = states.len();

    let initial: Vec<f64> = states
        .par_iter()
        .map(concurrence)
        .collect::<purikit::error::Result<_>>()?;
    let zeros = vec![0.0; n];
    let mut rows = vec![ResultRow::from_stats(
        &IterationStats::from_values(0, &initial, &zeros).map_err(purikit::Error::from)?,
    )];

    let indicator: Vec<f64> = match spec.protocol {
        EvalProtocol::Fixed(kind) => {
            let trajectories: Vec<Vec<purikit::protocols::TrajectoryPoint>> = states
                .par_iter()
                .map(|rho| trajectory(kind, rho, spec.iters))
                .collect::<purikit::error::Result<_>>()?;
            for i in 0..spec.iters {
                let cs: Vec<f64> = trajectories.iter().map(|t| t[i].concurrence).collect();
                let ps: Vec<f64> = trajectories
                    .iter()
                    .map(|t| t[i].success_probability)
                    .collect();
                rows.push(ResultRow::from_stats(
                    &IterationStats::from_values(i + 1, &cs, &ps)
                        .map_err(purikit::Error::from)?,
                ));
            }
            states
                .iter()
                .map(|rho| {
                    if purikit::protocols::purifiable(kind, rho).is_some() {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        EvalProtocol::Ultimate => initial
            .iter()
            .map(|&c| if c > 0.0 { 1.0 } else { 0.0 })
            .collect(),
    };

    let (mean, std, err) = aggregate(&indicator).map_err(purikit::Error::from)?;
    rows.push(ResultRow {
        iteration: None,
        mean_concurrence: mean,
        concurrence_std: std,
        concurrence_stderr: err,
        mean_success: 0.0,
        success_std: 0.0,
        success_stderr: 0.0,
        n_nonzero: indicator.iter().filter(|&&x| x > 0.0).count(),
    });
    csvio::write_result_table(&spec.out, &rows)?;
    println!(
        "{}: {} states, {} iterations, asymptote {:.5} +- {:.5}",
        spec.protocol.name(),
        n,
        spec.iters,
        mean,
        err
    );

    let mut manifest = RunManifest::new("evaluate");
    manifest.protocol = Some(spec.protocol.name().to_string());
    manifest.iterations = Some(spec.iters);
    manifest.threads = spec.threads;
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write_next_to(&spec.out)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OptimizeSpec {
    pub rounds: usize,
    pub policy: MeasurementPolicy,
    pub projector_first: bool,
    pub subset_size: usize,
    pub restarts: usize,
    pub seed: u64,
    pub input: PathBuf,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

pub fn run_optimize(spec: &OptimizeSpec) -> CliResult<()> {
    let started = Instant::now();
    let mut population = load_states(&spec.input)?;
    let n = population.len();

    let initial: Vec<f64> = population
        .par_iter()
        .map(concurrence)
        .collect::<purikit::error::Result<_>>()?;
    let zeros = vec![0.0; n];
    let mut rows = vec![ResultRow::from_stats(
        &IterationStats::from_values(0, &initial, &zeros).map_err(purikit::Error::from)?,
    )];

    let cfg = OptimizerConfig {
        restarts: spec.restarts,
        subset_size: spec.subset_size,
        ..OptimizerConfig::default()
    };
    let records = run_adaptive_protocol(
        &mut population,
        spec.rounds,
        spec.policy,
        &cfg,
        spec.projector_first,
        spec.seed,
    )?;

    let mut angle_records = Vec::new();
    for record in &records {
        println!(
            "round {:2}: mean concurrence {:.5} +- {:.5}, mean success {:.4}, newly frozen {}",
            record.round,
            record.stats.mean_concurrence,
            record.stats.concurrence_stderr,
            record.stats.mean_success,
            record.frozen_count
        );
        rows.push(ResultRow::from_stats(&record.stats));
        if let Some(angles) = record.angle_record() {
            angle_records.push(angles);
        }
    }
    csvio::write_result_table(&spec.out, &rows)?;

    let angles_path = spec.out.with_extension("angles.json");
    let json = serde_json::to_string_pretty(&angle_records)
        .map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&angles_path, json)?;

    let mut manifest = RunManifest::new("optimize");
    manifest.seed = Some(spec.seed);
    manifest.policy = Some(spec.policy.name());
    manifest.rounds = Some(spec.rounds);
    manifest.subset_size = Some(spec.subset_size);
    manifest.restarts = Some(spec.restarts);
    manifest.threads = spec.threads;
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write_next_to(&spec.out)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FidelitySpec {
    pub protocol: ProtocolKind,
    pub iters: usize,
    pub input: PathBuf,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

pub fn run_fidelity(spec: &FidelitySpec) -> CliResult<()> {
    let started = Instant::now();
    let states = load_states(&spec.input)?;
    let kind = spec.protocol;
    let attractors = kind.attractors();

    // Per state: conditional fidelities at iterations 0..=iters, flattened
    // as (iteration, attractor) in fixed order.
    let per_state: Vec<Vec<f64>> = states
        .par_iter()
        .map(|rho| {
            let mut values = Vec::with_capacity((spec.iters + 1) * attractors.len());
            for rec in conditional_fidelity(kind, rho) {
                values.push(rec.value);
            }
            let steps = purikit::protocols::iterate(kind, rho, spec.iters)?;
            for step in &steps {
                for rec in conditional_fidelity(kind, &step.state) {
                    values.push(rec.value);
                }
            }
            Ok(values)
        })
        .collect::<purikit::error::Result<_>>()?;

    let mut rows = Vec::new();
    for it in 0..=spec.iters {
        for (ai, attractor) in attractors.iter().enumerate() {
            let idx = it * attractors.len() + ai;
            let column: Vec<f64> = per_state.iter().map(|v| v[idx]).collect();
            let (mean, _, err) = aggregate(&column).map_err(purikit::Error::from)?;
            rows.push(FidelityRow {
                iteration: it,
                attractor: attractor.bell_index(),
                mean_fidelity: mean,
                stderr: err,
            });
        }
    }
    csvio::write_fidelity_table(&spec.out, &rows)?;
    println!(
        "{}: fidelities for attractors {:?} over {} iterations",
        kind.name(),
        attractors.iter().map(|a| a.bell_index()).collect::<Vec<_>>(),
        spec.iters
    );

    let mut manifest = RunManifest::new("fidelity");
    manifest.protocol = Some(kind.name().to_string());
    manifest.iterations = Some(spec.iters);
    manifest.threads = spec.threads;
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write_next_to(&spec.out)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct HistogramSpec {
    pub input: PathBuf,
    pub bins: usize,
    pub exclude_zero: bool,
    pub iteration: usize,
    pub protocol: Option<ProtocolKind>,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

pub fn run_histogram(spec: &HistogramSpec) -> CliResult<()> {
    let started = Instant::now();
    if spec.iteration > 0 && spec.protocol.is_none() {
        return Err(CliError::Usage(
            "--protocol is required when --iteration > 0".into(),
        ));
    }
    let states = load_states(&spec.input)?;
    let values: Vec<f64> = match (spec.iteration, spec.protocol) {
        (0, _) => states
            .par_iter()
            .map(concurrence)
            .collect::<purikit::error::Result<_>>()?,
        (it, Some(kind)) => states
            .par_iter()
            .map(|rho| Ok(trajectory(kind, rho, it)?[it - 1].concurrence))
            .collect::<purikit::error::Result<_>>()?,
        _ => unreachable!(),
    };
    let hist =
        histogram(&values, spec.bins, spec.exclude_zero).map_err(purikit::Error::from)?;
    csvio::write_histogram(&spec.out, &hist)?;
    println!(
        "histogram of {} values in {} bins ({} included)",
        values.len(),
        spec.bins,
        hist.counts.iter().sum::<u64>()
    );

    let mut manifest = RunManifest::new("histogram");
    manifest.protocol = spec.protocol.map(|k| k.name().to_string());
    manifest.iterations = Some(spec.iteration);
    manifest.threads = spec.threads;
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write_next_to(&spec.out)?;
    Ok(())
}
