use clap::{Parser, Subcommand};
use purikit::protocols::ProtocolKind;
use purikit::variational::MeasurementPolicy;
use purikit_cli::commands::{self, EvalProtocol};
use purikit_cli::{with_thread_pool, CliResult};
use std::path::PathBuf;
use std::process::ExitCode;

/// Statistical evaluation and variational optimization of two-qubit
/// entanglement purification protocols.
#[derive(Parser)]
#[command(name = "purikit", version, about)]
struct Cli {
    /// Cap the worker pool; PURIKIT_THREADS is the fallback. Results are
    /// identical for every thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample two-qubit density matrices with the hit-and-run chain.
    Sample {
        /// States per chain.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Number of independent chains (seeds seed, seed+1, ...).
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Discarded steps before the first emitted state.
        #[arg(long = "burn-in", default_value_t = 1000)]
        burn_in: usize,
        /// Keep every thin-th chain point.
        #[arg(long = "thin", default_value_t = 1)]
        thinning: usize,
        /// Publication-scale run: 10^6 states per chain (overrides --n).
        #[arg(long = "paper-scale", default_value_t = false)]
        paper_scale: bool,
        /// Output dump; a JSON manifest is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Iterate a purification protocol over a sampled dump.
    Evaluate {
        /// bennett | deutsch | mfi | cnot | ultimate
        #[arg(long, value_parser = parse_eval_protocol)]
        protocol: EvalProtocol,
        #[arg(long, default_value_t = 15)]
        iters: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize the variational protocol round by round.
    Optimize {
        #[arg(long, default_value_t = 15)]
        rounds: usize,
        /// greedy | fixed:k (k in 1..=4)
        #[arg(long, value_parser = parse_policy)]
        policy: MeasurementPolicy,
        /// Destroy entanglement with the fixed projector in round 1.
        #[arg(long = "projector-first", default_value_t = false)]
        projector_first: bool,
        /// Optimization subset size per round.
        #[arg(long, default_value_t = 1000)]
        ns: usize,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Result CSV; optimized angles land in <out>.angles.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Average conditional fidelities toward each protocol attractor.
    Fidelity {
        /// bennett | deutsch | mfi | cnot
        #[arg(long, value_parser = parse_protocol)]
        protocol: ProtocolKind,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Concurrence histogram of a dump, optionally after protocol rounds.
    Histogram {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Drop zero-concurrence states from the counts.
        #[arg(long = "exclude-zero", default_value_t = true, action = clap::ArgAction::Set)]
        exclude_zero: bool,
        /// Protocol rounds to apply before binning (0 = raw sample).
        #[arg(long, default_value_t = 0)]
        iteration: usize,
        /// Required when --iteration > 0.
        #[arg(long, value_parser = parse_protocol)]
        protocol: Option<ProtocolKind>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    s.parse::<ProtocolKind>().map_err(|e| e.to_string())
}

fn parse_eval_protocol(s: &str) -> Result<EvalProtocol, String> {
    s.parse()
}

fn parse_policy(s: &str) -> Result<MeasurementPolicy, String> {
    s.parse::<MeasurementPolicy>().map_err(|e| e.to_string())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let threads = cli.threads;
    match cli.command {
        Command::Sample {
            n,
            chains,
            seed,
            burn_in,
            thinning,
            paper_scale,
            out,
        } => {
            let spec = commands::SampleSpec {
                n,
                chains,
                seed,
                burn_in,
                thinning,
                paper_scale,
                out,
                threads,
            };
            with_thread_pool(threads, || commands::run_sample(&spec))
        }
        Command::Evaluate {
            protocol,
            iters,
            input,
            out,
        } => {
            let spec = commands::EvaluateSpec {
                protocol,
                iters,
                input,
                out,
                threads,
            };
            with_thread_pool(threads, || commands::run_evaluate(&spec))
        }
        Command::Optimize {
            rounds,
            policy,
            projector_first,
            ns,
            restarts,
            seed,
            input,
            out,
        } => {
            let spec = commands::OptimizeSpec {
                rounds,
                policy,
                projector_first,
                subset_size: ns,
                restarts,
                seed,
                input,
                out,
                threads,
            };
            with_thread_pool(threads, || commands::run_optimize(&spec))
        }
        Command::Fidelity {
            protocol,
            iters,
            input,
            out,
        } => {
            let spec = commands::FidelitySpec {
                protocol,
                iters,
                input,
                out,
                threads,
            };
            with_thread_pool(threads, || commands::run_fidelity(&spec))
        }
        Command::Histogram {
            input,
            bins,
            exclude_zero,
            iteration,
            protocol,
            out,
        } => {
            let spec = commands::HistogramSpec {
                input,
                bins,
                exclude_zero,
                iteration,
                protocol,
                out,
                threads,
            };
            with_thread_pool(threads, || commands::run_histogram(&spec))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("purikit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
