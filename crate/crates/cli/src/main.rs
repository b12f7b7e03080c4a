use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coalesce_core::coalescent::ClusterMass;
use coalesce_core::experiments::*;
use coalesce_core::graph_mst::GraphSpec;
use coalesce_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_IO: u8 = 1;

/// Coalescent processes, Smoluchowski densities and random minimal spanning
/// trees on complete and complete bipartite graphs.
///
/// Every subcommand writes a CSV table preceded by `# key=value` metadata
/// lines. Exit codes: 0 success, 2 invalid configuration, 3 numerical or
/// convergence failure, 4 resource guard tripped, 1 I/O failure.
#[derive(Debug, Parser)]
#[command(name = "coalesce-mst", version)]
struct Cli {
    /// Root seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Monte Carlo replicates (per n where applicable); each subcommand has
    /// its own default.
    #[arg(long, global = true)]
    replicates: Option<u64>,

    /// Worker threads for replicate parallelism; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Limiting mean MST lengths for K_n and K_{αn,βn}.
    Limits {
        /// Ratios γ = α/β.
        #[arg(long = "gamma", value_delimiter = ',', default_values_t = [2.0, 0.5])]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Anti-diagonal budget per bipartite series.
        #[arg(long, default_value_t = coalesce_core::closed_form::DEFAULT_MAX_DIAGONAL)]
        max_diagonal: usize,
    },
    /// Integrate a truncated reduced Smoluchowski system and compare with the
    /// closed form.
    Ode {
        #[arg(long, value_enum, default_value_t = SystemArg::Mono)]
        system: SystemArg,
        /// Mono truncation K.
        #[arg(long, default_value_t = 40)]
        truncation: usize,
        #[arg(long, default_value_t = 20)]
        k1: usize,
        #[arg(long, default_value_t = 20)]
        k2: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0])]
        times: Vec<f64>,
        /// Largest mass given its own column.
        #[arg(long, default_value_t = 5)]
        track: usize,
        /// Use fixed-step RK4 with this step instead of adaptive Dormand–Prince.
        #[arg(long)]
        rk4_step: Option<f64>,
    },
    /// Replicate Marcus–Lushnikov trajectories; mean normalized counts.
    Simulate {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        times: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        max_mass: u64,
        #[arg(long, value_enum, default_value_t = SamplerArg::Gillespie)]
        sampler: SamplerArg,
    },
    /// Sup-over-time deviation of simulated densities from the limit.
    Hydro {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [1000, 2000, 4000])]
        ns: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])]
        times: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        max_mass: u64,
    },
    /// Monte Carlo mean MST length against the limit.
    Mst {
        /// Graphs as `complete:N` or `bipartite:A:B`.
        #[arg(long = "graph", value_delimiter = ',', value_parser = parse_graph,
              default_value = "complete:200")]
        graphs: Vec<GraphSpec>,
        /// Tolerance for the bipartite limit series.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Gelation times over an (α, β) grid.
    Gelation {
        #[arg(long = "alpha", value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5, 2.0, 3.0])]
        alphas: Vec<f64>,
        #[arg(long = "beta", value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5, 2.0, 3.0])]
        betas: Vec<f64>,
    },
    /// Spread of √n-scaled count fluctuations across n.
    Fluctuations {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [500, 2000, 8000])]
        ns: Vec<u64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Cluster mass: `K` for the multiplicative kernel, `I1:I2` for cross.
        #[arg(long, default_value = "1", value_parser = parse_mass)]
        mass: ClusterMass,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SystemArg {
    Mono,
    Bi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelKind {
    Multiplicative,
    Cross,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplerArg {
    Gillespie,
    GraphCoupled,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelKind::Multiplicative)]
    kernel: KernelKind,
    /// Left partition size is round(α n).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Right partition size is round(β n).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl KernelArgs {
    fn choice(&self) -> KernelChoice {
        match self.kernel {
            KernelKind::Multiplicative => KernelChoice::Multiplicative,
            KernelKind::Cross => KernelChoice::Cross {
                alpha: self.alpha,
                beta: self.beta,
            },
        }
    }
}

fn parse_graph(s: &str) -> Result<GraphSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.parse::<u64>().map_err(|e| format!("{p:?}: {e}"));
    let spec = match parts.as_slice() {
        ["complete", n] => GraphSpec::Complete(num(n)?),
        ["bipartite", a, b] => GraphSpec::Bipartite(num(a)?, num(b)?),
        _ => return Err(format!("expected complete:N or bipartite:A:B, got {s:?}")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn parse_mass(s: &str) -> Result<ClusterMass, String> {
    let num = |p: &str| p.parse::<u64>().map_err(|e| format!("{p:?}: {e}"));
    match s.split_once(':') {
        None => Ok(ClusterMass::mono(num(s)?)),
        Some((a, b)) => Ok(ClusterMass::cross(num(a)?, num(b)?)),
    }
}

fn run(cli: &Cli) -> coalesce_core::Result<ResultTable> {
    let seed = cli.seed;
    let reps = |default: u64| cli.replicates.unwrap_or(default);
    match &cli.command {
        Command::Limits {
            gammas,
            tol,
            max_diagonal,
        } => cmd_limits(&LimitsConfig {
            gammas: gammas.clone(),
            tol: *tol,
            max_diagonal: *max_diagonal,
        }),
        Command::Ode {
            system,
            truncation,
            k1,
            k2,
            alpha,
            beta,
            times,
            track,
            rk4_step,
        } => cmd_ode(&OdeConfig {
            system: match system {
                SystemArg::Mono => OdeSystem::Mono {
                    truncation: *truncation,
                },
                SystemArg::Bi => OdeSystem::Bi {
                    k1: *k1,
                    k2: *k2,
                    alpha: *alpha,
                    beta: *beta,
                },
            },
            times: times.clone(),
            track: *track,
            rk4_step: *rk4_step,
        }),
        Command::Simulate {
            kernel,
            n,
            times,
            max_mass,
            sampler,
        } => cmd_simulate(&SimulateConfig {
            kernel: kernel.choice(),
            n: *n,
            times: times.clone(),
            max_mass: *max_mass,
            replicates: reps(20),
            sampler: match sampler {
                SamplerArg::Gillespie => Sampler::Gillespie,
                SamplerArg::GraphCoupled => Sampler::GraphCoupled,
            },
            seed,
        }),
        Command::Hydro {
            kernel,
            ns,
            times,
            max_mass,
        } => cmd_hydro(&HydroConfig {
            kernel: kernel.choice(),
            ns: ns.clone(),
            times: times.clone(),
            max_mass: *max_mass,
            replicates: reps(20),
            seed,
        }),
        Command::Mst { graphs, tol } => cmd_mst(&MstConfig {
            graphs: graphs.clone(),
            replicates: reps(100),
            tol: *tol,
            seed,
        }),
        Command::Gelation { alphas, betas } => cmd_gelation(&GelationConfig {
            alphas: alphas.clone(),
            betas: betas.clone(),
        }),
        Command::Fluctuations {
            kernel,
            ns,
            t,
            mass,
        } => cmd_fluctuations(&FluctuationsConfig {
            kernel: kernel.choice(),
            ns: ns.clone(),
            t: *t,
            mass: *mass,
            replicates: reps(500),
            seed,
        }),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Format(_) => EXIT_CONFIG,
        Error::Convergence(_) | Error::StepUnderflow { .. } | Error::Invariant(_) => EXIT_NUMERICAL,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
    }
}

fn write_table(table: &ResultTable, out: Option<&PathBuf>) -> coalesce_core::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_RESOURCE);
        }
    }
    let result = run(&cli).and_then(|table| write_table(&table, cli.out.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
