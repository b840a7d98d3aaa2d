//! Command-line front end. Parses flags, merges them over an optional JSON
//! config file, runs the experiment and writes CSV or JSON.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::interval_coverage;
use crate::error::Error;
use crate::harness::{render, run, ExperimentConfig, ExperimentKind, Format, Grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "treedense",
    version,
    about = "Path densities of invariant percolation on d-regular trees",
    propagate_version = true
)]
pub struct CommandLine {
    /// Base seed; trial i uses seed + i.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Number of Monte Carlo trials (independent seeds).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true, env = "TREEDENSE_THREADS")]
    pub threads: Option<usize>,

    /// JSON experiment config; explicit flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Record wall-clock seconds in the output (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct TreeArg {
    /// Tree degree d (3..=255). Default 3.
    #[arg(long)]
    pub d: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SamplerArg {
    /// Percolation law, e.g. bernoulli(0.5), max(bernoulli(0.4226497308),k=2),
    /// complement(bernoulli(0.3)), matching, bipartite-site.
    #[arg(long)]
    pub sampler: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best known lower bound on D_d(p) over a grid of marginals:
    /// max(p, 1 if p >= 2/d, 1/k if p >= a(d,k) = 1 - (1 - 2/d)^(1/k), continuity).
    Bounds {
        #[command(flatten)]
        tree: TreeArg,
        /// Marginal grid start:stop:step (stop excluded), inside (0, 1).
        #[arg(long)]
        p_grid: Option<String>,
    },
    /// Coverage of (0,1) by the intervals [a(d,k), 1/k).
    Coverage {
        #[command(flatten)]
        tree: TreeArg,
        /// Largest k listed, with its overlap check a(d,k) <= 1/(k+1).
        #[arg(long)]
        k_max: Option<u32>,
        /// Grid spacing of the gap scan.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Exact table of E[M_n]/n and P(M_n = n) for Bernoulli(p), n = 1..=N.
    Exact {
        #[command(flatten)]
        tree: TreeArg,
        /// Bernoulli marginal p.
        #[arg(long)]
        p: Option<f64>,
        /// Largest horizon N.
        #[arg(long)]
        n: Option<u32>,
    },
    /// P(M_n = n) and its limit 1 - (1 - p theta)^d, theta = 1 - (1 - p theta)^(d-1).
    Survival {
        #[command(flatten)]
        tree: TreeArg,
        /// Bernoulli marginal p.
        #[arg(long)]
        p: Option<f64>,
        /// Horizons, comma separated and increasing.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
    },
    /// Monte Carlo sweep of the best path density M_n / n over seeds.
    Density {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        sampler: SamplerArg,
        /// Horizons n, comma separated and increasing.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
    },
    /// Fraction of seeds with a path whose every prefix j has >= a j - c open edges.
    Barrier {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        sampler: SamplerArg,
        /// Horizons n, comma separated and increasing.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        /// Target density a in [0, 1].
        #[arg(long)]
        a: Option<f64>,
        /// Slack c >= 0.
        #[arg(long)]
        c: Option<f64>,
        /// Stop counting survivors at this many paths.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Best single copy along the max path of a max-of-k sampler, with the
    /// ceil(open / k) pigeonhole bound.
    Copies {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        sampler: SamplerArg,
        /// Horizons n, comma separated and increasing.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
    },
    /// Empirical marginal at depths 1..=4 against the closed form (1 - (1 - m)^k for max-of-k).
    Marginal {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        sampler: SamplerArg,
    },
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Builds the experiment config: config file first, then explicit flags.
pub fn build_config(cli: &CommandLine) -> Result<ExperimentConfig, Error> {
    let kind = match &cli.command {
        Command::Bounds { .. } => ExperimentKind::BoundsCurve,
        Command::Coverage { .. } => ExperimentKind::Coverage,
        Command::Exact { .. } | Command::Survival { .. } => ExperimentKind::Survival,
        Command::Density { .. } => ExperimentKind::DensitySweep,
        Command::Barrier { .. } => ExperimentKind::Barrier,
        Command::Copies { .. } => ExperimentKind::Copies,
        Command::Marginal { .. } => ExperimentKind::Marginal,
    };
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| usage(format!("--config: {e}")))?,
        None => ExperimentConfig::new(kind),
    };
    cfg.kind = kind;
    set(&mut cfg.seed, cli.seed);
    set(&mut cfg.trials, cli.trials);
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    set(&mut cfg.format, cli.format.map(Format::from));
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.timing |= cli.timing;

    let horizons = |n: &Vec<u32>| if n.is_empty() { None } else { Some(n.clone()) };
    match &cli.command {
        Command::Bounds { tree, p_grid } => {
            set(&mut cfg.d, tree.d);
            if let Some(text) = p_grid {
                cfg.p_grid = text.parse::<Grid>().map_err(|e| usage(format!("--p-grid: {e}")))?;
            }
        }
        Command::Coverage { tree, k_max, step } => {
            set(&mut cfg.d, tree.d);
            set(&mut cfg.k_max, *k_max);
            set(&mut cfg.step, *step);
        }
        Command::Exact { tree, p, n } => {
            set(&mut cfg.d, tree.d);
            set(&mut cfg.p, *p);
            if let Some(n) = n {
                if *n == 0 {
                    return Err(usage("--n must be at least 1"));
                }
                cfg.horizons = (1..=*n).collect();
            }
        }
        Command::Survival { tree, p, n } => {
            set(&mut cfg.d, tree.d);
            set(&mut cfg.p, *p);
            set(&mut cfg.horizons, horizons(n));
        }
        Command::Density { tree, sampler, n } | Command::Copies { tree, sampler, n } => {
            set(&mut cfg.d, tree.d);
            set(&mut cfg.sampler, sampler.sampler.clone());
            set(&mut cfg.horizons, horizons(n));
        }
        Command::Barrier {
            tree,
            sampler,
            n,
            a,
            c,
            cap,
        } => {
            set(&mut cfg.d, tree.d);
            set(&mut cfg.sampler, sampler.sampler.clone());
            set(&mut cfg.horizons, horizons(n));
            set(&mut cfg.a, *a);
            set(&mut cfg.c, *c);
            set(&mut cfg.cap, *cap);
        }
        Command::Marginal { tree, sampler } => {
            set(&mut cfg.d, tree.d);
            set(&mut cfg.sampler, sampler.sampler.clone());
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the command line `args` (program name first), writing data to `stdout`
/// and diagnostics to `stderr`. Returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CommandLine::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(&cfg, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn execute(cfg: &ExperimentConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Error> {
    let records = run(cfg)?;
    match &cfg.output {
        Some(path) => crate::harness::emit(cfg.kind, &records, cfg.format, path)?,
        None => {
            let bytes = render(cfg.kind, &records, cfg.format)?;
            stdout.write_all(&bytes).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })?;
        }
    }
    if cfg.kind == ExperimentKind::Coverage {
        let report = interval_coverage(cfg.tree()?, cfg.k_max, cfg.step)?;
        let _ = if report.gaps.is_empty() {
            writeln!(
                stderr,
                "d = {}: no gaps in [{}, {}]",
                report.d,
                cfg.step,
                1.0 - cfg.step
            )
        } else {
            writeln!(stderr, "d = {}: {} gaps", report.d, report.gaps.len())
        };
    }
    Ok(())
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
