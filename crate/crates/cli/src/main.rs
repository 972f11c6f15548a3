use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

mod check;
mod commands;
mod input;
mod report;

use report::Format;

/// Extremal functions and zero-set certificates for reproducing-kernel spaces
/// on the unit disc.
#[derive(Debug, Parser)]
#[command(name = "dext", version)]
struct Cli {
    /// Output format; `appendix-figure` defaults to csv, everything else to table.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct KernelArgs {
    /// dirichlet | hardy | appendix_a | weighted_ds, or a JSON object such as
    /// {"family":"appendix_a","a":0.01}.
    #[arg(long, default_value = "dirichlet")]
    pub kernel: String,
    /// Parameter of the appendix_a family.
    #[arg(long)]
    pub a: Option<f64>,
    /// Parameter of the weighted_ds family.
    #[arg(long)]
    pub s: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extremal value of the subspace vanishing at the given points.
    Gamma {
        #[command(flatten)]
        kernel: KernelArgs,
        /// JSON list (inline or file) of {"r","theta"} or {"re","im"}, each with optional "order".
        #[arg(long)]
        points: String,
        /// Sample the extremal function at this many equispaced angles.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// Radius of the sample circle; 1 samples boundary values.
        #[arg(long, default_value_t = 1.0)]
        sample_radius: f64,
    },
    /// Extremal data for the single-atom singular inner function S_a.
    Atomic {
        /// Comma-separated masses.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
    },
    /// Cluster decomposition certificate for a finite zero sequence.
    #[command(group(ArgGroup::new("input").required(true).args(["points", "partition"])))]
    Certify {
        /// JSON point list; partitioned greedily.
        #[arg(long)]
        points: Option<String>,
        /// JSON list of {"vertex": theta, "points": [...]}.
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_clusters: usize,
        /// Angles in the domination grid.
        #[arg(long, default_value_t = 8192)]
        grid: usize,
    },
    /// The two-point curve for the K_a kernel with zeros at -r and t.
    AppendixFigure {
        #[arg(long, default_value_t = 0.01)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Number of t nodes.
        #[arg(long, default_value_t = 181)]
        grid: usize,
        #[arg(long, default_value_t = 0.05)]
        t_min: f64,
        #[arg(long, default_value_t = 0.95)]
        t_max: f64,
        /// Write an SVG plot of the curve here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Dirichlet-norm diagnostics for a Blaschke product times an atomic singular factor.
    Inner {
        /// JSON point list of zeros.
        #[arg(long)]
        points: Option<String>,
        /// JSON list of {"theta","mass"}.
        #[arg(long)]
        measure: Option<String>,
        /// Order of the zero at the origin.
        #[arg(long, default_value_t = 0)]
        origin_order: usize,
    },
    /// Condition sums over finite sequences.
    #[command(group(ArgGroup::new("seq").required(true).args(["moduli", "masses", "thetas", "gammas"])))]
    Sums {
        /// Moduli r_n in (0,1): Blaschke and Shapiro-Shields sums.
        #[arg(long, value_delimiter = ',')]
        moduli: Option<Vec<f64>>,
        /// Atom masses: 1/ln(1+1/a) sums and optional a^s sums.
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<f64>>,
        /// Exponent for the weighted mass sum.
        #[arg(long)]
        s: Option<f64>,
        /// Decreasing angles in (0,1): gap entropy and the uniqueness witness.
        #[arg(long, value_delimiter = ',')]
        thetas: Option<Vec<f64>>,
        /// Extremal values in (0,1]: infinite-product criterion.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
    },
    /// Seeded property suites: hardy, bruteforce, pushout, poisson, domination.
    Check {
        /// Suites to run (repeatable); all by default.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the per-suite trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Kernel for the pushout suite; non-Dirichlet kernels run in exploration mode.
        #[command(flatten)]
        kernel: KernelArgs,
    },
}

/// How a command ended, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Input(anyhow::Error),
    /// Exit 3.
    Numeric(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<dext_core::Error> for Failure {
    fn from(e: dext_core::Error) -> Self {
        use dext_core::Error::*;
        match e {
            InvalidInput(_) | Domain(_) | MalformedSequence(_) => Failure::Input(e.into()),
            _ => Failure::Numeric(e.into()),
        }
    }
}

/// Rendered output plus whether every checked property held.
pub struct Outcome {
    pub text: String,
    pub properties_hold: bool,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, properties_hold: true }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let fmt = |default| cli.format.unwrap_or(default);
    match cli.command {
        Command::Gamma { kernel, points, samples, sample_radius } => {
            commands::gamma(&kernel, &points, samples, sample_radius, fmt(Format::Table))
        }
        Command::Atomic { a } => commands::atomic(&a, fmt(Format::Table)),
        Command::Certify { points, partition, max_clusters, grid } => {
            commands::certify(points.as_deref(), partition.as_deref(), max_clusters, grid, fmt(Format::Table))
        }
        Command::AppendixFigure { a, r, grid, t_min, t_max, plot } => {
            commands::appendix(a, r, grid, t_min, t_max, plot.as_deref(), fmt(Format::Csv))
        }
        Command::Inner { points, measure, origin_order } => {
            commands::inner(points.as_deref(), measure.as_deref(), origin_order, fmt(Format::Table))
        }
        Command::Sums { moduli, masses, s, thetas, gammas } => {
            commands::sums(moduli, masses, s, thetas, gammas, fmt(Format::Table))
        }
        Command::Check { suites, seed, trials, kernel } => check::run(&suites, seed, trials, &kernel, fmt(Format::Table)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(o) => {
            let written = match &out {
                Some(p) => fs::write(p, &o.text).map_err(|e| format!("writing {}: {e}", p.display())),
                None => {
                    print!("{}", o.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if o.properties_hold {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
