//! `oblate` — simulation harness for the largest interpoint distance among
//! uniform random points in the oblate spheroid
//! `x1^2 + x2^2 + x3^2/a^2 <= 1`.

mod config;
mod output;
mod run;

use clap::{ArgAction, Args, Parser, Subcommand};
use config::{
    parse_count, ExperimentKind, FileConfig, ModeArg, Profile, RunConfig, SamplerArg,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "oblate",
    version,
    about = "Diameter statistics of uniform random points in an oblate spheroid",
    long_about = "Simulates the largest interpoint distance M_n among n uniform random \
points in the spheroid x1^2 + x2^2 + x3^2/a^2 <= 1 (0 < a < 1), evaluates the \
Weibull limit-law constant Lambda_a by two independent numerical routes, and runs \
the statistical verification experiments (two-point tail, overlap, Poisson counts, \
limit law, normalization exponents, Chen-Stein decay). Every run is a pure function \
of its configuration and master seed; outputs are JSON records plus CSV tables and \
a run manifest."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by all experiments. Values given on the command line
/// override the config file, which overrides the profile defaults.
#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Semi-axis ratio a of the spheroid
    #[arg(long)]
    a: Option<f64>,
    /// Master seed; all experiment substreams derive from it
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (default: $OBLATE_RESULTS_DIR or ./results)
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file whose keys mirror the run-config fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluate the acceptance predicates and exit nonzero on failure
    #[arg(long, action = ArgAction::SetTrue)]
    check: bool,
    /// Override Lambda_a instead of resolving it from the constants cache
    #[arg(long)]
    lambda_override: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a point batch and dump it as CSV
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        /// Sampling method
        #[arg(long, value_enum)]
        method: Option<SamplerArg>,
        /// Number of points
        #[arg(long, value_parser = parse_count)]
        n: Option<u64>,
    },
    /// Compute the exact diameter of a sampled instance (pruned vs brute force)
    Diameter {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of points
        #[arg(long, value_parser = parse_count)]
        n: Option<u64>,
    },
    /// Evaluate I_a, Lambda_a, K_a by quadrature and/or Monte Carlo
    Constant {
        #[command(flatten)]
        common: CommonArgs,
        /// Route: both, mc5d, or reduced3d
        #[arg(long, value_enum)]
        method: Option<config::MethodArg>,
        /// Monte Carlo sample budget
        #[arg(long, value_parser = parse_count)]
        mc_budget: Option<u64>,
        /// Finest quadrature cells per axis
        #[arg(long, value_parser = parse_count)]
        cells: Option<u64>,
    },
    /// Two-point tail experiment: P(deficit <= eps) over an eps grid
    Tail {
        #[command(flatten)]
        common: CommonArgs,
        /// Pair budget
        #[arg(long, value_parser = parse_count)]
        pairs: Option<u64>,
        /// Comma-separated eps grid
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Overlap experiment: nested estimate of P(W12 <= eps, W13 <= eps)
    Overlap {
        #[command(flatten)]
        common: CommonArgs,
        /// Outer draws
        #[arg(long, value_parser = parse_count)]
        outer: Option<u64>,
        /// Inner draws per outer point
        #[arg(long, value_parser = parse_count)]
        inner: Option<u64>,
        /// Comma-separated eps grid
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Poisson-count experiment over a t grid
    Poisson {
        #[command(flatten)]
        common: CommonArgs,
        /// Points per replication
        #[arg(long, value_parser = parse_count)]
        n: Option<u64>,
        /// Replications
        #[arg(long, value_parser = parse_count)]
        reps: Option<u64>,
        /// Comma-separated t grid (default: 0, t*/2, t*, 1.5 t* with lambda(t*) = 1)
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
    },
    /// Limit-law experiment: KS distance of rescaled deficits to the Weibull law
    Limit {
        #[command(flatten)]
        common: CommonArgs,
        /// Points per replication
        #[arg(long, value_parser = parse_count)]
        n: Option<u64>,
        /// Replications
        #[arg(long, value_parser = parse_count)]
        reps: Option<u64>,
    },
    /// Normalization-exponent diagnostic (circle / interior / ball)
    Exponent {
        #[command(flatten)]
        common: CommonArgs,
        /// Support mode
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Comma-separated n grid (must span a decade)
        #[arg(long, value_delimiter = ',', value_parser = parse_count)]
        n_grid: Option<Vec<u64>>,
        /// Replications per grid point
        #[arg(long, value_parser = parse_count)]
        reps: Option<u64>,
    },
    /// Chen-Stein decay diagnostic from fresh tail and overlap curves
    Chenstein {
        #[command(flatten)]
        common: CommonArgs,
        /// Pair budget for the tail curve
        #[arg(long, value_parser = parse_count)]
        pairs: Option<u64>,
        /// Outer draws for the overlap curve
        #[arg(long, value_parser = parse_count)]
        outer: Option<u64>,
        /// Inner draws per outer point
        #[arg(long, value_parser = parse_count)]
        inner: Option<u64>,
        /// Diagnostic t (default: derived from the measured curve ranges)
        #[arg(long)]
        t: Option<f64>,
    },
    /// Run the whole verification pipeline at a profile's budgets
    All {
        #[command(flatten)]
        common: CommonArgs,
        /// Budget profile
        #[arg(long, value_enum)]
        profile: Option<Profile>,
    },
}

fn build_config(cli: Command) -> anyhow::Result<RunConfig> {
    let (kind, common, profile) = match &cli {
        Command::Sample { common, .. } => (ExperimentKind::Sample, common, Profile::Desk),
        Command::Diameter { common, .. } => (ExperimentKind::Diameter, common, Profile::Desk),
        Command::Constant { common, .. } => (ExperimentKind::Constant, common, Profile::Desk),
        Command::Tail { common, .. } => (ExperimentKind::Tail, common, Profile::Desk),
        Command::Overlap { common, .. } => (ExperimentKind::Overlap, common, Profile::Desk),
        Command::Poisson { common, .. } => (ExperimentKind::Poisson, common, Profile::Desk),
        Command::Limit { common, .. } => (ExperimentKind::Limit, common, Profile::Desk),
        Command::Exponent { common, .. } => (ExperimentKind::Exponent, common, Profile::Desk),
        Command::Chenstein { common, .. } => (ExperimentKind::Chenstein, common, Profile::Desk),
        Command::All { common, profile } => (
            ExperimentKind::All,
            common,
            profile.unwrap_or(Profile::Desk),
        ),
    };
    let mut cfg = RunConfig::defaults(kind, profile);
    if let Some(path) = &common.config {
        FileConfig::load(path)?.apply(&mut cfg);
    }

    // command-line overrides
    if let Some(a) = common.a {
        cfg.a = a;
    }
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if common.check {
        cfg.check = true;
    }
    if let Some(l) = common.lambda_override {
        cfg.lambda_override = Some(l);
    }
    match cli {
        Command::Sample { method, n, .. } => {
            if let Some(m) = method {
                cfg.sampler = m;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
        }
        Command::Diameter { n, .. } => {
            if let Some(n) = n {
                cfg.n = n;
            }
        }
        Command::Constant {
            method,
            mc_budget,
            cells,
            ..
        } => {
            if let Some(m) = method {
                cfg.method = m;
            }
            if let Some(b) = mc_budget {
                cfg.mc_budget = b;
            }
            if let Some(c) = cells {
                cfg.cells = c as usize;
            }
        }
        Command::Tail { pairs, eps, .. } => {
            if let Some(p) = pairs {
                cfg.pairs = p;
            }
            if let Some(e) = eps {
                cfg.eps_grid = e;
            }
        }
        Command::Overlap {
            outer, inner, eps, ..
        } => {
            if let Some(o) = outer {
                cfg.outer = o;
            }
            if let Some(i) = inner {
                cfg.inner = i;
            }
            if let Some(e) = eps {
                cfg.eps_grid = e;
            }
        }
        Command::Poisson {
            n, reps, t_grid, ..
        } => {
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(r) = reps {
                cfg.replications = r as u32;
            }
            if let Some(t) = t_grid {
                cfg.t_grid = t;
            }
        }
        Command::Limit { n, reps, .. } => {
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(r) = reps {
                cfg.replications = r as u32;
            }
        }
        Command::Exponent {
            mode, n_grid, reps, ..
        } => {
            if let Some(m) = mode {
                cfg.mode = m;
            }
            if let Some(g) = n_grid {
                cfg.n_grid = g;
            }
            if let Some(r) = reps {
                cfg.replications = r as u32;
            }
        }
        Command::Chenstein {
            pairs,
            outer,
            inner,
            t,
            ..
        } => {
            if let Some(p) = pairs {
                cfg.pairs = p;
            }
            if let Some(o) = outer {
                cfg.outer = o;
            }
            if let Some(i) = inner {
                cfg.inner = i;
            }
            if let Some(t) = t {
                cfg.t = t;
            }
        }
        Command::All { .. } => {}
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(run::EXIT_CONFIG as u8);
        }
    };
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e:#}");
        return ExitCode::from(run::EXIT_CONFIG as u8);
    }
    match run::execute(&cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("runtime error: {e:#}");
            ExitCode::from(run::EXIT_RUNTIME as u8)
        }
    }
}
