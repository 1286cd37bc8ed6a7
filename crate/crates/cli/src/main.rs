//! `maxfield`: simulate fields of maxima, emit dependence curves and margin
//! tests, and fit the magnitude link to observed block maxima.

mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxfield::config::RunConfig;
use maxfield::construction::ConstructionKind;
use maxfield::shape::ShapeFamily;

#[derive(Debug, Parser)]
#[command(name = "maxfield", version, about = "Fields of maxima with magnitude-dependent dependence")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads. Defaults to MAXFIELD_THREADS, then to all cores.
    #[arg(long, global = true, env = "MAXFIELD_THREADS")]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
struct ModelArgs {
    /// theorem1 (max-stable), theorem2 (Gaussian) or theorem3 (shape functions).
    #[arg(long)]
    construction: Option<ConstructionKind>,
    /// Replicates per block size.
    #[arg(long)]
    n: Option<usize>,
    /// Block sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Sites CSV with a header row.
    #[arg(long)]
    sites: Option<PathBuf>,
    /// Sites on a line, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    line: Option<Vec<f64>>,
    #[arg(long)]
    variance: Option<f64>,
    #[arg(long)]
    family: Option<ShapeFamily>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    /// Largest event magnitude simulated (shape functions with d > 0).
    #[arg(long, allow_hyphen_values = true)]
    ceiling: Option<f64>,
    /// Truncation tolerance of the Gaussian constructions.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_events: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate block-maxima samples, one CSV per block size.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Also write the block-size-one sample as `block_index,site,value`.
        #[arg(long)]
        observations: bool,
    },
    /// Kendall's tau against distance for every block size.
    TauCurve {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Gumbel fits and Anderson-Darling tests of the site margins.
    MarginsTest {
        #[command(flatten)]
        model: ModelArgs,
        /// Test an existing sample CSV instead of simulating.
        #[arg(long)]
        sample: Option<PathBuf>,
        /// Known scale with estimated location instead of `Gumbel(log k, 1)`.
        #[arg(long, conflicts_with = "block_maximum")]
        known_scale: bool,
        /// Test against `Gumbel(log k, 1)`.
        #[arg(long)]
        block_maximum: bool,
    },
    /// Margin locations of the shape-function construction for three
    /// families and two links.
    Table1 {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_events: Option<u64>,
    },
    /// Fit the link parameters to observed block maxima.
    Estimate {
        #[command(flatten)]
        model: ModelArgs,
        /// Observations CSV `block_index,site,value`.
        #[arg(long)]
        obs: Option<PathBuf>,
        /// Block sizes used in the likelihood, comma separated.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        #[arg(long)]
        n_sim: Option<usize>,
        /// Simulate on a distance grid and interpolate.
        #[arg(long)]
        isotropic: bool,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        max_evals: Option<usize>,
    },
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<maxfield::Error> for Failure {
    fn from(e: maxfield::Error) -> Self {
        use maxfield::Error;
        let code = match e {
            Error::Refused(_) | Error::Factorization(_) => 3,
            Error::FitNonConvergence { .. } => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Makes relative paths in a configuration file relative to its directory.
fn rebase(path: &mut Option<PathBuf>, dir: &Path) {
    if let Some(p) = path {
        if p.is_relative() {
            *p = dir.join(&*p);
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let mut cfg = RunConfig::from_toml_str(&text)?;
            let dir = path.parent().unwrap_or(Path::new("."));
            rebase(&mut cfg.sites.file, dir);
            rebase(&mut cfg.margins.sample, dir);
            rebase(&mut cfg.estimate.observations, dir);
            if cfg.out.is_relative() {
                cfg.out = dir.join(&cfg.out);
            }
            cfg
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn apply_model_args(cfg: &mut RunConfig, a: &ModelArgs) {
    if let Some(v) = a.construction {
        cfg.construction = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = &a.k {
        cfg.k = v.clone();
    }
    if let Some(v) = &a.sites {
        cfg.sites.file = Some(v.clone());
    }
    if let Some(v) = &a.line {
        cfg.sites.file = None;
        cfg.sites.line = v.clone();
    }
    if let Some(v) = a.variance {
        cfg.model.variance = v;
    }
    if let Some(v) = a.family {
        cfg.model.family = v;
    }
    if let Some(v) = a.c {
        cfg.model.c = v;
    }
    if let Some(v) = a.d {
        cfg.model.d = v;
    }
    if let Some(v) = a.ceiling {
        cfg.truncation.magnitude_ceiling = Some(v);
    }
    if let Some(v) = a.eps {
        cfg.truncation.eps = v;
    }
    if let Some(v) = a.max_events {
        cfg.truncation.max_events = v;
    }
}

fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = load_config(&cli)?;
    set_threads(cli.threads)?;
    match &cli.command {
        Command::Simulate { model, observations } => {
            apply_model_args(&mut cfg, model);
            cfg.validate()?;
            commands::simulate(&cfg, *observations)
        }
        Command::TauCurve { model } => {
            apply_model_args(&mut cfg, model);
            cfg.validate()?;
            commands::tau_curve(&cfg)
        }
        Command::MarginsTest {
            model,
            sample,
            known_scale,
            block_maximum,
        } => {
            apply_model_args(&mut cfg, model);
            if let Some(s) = sample {
                cfg.margins.sample = Some(s.clone());
            }
            if *known_scale {
                cfg.margins.null = maxfield::config::MarginNullConfig::KnownScale;
            }
            if *block_maximum {
                cfg.margins.null = maxfield::config::MarginNullConfig::BlockMaximum;
            }
            cfg.validate()?;
            commands::margins_test(&cfg)
        }
        Command::Table1 { n, max_events } => {
            if let Some(n) = n {
                cfg.table1.n = *n;
            }
            if let Some(m) = max_events {
                cfg.truncation.max_events = *m;
            }
            commands::table1(&cfg)
        }
        Command::Estimate {
            model,
            obs,
            ks,
            n_sim,
            isotropic,
            grid_points,
            starts,
            max_evals,
        } => {
            apply_model_args(&mut cfg, model);
            let e = &mut cfg.estimate;
            if let Some(v) = obs {
                e.observations = Some(v.clone());
            }
            if let Some(v) = ks {
                e.ks = v.clone();
            }
            if let Some(v) = n_sim {
                e.n_sim = *v;
            }
            if *isotropic {
                e.isotropic = true;
            }
            if let Some(v) = grid_points {
                e.grid_points = *v;
            }
            if let Some(v) = starts {
                e.starts = *v;
            }
            if let Some(v) = max_evals {
                e.max_evals = *v;
            }
            cfg.validate()?;
            commands::estimate(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
