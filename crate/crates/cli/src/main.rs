//! Command-line front end for the spread/basket FFT pricer.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spread_fft::{Result, SpreadError};

use config::{reference_model, Method, RunConfig};
use output::{emit, error_record, Format, Table};

#[derive(Parser)]
#[command(name = "spread-fft", version, about = "FFT pricing of spread and basket options")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by every command. They override the config file.
#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// gbm, sv or vg. Switching kind loads that model's reference parameters.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Lattice size per axis (power of two).
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    ubar: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eps1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eps2: Option<f64>,
    /// Comma-separated spot prices. Basket: long asset first.
    #[arg(long, global = true, value_delimiter = ',')]
    spots: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    strikes: Option<Vec<f64>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo path count.
    #[arg(long, global = true)]
    paths: Option<u64>,
    /// Monte Carlo time steps (stochastic volatility only).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Spread option prices for a spot pair and a strike list.
    Price {
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        degree: Option<usize>,
        /// Add Monte Carlo estimates.
        #[arg(long)]
        mc: bool,
    },
    /// Analytic FFT Greeks next to central finite differences.
    Greeks {
        /// Relative finite-difference displacement.
        #[arg(long)]
        fd_rel: Option<f64>,
    },
    /// Err over the standard log-spot grid for each (N, u_bar).
    ErrStudy {
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        ubars: Option<Vec<f64>>,
    },
    /// Panel timings, median of several runs.
    Bench {
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long)]
        reps: Option<usize>,
    },
    /// GBM basket spread prices.
    Basket {
        #[arg(long, allow_negative_numbers = true)]
        eps_tilde: Option<f64>,
        /// Short-leg shifts, comma-separated.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long)]
        mc: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Price { .. } => "price",
            Command::Greeks { .. } => "greeks",
            Command::ErrStudy { .. } => "err-study",
            Command::Bench { .. } => "bench",
            Command::Basket { .. } => "basket",
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| SpreadError::InvalidParameter(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(m) = &c.model {
        let wanted = reference_model(m)?;
        if std::mem::discriminant(&wanted) != std::mem::discriminant(&cfg.model) {
            cfg.model = wanted;
        }
    }
    if let Some(n) = c.n {
        cfg.lattice.n = n;
    }
    if let Some(u) = c.ubar {
        cfg.lattice.u_bar = u;
    }
    if let Some(e) = c.eps1 {
        cfg.eps.eps1 = e;
    }
    if let Some(e) = c.eps2 {
        cfg.eps.eps2 = e;
    }
    if let Some(k) = &c.strikes {
        cfg.strikes = k.clone();
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(p) = c.paths {
        cfg.mc.n_paths = p;
    }
    if let Some(s) = c.steps {
        cfg.mc.n_steps = s;
    }
    let basket = matches!(cli.command, Command::Basket { .. });
    if let Some(s) = &c.spots {
        if basket {
            cfg.basket.spots = s.clone();
        } else {
            cfg.spots = <[f64; 2]>::try_from(s.as_slice())
                .map_err(|_| SpreadError::InvalidParameter(format!("expected 2 spots, got {}", s.len())))?;
        }
    }
    match &cli.command {
        Command::Price { method, degree, mc } => {
            if let Some(m) = method {
                cfg.price.method = *m;
            }
            if let Some(d) = degree {
                cfg.price.degree = *d;
            }
            cfg.price.mc |= mc;
        }
        Command::Greeks { fd_rel } => {
            if let Some(h) = fd_rel {
                cfg.greeks.fd_rel = *h;
            }
        }
        Command::ErrStudy { ns, ubars } => {
            if let Some(n) = ns {
                cfg.err_study.n = n.clone();
            }
            if let Some(u) = ubars {
                cfg.err_study.u_bar = u.clone();
            }
        }
        Command::Bench { models, ns, reps } => {
            if let Some(m) = models {
                cfg.bench.models = m.clone();
            }
            if let Some(n) = ns {
                cfg.bench.n = n.clone();
            }
            if let Some(r) = reps {
                cfg.bench.reps = *r;
            }
        }
        Command::Basket { eps_tilde, eps, mc } => {
            if let Some(e) = eps_tilde {
                cfg.basket.eps_tilde = *e;
            }
            if let Some(e) = eps {
                cfg.basket.eps = e.clone();
            }
            cfg.basket.mc |= mc;
        }
    }
    Ok(cfg)
}

enum Failure {
    Config(String),
    Numerical(String),
}

type Validate = fn(&RunConfig) -> Result<()>;
type Compute = fn(&RunConfig) -> Result<Table>;

fn run(cli: &Cli) -> std::result::Result<(RunConfig, Table), Failure> {
    let config = |e: SpreadError| Failure::Config(e.to_string());
    let cfg = resolve(cli).map_err(config)?;
    let (validate, compute): (Validate, Compute) = match cli.command {
        Command::Price { .. } => (RunConfig::validate_price, commands::price),
        Command::Greeks { .. } => (RunConfig::validate_greeks, commands::greeks),
        Command::ErrStudy { .. } => (RunConfig::validate_err_study, commands::err_study),
        Command::Bench { .. } => (RunConfig::validate_bench, commands::bench),
        Command::Basket { .. } => (RunConfig::validate_basket, commands::basket),
    };
    validate(&cfg).map_err(config)?;
    match compute(&cfg) {
        Ok(t) => Ok((cfg, t)),
        Err(e) if e.is_config_error() => Err(Failure::Config(e.to_string())),
        Err(e) => Err(Failure::Numerical(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, message) = match run(&cli) {
        Ok((cfg, table)) => {
            let written = match &cli.common.out {
                Some(path) => File::create(path).and_then(|f| {
                    let mut w = BufWriter::new(f);
                    emit(&mut w, cli.common.format, cli.command.name(), &cfg, &table)?;
                    w.flush()
                }),
                None => emit(io::stdout().lock(), cli.common.format, cli.command.name(), &cfg, &table),
            };
            match written {
                Ok(()) => return ExitCode::SUCCESS,
                Err(e) => (2, format!("cannot write output: {e}")),
            }
        }
        Err(Failure::Config(m)) => (2, m),
        Err(Failure::Numerical(m)) => (3, m),
    };
    eprintln!("{}", error_record(code, &message));
    ExitCode::from(code as u8)
}
