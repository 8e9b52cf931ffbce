use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cml::config::{parse_eis, Command, Level, MomentMode, RunConfig};
use cml::{run_collect, CliError, CliResult};
use cubic_lab::weights::TestFunction;

/// Cubic Hecke L-function verification lab.
#[derive(Parser, Debug)]
#[command(name = "cml", version)]
struct Cli {
    /// Read the run configuration from a `key = value` file; flags given
    /// alongside override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the effective configuration to this file and continue.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    /// Worker threads (default: CML_WORKERS or all logical cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for L-value caches.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// CSV destination (default: standard output).
    #[arg(long, visible_alias = "csv", global = true)]
    output: Option<PathBuf>,
    /// Base random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Euler-product constants C, D, c₀, 𝒫 and the 𝒫₁ product.
    Constants {
        /// Prime-ideal norm bound.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Fast identity checks (Gauss sums, symbols, root numbers, Φ₁, Poisson).
    Verify,
    /// Family moments over one or more scales.
    Moments(MomentArgs),
    /// Partial sums of normalized Gauss sums against the T^{5/6} prediction.
    Bias {
        /// Shift as "a,b".
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
        /// Largest T.
        #[arg(long)]
        tmax: Option<String>,
    },
    /// Cubic large-sieve ratio probe.
    SieveProbe {
        /// Norm bound of the moduli.
        #[arg(long)]
        a: Option<i64>,
        /// Norm bound of the coefficients.
        #[arg(long)]
        b: Option<i64>,
        /// Number of random coefficient vectors.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Radial Poisson summation check for χ_q.
    Poisson {
        /// Primary modulus as "a,b".
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Residue class mod 9 as "a,b".
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// Length M.
        #[arg(long)]
        m: Option<f64>,
    },
    /// The acceptance checklist.
    Suite {
        /// fast | full.
        #[arg(long)]
        level: Option<String>,
    },
}

#[derive(Args, Debug)]
struct MomentArgs {
    /// Scales X, comma separated.
    #[arg(long)]
    x: Option<String>,
    /// first | second | nonvanishing | mollified.
    #[arg(long)]
    mode: Option<String>,
    /// Test function: bump | smoothstep.
    #[arg(long)]
    f: Option<String>,
    /// Mollifier exponent θ.
    #[arg(long)]
    theta: Option<f64>,
    /// AFE truncation constant.
    #[arg(long)]
    truncation: Option<f64>,
}

fn command_of(sub: &Sub) -> Command {
    match sub {
        Sub::Constants { .. } => Command::Constants,
        Sub::Verify => Command::Verify,
        Sub::Moments(_) => Command::Moments,
        Sub::Bias { .. } => Command::Bias,
        Sub::SieveProbe { .. } => Command::SieveProbe,
        Sub::Poisson { .. } => Command::Poisson,
        Sub::Suite { .. } => Command::Suite,
    }
}

fn build_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(path), sub) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg = RunConfig::parse(&text)?;
            if let Some(sub) = sub {
                if command_of(sub) != cfg.command {
                    return Err(CliError::Config(format!(
                        "config file is for `{}`, not `{}`",
                        cfg.command.name(),
                        command_of(sub).name()
                    )));
                }
            }
            cfg
        }
        (None, Some(sub)) => RunConfig::new(command_of(sub)),
        (None, None) => return Err(CliError::Config("a subcommand or --config is required".into())),
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(d) = &cli.cache_dir {
        cfg.cache_dir = Some(d.clone());
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match &cli.command {
        Some(Sub::Constants { bound: Some(b) }) => cfg.prime_bound = *b,
        Some(Sub::Moments(m)) => {
            if let Some(x) = &m.x {
                cfg.set("x", x)?;
            }
            if let Some(mode) = &m.mode {
                cfg.mode = MomentMode::parse(mode)?;
            }
            if let Some(f) = &m.f {
                cfg.f = TestFunction::parse(f)?;
            }
            if let Some(t) = m.theta {
                cfg.theta = t;
            }
            if let Some(t) = m.truncation {
                cfg.truncation = t;
            }
        }
        Some(Sub::Bias { k, tmax }) => {
            if let Some(k) = k {
                cfg.k = parse_eis(k)?;
            }
            if let Some(t) = tmax {
                cfg.set("tmax", t)?;
            }
        }
        Some(Sub::SieveProbe { a, b, trials }) => {
            cfg.sieve_a = a.unwrap_or(cfg.sieve_a);
            cfg.sieve_b = b.unwrap_or(cfg.sieve_b);
            cfg.trials = trials.unwrap_or(cfg.trials);
        }
        Some(Sub::Poisson { q, c, m }) => {
            if let Some(q) = q {
                cfg.q = parse_eis(q)?;
            }
            if let Some(c) = c {
                cfg.c = parse_eis(c)?;
            }
            cfg.m = m.unwrap_or(cfg.m);
        }
        Some(Sub::Suite { level: Some(l) }) => cfg.level = Level::parse(l)?,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = build_config(cli)?;
    if let Some(path) = &cli.save_config {
        std::fs::write(path, cfg.to_text())?;
    }
    let (out, failure) = run_collect(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, out.to_csv())?,
        None => print!("{}", out.to_csv()),
    }
    match failure {
        Some(msg) => Err(CliError::Assertion(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cml: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
