//! Run configuration and its plain-text `key = value` form.
//!
//! Every CSV written by the front end embeds the configuration as
//! `# config: key = value` comment lines; [`RunConfig::from_csv_header`]
//! recovers it.

use std::fmt::Write as _;
use std::path::PathBuf;

use cubic_lab::eisenstein::EisInt;
use cubic_lab::weights::TestFunction;

use crate::error::{CliError, CliResult};

/// Prefix of configuration lines in CSV headers.
pub const CONFIG_PREFIX: &str = "# config: ";

/// Subcommand selected by a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Euler-product constants.
    Constants,
    /// Algebraic and analytic identity checks.
    Verify,
    /// Family moments.
    Moments,
    /// Partial sums of normalized Gauss sums.
    Bias,
    /// Cubic large-sieve ratio probe.
    SieveProbe,
    /// Radial Poisson summation check.
    Poisson,
    /// The acceptance checklist.
    Suite,
}

impl Command {
    /// Name used on the command line and in config files.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Verify => "verify",
            Command::Moments => "moments",
            Command::Bias => "bias",
            Command::SieveProbe => "sieve-probe",
            Command::Poisson => "poisson",
            Command::Suite => "suite",
        }
    }

    /// Parses [`Command::name`].
    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "constants" => Command::Constants,
            "verify" => Command::Verify,
            "moments" => Command::Moments,
            "bias" => Command::Bias,
            "sieve-probe" => Command::SieveProbe,
            "poisson" => Command::Poisson,
            "suite" => Command::Suite,
            _ => return Err(CliError::Config(format!("unknown command {s:?}"))),
        })
    }
}

/// Which moment the `moments` command computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentMode {
    /// `Σ L(1/2, χ_q) F(N(q)/X)`.
    First,
    /// `Σ |L(1/2, χ_q)|² F(N(q)/X)`, with the affine fit over the grid.
    Second,
    /// Fraction above the truncation certificate.
    Nonvanishing,
    /// Mollified moments and the Cauchy–Schwarz ratio.
    Mollified,
}

impl MomentMode {
    /// Name used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            MomentMode::First => "first",
            MomentMode::Second => "second",
            MomentMode::Nonvanishing => "nonvanishing",
            MomentMode::Mollified => "mollified",
        }
    }

    /// Parses [`MomentMode::name`].
    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "first" => MomentMode::First,
            "second" => MomentMode::Second,
            "nonvanishing" => MomentMode::Nonvanishing,
            "mollified" => MomentMode::Mollified,
            _ => return Err(CliError::Config(format!("unknown moment mode {s:?}"))),
        })
    }
}

/// Size of the acceptance run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Identity checks only; a few seconds.
    Fast,
    /// Every criterion at its stated scale.
    Full,
}

impl Level {
    /// Name used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Level::Fast => "fast",
            Level::Full => "full",
        }
    }

    /// Parses [`Level::name`].
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(CliError::Config(format!("unknown level {s:?}"))),
        }
    }
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Subcommand.
    pub command: Command,
    /// Family scales `X` (moments) — one CSV row each.
    pub x: Vec<f64>,
    /// Test function `F`.
    pub f: TestFunction,
    /// Mollifier length exponent.
    pub theta: f64,
    /// Moment computed by `moments`.
    pub mode: MomentMode,
    /// AFE truncation constant.
    pub truncation: f64,
    /// Prime-norm bound for Euler products.
    pub prime_bound: u64,
    /// Shift `k` for `bias`.
    pub k: EisInt,
    /// Largest `T` for `bias`.
    pub tmax: i64,
    /// Norm bound `A` for `sieve-probe`.
    pub sieve_a: i64,
    /// Norm bound `B` for `sieve-probe`.
    pub sieve_b: i64,
    /// Trials for `sieve-probe`.
    pub trials: usize,
    /// Modulus for `poisson`.
    pub q: EisInt,
    /// Residue class mod 9 for `poisson`.
    pub c: EisInt,
    /// Length `M` for `poisson`.
    pub m: f64,
    /// Suite level.
    pub level: Level,
    /// Worker threads (`0` = all logical cores).
    pub workers: usize,
    /// Directory for L-value caches.
    pub cache_dir: Option<PathBuf>,
    /// Base random seed.
    pub seed: u64,
    /// CSV destination; standard output when absent.
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for a command.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            x: vec![1e5],
            f: TestFunction::Bump,
            theta: 0.1,
            mode: MomentMode::First,
            truncation: cubic_lab::lfun::DEFAULT_TRUNCATION,
            prime_bound: 200_000,
            k: EisInt::one(),
            tmax: 1_000_000,
            sieve_a: 500,
            sieve_b: 500,
            trials: 20,
            q: EisInt::one(),
            c: EisInt::one(),
            m: 400.0,
            level: Level::Fast,
            workers: 0,
            cache_dir: None,
            seed: 1,
            output: None,
        }
    }

    /// Checks value ranges that the parser cannot.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.x.is_empty() || self.x.iter().any(|x| !(*x >= 10.0) || !x.is_finite()) {
            return bad(format!("x must be finite values ≥ 10, got {:?}", self.x));
        }
        if !(self.truncation > 0.0) {
            return bad(format!("truncation must be positive, got {}", self.truncation));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0 / 6.0) {
            return bad(format!("theta must lie in (0, 1/6], got {}", self.theta));
        }
        if self.k.is_zero() {
            return bad("k must be nonzero".into());
        }
        if !self.q.is_primary() {
            return bad(format!("q = {} must be primary", self.q));
        }
        if !(self.m > 0.0) {
            return bad(format!("m must be positive, got {}", self.m));
        }
        if self.prime_bound < 1000 {
            return bad(format!("prime bound must be ≥ 1000, got {}", self.prime_bound));
        }
        Ok(())
    }

    /// Plain-text form, one `key = value` per line.
    pub fn to_text(&self) -> String {
        let xs: Vec<String> = self.x.iter().map(|x| format!("{x:e}")).collect();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("command", self.command.name().into());
        kv("x", xs.join(","));
        kv("f", self.f.name().into());
        kv("theta", format!("{:e}", self.theta));
        kv("mode", self.mode.name().into());
        kv("truncation", format!("{:e}", self.truncation));
        kv("prime_bound", self.prime_bound.to_string());
        kv("k", format_eis(&self.k));
        kv("tmax", self.tmax.to_string());
        kv("sieve_a", self.sieve_a.to_string());
        kv("sieve_b", self.sieve_b.to_string());
        kv("trials", self.trials.to_string());
        kv("q", format_eis(&self.q));
        kv("c", format_eis(&self.c));
        kv("m", format!("{:e}", self.m));
        kv("level", self.level.name().into());
        kv("workers", self.workers.to_string());
        kv("cache_dir", path(&self.cache_dir));
        kv("seed", self.seed.to_string());
        kv("output", path(&self.output));
        s
    }

    /// Parses [`RunConfig::to_text`]; blank lines and `#` comments are
    /// skipped, `command` is required and other keys default.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let command = pairs
            .iter()
            .find(|(k, _)| k == "command")
            .ok_or_else(|| CliError::Config("missing key `command`".into()))?;
        let mut cfg = RunConfig::new(Command::parse(&command.1)?);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Recovers the configuration embedded in a CSV header.
    pub fn from_csv_header(csv: &str) -> CliResult<Self> {
        let body: Vec<&str> = csv.lines().filter_map(|l| l.strip_prefix(CONFIG_PREFIX)).collect();
        Self::parse(&body.join("\n"))
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, v: &str) -> CliResult<()> {
        let path = |v: &str| if v.is_empty() { None } else { Some(PathBuf::from(v)) };
        match key {
            "command" => self.command = Command::parse(v)?,
            "x" => self.x = v.split(',').map(|x| num(key, x)).collect::<CliResult<_>>()?,
            "f" => self.f = TestFunction::parse(v)?,
            "theta" => self.theta = num(key, v)?,
            "mode" => self.mode = MomentMode::parse(v)?,
            "truncation" => self.truncation = num(key, v)?,
            "prime_bound" => self.prime_bound = num(key, v)?,
            "k" => self.k = parse_eis(v)?,
            "tmax" => self.tmax = num(key, v)?,
            "sieve_a" => self.sieve_a = num(key, v)?,
            "sieve_b" => self.sieve_b = num(key, v)?,
            "trials" => self.trials = num(key, v)?,
            "q" => self.q = parse_eis(v)?,
            "c" => self.c = parse_eis(v)?,
            "m" => self.m = num(key, v)?,
            "level" => self.level = Level::parse(v)?,
            "workers" => self.workers = num(key, v)?,
            "cache_dir" => self.cache_dir = path(v),
            "seed" => self.seed = num(key, v)?,
            "output" => self.output = path(v),
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    let v = v.trim();
    // Integers may be written in float notation (`1e6`).
    v.parse::<T>()
        .or_else(|_| match v.parse::<f64>() {
            Ok(f) if f.fract() == 0.0 && f.abs() < 9e15 => format!("{}", f as i64).parse::<T>().map_err(|_| ()),
            _ => Err(()),
        })
        .map_err(|_| CliError::Config(format!("bad value {v:?} for {key}")))
}

/// `"a,b"` for `a + bω`.
pub fn format_eis(x: &EisInt) -> String {
    format!("{},{}", x.a, x.b)
}

/// Parses `"a,b"` as `a + bω`.
pub fn parse_eis(s: &str) -> CliResult<EisInt> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("expected \"a,b\", got {s:?}")))?;
    Ok(EisInt::new(num("a", a)?, num("b", b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::new(Command::Moments);
        cfg.x = vec![1e4, 3e4];
        cfg.mode = MomentMode::Second;
        cfg.k = EisInt::new(-2, 3);
        cfg.cache_dir = Some(PathBuf::from("/tmp/cache"));
        cfg.f = TestFunction::Smoothstep;
        let back = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("x = 1e5"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("command = moments\nx = abc"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("command = moments\ntheta = 0.5"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("command = nope"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("command = bias\nwhat = 1"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("command = poisson\nq = 2,1"), Err(CliError::Config(_))));
    }

    #[test]
    fn integers_accept_float_notation() {
        let cfg = RunConfig::parse("command = bias\ntmax = 1e6\nk = 1,0").unwrap();
        assert_eq!(cfg.tmax, 1_000_000);
    }
}
