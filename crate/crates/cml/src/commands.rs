//! Subcommand execution and CSV emission.

use std::fmt::Write as _;

use cubic_lab::bias::{bias_scan_with, large_sieve_ratio, poisson_check, PsiTable};
use cubic_lab::euler::{constant, remarkable_identity, script_p_alternative, ConstantName, EulerProductResult};
use cubic_lab::family::{
    build_mollifier, mollified_moments, second_moment_fit, second_moment_slope_prediction, with_workers,
    worker_count, FamilyWindow,
};
use cubic_lab::gauss::Tau3Phase;

use crate::acceptance::{run_suite, Status, FAST_CRITERIA};
use crate::config::{format_eis, Command, Level, MomentMode, RunConfig, CONFIG_PREFIX};
use crate::error::{CliError, CliResult};

/// CSV text of a run: comment header plus body.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// `#` lines: version, configuration, certificates.
    pub header: String,
    /// Column line and data rows.
    pub body: String,
}

impl RunOutput {
    /// Header followed by body.
    pub fn to_csv(&self) -> String {
        format!("{}{}", self.header, self.body)
    }
}

fn header(cfg: &RunConfig, notes: &[String]) -> String {
    let mut h = format!("# cml {}\n", env!("CARGO_PKG_VERSION"));
    for line in cfg.to_text().lines() {
        let _ = writeln!(h, "{CONFIG_PREFIX}{line}");
    }
    for n in notes {
        let _ = writeln!(h, "# {n}");
    }
    h
}

/// Executes the configured subcommand on a pool of `workers` threads
/// (`CML_WORKERS` or all cores when `0`). Failed hard assertions are
/// reported as [`CliError::Assertion`] after the output is produced, so
/// callers get both; use [`run_collect`] for that.
pub fn run(cfg: &RunConfig) -> CliResult<RunOutput> {
    let (out, failure) = run_collect(cfg)?;
    match failure {
        Some(msg) => Err(CliError::Assertion(msg)),
        None => Ok(out),
    }
}

/// Like [`run`], but returns the output together with an assertion-failure
/// message instead of discarding the output.
pub fn run_collect(cfg: &RunConfig) -> CliResult<(RunOutput, Option<String>)> {
    cfg.validate()?;
    let workers = if cfg.workers == 0 { worker_count() } else { cfg.workers };
    with_workers(workers, || dispatch(cfg))?
}

fn dispatch(cfg: &RunConfig) -> CliResult<(RunOutput, Option<String>)> {
    match cfg.command {
        Command::Constants => constants(cfg).map(|o| (o, None)),
        Command::Moments => moments(cfg).map(|o| (o, None)),
        Command::Bias => bias(cfg).map(|o| (o, None)),
        Command::SieveProbe => sieve_probe(cfg).map(|o| (o, None)),
        Command::Poisson => poisson(cfg).map(|o| (o, None)),
        Command::Verify => Ok(suite(cfg, Level::Fast)),
        Command::Suite => Ok(suite(cfg, cfg.level)),
    }
}

fn constant_row(body: &mut String, name: &str, r: &EulerProductResult) {
    let _ = writeln!(
        body,
        "{name},{:.16e},{:.16e},{},{:.6e},{:.6e}",
        r.value, r.truncated_value, r.prime_norm_bound, r.tail_estimate, r.successive_diff
    );
}

fn constants(cfg: &RunConfig) -> CliResult<RunOutput> {
    let mut body = String::from("name,value,truncated_value,prime_norm_bound,tail_estimate,successive_diff\n");
    for name in [ConstantName::C, ConstantName::D, ConstantName::C0, ConstantName::ScriptP] {
        constant_row(&mut body, name.name(), &constant(name, cfg.prime_bound)?);
    }
    constant_row(&mut body, "scriptP_alternative", &script_p_alternative(cfg.prime_bound));
    let p1 = remarkable_identity(cfg.prime_bound)?;
    let _ = writeln!(body, "scriptP1,{p1:.16e},{p1:.16e},{},0,0", cfg.prime_bound);
    let notes = vec!["tail_estimate: log of omitted factors from the prime ideal theorem".to_string()];
    Ok(RunOutput { header: header(cfg, &notes), body })
}

fn windows(cfg: &RunConfig) -> CliResult<Vec<FamilyWindow>> {
    let mut xs = cfg.x.clone();
    xs.sort_by(f64::total_cmp);
    xs.iter()
        .map(|&x| FamilyWindow::load_or_compute(x, cfg.f, cfg.truncation, cfg.cache_dir.as_deref()).map_err(Into::into))
        .collect()
}

fn moments(cfg: &RunConfig) -> CliResult<RunOutput> {
    let ws = windows(cfg)?;
    let mut body = String::new();
    let mut notes = Vec::new();
    match cfg.mode {
        MomentMode::First => {
            body.push_str("x,count,re_s,im_s,prediction,ratio\n");
            for w in &ws {
                let r = w.first_moment()?;
                let _ = writeln!(body, "{:e},{},{:.16e},{:.16e},{:.16e},{:.10}", r.x, r.count, r.raw.re, r.raw.im, r.prediction, r.ratio);
            }
        }
        MomentMode::Second => {
            let reports: Vec<_> = ws.iter().map(|w| w.second_moment()).collect::<Result<_, _>>()?;
            let pred = second_moment_slope_prediction(cfg.f)?;
            let (slope, intercept) = if reports.len() >= 2 { second_moment_fit(&reports)? } else { (f64::NAN, f64::NAN) };
            body.push_str("x,count,s2,s2_over_x,leading_prediction,ratio,fit_slope,fit_intercept,predicted_slope\n");
            for r in &reports {
                let _ = writeln!(
                    body,
                    "{:e},{},{:.16e},{:.16e},{:.16e},{:.10},{:.10e},{:.10e},{:.10e}",
                    r.x,
                    r.count,
                    r.raw.re,
                    r.raw.re / r.x,
                    r.prediction,
                    r.ratio,
                    slope,
                    intercept,
                    pred
                );
            }
        }
        MomentMode::Nonvanishing => {
            body.push_str("x,count,smoothed_fraction,sharp_fraction,lower_bound\n");
            for w in &ws {
                let r = w.nonvanishing();
                let _ = writeln!(body, "{:e},{},{:.10},{:.10},{:.10}", r.x, r.count, r.raw.re, r.sharp_fraction.unwrap_or(f64::NAN), r.prediction);
            }
            notes.push("nonzero means |L(1/2)| above the record's truncation certificate".into());
        }
        MomentMode::Mollified => {
            body.push_str("x,theta,m,support,q1_lambda,q1_xi,re_s1,im_s1,s1_ratio,s2,cs_ratio,asymptotic\n");
            for w in &ws {
                let spec = build_mollifier(cfg.theta, w.x)?;
                let r = mollified_moments(w, &spec);
                let _ = writeln!(
                    body,
                    "{:e},{},{:.10},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.10},{:.16e},{:.10},{:.10}",
                    w.x,
                    cfg.theta,
                    spec.m,
                    spec.support.len(),
                    spec.q1_from_lambda(),
                    spec.q1_from_xi(),
                    r.first.raw.re,
                    r.first.raw.im,
                    r.first.ratio,
                    r.second.raw.re,
                    r.cs_ratio,
                    r.asymptotic
                );
            }
        }
    }
    notes.push(format!("certificate: AFE truncation constant {:e}, per-record tail bound in the L-value cache", cfg.truncation));
    Ok(RunOutput { header: header(cfg, &notes), body })
}

fn bias(cfg: &RunConfig) -> CliResult<RunOutput> {
    let table = PsiTable::new(cfg.tmax)?;
    let rep = bias_scan_with(&table, &cfg.k, Tau3Phase::Standard)?;
    let mut body = String::from("t,re_sum,im_sum,abs_sum,re_predicted,im_predicted,ratio\n");
    for i in 0..rep.t_grid.len() {
        let (s, p) = (rep.partial_sums[i], rep.predicted[i]);
        let _ = writeln!(body, "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.10}", rep.t_grid[i], s.re, s.im, s.norm(), p.re, p.im, rep.ratios[i]);
    }
    let notes = vec![format!("fitted exponent {:.6} over {} dyadic points", rep.exponent, rep.t_grid.len())];
    Ok(RunOutput { header: header(cfg, &notes), body })
}

fn sieve_probe(cfg: &RunConfig) -> CliResult<RunOutput> {
    let r = large_sieve_ratio(cfg.sieve_a, cfg.sieve_b, cfg.trials, cfg.seed)?;
    let body = format!("a,b,trials,seed,max_ratio\n{},{},{},{},{:.10}\n", cfg.sieve_a, cfg.sieve_b, cfg.trials, cfg.seed, r);
    Ok(RunOutput { header: header(cfg, &[]), body })
}

fn poisson(cfg: &RunConfig) -> CliResult<RunOutput> {
    let r = poisson_check(&cfg.q, &cfg.c, cfg.m)?;
    let body = format!(
        "q,c,m,re_lhs,im_lhs,re_rhs,im_rhs,scale,residual,k_terms,u_cutoff\n\"{}\",\"{}\",{},{:.16e},{:.16e},{:.16e},{:.16e},{:.10e},{:.6e},{},{}\n",
        format_eis(&cfg.q),
        format_eis(&cfg.c),
        cfg.m,
        r.lhs.re,
        r.lhs.im,
        r.rhs.re,
        r.rhs.im,
        r.scale,
        r.residual,
        r.k_terms,
        r.u_cutoff
    );
    let notes = vec![format!("certificate: dual sum truncated at |u| ≤ {}", r.u_cutoff)];
    Ok(RunOutput { header: header(cfg, &notes), body })
}

fn suite(cfg: &RunConfig, level: Level) -> (RunOutput, Option<String>) {
    let outcomes = run_suite(level, cfg.cache_dir.as_deref(), |o| eprintln!("{}", o.line()));
    let mut body = String::from("criterion,title,status,detail\n");
    for o in &outcomes {
        let _ = writeln!(body, "{},\"{}\",{},\"{}\"", o.id, o.title, o.status.label(), o.detail.replace('"', "'"));
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| format!("#{}", o.id)).collect();
    let notes = vec![format!("level {} (fast runs criteria {:?})", level.name(), FAST_CRITERIA)];
    let failure = (!failed.is_empty()).then(|| format!("criteria {} failed", failed.join(", ")));
    (RunOutput { header: header(cfg, &notes), body }, failure)
}
