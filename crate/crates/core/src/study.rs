//! Monte Carlo studies: average estimates, mean squared errors, interval
//! lengths and coverage.
//!
//! Replication `i` of the point study draws from stream `i` of the master
//! seed; replication `i` of the interval study from stream `2³² + i`, with
//! its bootstrap resamples on sub-streams of that. Replications run in
//! parallel and are aggregated in index order, so reports are identical for
//! any worker count.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{NjpcError, Result};
use crate::exact_dist::fmt_sig;
use crate::inference::{bootstrap_ci, exact_ci, fit, ConfidenceInterval};
use crate::scheme::{CensoringScheme, ExpParams, Which};
use crate::simulate::{check_conditioning, RngSeed, Sampler};

const CI_STREAM_OFFSET: u64 = 1 << 32;

/// Which interval methods a study evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CiMethods {
    pub exact: bool,
    pub bootstrap: bool,
}

impl CiMethods {
    pub const BOTH: CiMethods = CiMethods {
        exact: true,
        bootstrap: true,
    };
    pub const NONE: CiMethods = CiMethods {
        exact: false,
        bootstrap: false,
    };

    pub fn any(&self) -> bool {
        self.exact || self.bootstrap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub scheme: CensoringScheme,
    pub true_params: ExpParams,
    pub n_reps_point: usize,
    pub n_reps_ci: usize,
    pub bootstrap_b: usize,
    pub level: f64,
    pub master_seed: u64,
    pub ci_methods: CiMethods,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl StudyConfig {
    /// Defaults: 10,000 point replications, 1,000 interval replications,
    /// 1,000 bootstrap resamples, 90% level, both interval methods.
    pub fn new(scheme: CensoringScheme, true_params: ExpParams) -> Self {
        Self {
            scheme,
            true_params,
            n_reps_point: 10_000,
            n_reps_ci: 1_000,
            bootstrap_b: 1_000,
            level: 0.90,
            master_seed: 0,
            ci_methods: CiMethods::BOTH,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level > 0.5 && self.level < 1.0) {
            return Err(NjpcError::InvalidLevel {
                level: self.level,
                range: "(0.5, 1)",
            });
        }
        if self.n_reps_point == 0 || self.n_reps_ci == 0 {
            return Err(NjpcError::InvalidArgument(
                "replication counts must be at least 1".into(),
            ));
        }
        if self.ci_methods.bootstrap && self.bootstrap_b < 100 {
            return Err(NjpcError::InvalidArgument(format!(
                "bootstrap_B must be at least 100, got {}",
                self.bootstrap_b
            )));
        }
        if self.workers == Some(0) {
            return Err(NjpcError::InvalidArgument(
                "workers must be at least 1".into(),
            ));
        }
        check_conditioning(&self.scheme, &self.true_params)?;
        Ok(())
    }

    /// Parses the flat `key = value` format. Keys: `m`, `n`, `k`, `R`
    /// (comma list, defaults to zeros), `theta1`, `theta2`, `n_reps_point`,
    /// `n_reps_ci`, `bootstrap_B`, `level`, `master_seed`, `ci_methods`
    /// (comma list of `exact`, `bootstrap`, or `none`) and `workers`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| NjpcError::Parse {
                line,
                message: format!("expected key = value, found {body:?}"),
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(NjpcError::Parse {
                    line,
                    message: format!("unknown key {key:?}"),
                });
            }
            if let Some(prev) = entries.iter().find(|e| e.1 == key) {
                return Err(NjpcError::Parse {
                    line,
                    message: format!("duplicate key {key:?} (first set on line {})", prev.0),
                });
            }
            entries.push((line, key, value.trim()));
        }
        let get = |key: &str| entries.iter().find(|e| e.1 == key).map(|e| (e.0, e.2));
        let last_line = text.lines().count().max(1);
        let required = |key: &str| -> Result<(usize, &str)> {
            get(key).ok_or(NjpcError::Parse {
                line: last_line,
                message: format!("missing required key {key:?}"),
            })
        };

        let m = parse_value("m", required("m")?)?;
        let n = parse_value("n", required("n")?)?;
        let k_entry = required("k")?;
        let k: usize = parse_value("k", k_entry)?;
        let withdrawals = match get("R") {
            None => vec![0; k.saturating_sub(1)],
            Some((line, v)) => parse_list(v).map_err(|bad| NjpcError::Parse {
                line,
                message: format!("invalid value for R: {bad:?} is not a non-negative integer"),
            })?,
        };
        let scheme_line = get("R").unwrap_or(k_entry).0;
        let scheme = CensoringScheme::new(m, n, k, withdrawals).map_err(|e| NjpcError::Parse {
            line: scheme_line,
            message: e.to_string(),
        })?;
        let t1_entry = required("theta1")?;
        let t1 = parse_value("theta1", t1_entry)?;
        let t2 = parse_value("theta2", required("theta2")?)?;
        let params = ExpParams::new(t1, t2).map_err(|e| NjpcError::Parse {
            line: t1_entry.0,
            message: e.to_string(),
        })?;
        let mut cfg = Self::new(scheme, params);
        if let Some(e) = get("n_reps_point") {
            cfg.n_reps_point = parse_value("n_reps_point", e)?;
        }
        if let Some(e) = get("n_reps_ci") {
            cfg.n_reps_ci = parse_value("n_reps_ci", e)?;
        }
        if let Some(e) = get("bootstrap_B") {
            cfg.bootstrap_b = parse_value("bootstrap_B", e)?;
        }
        if let Some(e) = get("level") {
            cfg.level = parse_value("level", e)?;
        }
        if let Some(e) = get("master_seed") {
            cfg.master_seed = parse_value("master_seed", e)?;
        }
        if let Some(e) = get("workers") {
            cfg.workers = Some(parse_value("workers", e)?);
        }
        if let Some((line, v)) = get("ci_methods") {
            let mut methods = CiMethods::NONE;
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match item {
                    "exact" => methods.exact = true,
                    "bootstrap" | "boot" => methods.bootstrap = true,
                    "none" => {}
                    other => {
                        return Err(NjpcError::Parse {
                            line,
                            message: format!("invalid value for ci_methods: {other:?}"),
                        })
                    }
                }
            }
            cfg.ci_methods = methods;
        }
        cfg.validate().map_err(|e| NjpcError::Parse {
            line: last_line,
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    fn run_pooled<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| NjpcError::InvalidArgument(e.to_string()))
                .map(|pool| pool.install(job)),
        }
    }
}

const KNOWN_KEYS: [&str; 13] = [
    "m",
    "n",
    "k",
    "R",
    "theta1",
    "theta2",
    "n_reps_point",
    "n_reps_ci",
    "bootstrap_B",
    "level",
    "master_seed",
    "ci_methods",
    "workers",
];

fn parse_value<T: std::str::FromStr>(key: &str, (line, value): (usize, &str)) -> Result<T> {
    value.parse().map_err(|_| NjpcError::Parse {
        line,
        message: format!("invalid value for {key}: {value:?}"),
    })
}

/// Parses a comma-separated list of non-negative integers; the error
/// carries the offending item.
pub fn parse_list(text: &str) -> std::result::Result<Vec<usize>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| s.trim().to_string()))
        .collect()
}

/// Interval performance for one method: average finite length, coverage,
/// and counts of open-ended or failed constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiSummary {
    pub al: [f64; 2],
    pub cp: [f64; 2],
    pub n_open: [usize; 2],
    pub n_failed: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub ae: Option<[f64; 2]>,
    pub mse: Option<[f64; 2]>,
    pub exact: Option<CiSummary>,
    pub bootstrap: Option<CiSummary>,
    /// Draws rejected because one population had no failures.
    pub n_degenerate: u64,
    /// Draws attempted in total (accepted + rejected).
    pub n_attempts: u64,
    pub runtime_seconds: f64,
}

impl StudyReport {
    fn empty() -> Self {
        Self {
            ae: None,
            mse: None,
            exact: None,
            bootstrap: None,
            n_degenerate: 0,
            n_attempts: 0,
            runtime_seconds: 0.0,
        }
    }

    /// `param,ae,mse,al_exact,cp_exact,al_boot,cp_boot,n_degenerate`, one row
    /// per parameter; `NA` where a quantity was not computed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| fmt_sig(x, 6));
        for (j, which) in Which::BOTH.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                which.name(),
                cell(self.ae.map(|a| a[j])),
                cell(self.mse.map(|a| a[j])),
                cell(self.exact.map(|s| s.al[j])),
                cell(self.exact.map(|s| s.cp[j])),
                cell(self.bootstrap.map(|s| s.al[j])),
                cell(self.bootstrap.map(|s| s.cp[j])),
                self.n_degenerate
            );
        }
        out
    }
}

pub const CSV_HEADER: &str = "param,ae,mse,al_exact,cp_exact,al_boot,cp_boot,n_degenerate";

/// Average estimates and mean squared errors over `n_reps_point`
/// replications in which both MLEs exist.
pub fn run_point_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let start = Instant::now();
    let sampler = Sampler::new(&config.scheme, &config.true_params);
    let draws: Vec<(f64, f64, u64)> = config.run_pooled(|| {
        (0..config.n_reps_point as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngSeed::new(config.master_seed, i).rng();
                let (sample, rejected) = sampler.sample_conditional(&mut rng);
                let est = fit(&config.scheme, &sample).expect("conditional sample has an MLE");
                (est.theta1_hat, est.theta2_hat, rejected)
            })
            .collect()
    })?;
    let truth = [config.true_params.theta1(), config.true_params.theta2()];
    let reps = draws.len() as f64;
    let mut ae = [0.0; 2];
    let mut mse = [0.0; 2];
    let mut rejected = 0;
    for (a, b, r) in &draws {
        for (j, v) in [*a, *b].into_iter().enumerate() {
            ae[j] += v;
            mse[j] += (v - truth[j]).powi(2);
        }
        rejected += r;
    }
    let mut report = StudyReport::empty();
    report.ae = Some(ae.map(|s| s / reps));
    report.mse = Some(mse.map(|s| s / reps));
    report.n_degenerate = rejected;
    report.n_attempts = rejected + draws.len() as u64;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Default)]
struct Tally {
    len_sum: [f64; 2],
    n_finite: [usize; 2],
    covered: [usize; 2],
    n_open: [usize; 2],
    n_failed: [usize; 2],
}

impl Tally {
    fn add(&mut self, j: usize, ci: Result<ConfidenceInterval>, truth: f64) {
        match ci {
            Ok(ci) => {
                match ci.length() {
                    Some(len) => {
                        self.len_sum[j] += len;
                        self.n_finite[j] += 1;
                    }
                    None => self.n_open[j] += 1,
                }
                if ci.contains(truth) {
                    self.covered[j] += 1;
                }
            }
            Err(_) => self.n_failed[j] += 1,
        }
    }

    fn summary(&self, reps: usize) -> CiSummary {
        CiSummary {
            al: [0, 1].map(|j| self.len_sum[j] / self.n_finite[j].max(1) as f64),
            cp: [0, 1].map(|j| self.covered[j] as f64 / reps as f64),
            n_open: self.n_open,
            n_failed: self.n_failed,
        }
    }
}

type RepIntervals = (
    Option<[Result<ConfidenceInterval>; 2]>,
    Option<[Result<ConfidenceInterval>; 2]>,
    u64,
);

/// Average lengths and coverage proportions over `n_reps_ci` replications.
///
/// Open-ended exact intervals are excluded from the average length and
/// cover the truth when their lower endpoint does. Intervals that cannot
/// be constructed count as non-covering.
pub fn run_ci_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let start = Instant::now();
    let sampler = Sampler::new(&config.scheme, &config.true_params);
    let scheme = &config.scheme;
    let reps: Vec<RepIntervals> = config.run_pooled(|| {
        (0..config.n_reps_ci as u64)
            .into_par_iter()
            .map(|i| {
                let seed = RngSeed::new(config.master_seed, CI_STREAM_OFFSET + i);
                let mut rng = seed.rng();
                let (sample, rejected) = sampler.sample_conditional(&mut rng);
                let est = fit(scheme, &sample).expect("conditional sample has an MLE");
                let exact = config
                    .ci_methods
                    .exact
                    .then(|| Which::BOTH.map(|w| exact_ci(scheme, &est, w, config.level)));
                let boot = config.ci_methods.bootstrap.then(|| {
                    match bootstrap_ci(scheme, &est, config.level, config.bootstrap_b, seed) {
                        Ok(b) => [Ok(b.theta1), Ok(b.theta2)],
                        Err(e) => [Err(e.clone()), Err(e)],
                    }
                });
                (exact, boot, rejected)
            })
            .collect()
    })?;
    let truth = [config.true_params.theta1(), config.true_params.theta2()];
    let mut exact = Tally::default();
    let mut boot = Tally::default();
    let mut rejected = 0;
    for (e, b, r) in reps {
        if let Some(e) = e {
            for (j, ci) in e.into_iter().enumerate() {
                exact.add(j, ci, truth[j]);
            }
        }
        if let Some(b) = b {
            for (j, ci) in b.into_iter().enumerate() {
                boot.add(j, ci, truth[j]);
            }
        }
        rejected += r;
    }
    let mut report = StudyReport::empty();
    report.exact = config
        .ci_methods
        .exact
        .then(|| exact.summary(config.n_reps_ci));
    report.bootstrap = config
        .ci_methods
        .bootstrap
        .then(|| boot.summary(config.n_reps_ci));
    report.n_degenerate = rejected;
    report.n_attempts = rejected + config.n_reps_ci as u64;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Point study, followed by the interval study when any method is enabled.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    let mut report = run_point_study(config)?;
    if config.ci_methods.any() {
        let ci = run_ci_study(config)?;
        report.exact = ci.exact;
        report.bootstrap = ci.bootstrap;
        report.n_degenerate += ci.n_degenerate;
        report.n_attempts += ci.n_attempts;
        report.runtime_seconds += ci.runtime_seconds;
    }
    Ok(report)
}
