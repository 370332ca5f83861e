use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use njpc::exact_dist::{fmt_sig, format_curve};
use njpc::inference::{bootstrap_ci, exact_ci, fit, ConfidenceInterval, MleEstimate};
use njpc::io::{format_sample_csv, parse_lifetimes, parse_sample_csv};
use njpc::simulate::generate;
use njpc::{
    apply_scheme, expected_duration, mle_mixture, run_study, CensoringScheme, ExpParams, NjpcError,
    RngSeed, StudyConfig, Which,
};

#[derive(Parser)]
#[command(
    name = "njpc",
    version,
    about = "Two-sample exponential inference under joint progressive type-II censoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a censored sample, or censor complete data given with --pop1/--pop2
    Simulate(SimulateArgs),
    /// Maximum likelihood estimates and sufficient statistics of a sample file
    Fit(FitArgs),
    /// Confidence intervals for both parameters of a sample file
    Ci(CiArgs),
    /// Density curve of an estimator as a two-column table
    Pdf(PdfArgs),
    /// Expected duration of the experiment
    Duration(DurationArgs),
    /// Run a Monte Carlo study described by a key = value config file
    Study(StudyArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// Units of population 1 on test
    #[arg(long)]
    m: usize,
    /// Units of population 2 on test
    #[arg(long)]
    n: usize,
    /// Number of observed failures
    #[arg(long)]
    k: usize,
    /// Withdrawals R_1..R_{k-1}, comma separated (default: all zero)
    #[arg(long = "R", value_delimiter = ',', num_args = 0..)]
    r: Option<Vec<usize>>,
}

impl SchemeArgs {
    fn scheme(&self) -> njpc::Result<CensoringScheme> {
        let r = self
            .r
            .clone()
            .unwrap_or_else(|| vec![0; self.k.saturating_sub(1)]);
        CensoringScheme::new(self.m, self.n, self.k, r)
    }
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    theta1: f64,
    #[arg(long)]
    theta2: f64,
}

impl ParamArgs {
    fn params(&self) -> njpc::Result<ExpParams> {
        ExpParams::new(self.theta1, self.theta2)
    }
}

#[derive(Args)]
struct Output {
    /// Output file (default: standard output)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Boot,
    Both,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, required_unless_present = "pop1")]
    theta1: Option<f64>,
    #[arg(long, required_unless_present = "pop1")]
    theta2: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream of the seed to draw from
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Complete population 1 lifetimes, one per line
    #[arg(long, requires = "pop2")]
    pop1: Option<PathBuf>,
    /// Complete population 2 lifetimes, one per line
    #[arg(long, requires = "pop1")]
    pop2: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct IntervalArgs {
    #[arg(long, default_value_t = 0.90)]
    level: f64,
    /// Bootstrap resamples
    #[arg(long = "boot-B", default_value_t = 1000)]
    boot_b: usize,
    /// Seed for the bootstrap
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Sample file with header i,w,z
    #[arg(long, short)]
    input: PathBuf,
    /// Also report confidence intervals
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[command(flatten)]
    interval: IntervalArgs,
    /// Significant digits
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    #[command(flatten)]
    interval: IntervalArgs,
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

#[derive(Args)]
struct PdfArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// theta1 or theta2
    #[arg(long, default_value = "theta1")]
    which: Which,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 6)]
    precision: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct DurationArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

#[derive(Args)]
struct StudyArgs {
    /// Config file
    config: PathBuf,
    /// Override the worker count of the config
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    out: Output,
}

enum Failure {
    Usage(String),
    Degenerate(String),
}

impl From<NjpcError> for Failure {
    fn from(e: NjpcError) -> Self {
        match e {
            NjpcError::MleDoesNotExist { .. } | NjpcError::DegenerateConditioning { .. } => {
                Failure::Degenerate(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Output, text: &str) -> Outcome {
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn simulate(args: SimulateArgs) -> Outcome {
    let scheme = args.scheme.scheme()?;
    let seed = RngSeed::new(args.seed, args.stream);
    let sample = match (&args.pop1, &args.pop2) {
        (Some(p1), Some(p2)) => {
            let x = parse_lifetimes(&read(p1)?)?;
            let y = parse_lifetimes(&read(p2)?)?;
            apply_scheme(&x, &y, &scheme, seed)?
        }
        _ => {
            let params = ExpParams::new(
                args.theta1.unwrap_or(f64::NAN),
                args.theta2.unwrap_or(f64::NAN),
            )?;
            generate(&scheme, &params, seed)
        }
    };
    emit(&args.out, &format_sample_csv(&sample))
}

fn fmt_ci(ci: &ConfidenceInterval, digits: usize) -> String {
    let upper = ci
        .upper
        .map_or_else(|| "inf".to_string(), |u| fmt_sig(u, digits));
    format!("({}, {})", fmt_sig(ci.lower, digits), upper)
}

fn intervals(
    scheme: &CensoringScheme,
    est: &MleEstimate,
    method: Method,
    args: &IntervalArgs,
    digits: usize,
) -> Result<String, Failure> {
    let mut out = String::new();
    if matches!(method, Method::Exact | Method::Both) {
        for which in Which::BOTH {
            let ci = exact_ci(scheme, est, which, args.level)?;
            out += &format!("exact_ci_{} = {}\n", which.name(), fmt_ci(&ci, digits));
        }
    }
    if matches!(method, Method::Boot | Method::Both) {
        let boot = bootstrap_ci(
            scheme,
            est,
            args.level,
            args.boot_b,
            RngSeed::new(args.seed, 0),
        )?;
        for which in Which::BOTH {
            out += &format!(
                "boot_ci_{} = {}\n",
                which.name(),
                fmt_ci(boot.get(which), digits)
            );
        }
    }
    Ok(out)
}

fn load(scheme: &SchemeArgs, input: &Path) -> Result<(CensoringScheme, MleEstimate), Failure> {
    let scheme = scheme.scheme()?;
    let sample = parse_sample_csv(&read(input)?)?;
    let est = fit(&scheme, &sample)?;
    Ok((scheme, est))
}

fn fit_cmd(args: FitArgs) -> Outcome {
    let (scheme, est) = load(&args.scheme, &args.input)?;
    let d = args.precision;
    let s = est.stats;
    let mut out = format!(
        "m_k = {}\nn_k = {}\nA1 = {}\nA2 = {}\ntheta1_hat = {}\ntheta2_hat = {}\n",
        s.m_k,
        s.n_k,
        fmt_sig(s.a1, d),
        fmt_sig(s.a2, d),
        fmt_sig(est.theta1_hat, d),
        fmt_sig(est.theta2_hat, d)
    );
    if let Some(method) = args.method {
        out += &format!("level = {}\n", args.interval.level);
        out += &intervals(&scheme, &est, method, &args.interval, d)?;
    }
    print!("{out}");
    Ok(())
}

fn ci_cmd(args: CiArgs) -> Outcome {
    let (scheme, est) = load(&args.scheme, &args.input)?;
    let mut out = format!("level = {}\n", args.interval.level);
    out += &intervals(&scheme, &est, args.method, &args.interval, args.precision)?;
    print!("{out}");
    Ok(())
}

fn pdf_cmd(args: PdfArgs) -> Outcome {
    let scheme = args.scheme.scheme()?;
    let mix = mle_mixture(&scheme, &args.params.params()?, args.which)?;
    let curve = mix.curve(args.points)?;
    emit(&args.out, &format_curve(&curve, args.precision))
}

fn duration_cmd(args: DurationArgs) -> Outcome {
    let scheme = args.scheme.scheme()?;
    let params = args.params.params()?;
    println!(
        "{}",
        fmt_sig(expected_duration(&scheme, &params), args.precision)
    );
    Ok(())
}

fn study_cmd(args: StudyArgs) -> Outcome {
    let mut config =
        StudyConfig::parse(&read(&args.config)?).map_err(|e| Failure::Usage(e.to_string()))?;
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    let start = Instant::now();
    let report = run_study(&config)?;
    emit(&args.out, &report.to_csv())?;
    eprintln!(
        "runtime {:.2} s, {} degenerate draws rejected",
        start.elapsed().as_secs_f64(),
        report.n_degenerate
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Ci(a) => ci_cmd(a),
        Command::Pdf(a) => pdf_cmd(a),
        Command::Duration(a) => duration_cmd(a),
        Command::Study(a) => study_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
