//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p njpc --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use njpc::exact_dist::ks_distance;
use njpc::failure_count::oracle_failure_count_dist;
use njpc::hypoexp::Hypoexponential;
use njpc::inference::{exact_ci, fit};
use njpc::quadrature::integrate;
use njpc::simulate::{RngSeed, Sampler};
use njpc::study::{run_ci_study, run_point_study, CiMethods, StudyConfig};
use njpc::{failure_count_dist, fixtures, mle_mixture, CensoringScheme, ExpParams, Which};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn params(t1: f64, t2: f64) -> ExpParams {
    ExpParams::new(t1, t2).unwrap()
}

fn scheme(m: usize, n: usize, k: usize, r: &[usize]) -> CensoringScheme {
    CensoringScheme::new(m, n, k, r.to_vec()).unwrap()
}

fn check(label: &str, value: f64, target: f64, tol: f64, notes: &mut Vec<String>) -> bool {
    let ok = (value - target).abs() <= tol;
    notes.push(format!(
        "{label} = {value:.4} (target {target} ± {tol}){}",
        if ok { "" } else { " MISS" }
    ));
    ok
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (s5, x5) = fixtures::proschan_scheme1();
    let (s6, x6) = fixtures::proschan_scheme2();
    let e5 = fit(&s5, &x5).unwrap();
    let e6 = fit(&s6, &x6).unwrap();
    let elapsed = start.elapsed();
    let exact = e5.theta1_hat == 297.0 / 5.0
        && e5.theta2_hat == 342.0 / 3.0
        && e6.theta1_hat == 189.0 / 5.0
        && e6.theta2_hat == 237.0 / 3.0
        && e5.theta1_hat == 59.4
        && e5.theta2_hat == 114.0
        && e6.theta1_hat == 37.8
        && e6.theta2_hat == 79.0;
    let fast = elapsed.as_secs_f64() < 1e-3;
    Outcome::new(
        exact && fast,
        format!(
            "scheme 1 ({}, {}), scheme 2 ({}, {}), {:.1} µs",
            e5.theta1_hat,
            e5.theta2_hat,
            e6.theta1_hat,
            e6.theta2_hat,
            elapsed.as_secs_f64() * 1e6
        ),
    )
}

fn criterion_2() -> Outcome {
    let cases = [
        (
            fixtures::proschan_scheme1(),
            [(30.027, 141.049), (49.183, 422.490)],
        ),
        (
            fixtures::proschan_scheme2(),
            [(19.318, 93.453), (34.588, 283.294)],
        ),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, ((s, x), targets)) in cases.into_iter().enumerate() {
        let est = fit(&s, &x).unwrap();
        for (which, (lo, hi)) in Which::BOTH.into_iter().zip(targets) {
            let start = Instant::now();
            let ci = exact_ci(&s, &est, which, 0.90).unwrap();
            let secs = start.elapsed().as_secs_f64();
            let upper = ci.upper.unwrap_or(f64::INFINITY);
            let dl = (ci.lower - lo).abs() / lo;
            let du = (upper - hi).abs() / hi;
            let ok = dl <= 0.01 && du <= 0.01 && secs < 10.0;
            pass &= ok;
            notes.push(format!(
                "scheme {} {}: ({:.3}, {:.3}) vs ({lo}, {hi}), rel dev ({:.2}%, {:.2}%){}",
                i + 1,
                which.name(),
                ci.lower,
                upper,
                100.0 * dl,
                100.0 * du,
                if ok { "" } else { " MISS" }
            ));
        }
    }
    Outcome::new(pass, notes.join("; "))
}

fn point_config(r: &[usize], k: usize) -> StudyConfig {
    let mut cfg = StudyConfig::new(scheme(15, 12, k, r), params(0.5, 1.0));
    cfg.master_seed = 20_240_601;
    cfg.ci_methods = CiMethods::NONE;
    cfg
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let cfg = point_config(&[4, 0, 0, 0, 0], 6);
    let r = run_point_study(&cfg).unwrap();
    let (ae, mse) = (r.ae.unwrap(), r.mse.unwrap());
    pass &= check("k=6 AE1", ae[0], 0.575, 0.02, &mut notes);
    pass &= check("MSE1", mse[0], 0.099, 0.015, &mut notes);
    pass &= check("AE2", ae[1], 0.995, 0.04, &mut notes);
    pass &= check("MSE2", mse[1], 0.377, 0.06, &mut notes);
    pass &= r.runtime_seconds < 30.0;
    notes.push(format!("{:.2} s", r.runtime_seconds));

    let cfg = point_config(&[3, 0, 0, 0, 0, 0, 0], 8);
    let r = run_point_study(&cfg).unwrap();
    pass &= check("k=8 AE1", r.ae.unwrap()[0], 0.538, 0.02, &mut notes);
    pass &= r.runtime_seconds < 30.0;
    notes.push(format!("{:.2} s", r.runtime_seconds));
    Outcome::new(pass, notes.join(", "))
}

fn ci_config(k: usize, r: &[usize]) -> StudyConfig {
    let mut cfg = StudyConfig::new(scheme(20, 25, k, r), params(0.5, 0.6));
    cfg.master_seed = 20_240_602;
    cfg.n_reps_ci = 1000;
    cfg.bootstrap_b = 1000;
    cfg.level = 0.90;
    cfg.ci_methods = CiMethods::BOTH;
    cfg
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let r = run_ci_study(&ci_config(8, &[7, 0, 0, 0, 0, 0, 0])).unwrap();
    let (boot, exact) = (r.bootstrap.unwrap(), r.exact.unwrap());
    pass &= check("k=8 boot CP1", boot.cp[0], 0.918, 0.03, &mut notes);
    pass &= check("boot AL1", boot.al[0], 1.279, 0.1, &mut notes);
    pass &= check("exact CP1", exact.cp[0], 0.898, 0.03, &mut notes);
    pass &= r.runtime_seconds < 600.0;
    notes.push(format!(
        "exact AL1 = {:.3} over {} finite intervals ({} open), {:.1} s",
        exact.al[0],
        1000 - exact.n_open[0] - exact.n_failed[0],
        exact.n_open[0],
        r.runtime_seconds
    ));

    let r = run_ci_study(&ci_config(6, &[0; 5])).unwrap();
    pass &= check(
        "k=6 boot CP1",
        r.bootstrap.unwrap().cp[0],
        0.909,
        0.03,
        &mut notes,
    );
    pass &= r.runtime_seconds < 600.0;
    notes.push(format!("{:.1} s", r.runtime_seconds));
    Outcome::new(pass, notes.join(", "))
}

fn criterion_5() -> Outcome {
    let mut rng = RngSeed::new(5, 0).rng();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = rng.random_range(2..=12);
        let min = rng.random_range(k + 1..=k + 30);
        let (m, n) = if rng.random_bool(0.5) {
            (min, rng.random_range(min..=min + 20))
        } else {
            (rng.random_range(min..=min + 20), min)
        };
        // spare units beyond the k - 1 mandatory removals, kept < min - (k - 1)
        let mut spare = rng.random_range(0..min - (k - 1));
        let mut r = vec![0; k - 1];
        while spare > 0 {
            r[rng.random_range(0..k - 1)] += 1;
            spare -= 1;
        }
        let s = CensoringScheme::new(m, n, k, r).unwrap();
        let p = params(rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
        let fast = failure_count_dist(&s, &p);
        let slow = oracle_failure_count_dist(&s, &p).unwrap();
        for r in 0..=k {
            worst = worst.max((fast.pmf(r) - slow.pmf(r)).abs());
        }
    }
    Outcome::new(worst < 1e-12, format!("50 schemes, max |Δ| = {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let configs = [
        (0.5, 1.0, 8, vec![7, 0, 0, 0, 0, 0, 0]),
        (0.5, 1.5, 8, vec![7, 0, 0, 0, 0, 0, 0]),
        (0.5, 1.0, 6, vec![2; 5]),
        (0.5, 1.5, 6, vec![2; 5]),
    ];
    let mut pass = true;
    let (mut worst_norm, mut worst_ks, mut worst_moment) = (0.0f64, 0.0f64, 0.0f64);
    for (fig, (t1, t2, k, r)) in configs.into_iter().enumerate() {
        let s = scheme(20, 25, k, &r);
        let p = params(t1, t2);
        let sampler = Sampler::new(&s, &p);
        let mut rng = RngSeed::new(6, fig as u64).rng();
        let estimates: Vec<_> = (0..10_000)
            .map(|_| fit(&s, &sampler.sample_conditional(&mut rng).0).unwrap())
            .collect();
        for which in Which::BOTH {
            let mix = mle_mixture(&s, &p, which).unwrap();
            let top = mix.upper_bound(1e-16);
            let mass = integrate(|t| mix.pdf(t), 0.0, top, 1e-12);
            let m1 = integrate(|t| t * mix.pdf(t), 0.0, top, 1e-12);
            let m2 = integrate(|t| t * t * mix.pdf(t), 0.0, top, 1e-12);
            let draws: Vec<f64> = estimates.iter().map(|e| e.get(which)).collect();
            let ks = ks_distance(&draws, |t| mix.cdf(t));
            let moment = (m1 - mix.mean())
                .abs()
                .max((m2 - mix.second_moment()).abs());
            worst_norm = worst_norm.max((mass - 1.0).abs());
            worst_ks = worst_ks.max(ks);
            worst_moment = worst_moment.max(moment);
            pass &= (mass - 1.0).abs() < 1e-6 && ks < 0.02 && moment < 1e-6;
        }
    }
    Outcome::new(
        pass,
        format!(
            "4 configurations x 2 estimators: max |∫pdf - 1| = {worst_norm:.1e}, max KS = {worst_ks:.4}, max moment gap = {worst_moment:.1e}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let s = scheme(20, 25, 8, &[7, 0, 0, 0, 0, 0, 0]);
    let grid = [0.3, 0.5, 0.8, 1.2];
    let ts = [0.25, 0.5, 0.75, 1.0, 1.5];
    let mut pass = true;
    let mut checked = 0;
    for which in Which::BOTH {
        let curves: Vec<Vec<f64>> = grid
            .iter()
            .map(|&theta| {
                let p = match which {
                    Which::Theta1 => params(theta, 1.0),
                    Which::Theta2 => params(0.5, theta),
                };
                let mix = mle_mixture(&s, &p, which).unwrap();
                ts.iter().map(|&t| mix.survival(t)).collect()
            })
            .collect();
        for pair in curves.windows(2) {
            for (a, b) in pair[0].iter().zip(&pair[1]) {
                pass &= a < b;
                checked += 1;
            }
        }
    }
    let cdfs: Vec<_> = grid
        .iter()
        .map(|&t1| failure_count_dist(&s, &params(t1, 1.0)))
        .collect();
    for pair in cdfs.windows(2) {
        for r in 0..s.k() {
            pass &= pair[0].cdf(r) < pair[1].cdf(r);
            checked += 1;
        }
    }
    Outcome::new(pass, format!("{checked} strict inequalities checked"))
}

fn criterion_8() -> Outcome {
    let quantiles: [f64; 3] = [
        1.102_065_328_249_321,
        2.674_060_313_723_560_3,
        5.322_320_337_834_21,
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for gap in [1e-4, 1e-6, 1e-8, 0.0] {
        let h = Hypoexponential::new(vec![1.0, 1.0 / (1.0 + gap), 1.0 / (1.0 - gap)]).unwrap();
        let mut worst = 0.0f64;
        for &t in &quantiles {
            let gamma_pdf = t * t * (-t).exp() / 2.0;
            let gamma_surv = (-t).exp() * (1.0 + t + t * t / 2.0);
            let d = ((h.pdf(t) - gamma_pdf) / gamma_pdf)
                .abs()
                .max(((h.survival(t) - gamma_surv) / gamma_surv).abs());
            worst = worst.max(d);
        }
        pass &= worst < 1e-8;
        notes.push(format!(
            "gap {gap:.0e}: {worst:.2e}{}",
            if worst < 1e-8 { "" } else { " MISS" }
        ));
    }
    // 60-digit values of the gap 1e-4 law itself at the same points
    let reference = [
        (0.201_726_887_844_908_7, 0.900_000_000_945_226_5),
        (0.246_594_145_295_937_12, 0.500_000_003_667_438_5),
        (0.069_138_137_648_554_6, 0.100_000_002_858_653_14),
    ];
    let h = Hypoexponential::new(vec![1.0, 1.0 / (1.0 + 1e-4), 1.0 / (1.0 - 1e-4)]).unwrap();
    let own = quantiles
        .iter()
        .zip(reference)
        .map(|(&t, (pdf, surv))| {
            ((h.pdf(t) - pdf) / pdf)
                .abs()
                .max(((h.survival(t) - surv) / surv).abs())
        })
        .fold(0.0f64, f64::max);
    Outcome::new(
        pass,
        format!(
            "max rel deviation from gamma(3) limit: {}; gap 1e-4 vs its exact law: {own:.1e}",
            notes.join(", ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let text = "m = 20\nn = 25\nk = 8\nR = 7,0,0,0,0,0,0\ntheta1 = 0.5\ntheta2 = 0.6\n\
                n_reps_point = 2000\nn_reps_ci = 60\nbootstrap_B = 200\nmaster_seed = 99\n";
    let base = StudyConfig::parse(text).unwrap();
    let run = |workers: Option<usize>| {
        let mut cfg = base.clone();
        cfg.workers = workers;
        njpc::run_study(&cfg).unwrap().to_csv()
    };
    let reference = run(Some(1));
    let same = [None, Some(1), Some(2), Some(3), Some(8)]
        .into_iter()
        .all(|w| run(w) == reference);
    Outcome::new(
        same,
        "point + exact + bootstrap study, workers 1, 2, 3, 8 and default pool",
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact MLE reproduction", criterion_1),
        ("exact CI reproduction", criterion_2),
        ("simulation study reproduction", criterion_3),
        ("CI study reproduction", criterion_4),
        ("oracle equivalence", criterion_5),
        ("distributional validity", criterion_6),
        ("monotonicity", criterion_7),
        ("confluence stability", criterion_8),
        ("determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        println!(
            "{} criterion {id} ({name}) [{:.1} s]: {}",
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
        failed += usize::from(!out.pass);
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
