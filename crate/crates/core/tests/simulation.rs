use njpc::exact_dist::ks_distance;
use njpc::failure_count::bernoulli_probs;
use njpc::simulate::{expected_failure_times, generate_with, stage_rates};
use njpc::{apply_scheme, failure_count_dist, CensoringScheme, ExpParams, RngSeed};
use rand::Rng;

const REPS: usize = 10_000;

fn table1() -> (CensoringScheme, ExpParams) {
    (
        CensoringScheme::new(15, 12, 6, vec![4, 0, 0, 0, 0]).unwrap(),
        ExpParams::new(0.5, 1.0).unwrap(),
    )
}

fn total_variation(counts: &[usize], pmf: impl Fn(usize) -> f64) -> f64 {
    let n: usize = counts.iter().sum();
    0.5 * counts
        .iter()
        .enumerate()
        .map(|(r, &c)| (c as f64 / n as f64 - pmf(r)).abs())
        .sum::<f64>()
}

#[test]
fn failure_time_means_within_three_standard_errors() {
    let (s, p) = table1();
    let mut rng = RngSeed::new(11, 0).rng();
    let draws: Vec<_> = (0..REPS).map(|_| generate_with(&s, &p, &mut rng)).collect();
    let rates = stage_rates(&s, &p).rates;
    let means = expected_failure_times(&s, &p);
    let mut var = 0.0;
    for (i, (mean, rate)) in means.iter().zip(&rates).enumerate() {
        var += 1.0 / (rate * rate);
        let avg = draws.iter().map(|d| d.w()[i]).sum::<f64>() / REPS as f64;
        let se = (var / REPS as f64).sqrt();
        assert!(
            (avg - mean).abs() < 3.0 * se,
            "W_{}: {avg} vs {mean}",
            i + 1
        );
    }
}

#[test]
fn first_failure_is_exponential() {
    let (s, p) = table1();
    let mut rng = RngSeed::new(12, 0).rng();
    let w1: Vec<f64> = (0..REPS)
        .map(|_| generate_with(&s, &p, &mut rng).w()[0])
        .collect();
    let rate = stage_rates(&s, &p).rates[0];
    let ks = ks_distance(&w1, |t| 1.0 - (-rate * t).exp());
    assert!(ks < 0.0136, "KS = {ks}");
}

#[test]
fn failure_count_frequencies_match_exact_law() {
    let (s, p) = table1();
    let mut rng = RngSeed::new(13, 0).rng();
    let mut counts = vec![0usize; s.k() + 1];
    let mut ones = vec![0usize; s.k()];
    for _ in 0..REPS {
        let d = generate_with(&s, &p, &mut rng);
        counts[d.pop1_failures()] += 1;
        for (i, &z) in d.z().iter().enumerate() {
            ones[i] += usize::from(z);
        }
    }
    let law = failure_count_dist(&s, &p);
    assert!(total_variation(&counts, |r| law.pmf(r)) < 0.02);
    for (i, &q) in bernoulli_probs(&s, &p).iter().enumerate() {
        let freq = ones[i] as f64 / REPS as f64;
        let se = (q * (1.0 - q) / REPS as f64).sqrt();
        assert!((freq - q).abs() < 3.5 * se, "Z_{}: {freq} vs {q}", i + 1);
    }
}

#[test]
fn censoring_complete_samples_matches_direct_generation() {
    let (s, p) = table1();
    let mut rng = RngSeed::new(14, 0).rng();
    let mut counts = vec![0usize; s.k() + 1];
    let mut last = Vec::with_capacity(REPS);
    for i in 0..REPS {
        let x: Vec<f64> = (0..s.m())
            .map(|_| -p.theta1() * (-rng.random::<f64>()).ln_1p())
            .collect();
        let y: Vec<f64> = (0..s.n())
            .map(|_| -p.theta2() * (-rng.random::<f64>()).ln_1p())
            .collect();
        let d = apply_scheme(&x, &y, &s, RngSeed::new(15, i as u64)).unwrap();
        counts[d.pop1_failures()] += 1;
        last.push(d.w()[s.k() - 1]);
    }
    let law = failure_count_dist(&s, &p);
    assert!(total_variation(&counts, |r| law.pmf(r)) < 0.02);

    let rates = stage_rates(&s, &p).rates;
    let mean = expected_failure_times(&s, &p)[s.k() - 1];
    let var: f64 = rates.iter().map(|r| 1.0 / (r * r)).sum();
    let avg = last.iter().sum::<f64>() / REPS as f64;
    assert!(
        (avg - mean).abs() < 3.0 * (var / REPS as f64).sqrt(),
        "{avg} vs {mean}"
    );
}
