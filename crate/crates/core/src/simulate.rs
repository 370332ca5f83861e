//! Sample generation and experiment duration.
//!
//! The failure times are partial sums of independent exponential spacings
//! `V_s` with rates
//!
//! ```text
//! E_s = a_s / θ1 + b_s / θ2
//! ```
//!
//! (`a_s`, `b_s` the units of each population on test at stage `s`), and
//! the indicators are independent Bernoulli draws with the probabilities
//! of [`crate::failure_count::bernoulli_probs`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NjpcError, Result};
use crate::failure_count::{bernoulli_probs, failure_count_dist};
use crate::sample::NjpcSample;
use crate::scheme::{CensoringScheme, ExpParams};

/// Below this conditioning probability the rejection sampler refuses to
/// run (expected attempts would exceed 10⁹).
pub const MIN_ACCEPTANCE: f64 = 1e-9;

/// Addresses one reproducible random stream: ChaCha8 keyed by
/// `master_seed`, on stream `stream_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Seed for the `index`-th sub-stream of this stream. Sub-streams are
    /// keyed by a hash of `(master_seed, stream_id)`, so they do not overlap
    /// the parent family.
    pub fn child(&self, index: u64) -> Self {
        let key = splitmix64(
            splitmix64(self.master_seed) ^ self.stream_id.rotate_left(29) ^ 0x6a09_e667_f3bc_c909,
        );
        Self::new(key, index)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Exponential draw by inversion.
fn exp_draw<R: RngCore + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    let u: f64 = rng.random();
    -mean * (-u).ln_1p()
}

/// Rates of the exponential spacings between successive failures.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRates {
    pub rates: Vec<f64>,
}

pub fn stage_rates(scheme: &CensoringScheme, params: &ExpParams) -> StageRates {
    let (t1, t2) = (params.theta1(), params.theta2());
    StageRates {
        rates: (0..scheme.k())
            .map(|s| {
                let (a, b) = scheme.at_risk(s);
                a as f64 / t1 + b as f64 / t2
            })
            .collect(),
    }
}

/// `E(W_k) = Σ_s 1 / E_s`.
pub fn expected_duration(scheme: &CensoringScheme, params: &ExpParams) -> f64 {
    expected_failure_times(scheme, params)[scheme.k() - 1]
}

/// `E(W_i)` for every `i`.
pub fn expected_failure_times(scheme: &CensoringScheme, params: &ExpParams) -> Vec<f64> {
    stage_rates(scheme, params)
        .rates
        .iter()
        .scan(0.0, |acc, e| {
            *acc += 1.0 / e;
            Some(*acc)
        })
        .collect()
}

/// Draws one censored sample using `rng`.
pub fn generate_with<R: RngCore + ?Sized>(
    scheme: &CensoringScheme,
    params: &ExpParams,
    rng: &mut R,
) -> NjpcSample {
    let rates = stage_rates(scheme, params).rates;
    let probs = bernoulli_probs(scheme, params);
    generate_from(&rates, &probs, rng)
}

fn generate_from<R: RngCore + ?Sized>(rates: &[f64], probs: &[f64], rng: &mut R) -> NjpcSample {
    let mut t = 0.0;
    let w: Vec<f64> = rates
        .iter()
        .map(|e| {
            t += exp_draw(rng, 1.0 / e);
            t
        })
        .collect();
    let z: Vec<bool> = probs.iter().map(|&p| rng.random::<f64>() < p).collect();
    NjpcSample::new(w, z).expect("partial sums of exponentials are ordered")
}

/// Draws one censored sample from the stream addressed by `seed`.
pub fn generate(scheme: &CensoringScheme, params: &ExpParams, seed: RngSeed) -> NjpcSample {
    generate_with(scheme, params, &mut seed.rng())
}

/// Draws censored samples for one `(scheme, params)` pair, optionally
/// restricted to the event `1 <= m_k <= k - 1`.
#[derive(Debug, Clone)]
pub struct Sampler {
    rates: Vec<f64>,
    probs: Vec<f64>,
    k: usize,
}

impl Sampler {
    pub fn new(scheme: &CensoringScheme, params: &ExpParams) -> Self {
        Self {
            rates: stage_rates(scheme, params).rates,
            probs: bernoulli_probs(scheme, params),
            k: scheme.k(),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> NjpcSample {
        generate_from(&self.rates, &self.probs, rng)
    }

    /// Redraws until both MLEs exist. Returns the sample and the number of
    /// rejected draws.
    pub fn sample_conditional<R: RngCore + ?Sized>(&self, rng: &mut R) -> (NjpcSample, u64) {
        let mut rejected = 0;
        loop {
            let s = self.sample(rng);
            let m_k = s.pop1_failures();
            if m_k >= 1 && m_k < self.k {
                return (s, rejected);
            }
            rejected += 1;
        }
    }
}

/// Checks that conditional sampling terminates in reasonable time.
pub fn check_conditioning(scheme: &CensoringScheme, params: &ExpParams) -> Result<f64> {
    let prob = failure_count_dist(scheme, params).conditioning_prob();
    if prob < MIN_ACCEPTANCE {
        return Err(NjpcError::DegenerateConditioning { prob });
    }
    Ok(prob)
}

/// Runs the censoring process on complete lifetime data `x` (population 1,
/// length `m`) and `y` (population 2, length `n`).
///
/// At each failure the earliest surviving unit fails (on ties, the one
/// listed first, population 1 before population 2); then `R_i` survivors of
/// its own population and `R_i + 1` of the other are withdrawn uniformly at
/// random. Recording stops at the `k`-th failure.
pub fn apply_scheme(
    x: &[f64],
    y: &[f64],
    scheme: &CensoringScheme,
    seed: RngSeed,
) -> Result<NjpcSample> {
    if x.len() != scheme.m() {
        return Err(NjpcError::DimensionMismatch {
            expected: scheme.m(),
            found: x.len(),
        });
    }
    if y.len() != scheme.n() {
        return Err(NjpcError::DimensionMismatch {
            expected: scheme.n(),
            found: y.len(),
        });
    }
    if let Some(bad) = x.iter().chain(y).find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(NjpcError::InvalidSample(format!(
            "lifetimes must be finite and non-negative, got {bad}"
        )));
    }
    let mut rng = seed.rng();
    // survivors hold indices into the pooled list (x then y)
    let mut pop1: Vec<usize> = (0..x.len()).collect();
    let mut pop2: Vec<usize> = (x.len()..x.len() + y.len()).collect();
    let value = |i: usize| if i < x.len() { x[i] } else { y[i - x.len()] };
    let mut w = Vec::with_capacity(scheme.k());
    let mut z = Vec::with_capacity(scheme.k());
    for stage in 0..scheme.k() {
        let earliest = |units: &[usize]| {
            units
                .iter()
                .enumerate()
                .min_by(|a, b| value(*a.1).total_cmp(&value(*b.1)).then(a.1.cmp(b.1)))
                .map(|(pos, &unit)| (pos, unit))
        };
        let c1 = earliest(&pop1);
        let c2 = earliest(&pop2);
        let from_pop1 = match (c1, c2) {
            (Some((_, u1)), Some((_, u2))) => value(u1) <= value(u2),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => {
                return Err(NjpcError::InsufficientSurvivors {
                    population: 1,
                    needed: 1,
                    available: 0,
                })
            }
        };
        let (own, other, pos, unit, own_id) = if from_pop1 {
            let (pos, unit) = c1.expect("checked");
            (&mut pop1, &mut pop2, pos, unit, 1u8)
        } else {
            let (pos, unit) = c2.expect("checked");
            (&mut pop2, &mut pop1, pos, unit, 2u8)
        };
        w.push(value(unit));
        z.push(from_pop1);
        own.swap_remove(pos);
        if stage + 1 == scheme.k() {
            break;
        }
        let r = scheme.withdrawals()[stage];
        withdraw(own, r, own_id, &mut rng)?;
        withdraw(other, r + 1, 3 - own_id, &mut rng)?;
    }
    NjpcSample::new(w, z)
}

/// Removes `count` uniformly chosen units (partial Fisher–Yates).
fn withdraw<R: Rng + ?Sized>(
    units: &mut Vec<usize>,
    count: usize,
    population: u8,
    rng: &mut R,
) -> Result<()> {
    if count > units.len() {
        return Err(NjpcError::InsufficientSurvivors {
            population,
            needed: count,
            available: units.len(),
        });
    }
    for _ in 0..count {
        let pick = rng.random_range(0..units.len());
        units.swap_remove(pick);
    }
    Ok(())
}
