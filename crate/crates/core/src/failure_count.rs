//! Law of the population-1 failure count `m_k`.
//!
//! Given the scheme, the indicator of the `i`-th failure is Bernoulli with
//! success probability
//!
//! ```text
//! p_i = a_i θ2 / (a_i θ2 + b_i θ1)
//! ```
//!
//! where `a_i`, `b_i` are the population-1 and population-2 at-risk counts
//! at stage `i`, and the indicators are mutually independent. `m_k` is
//! therefore Poisson-binomial and its pmf follows from an `O(k²)`
//! convolution. [`oracle_failure_count_dist`] evaluates the same law by
//! summing the likelihood product over every indicator vector and exists
//! to cross-check the recursion.

use crate::error::{NjpcError, Result};
use crate::scheme::{CensoringScheme, ExpParams};

/// Largest `k` accepted by the `2^k` enumeration oracle.
pub const ORACLE_MAX_K: usize = 20;

/// Conditioning events rarer than this are treated as degenerate.
pub const DEGENERATE_CONDITIONING: f64 = 1e-300;

/// `P(m_k = r)` for `r = 0..=k` along with the per-stage probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureCountDist {
    probs: Vec<f64>,
    p_seq: Vec<f64>,
}

impl FailureCountDist {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn p_seq(&self) -> &[f64] {
        &self.p_seq
    }

    pub fn k(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn pmf(&self, r: usize) -> f64 {
        self.probs.get(r).copied().unwrap_or(0.0)
    }

    /// `P(m_k <= r)`.
    pub fn cdf(&self, r: usize) -> f64 {
        self.probs.iter().take(r + 1).sum::<f64>().min(1.0)
    }

    /// `P(1 <= m_k <= k - 1)`, the probability that both MLEs exist.
    pub fn conditioning_prob(&self) -> f64 {
        let k = self.k();
        if k < 2 {
            return 0.0;
        }
        self.probs[1..k].iter().sum()
    }

    /// `P(m_k = r | 1 <= m_k <= k - 1)`.
    pub fn conditional_weight(&self, r: usize) -> Result<f64> {
        let k = self.k();
        if r == 0 || r >= k {
            return Err(NjpcError::IndexOutOfRange {
                r,
                max: k.saturating_sub(1),
            });
        }
        let z = self.conditioning_prob();
        if z < DEGENERATE_CONDITIONING {
            return Err(NjpcError::DegenerateConditioning { prob: z });
        }
        Ok(self.probs[r] / z)
    }

    /// Conditional weights for `r = 1..k-1`, indexed from zero.
    pub fn conditional_weights(&self) -> Result<Vec<f64>> {
        (1..self.k()).map(|r| self.conditional_weight(r)).collect()
    }
}

/// Per-stage probabilities that the next failure comes from population 1.
pub fn bernoulli_probs(scheme: &CensoringScheme, params: &ExpParams) -> Vec<f64> {
    let (t1, t2) = (params.theta1(), params.theta2());
    (0..scheme.k())
        .map(|i| {
            let (a, b) = scheme.at_risk(i);
            let num = a as f64 * t2;
            num / (num + b as f64 * t1)
        })
        .collect()
}

/// Exact law of `m_k` via the Poisson-binomial recursion.
pub fn failure_count_dist(scheme: &CensoringScheme, params: &ExpParams) -> FailureCountDist {
    let p_seq = bernoulli_probs(scheme, params);
    let mut probs = vec![0.0; p_seq.len() + 1];
    probs[0] = 1.0;
    for (i, &p) in p_seq.iter().enumerate() {
        let q = 1.0 - p;
        // descend so probs[r - 1] still holds the previous stage's value
        for r in (1..=i + 1).rev() {
            probs[r] = probs[r] * q + probs[r - 1] * p;
        }
        probs[0] *= q;
    }
    FailureCountDist { probs, p_seq }
}

/// Exact law of `m_k` by summing, for each `r`, the likelihood product over
/// all indicator vectors with `r` ones. Exponential in `k`; test use only.
pub fn oracle_failure_count_dist(
    scheme: &CensoringScheme,
    params: &ExpParams,
) -> Result<FailureCountDist> {
    let k = scheme.k();
    if k > ORACLE_MAX_K {
        return Err(NjpcError::OracleTooLarge {
            k,
            max: ORACLE_MAX_K,
        });
    }
    let (t1, t2) = (params.theta1(), params.theta2());
    let stages: Vec<(f64, f64, f64)> = (0..k)
        .map(|i| {
            let (a, b) = scheme.at_risk(i);
            let (a, b) = (a as f64, b as f64);
            (a, b, a * t2 + b * t1)
        })
        .collect();
    let mut probs = vec![0.0; k + 1];
    for mask in 0u32..(1u32 << k) {
        let r = mask.count_ones() as usize;
        let mut prod = 1.0;
        for (i, &(a, b, den)) in stages.iter().enumerate() {
            let count = if mask >> i & 1 == 1 { a } else { b };
            prod *= count / den;
        }
        probs[r] += prod * t1.powi((k - r) as i32) * t2.powi(r as i32);
    }
    let p_seq = bernoulli_probs(scheme, params);
    Ok(FailureCountDist { probs, p_seq })
}
