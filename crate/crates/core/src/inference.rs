//! Point estimates and confidence intervals.

use rayon::prelude::*;

use crate::error::{NjpcError, Result};
use crate::exact_dist::mle_mixture;
use crate::sample::{sufficient_stats, NjpcSample, SufficientStats};
use crate::scheme::{CensoringScheme, ExpParams, Which};
use crate::simulate::{check_conditioning, RngSeed, Sampler};

/// Conditional MLE `(A1 / m_k, A2 / n_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub theta1_hat: f64,
    pub theta2_hat: f64,
    pub stats: SufficientStats,
}

impl MleEstimate {
    pub fn get(&self, which: Which) -> f64 {
        match which {
            Which::Theta1 => self.theta1_hat,
            Which::Theta2 => self.theta2_hat,
        }
    }

    pub fn params(&self) -> Result<ExpParams> {
        ExpParams::new(self.theta1_hat, self.theta2_hat)
    }
}

/// Maximum likelihood estimates; they exist only when both populations
/// contributed at least one failure.
pub fn fit(scheme: &CensoringScheme, sample: &NjpcSample) -> Result<MleEstimate> {
    let stats = sufficient_stats(scheme, sample)?;
    from_stats(stats, scheme.k())
}

fn from_stats(stats: SufficientStats, k: usize) -> Result<MleEstimate> {
    if stats.m_k == 0 || stats.n_k == 0 {
        return Err(NjpcError::MleDoesNotExist { m_k: stats.m_k, k });
    }
    Ok(MleEstimate {
        theta1_hat: stats.a1 / stats.m_k as f64,
        theta2_hat: stats.a2 / stats.n_k as f64,
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiMethod {
    Exact,
    Bootstrap,
}

/// A two-sided interval. `upper == None` marks an open-ended interval:
/// the upper defining equation had no root below the search cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: Option<f64>,
    pub level: f64,
    pub method: CiMethod,
}

impl ConfidenceInterval {
    pub fn is_open_ended(&self) -> bool {
        self.upper.is_none()
    }

    pub fn length(&self) -> Option<f64> {
        self.upper.map(|u| u - self.lower)
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && self.upper.is_none_or(|u| value <= u)
    }
}

/// Residual target for the exact-interval equations.
pub const EXACT_CI_RESIDUAL: f64 = 1e-8;

/// The upper endpoint search stops at this multiple of the estimate.
pub const EXACT_CI_CAP: f64 = 1e6;

/// `P_θ(θ̂ > t | 1 <= m_k <= k - 1)` with the other parameter held at
/// `nuisance`.
pub fn conditional_survival(
    scheme: &CensoringScheme,
    which: Which,
    theta: f64,
    nuisance: f64,
    t: f64,
) -> Result<f64> {
    let params = match which {
        Which::Theta1 => ExpParams::new(theta, nuisance)?,
        Which::Theta2 => ExpParams::new(nuisance, theta)?,
    };
    Ok(mle_mixture(scheme, &params, which)?.survival(t))
}

/// Exact equal-tailed interval from the conditional law of the MLE.
///
/// Solves `P_θL(θ̂ > θ̂_obs) = α/2` and `P_θU(θ̂ > θ̂_obs) = 1 - α/2` with the
/// other parameter fixed at its estimate. The survival probability is
/// increasing in θ, so each equation is solved by geometric bracketing
/// around `θ̂_obs` followed by bisection.
pub fn exact_ci(
    scheme: &CensoringScheme,
    estimate: &MleEstimate,
    which: Which,
    level: f64,
) -> Result<ConfidenceInterval> {
    if !(level > 0.5 && level < 1.0) {
        return Err(NjpcError::InvalidLevel {
            level,
            range: "(0.5, 1)",
        });
    }
    let alpha = 1.0 - level;
    let observed = estimate.get(which);
    let nuisance = estimate.get(match which {
        Which::Theta1 => Which::Theta2,
        Which::Theta2 => Which::Theta1,
    });
    let survival = |theta: f64| conditional_survival(scheme, which, theta, nuisance, observed);
    let lower = solve_increasing(&survival, alpha / 2.0, observed)?.ok_or(NjpcError::FlatTail {
        cap: EXACT_CI_CAP * observed,
    })?;
    let upper = solve_increasing(&survival, 1.0 - alpha / 2.0, observed)?;
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
        method: CiMethod::Exact,
    })
}

/// Root of `g(θ) = target` for increasing `g`, starting from `start`.
/// `Ok(None)` when `g` stays below `target` up to `EXACT_CI_CAP * start`.
fn solve_increasing<F>(g: &F, target: f64, start: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let f = |theta: f64| g(theta).map(|v| v - target);
    let mut lo = start;
    let mut hi = start;
    let f_start = f(start)?;
    if f_start.abs() < EXACT_CI_RESIDUAL * 1e-2 {
        return Ok(Some(start));
    }
    if f_start < 0.0 {
        loop {
            lo = hi;
            hi *= 2.0;
            if hi > EXACT_CI_CAP * start {
                return Ok(None);
            }
            if f(hi)? >= 0.0 {
                break;
            }
        }
    } else {
        let floor = start * 1e-12;
        loop {
            hi = lo;
            lo *= 0.5;
            if lo < floor {
                return Err(NjpcError::InvalidArgument(format!(
                    "no lower bracket for survival target {target} above {floor:e}"
                )));
            }
            if f(lo)? <= 0.0 {
                break;
            }
        }
    }
    // invariant: f(lo) <= 0 <= f(hi)
    let mut best = (f64::INFINITY, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if v.abs() < best.0 {
            best = (v.abs(), mid);
        }
        if v.abs() < EXACT_CI_RESIDUAL * 1e-2 || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(best.1))
}

/// Percentile bootstrap intervals for both parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapIntervals {
    pub theta1: ConfidenceInterval,
    pub theta2: ConfidenceInterval,
    /// Resamples redrawn because one population had no failures.
    pub n_rejected: u64,
}

impl BootstrapIntervals {
    pub fn get(&self, which: Which) -> &ConfidenceInterval {
        match which {
            Which::Theta1 => &self.theta1,
            Which::Theta2 => &self.theta2,
        }
    }
}

/// 1-based order-statistic indices `([α/2 · B], [(1 - α/2) · B])`,
/// clamped to `1..=B`.
pub fn percentile_indices(level: f64, b: usize) -> (usize, usize) {
    let alpha = 1.0 - level;
    // the small offset keeps e.g. 0.05 * 1000 from flooring to 49
    let idx = |x: f64| ((x + 1e-9).floor() as usize).clamp(1, b);
    (
        idx(alpha / 2.0 * b as f64),
        idx((1.0 - alpha / 2.0) * b as f64),
    )
}

/// Parametric bootstrap: `b` resamples at the estimates, each from its own
/// sub-stream of `seed`, so the result does not depend on thread count.
/// Resamples without an MLE are redrawn.
pub fn bootstrap_ci(
    scheme: &CensoringScheme,
    estimate: &MleEstimate,
    level: f64,
    b: usize,
    seed: RngSeed,
) -> Result<BootstrapIntervals> {
    if !(level > 0.0 && level < 1.0) {
        return Err(NjpcError::InvalidLevel {
            level,
            range: "(0, 1)",
        });
    }
    if b < 100 {
        return Err(NjpcError::InvalidArgument(format!(
            "bootstrap needs at least 100 resamples, got {b}"
        )));
    }
    let params = estimate.params()?;
    check_conditioning(scheme, &params)?;
    let sampler = Sampler::new(scheme, &params);
    let draws: Vec<(f64, f64, u64)> = (0..b as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.child(i).rng();
            let (sample, rejected) = sampler.sample_conditional(&mut rng);
            let est = fit(scheme, &sample).expect("conditional sample has an MLE");
            (est.theta1_hat, est.theta2_hat, rejected)
        })
        .collect();
    let n_rejected = draws.iter().map(|d| d.2).sum();
    let mut t1: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let mut t2: Vec<f64> = draws.iter().map(|d| d.1).collect();
    t1.sort_by(f64::total_cmp);
    t2.sort_by(f64::total_cmp);
    let (lo, hi) = percentile_indices(level, b);
    let ci = |v: &[f64]| ConfidenceInterval {
        lower: v[lo - 1],
        upper: Some(v[hi - 1]),
        level,
        method: CiMethod::Bootstrap,
    };
    Ok(BootstrapIntervals {
        theta1: ci(&t1),
        theta2: ci(&t2),
        n_rejected,
    })
}
