//! Exact sampling distributions of the conditional MLEs.
//!
//! Given `m_k = r`, `θ̂1 = A1 / r` is a sum of `k` independent exponentials
//! with means
//!
//! ```text
//! α_sr = a_s θ1 θ2 / (r (a_s θ2 + b_s θ1))
//! ```
//!
//! and `θ̂2 = A2 / (k - r)` likewise with means
//! `β_sr = b_s θ1 θ2 / ((k - r)(a_s θ2 + b_s θ1))`, where `a_s`, `b_s` are
//! the at-risk counts at stage `s`. Conditioning on `1 <= m_k <= k - 1`
//! makes each MLE a `(k - 1)`-component mixture of hypoexponential laws
//! weighted by the conditional law of `m_k`.

use std::fmt::Write as _;

use crate::error::{NjpcError, Result};
use crate::failure_count::failure_count_dist;
use crate::hypoexp::Hypoexponential;
use crate::scheme::{CensoringScheme, ExpParams, Which};

/// Component means for mixture index `r` (the value of `m_k`).
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponentRates {
    pub r: usize,
    pub scales: Vec<f64>,
}

pub fn component_rates(
    scheme: &CensoringScheme,
    params: &ExpParams,
    r: usize,
    which: Which,
) -> Result<MixtureComponentRates> {
    let k = scheme.k();
    if r == 0 || r >= k {
        return Err(NjpcError::IndexOutOfRange {
            r,
            max: k.saturating_sub(1),
        });
    }
    let (t1, t2) = (params.theta1(), params.theta2());
    let divisor = match which {
        Which::Theta1 => r,
        Which::Theta2 => k - r,
    } as f64;
    let scales = (0..k)
        .map(|s| {
            let (a, b) = scheme.at_risk(s);
            let (a, b) = (a as f64, b as f64);
            let own = match which {
                Which::Theta1 => a,
                Which::Theta2 => b,
            };
            own * t1 * t2 / (divisor * (a * t2 + b * t1))
        })
        .collect();
    Ok(MixtureComponentRates { r, scales })
}

/// Conditional law of `θ̂1` or `θ̂2` as a finite hypoexponential mixture.
#[derive(Debug, Clone)]
pub struct MleMixture {
    which: Which,
    weights: Vec<f64>,
    components: Vec<Hypoexponential>,
}

/// Assembles the exact conditional distribution of one MLE.
pub fn mle_mixture(
    scheme: &CensoringScheme,
    params: &ExpParams,
    which: Which,
) -> Result<MleMixture> {
    let k = scheme.k();
    if k < 2 {
        return Err(NjpcError::DegenerateConditioning { prob: 0.0 });
    }
    let weights = failure_count_dist(scheme, params).conditional_weights()?;
    let components = (1..k)
        .map(|r| Hypoexponential::new(component_rates(scheme, params, r, which)?.scales))
        .collect::<Result<Vec<_>>>()?;
    Ok(MleMixture {
        which,
        weights,
        components,
    })
}

impl MleMixture {
    pub fn which(&self) -> Which {
        self.which
    }

    /// Weights for `r = 1..k-1`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[Hypoexponential] {
        &self.components
    }

    fn mix(&self, f: impl Fn(&Hypoexponential) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.components)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, c)| w * f(c))
            .sum()
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.mix(|c| c.pdf(t))
    }

    pub fn survival(&self, t: f64) -> f64 {
        self.mix(|c| c.survival(t)).clamp(0.0, 1.0)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.survival(t)
    }

    pub fn mean(&self) -> f64 {
        self.mix(Hypoexponential::mean)
    }

    pub fn second_moment(&self) -> f64 {
        self.mix(Hypoexponential::second_moment)
    }

    /// Moment generating function `Σ_r w_r Π_s (1 - scale_sr u)^{-1}`.
    pub fn mgf(&self, u: f64) -> f64 {
        self.mix(|c| c.mgf(u))
    }

    /// Smallest `t` on a doubling grid from the mean with
    /// `survival(t) < tail`.
    pub fn upper_bound(&self, tail: f64) -> f64 {
        let mut t = self.mean().max(f64::MIN_POSITIVE);
        while self.survival(t) >= tail {
            t *= 2.0;
        }
        t
    }

    /// Inverse CDF by bisection, `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(NjpcError::InvalidArgument(format!(
                "quantile level must lie in (0, 1), got {p}"
            )));
        }
        let mut hi = self.upper_bound(1.0 - p);
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `points` evenly spaced `(t, density)` pairs between the `1e-4` and
    /// `1 - 1e-4` quantiles.
    pub fn curve(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        if points < 2 {
            return Err(NjpcError::InvalidArgument(format!(
                "a curve needs at least 2 points, got {points}"
            )));
        }
        let lo = self.quantile(CURVE_TAIL)?;
        let hi = self.quantile(1.0 - CURVE_TAIL)?;
        let step = (hi - lo) / (points - 1) as f64;
        Ok((0..points)
            .map(|i| {
                let t = if i + 1 == points {
                    hi
                } else {
                    lo + step * i as f64
                };
                (t, self.pdf(t))
            })
            .collect())
    }
}

/// Tail probability left out on each side of an exported curve.
pub const CURVE_TAIL: f64 = 1e-4;

/// Closed-form `(E θ̂, E θ̂²)` under the conditional law.
///
/// For `m = n` all means within a component coincide and these reduce to
/// `k α_r` and `k (k + 1) α_r²`.
pub fn mle_moments(
    scheme: &CensoringScheme,
    params: &ExpParams,
    which: Which,
) -> Result<(f64, f64)> {
    let mix = mle_mixture(scheme, params, which)?;
    Ok((mix.mean(), mix.second_moment()))
}

/// Two-column whitespace-separated `t density` table.
pub fn format_curve(curve: &[(f64, f64)], precision: usize) -> String {
    let mut out = String::new();
    for (t, d) in curve {
        let _ = writeln!(out, "{} {}", fmt_sig(*t, precision), fmt_sig(*d, precision));
    }
    out
}

/// Formats `x` with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99995 -> 10.0000)
    if s.trim_start_matches('-')
        .split('.')
        .next()
        .map_or(0, str::len)
        > (exp + 1).max(1) as usize
        && decimals > 0
    {
        return format!("{x:.prec$}", prec = decimals - 1);
    }
    s
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
