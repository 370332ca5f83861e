//! Sums of independent exponential variables.
//!
//! The textbook partial-fraction density
//!
//! ```text
//! f(t) = Σ_i c_i λ_i e^{-λ_i t},   c_i = Π_{j≠i} λ_j / (λ_j - λ_i)
//! ```
//!
//! loses accuracy quickly as rates cluster: the coefficients grow like
//! the inverse product of the rate gaps while the result stays `O(1)`.
//! [`Hypoexponential`] evaluates that form only when the cancellation it
//! incurs is bounded, and otherwise falls back to uniformization of the
//! underlying phase-type chain, a series of non-negative terms:
//!
//! ```text
//! P(X > t) = Σ_n Poisson(n; Λt) · P(chain not absorbed after n jumps)
//! ```
//!
//! with `Λ = max λ_i`. All-equal rates use the gamma (Erlang) form.

use crate::error::{NjpcError, Result};

/// Partial fractions are skipped when two rates are closer than this,
/// relative to the larger one.
pub const MIN_RELATIVE_GAP: f64 = 1e-6;

/// Largest accepted ratio `Σ|terms| / |Σ terms|` for the partial-fraction
/// sum. With `k ≤ 30` this keeps the relative error below ~1e-12.
pub const MAX_CANCELLATION: f64 = 1e3;

const SERIES_TOL: f64 = 1e-17;

/// How a density or survival value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    /// Closed form when every rate is identical.
    Gamma,
    /// Distinct-rate partial-fraction sum.
    PartialFractions,
    /// Poisson-weighted series of the uniformized phase-type chain.
    Uniformization,
}

/// Distribution of `Σ_s X_s` with independent `X_s ~ Exp(mean = scale_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypoexponential {
    scales: Vec<f64>,
    rates: Vec<f64>,
    max_rate: f64,
    all_equal: bool,
    coeffs: Option<Vec<f64>>,
}

impl Hypoexponential {
    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(NjpcError::InvalidArgument(
                "hypoexponential needs at least one scale".into(),
            ));
        }
        if let Some(&bad) = scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(NjpcError::InvalidScale(bad));
        }
        let rates: Vec<f64> = scales.iter().map(|s| 1.0 / s).collect();
        let max_rate = rates.iter().copied().fold(0.0, f64::max);
        let all_equal = scales.iter().all(|&s| s == scales[0]);
        let coeffs = if all_equal || min_relative_gap(&rates) <= MIN_RELATIVE_GAP {
            None
        } else {
            Some(
                rates
                    .iter()
                    .enumerate()
                    .map(|(i, &li)| {
                        rates
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, &lj)| lj / (lj - li))
                            .product()
                    })
                    .collect(),
            )
        };
        Ok(Self {
            scales,
            rates,
            max_rate,
            all_equal,
            coeffs,
        })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.scales.iter().sum()
    }

    /// `E[X²] = Σ s² + (Σ s)²`.
    pub fn second_moment(&self) -> f64 {
        let m = self.mean();
        self.scales.iter().map(|s| s * s).sum::<f64>() + m * m
    }

    /// `E[e^{uX}] = Π (1 - s u)^{-1}` for `u < 1 / max scale`.
    pub fn mgf(&self, u: f64) -> f64 {
        self.scales.iter().map(|s| 1.0 / (1.0 - s * u)).product()
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if self.all_equal {
            return self.gamma_pdf(t);
        }
        if let Some(v) = self.partial_fractions(t, true) {
            return v;
        }
        self.uniformized(t).1
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if self.all_equal {
            return self.gamma_survival(t);
        }
        if let Some(v) = self.partial_fractions(t, false) {
            return v;
        }
        self.uniformized(t).0
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.survival(t)
    }

    /// Evaluation route [`Self::survival`] takes at `t`.
    pub fn evaluation_at(&self, t: f64) -> Evaluation {
        if self.all_equal {
            Evaluation::Gamma
        } else if t > 0.0 && self.partial_fractions(t, false).is_some() {
            Evaluation::PartialFractions
        } else {
            Evaluation::Uniformization
        }
    }

    /// Density by a specific route. `None` when the route does not apply:
    /// gamma for unequal rates, or partial fractions whose cancellation
    /// exceeds [`MAX_CANCELLATION`].
    pub fn pdf_with(&self, how: Evaluation, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        match how {
            Evaluation::Gamma => self.all_equal.then(|| self.gamma_pdf(t)),
            Evaluation::PartialFractions => self.partial_fractions(t, true),
            Evaluation::Uniformization => Some(self.uniformized(t).1),
        }
    }

    /// Survival by a specific route; see [`Self::pdf_with`].
    pub fn survival_with(&self, how: Evaluation, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(1.0);
        }
        match how {
            Evaluation::Gamma => self.all_equal.then(|| self.gamma_survival(t)),
            Evaluation::PartialFractions => self.partial_fractions(t, false),
            Evaluation::Uniformization => Some(self.uniformized(t).0),
        }
    }

    fn partial_fractions(&self, t: f64, density: bool) -> Option<f64> {
        let coeffs = self.coeffs.as_ref()?;
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (&c, &l) in coeffs.iter().zip(&self.rates) {
            let term = if density { c * l } else { c } * (-l * t).exp();
            sum += term;
            abs += term.abs();
        }
        if abs == 0.0 {
            return Some(0.0);
        }
        (sum > 0.0 && abs <= MAX_CANCELLATION * sum).then_some(sum)
    }

    fn gamma_pdf(&self, t: f64) -> f64 {
        let k = self.len();
        let x = t * self.rates[0];
        (((k - 1) as f64) * x.ln() - x - ln_factorial(k - 1)).exp() * self.rates[0]
    }

    fn gamma_survival(&self, t: f64) -> f64 {
        let x = t * self.rates[0];
        let lx = x.ln();
        (0..self.len())
            .map(|j| (j as f64 * lx - x - ln_factorial(j)).exp())
            .sum::<f64>()
            .min(1.0)
    }

    /// Returns `(survival, density)` from the uniformized chain.
    fn uniformized(&self, t: f64) -> (f64, f64) {
        let k = self.len();
        let lam = self.max_rate;
        let x = lam * t;
        let lx = x.ln();
        let go: Vec<f64> = self.rates.iter().map(|r| r / lam).collect();
        let stay: Vec<f64> = go.iter().map(|g| 1.0 - g).collect();
        let mut phase = vec![0.0; k];
        phase[0] = 1.0;
        let mut log_w = -x;
        let (mut surv, mut last) = (0.0f64, 0.0f64);
        let hard_cap = (x + 60.0 * x.sqrt()) as usize + 200 + 4 * k;
        for n in 0..=hard_cap {
            let w = log_w.exp();
            let mass: f64 = phase.iter().sum();
            surv += w * mass;
            last += w * phase[k - 1];
            if (n as f64) + 2.0 > x {
                // remaining Poisson weights decay at least geometrically
                let rho = x / (n as f64 + 2.0);
                let tail = w * x / (n as f64 + 1.0) / (1.0 - rho) * mass;
                let done_s = tail <= SERIES_TOL * surv || mass == 0.0;
                let done_f = tail <= SERIES_TOL * last || last == 0.0 && n > k + x as usize;
                if done_s && done_f {
                    break;
                }
            }
            for i in (1..k).rev() {
                phase[i] = phase[i] * stay[i] + phase[i - 1] * go[i - 1];
            }
            phase[0] *= stay[0];
            log_w += lx - ((n + 1) as f64).ln();
        }
        (surv.min(1.0), last * self.rates[k - 1])
    }
}

fn min_relative_gap(rates: &[f64]) -> f64 {
    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|p| (p[1] - p[0]) / p[1])
        .fold(f64::INFINITY, f64::min)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Density of a sum of independent exponentials with the given means.
pub fn hypoexp_pdf(scales: &[f64], t: f64) -> Result<f64> {
    Ok(Hypoexponential::new(scales.to_vec())?.pdf(t))
}

/// Survival function of a sum of independent exponentials with the given
/// means.
pub fn hypoexp_survival(scales: &[f64], t: f64) -> Result<f64> {
    Ok(Hypoexponential::new(scales.to_vec())?.survival(t))
}
