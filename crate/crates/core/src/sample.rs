//! Observed data, sufficient statistics and the likelihood.

use crate::error::{NjpcError, Result};
use crate::scheme::{CensoringScheme, ExpParams};

/// Observed failure times `w` (non-decreasing) with population indicators
/// `z` (`true` when the failure came from population 1).
#[derive(Debug, Clone, PartialEq)]
pub struct NjpcSample {
    w: Vec<f64>,
    z: Vec<bool>,
}

impl NjpcSample {
    /// Ties in `w` are accepted; recorded data are often rounded.
    pub fn new(w: Vec<f64>, z: Vec<bool>) -> Result<Self> {
        if w.len() != z.len() {
            return Err(NjpcError::DimensionMismatch {
                expected: w.len(),
                found: z.len(),
            });
        }
        if let Some(bad) = w.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(NjpcError::InvalidSample(format!(
                "failure times must be finite and non-negative, got {bad}"
            )));
        }
        if let Some(i) = w.windows(2).position(|p| p[1] < p[0]) {
            return Err(NjpcError::InvalidSample(format!(
                "failure times must be non-decreasing: w[{}] = {} > w[{}] = {}",
                i + 1,
                w[i],
                i + 2,
                w[i + 1]
            )));
        }
        Ok(Self { w, z })
    }

    /// Builds a sample from 0/1 indicators.
    pub fn from_indicators(w: Vec<f64>, z: &[u8]) -> Result<Self> {
        let z = z
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(NjpcError::InvalidSample(format!(
                    "indicators must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(w, z)
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn z(&self) -> &[bool] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Number of population-1 failures.
    pub fn pop1_failures(&self) -> usize {
        self.z.iter().filter(|&&z| z).count()
    }
}

/// The complete sufficient statistic `(m_k, n_k, A1, A2)`.
///
/// `a1` and `a2` are the total times on test accumulated against
/// population 1 and population 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    pub m_k: usize,
    pub n_k: usize,
    pub a1: f64,
    pub a2: f64,
}

fn check_len(scheme: &CensoringScheme, sample: &NjpcSample) -> Result<()> {
    if sample.len() != scheme.k() {
        return Err(NjpcError::DimensionMismatch {
            expected: scheme.k(),
            found: sample.len(),
        });
    }
    Ok(())
}

/// Computes `(m_k, n_k, A1, A2)` for a sample observed under `scheme`.
pub fn sufficient_stats(scheme: &CensoringScheme, sample: &NjpcSample) -> Result<SufficientStats> {
    check_len(scheme, sample)?;
    let k = scheme.k();
    let w = sample.w();
    let shared: f64 = scheme
        .withdrawals()
        .iter()
        .zip(w)
        .map(|(&r, &t)| (r + 1) as f64 * t)
        .sum();
    let (m_left, n_left) = scheme.at_risk(k - 1);
    let m_k = sample.pop1_failures();
    Ok(SufficientStats {
        m_k,
        n_k: k - m_k,
        a1: shared + m_left as f64 * w[k - 1],
        a2: shared + n_left as f64 * w[k - 1],
    })
}

/// Log of the likelihood's normalizing constant: the product over failures
/// of the failing population's at-risk count.
pub fn log_normalizing_constant(scheme: &CensoringScheme, sample: &NjpcSample) -> Result<f64> {
    check_len(scheme, sample)?;
    Ok(sample
        .z()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let (a, b) = scheme.at_risk(i);
            (if z { a } else { b } as f64).ln()
        })
        .sum())
}

/// Log-likelihood of `(theta1, theta2)` given the observed sample.
pub fn log_likelihood(
    scheme: &CensoringScheme,
    sample: &NjpcSample,
    params: &ExpParams,
) -> Result<f64> {
    let stats = sufficient_stats(scheme, sample)?;
    let log_c = log_normalizing_constant(scheme, sample)?;
    let (t1, t2) = (params.theta1(), params.theta2());
    Ok(log_c
        - stats.m_k as f64 * t1.ln()
        - stats.n_k as f64 * t2.ln()
        - stats.a1 / t1
        - stats.a2 / t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn table5_statistics() {
        let (scheme, sample) = fixtures::proschan_scheme1();
        let s = sufficient_stats(&scheme, &sample).unwrap();
        assert_eq!((s.m_k, s.n_k), (5, 3));
        assert_eq!(s.a1, 297.0);
        assert_eq!(s.a2, 342.0);
    }

    #[test]
    fn table6_statistics() {
        let (scheme, sample) = fixtures::proschan_scheme2();
        let s = sufficient_stats(&scheme, &sample).unwrap();
        assert_eq!((s.m_k, s.n_k), (5, 3));
        assert_eq!(s.a1, 189.0);
        assert_eq!(s.a2, 237.0);
    }

    #[test]
    fn zero_times_give_zero_totals() {
        let scheme = CensoringScheme::new(10, 12, 4, vec![1, 0, 2]).unwrap();
        let sample = NjpcSample::from_indicators(vec![0.0; 4], &[1, 0, 0, 1]).unwrap();
        let s = sufficient_stats(&scheme, &sample).unwrap();
        assert_eq!((s.a1, s.a2), (0.0, 0.0));
        assert_eq!((s.m_k, s.n_k), (2, 2));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let scheme = CensoringScheme::no_withdrawals(10, 10, 3).unwrap();
        let sample = NjpcSample::from_indicators(vec![1.0, 2.0], &[1, 0]).unwrap();
        assert_eq!(
            sufficient_stats(&scheme, &sample),
            Err(NjpcError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn sample_validation() {
        assert!(NjpcSample::from_indicators(vec![1.0, 0.5], &[1, 0]).is_err());
        assert!(NjpcSample::from_indicators(vec![1.0, 2.0], &[1, 2]).is_err());
        assert!(NjpcSample::from_indicators(vec![-1.0, 2.0], &[1, 0]).is_err());
        assert!(NjpcSample::from_indicators(vec![5.0, 5.0], &[1, 0]).is_ok());
    }

    #[test]
    fn two_failure_likelihood_by_hand() {
        // m = 3, n = 4, R_1 = 0: C = 3 * (4 - 1), A1 = w1 + 2 w2, A2 = w1 + 3 w2.
        let scheme = CensoringScheme::new(3, 4, 2, vec![0]).unwrap();
        let sample = NjpcSample::from_indicators(vec![0.4, 1.1], &[1, 0]).unwrap();
        let params = ExpParams::new(0.7, 1.9).unwrap();
        let (t1, t2) = (0.7f64, 1.9f64);
        let a1 = 0.4 + 2.0 * 1.1;
        let a2 = 0.4 + 3.0 * 1.1;
        let expected = 9.0 / (t1 * t2) * (-(a1 / t1) - a2 / t2).exp();
        let got = log_likelihood(&scheme, &sample, &params).unwrap().exp();
        assert!(
            (got - expected).abs() < 1e-14 * expected,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn shifting_times_shifts_loglik_linearly() {
        let scheme = CensoringScheme::new(3, 4, 2, vec![0]).unwrap();
        let params = ExpParams::new(0.7, 1.9).unwrap();
        let c = 0.35;
        let base = NjpcSample::from_indicators(vec![0.4, 1.1], &[0, 1]).unwrap();
        let shifted = NjpcSample::from_indicators(vec![0.4 + c, 1.1 + c], &[0, 1]).unwrap();
        let d = log_likelihood(&scheme, &shifted, &params).unwrap()
            - log_likelihood(&scheme, &base, &params).unwrap();
        // A1 gains m * c and A2 gains n * c.
        let expected = -c * (3.0 / 0.7 + 4.0 / 1.9);
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn table5_mle_is_local_maximum() {
        let (scheme, sample) = fixtures::proschan_scheme1();
        let at = |a: f64, b: f64| {
            log_likelihood(&scheme, &sample, &ExpParams::new(a, b).unwrap()).unwrap()
        };
        let best = at(59.4, 114.0);
        for (d1, d2) in [
            (0.1, 0.1),
            (0.1, -0.1),
            (-0.1, 0.1),
            (-0.1, -0.1),
            (0.1, 0.0),
            (0.0, -0.1),
        ] {
            assert!(best >= at(59.4 + d1, 114.0 + d2));
        }
    }
}
