//! Censoring design and lifetime parameters.

use crate::error::{NjpcError, Result};

/// A joint progressive type-II censoring design for two populations.
///
/// `m` units of population 1 and `n` units of population 2 go on test
/// together. At the `i`-th failure (`i < k`) the failing population loses
/// `R_i` further units and the other population loses `R_i + 1`, so both
/// shed exactly `R_i + 1` units per stage. All survivors are removed at the
/// `k`-th failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensoringScheme {
    m: usize,
    n: usize,
    k: usize,
    withdrawals: Vec<usize>,
    // removed[i] = sum_{j < i} (R_j + 1), for i = 0..k
    removed: Vec<usize>,
}

impl CensoringScheme {
    /// Builds a scheme, rejecting designs that would run out of units.
    ///
    /// `withdrawals` holds `R_1..R_{k-1}`.
    pub fn new(m: usize, n: usize, k: usize, withdrawals: Vec<usize>) -> Result<Self> {
        validate_scheme(m, n, k, &withdrawals)?;
        let mut removed = Vec::with_capacity(k);
        let mut acc = 0;
        removed.push(0);
        for r in &withdrawals {
            acc += r + 1;
            removed.push(acc);
        }
        Ok(Self {
            m,
            n,
            k,
            withdrawals,
            removed,
        })
    }

    /// Convenience constructor for the all-zero withdrawal pattern.
    pub fn no_withdrawals(m: usize, n: usize, k: usize) -> Result<Self> {
        Self::new(m, n, k, vec![0; k.saturating_sub(1)])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn withdrawals(&self) -> &[usize] {
        &self.withdrawals
    }

    /// Units removed from each population before stage `stage` (0-based),
    /// i.e. `S_{stage} = sum_{j <= stage} (R_j + 1)` in 1-based notation.
    pub fn removed_before(&self, stage: usize) -> usize {
        self.removed[stage]
    }

    /// Units of each population still on test at the start of `stage`
    /// (0-based).
    pub fn at_risk(&self, stage: usize) -> (usize, usize) {
        let s = self.removed[stage];
        (self.m - s, self.n - s)
    }

    /// Total removed per population before the last stage.
    pub fn total_removed(&self) -> usize {
        self.removed[self.k - 1]
    }
}

/// Checks the feasibility inequalities of a design.
pub fn validate_scheme(m: usize, n: usize, k: usize, withdrawals: &[usize]) -> Result<()> {
    if m == 0 || n == 0 || k == 0 {
        return Err(NjpcError::InfeasibleScheme(format!(
            "m, n and k must be positive (m = {m}, n = {n}, k = {k})"
        )));
    }
    let min = m.min(n);
    if k >= min {
        return Err(NjpcError::InfeasibleScheme(format!(
            "k < min(m, n) violated: k = {k}, min(m, n) = {min}"
        )));
    }
    if withdrawals.len() != k - 1 {
        return Err(NjpcError::InfeasibleScheme(format!(
            "R must have k - 1 = {} entries, got {}",
            k - 1,
            withdrawals.len()
        )));
    }
    let total = withdrawals
        .iter()
        .try_fold(0usize, |acc, &r| acc.checked_add(r)?.checked_add(1));
    match total {
        Some(total) if total < min => Ok(()),
        Some(total) => Err(NjpcError::InfeasibleScheme(format!(
            "sum(R_i + 1) < min(m, n) violated: sum(R_i + 1) = {total} >= min(m, n) = {min}"
        ))),
        None => Err(NjpcError::InfeasibleScheme(
            "sum(R_i + 1) overflows".to_string(),
        )),
    }
}

/// Mean lifetimes of the two exponential populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpParams {
    theta1: f64,
    theta2: f64,
}

impl ExpParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if ok(theta1) && ok(theta2) {
            Ok(Self { theta1, theta2 })
        } else {
            Err(NjpcError::NonPositiveParams { theta1, theta2 })
        }
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Mean of the population selected by `which`.
    pub fn get(&self, which: Which) -> f64 {
        match which {
            Which::Theta1 => self.theta1,
            Which::Theta2 => self.theta2,
        }
    }

    /// Copy with the selected mean replaced.
    pub fn with(&self, which: Which, value: f64) -> Result<Self> {
        match which {
            Which::Theta1 => Self::new(value, self.theta2),
            Which::Theta2 => Self::new(self.theta1, value),
        }
    }
}

/// Selects one of the two populations' parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    Theta1,
    Theta2,
}

impl Which {
    pub const BOTH: [Which; 2] = [Which::Theta1, Which::Theta2];

    pub fn name(self) -> &'static str {
        match self {
            Which::Theta1 => "theta1",
            Which::Theta2 => "theta2",
        }
    }
}

impl std::str::FromStr for Which {
    type Err = NjpcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta1" | "1" => Ok(Which::Theta1),
            "theta2" | "2" => Ok(Which::Theta2),
            other => Err(NjpcError::InvalidArgument(format!(
                "expected theta1 or theta2, got {other:?}"
            ))),
        }
    }
}
