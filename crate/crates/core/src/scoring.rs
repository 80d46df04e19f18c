//! Scoring rules for forecasts `q ∈ [0, 1]` of a binary outcome.
//!
//! Every rule satisfies `s(1) = 1` and `s(1/2) = 0`. The score of forecast
//! `q` against outcome `b` is `s_b(q)`, with `s₁(q) = s(q)` and
//! `s₀(q) = s(1 − q)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundation::ExtendedReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringRule {
    /// `1 − √((1−q)/q)`; the only rule here whose expected score amplifies linearly.
    Hs,
    /// `1 − 4(1−q)²`
    Brier,
    /// `1 − 2(1−q)`; not proper.
    Bias,
    /// `1 − log₂(1/q)`
    Ls,
}

impl ScoringRule {
    pub const ALL: [ScoringRule; 4] = [
        ScoringRule::Hs,
        ScoringRule::Brier,
        ScoringRule::Bias,
        ScoringRule::Ls,
    ];

    pub fn is_proper(self) -> bool {
        !matches!(self, ScoringRule::Bias)
    }

    pub fn eval(self, q: f64) -> Result<ExtendedReal> {
        check_probability(q)?;
        Ok(self.eval_unchecked(q))
    }

    pub(crate) fn eval_unchecked(self, q: f64) -> ExtendedReal {
        let miss = 1.0 - q;
        match self {
            ScoringRule::Hs if q == 0.0 => ExtendedReal::NegInf,
            ScoringRule::Hs => ExtendedReal::Finite(1.0 - (miss / q).sqrt()),
            ScoringRule::Brier => ExtendedReal::Finite(1.0 - 4.0 * miss * miss),
            ScoringRule::Bias => ExtendedReal::Finite(1.0 - 2.0 * miss),
            ScoringRule::Ls if q == 0.0 => ExtendedReal::NegInf,
            ScoringRule::Ls => ExtendedReal::Finite(1.0 + q.log2()),
        }
    }

    /// `s_b(q)`: the score of forecast `q` when the outcome is `outcome`.
    pub fn eval_outcome(self, q: f64, outcome: bool) -> Result<ExtendedReal> {
        check_probability(q)?;
        Ok(self.eval_outcome_unchecked(q, outcome))
    }

    pub(crate) fn eval_outcome_unchecked(self, q: f64, outcome: bool) -> ExtendedReal {
        if outcome {
            self.eval_unchecked(q)
        } else {
            self.eval_unchecked(1.0 - q)
        }
    }

    /// `p·s(q) + (1−p)·s(1−q)`, the expected score of forecast `q` when the
    /// outcome is `Bernoulli(p)`.
    pub fn expected(self, p: f64, q: f64) -> ExtendedReal {
        ExtendedReal::expectation([
            (p, self.eval_unchecked(q)),
            (1.0 - p, self.eval_unchecked(1.0 - q)),
        ])
    }
}

impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoringRule::Hs => "hs",
            ScoringRule::Brier => "brier",
            ScoringRule::Bias => "bias",
            ScoringRule::Ls => "ls",
        })
    }
}

impl FromStr for ScoringRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hs" => Ok(ScoringRule::Hs),
            "brier" => Ok(ScoringRule::Brier),
            "bias" => Ok(ScoringRule::Bias),
            "ls" | "log" => Ok(ScoringRule::Ls),
            _ => Err(Error::InvalidArgument(format!("unknown scoring rule {s:?}"))),
        }
    }
}

fn check_probability(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(q))
    }
}

pub fn eval_rule(rule: ScoringRule, q: f64) -> Result<ExtendedReal> {
    rule.eval(q)
}

pub fn eval_outcome(rule: ScoringRule, q: f64, outcome: bool) -> Result<ExtendedReal> {
    rule.eval_outcome(q, outcome)
}

/// Grid-search view of the expected score `q ↦ p·s(q) + (1−p)·s(1−q)`.
#[derive(Clone, Debug, Serialize)]
pub struct PropernessReport {
    pub rule: ScoringRule,
    pub p: f64,
    pub grid_steps: usize,
    /// Smallest grid point attaining the maximum.
    pub argmax: f64,
    /// Grid points attaining the maximum (within 1e-12).
    pub maximizers: usize,
    pub maximizer_set: MaximizerSet,
    pub passes: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximizerSet {
    /// A unique maximizer strictly inside or at an end of the grid.
    Unique,
    OnlyZero,
    OnlyOne,
    Everything,
    Other,
}

pub fn properness_report(rule: ScoringRule, p: f64, grid_steps: usize) -> Result<PropernessReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1)")));
    }
    if grid_steps < 100 {
        return Err(Error::InvalidArgument(format!(
            "grid_steps = {grid_steps} below 100"
        )));
    }
    let values: Vec<f64> = (0..=grid_steps)
        .map(|i| rule.expected(p, i as f64 / grid_steps as f64).to_f64())
        .collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hits: Vec<usize> = (0..=grid_steps)
        .filter(|&i| values[i] >= best - 1e-12)
        .collect();
    let argmax = hits[0] as f64 / grid_steps as f64;
    let maximizer_set = if hits.len() == grid_steps + 1 {
        MaximizerSet::Everything
    } else if hits == [0] {
        MaximizerSet::OnlyZero
    } else if hits == [grid_steps] {
        MaximizerSet::OnlyOne
    } else if hits.last().unwrap() - hits[0] <= 2 {
        MaximizerSet::Unique
    } else {
        MaximizerSet::Other
    };
    let step = 1.0 / grid_steps as f64;
    let passes = if rule.is_proper() {
        hits.iter()
            .all(|&i| (i as f64 / grid_steps as f64 - p).abs() <= step + 1e-15)
    } else {
        matches!(
            maximizer_set,
            MaximizerSet::OnlyZero | MaximizerSet::OnlyOne | MaximizerSet::Everything
        )
    };
    Ok(PropernessReport {
        rule,
        p,
        grid_steps,
        argmax,
        maximizers: hits.len(),
        maximizer_set,
        passes,
    })
}

/// For proper rules: is the grid maximizer within one step of `p`?
/// For `bias`: is the maximizer set `{0}`, `{1}` or all of `[0, 1]`?
pub fn check_proper(rule: ScoringRule, p: f64, grid_steps: usize) -> Result<bool> {
    Ok(properness_report(rule, p, grid_steps)?.passes)
}
