//! Distance measures between two distributions `ν₀`, `ν₁` on a finite
//! support, weighted by a prior `w` on the second one, and the
//! correspondence between best achievable expected score and distance.
//!
//! With `ν = (1−w)ν₀ + wν₁` and `R(x) = |(1−w)ν₀[x] − wν₁[x]| / ν[x]`:
//!
//! | measure | value                     | optimal rule |
//! |---------|---------------------------|--------------|
//! | `tv`    | `E_ν[R]`                  | `bias`       |
//! | `h2`    | `E_ν[1 − √(1 − R²)]`      | `hs`         |
//! | `chi2s` | `E_ν[R²]`                 | `brier`      |
//! | `js`    | `E_ν[1 − H((1 + R)/2)]`   | `ls`         |
//!
//! Points with `ν[x] = 0` contribute nothing.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundation::ExtendedReal;
use crate::scoring::ScoringRule;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Tv,
    H2,
    Chi2s,
    Js,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Tv, Measure::H2, Measure::Chi2s, Measure::Js];

    /// The scoring rule whose best expected score equals this measure.
    pub fn matching_rule(self) -> ScoringRule {
        match self {
            Measure::Tv => ScoringRule::Bias,
            Measure::H2 => ScoringRule::Hs,
            Measure::Chi2s => ScoringRule::Brier,
            Measure::Js => ScoringRule::Ls,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Tv => "tv",
            Measure::H2 => "h2",
            Measure::Chi2s => "chi2s",
            Measure::Js => "js",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tv" => Ok(Measure::Tv),
            "h2" | "hellinger" => Ok(Measure::H2),
            "chi2s" | "ess2" => Ok(Measure::Chi2s),
            "js" => Ok(Measure::Js),
            _ => Err(Error::InvalidArgument(format!("unknown measure {s:?}"))),
        }
    }
}

/// Two distributions on a shared labelled support plus a weight `w ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinitePair {
    support: Vec<String>,
    nu0: Vec<f64>,
    nu1: Vec<f64>,
    w: f64,
}

impl FinitePair {
    pub fn new(support: Vec<String>, nu0: Vec<f64>, nu1: Vec<f64>, w: f64) -> Result<Self> {
        let pair = FinitePair { support, nu0, nu1, w };
        pair.validate()?;
        Ok(pair)
    }

    /// Support labelled `0..len`.
    pub fn unlabeled(nu0: Vec<f64>, nu1: Vec<f64>, w: f64) -> Result<Self> {
        let support = (0..nu0.len()).map(|i| i.to_string()).collect();
        Self::new(support, nu0, nu1, w)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let pair: FinitePair = serde_json::from_str(text)?;
        pair.validate()?;
        Ok(pair)
    }

    fn validate(&self) -> Result<()> {
        let m = self.support.len();
        if self.nu0.len() != m || self.nu1.len() != m {
            return Err(Error::InvalidDistribution(format!(
                "support has {m} points but vectors have {} and {}",
                self.nu0.len(),
                self.nu1.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Err(Error::InvalidDistribution(format!("weight w = {} outside [0,1]", self.w)));
        }
        let labels: BTreeSet<&String> = self.support.iter().collect();
        if labels.len() != m {
            return Err(Error::InvalidDistribution("duplicate support labels".into()));
        }
        for (name, v) in [("nu0", &self.nu0), ("nu1", &self.nu1)] {
            if v.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidDistribution(format!("{name} has a negative entry")));
            }
            let total: f64 = v.iter().sum();
            if (total - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("{name} sums to {total}")));
            }
        }
        Ok(())
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn nu0(&self) -> &[f64] {
        &self.nu0
    }

    pub fn nu1(&self) -> &[f64] {
        &self.nu1
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn with_weight(&self, w: f64) -> Result<Self> {
        Self::new(self.support.clone(), self.nu0.clone(), self.nu1.clone(), w)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `((1−w)ν₀[x], wν₁[x])`, the joint masses of outcome 0 and 1 at `x`.
    fn joint(&self, x: usize) -> (f64, f64) {
        ((1.0 - self.w) * self.nu0[x], self.w * self.nu1[x])
    }
}

fn binary_entropy(a: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(a) + term(1.0 - a)
}

/// The weighted distance between `ν₀` and `ν₁` under `measure`.
pub fn distance(pair: &FinitePair, measure: Measure) -> f64 {
    (0..pair.len())
        .map(|x| {
            let (a, b) = pair.joint(x);
            let nu = a + b;
            if nu <= 0.0 {
                return 0.0;
            }
            let r = ((a - b).abs() / nu).min(1.0);
            nu * match measure {
                Measure::Tv => r,
                Measure::H2 => 1.0 - (1.0 - r * r).sqrt(),
                Measure::Chi2s => r * r,
                Measure::Js => 1.0 - binary_entropy((1.0 + r) / 2.0),
            }
        })
        .sum()
}

/// The unweighted measures, written directly in terms of `ν₀` and `ν₁`.
/// Equal to [`distance`] at `w = 1/2`.
pub fn distance_unweighted(nu0: &[f64], nu1: &[f64], measure: Measure) -> f64 {
    let half_sum: f64 = nu0
        .iter()
        .zip(nu1)
        .map(|(&p, &q)| match measure {
            Measure::Tv => (p - q).abs(),
            Measure::H2 => (p.sqrt() - q.sqrt()).powi(2),
            Measure::Chi2s if p + q > 0.0 => (p - q).powi(2) / (p + q),
            Measure::Chi2s => 0.0,
            Measure::Js => {
                let m = p + q;
                let term = |v: f64| if v > 0.0 { v * (2.0 * v / m).log2() } else { 0.0 };
                term(p) + term(q)
            }
        })
        .sum();
    half_sum / 2.0
}

/// Score-maximizing forecast at each support point; `None` where `ν[x] = 0`.
pub fn optimal_forecast(pair: &FinitePair, rule: ScoringRule) -> Vec<Option<f64>> {
    (0..pair.len())
        .map(|x| {
            let (a, b) = pair.joint(x);
            let nu = a + b;
            if nu <= 0.0 {
                return None;
            }
            Some(if rule.is_proper() {
                b / nu
            } else if b > a {
                1.0
            } else if b < a {
                0.0
            } else {
                0.5
            })
        })
        .collect()
}

/// Expected score of `forecast` when `b ← Bernoulli(w)` and `x ← ν_b`.
pub fn expected_score(pair: &FinitePair, rule: ScoringRule, forecast: &[Option<f64>]) -> ExtendedReal {
    ExtendedReal::expectation((0..pair.len()).flat_map(|x| {
        let (a, b) = pair.joint(x);
        let q = forecast[x].unwrap_or(0.5);
        [
            (a, rule.eval_outcome_unchecked(q, false)),
            (b, rule.eval_outcome_unchecked(q, true)),
        ]
    }))
}

/// Best achievable expected score for predicting the hidden bit.
pub fn max_score(pair: &FinitePair, rule: ScoringRule) -> f64 {
    expected_score(pair, rule, &optimal_forecast(pair, rule)).to_f64()
}

/// Squared Hellinger distance of a disjoint mixture of pairs, computed on
/// the assembled mixture support. Equals `Σ weightᵢ·h²(pairᵢ)`.
pub fn h2_disjoint_mixture(mixtures: &[(f64, FinitePair)]) -> Result<f64> {
    let assembled = assemble_disjoint_mixture(mixtures)?;
    Ok(distance(&assembled, Measure::H2))
}

/// Concatenates the supports, scaling each pair's vectors by its weight.
pub fn assemble_disjoint_mixture(mixtures: &[(f64, FinitePair)]) -> Result<FinitePair> {
    let mut seen = BTreeSet::new();
    let mut support = Vec::new();
    let (mut nu0, mut nu1) = (Vec::new(), Vec::new());
    let total: f64 = mixtures.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > SUM_TOLERANCE || mixtures.iter().any(|(p, _)| *p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "mixture weights sum to {total}"
        )));
    }
    for (p, pair) in mixtures {
        if pair.w != 0.5 {
            return Err(Error::InvalidArgument(format!(
                "mixture components must have w = 1/2, got {}",
                pair.w
            )));
        }
        for (i, label) in pair.support.iter().enumerate() {
            if !seen.insert(label.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "supports overlap at point {label:?}"
                )));
            }
            support.push(label.clone());
            nu0.push(p * pair.nu0[i]);
            nu1.push(p * pair.nu1[i]);
        }
    }
    FinitePair::new(support, nu0, nu1, 0.5)
}

/// One inequality `lhs ≤ rhs` between distance measures of a fixed pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl RelationCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// The eight standard inequalities tying `tv`, `h2`, `chi2s` and `js`
/// together, evaluated on `pair`.
pub fn distance_relations(pair: &FinitePair) -> Vec<RelationCheck> {
    let tv = distance(pair, Measure::Tv);
    let h2 = distance(pair, Measure::H2);
    let chi = distance(pair, Measure::Chi2s);
    let js = distance(pair, Measure::Js);
    let root = 1.0 - (1.0 - chi).max(0.0).sqrt();
    let ln2 = std::f64::consts::LN_2;
    let check = |name, lhs, rhs| RelationCheck { name, lhs, rhs };
    vec![
        check("chi2s/2 <= 1-sqrt(1-chi2s)", chi / 2.0, root),
        check("1-sqrt(1-chi2s) <= h2", root, h2),
        check("h2 <= js", h2, js),
        check("js <= chi2s", js, chi),
        check("tv^2 <= chi2s", tv * tv, chi),
        check("chi2s <= tv", chi, tv),
        check("js <= h2/ln2", js, h2 / ln2),
        check("chi2s <= ln4*js", chi, 2.0 * ln2 * js),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(nu0: &[f64], nu1: &[f64], w: f64) -> FinitePair {
        FinitePair::unlabeled(nu0.to_vec(), nu1.to_vec(), w).unwrap()
    }

    #[test]
    fn identical_distributions_are_at_distance_zero() {
        let p = pair(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], 0.5);
        for m in Measure::ALL {
            assert!(distance(&p, m).abs() < 1e-15, "{m}");
        }
        // Away from w = 1/2 only the prior is informative.
        let p = pair(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], 0.1);
        assert!((distance(&p, Measure::Tv) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn disjoint_supports_are_at_distance_one() {
        let p = pair(&[1.0, 0.0], &[0.0, 1.0], 0.5);
        for m in Measure::ALL {
            assert!((distance(&p, m) - 1.0).abs() < 1e-15, "{m}");
        }
    }

    #[test]
    fn hellinger_example() {
        let p = pair(&[1.0, 0.0], &[0.5, 0.5], 0.5);
        let expected = 1.0 - 2f64.sqrt() / 2.0;
        assert!((distance(&p, Measure::H2) - expected).abs() < 1e-15);
        assert!((distance_unweighted(&[1.0, 0.0], &[0.5, 0.5], Measure::H2) - expected).abs() < 1e-15);
    }

    #[test]
    fn weighted_forms_reduce_to_unweighted_at_half() {
        let nu0 = [0.1, 0.4, 0.0, 0.5];
        let nu1 = [0.3, 0.1, 0.2, 0.4];
        let p = pair(&nu0, &nu1, 0.5);
        for m in Measure::ALL {
            assert!((distance(&p, m) - distance_unweighted(&nu0, &nu1, m)).abs() < 1e-14, "{m}");
        }
    }

    #[test]
    fn forecast_examples() {
        let same = pair(&[0.5, 0.5], &[0.5, 0.5], 0.5);
        assert_eq!(optimal_forecast(&same, ScoringRule::Hs), vec![Some(0.5), Some(0.5)]);
        let disjoint = pair(&[1.0, 0.0], &[0.0, 1.0], 0.5);
        assert_eq!(optimal_forecast(&disjoint, ScoringRule::Hs), vec![Some(0.0), Some(1.0)]);
        let single = pair(&[1.0], &[1.0], 1.0 / 3.0);
        let q = optimal_forecast(&single, ScoringRule::Hs)[0].unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(optimal_forecast(&same, ScoringRule::Bias), vec![Some(0.5), Some(0.5)]);
        assert_eq!(optimal_forecast(&disjoint, ScoringRule::Bias), vec![Some(0.0), Some(1.0)]);
    }

    #[test]
    fn zero_mass_points_get_no_forecast() {
        let p = pair(&[1.0, 0.0], &[1.0, 0.0], 0.5);
        assert_eq!(optimal_forecast(&p, ScoringRule::Hs)[1], None);
    }

    #[test]
    fn max_score_examples() {
        let disjoint = pair(&[1.0, 0.0], &[0.0, 1.0], 0.5);
        assert!((max_score(&disjoint, ScoringRule::Hs) - 1.0).abs() < 1e-15);
        let same = pair(&[0.25, 0.75], &[0.25, 0.75], 0.5);
        assert!(max_score(&same, ScoringRule::Brier).abs() < 1e-15);
    }

    #[test]
    fn mixture_examples() {
        let a = FinitePair::new(vec!["a0".into(), "a1".into()], vec![1.0, 0.0], vec![0.5, 0.5], 0.5).unwrap();
        let b = FinitePair::new(vec!["b0".into(), "b1".into()], vec![0.9, 0.1], vec![0.2, 0.8], 0.5).unwrap();
        let ha = distance(&a, Measure::H2);
        let hb = distance(&b, Measure::H2);
        assert!((h2_disjoint_mixture(&[(1.0, a.clone())]).unwrap() - ha).abs() < 1e-15);
        let mixed = h2_disjoint_mixture(&[(0.5, a.clone()), (0.5, b)]).unwrap();
        assert!((mixed - (ha + hb) / 2.0).abs() < 1e-12);
        assert!(h2_disjoint_mixture(&[(0.5, a.clone()), (0.5, a)]).is_err());
    }

    #[test]
    fn relations_hold_on_examples() {
        for p in [
            pair(&[1.0, 0.0], &[0.5, 0.5], 0.5),
            pair(&[0.1, 0.9], &[0.7, 0.3], 0.2),
            pair(&[1.0, 0.0], &[0.0, 1.0], 0.5),
        ] {
            for c in distance_relations(&p) {
                assert!(c.holds(1e-12), "{} fails: {} > {}", c.name, c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn pair_validation() {
        assert!(FinitePair::unlabeled(vec![0.5, 0.4], vec![0.5, 0.5], 0.5).is_err());
        assert!(FinitePair::unlabeled(vec![1.0], vec![1.0], 1.5).is_err());
        assert!(FinitePair::unlabeled(vec![1.0], vec![0.5, 0.5], 0.5).is_err());
        let js = r#"{"support":["x","y"],"nu0":[1.0,0.0],"nu1":[0.5,0.5],"w":0.5}"#;
        assert_eq!(FinitePair::parse(js).unwrap().len(), 2);
    }
}
