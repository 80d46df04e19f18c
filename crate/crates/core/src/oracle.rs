//! Brute-force query complexity by enumeration: deterministic depth,
//! worst-case randomized complexity `R_ε(f)` via feasibility LPs, and
//! distributional expected-cost complexity via the (bias, cost) envelope.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foundation::{InputDistribution, PartialFunction};
use crate::lp::{pareto_lower_envelope, solve, Envelope, LinearProgram, Relation, Sense, Solution};
use crate::rational::{int, rat, Rational, RationalJson};
use crate::trees::{shape_profiles, ForecastTree, RandomizedForecastTree, ShapeProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexityKind {
    Deterministic,
    RandomizedWorst,
    Distributional,
}

impl ComplexityKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexityKind::Deterministic => "deterministic",
            ComplexityKind::RandomizedWorst => "randomized_worst",
            ComplexityKind::Distributional => "distributional",
        }
    }
}

/// A complexity value with a witness algorithm achieving it.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityReport {
    pub kind: ComplexityKind,
    /// `None` stands for `+∞` (the bias level is unreachable).
    pub value: Option<Rational>,
    pub witness: Option<RandomizedForecastTree>,
    pub eps: Option<Rational>,
    pub gamma: Option<Rational>,
}

impl ComplexityReport {
    pub fn to_json_value(&self) -> Value {
        let rational = |r: &Option<Rational>| match r {
            Some(r) => json!(RationalJson::from(r)),
            None => json!("inf"),
        };
        json!({
            "kind": self.kind.name(),
            "value": rational(&self.value),
            "value_f64": self.value.as_ref().map(crate::rational::to_f64),
            "eps": self.eps.as_ref().map(RationalJson::from),
            "gamma": self.gamma.as_ref().map(RationalJson::from),
            "witness": self.witness.as_ref().map(RandomizedForecastTree::to_json_value),
        })
    }
}

/// Minimum depth of a tree computing `f` exactly on its domain.
pub fn det_complexity(f: &PartialFunction) -> Result<usize> {
    let profiles = shape_profiles(f, f.n())?;
    profiles
        .iter()
        .find(|p| separates(p, f))
        .map(|p| p.shape.depth())
        .ok_or_else(|| Error::Construction("no shape computes f; the full tree always does".into()))
}

fn separates(p: &ShapeProfile, f: &PartialFunction) -> bool {
    let mut seen: Vec<Option<bool>> = vec![None; p.num_leaves];
    (0..f.len()).all(|i| match seen[p.leaf[i]] {
        Some(v) => v == f.value(i),
        None => {
            seen[p.leaf[i]] = Some(f.value(i));
            true
        }
    })
}

/// Distinct error patterns of Boolean trees of depth at most `t`, each with
/// the first tree (in enumeration order) that has it. Bit `i` of a pattern
/// is set when the tree errs on domain input `i`.
fn error_patterns(f: &PartialFunction, t: usize) -> Result<Vec<(u64, ForecastTree)>> {
    if f.len() > 64 {
        return Err(Error::EnumerationLimit(format!("domain of size {} exceeds 64", f.len())));
    }
    let mut patterns: BTreeMap<u64, (usize, u64)> = BTreeMap::new();
    let profiles = shape_profiles(f, t)?;
    for (s, p) in profiles.iter().enumerate() {
        for mask in 0..1u64 << p.num_leaves {
            let errs = (0..f.len()).fold(0u64, |acc, i| {
                let label = (mask >> p.leaf[i]) & 1 == 1;
                if label != f.value(i) { acc | 1 << i } else { acc }
            });
            patterns.entry(errs).or_insert((s, mask));
        }
    }
    let mut out: Vec<(u64, (usize, u64))> = patterns.into_iter().collect();
    out.sort_by_key(|(_, first)| *first);
    Ok(out.into_iter().map(|(e, (s, mask))| (e, profiles[s].boolean_tree(mask))).collect())
}

/// A mixture of depth-`≤ t` Boolean trees erring with probability at most
/// `eps` on every input, if one exists.
pub fn worst_case_mixture(f: &PartialFunction, eps: &Rational, t: usize) -> Result<Option<RandomizedForecastTree>> {
    let patterns = error_patterns(f, t)?;
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); patterns.len()]);
    lp.add(vec![Rational::one(); patterns.len()], Relation::Eq, Rational::one());
    for i in 0..f.len() {
        let row = patterns.iter().map(|(e, _)| int(((e >> i) & 1) as i64)).collect();
        lp.add(row, Relation::Le, eps.clone());
    }
    match solve(&lp)? {
        Solution::Optimal { primal, .. } => {
            let support = primal
                .into_iter()
                .zip(patterns)
                .filter(|(p, _)| p.is_positive())
                .map(|(p, (_, tree))| (p, tree))
                .collect();
            Ok(Some(RandomizedForecastTree::new(support)?))
        }
        Solution::Infeasible { .. } => Ok(None),
        Solution::Unbounded { .. } => Err(Error::Construction("feasibility LP reported unbounded".into())),
    }
}

/// `R_ε(f)`: the least depth `T` admitting a mixture of depth-`≤ T` Boolean
/// trees with error at most `ε` on every input.
pub fn randomized_worst(f: &PartialFunction, eps: &Rational) -> Result<ComplexityReport> {
    if eps.is_negative() || *eps >= rat(1, 2) {
        return Err(Error::InvalidArgument(format!("eps = {eps} outside [0, 1/2)")));
    }
    for t in 0..=f.n() {
        if let Some(witness) = worst_case_mixture(f, eps, t)? {
            return Ok(ComplexityReport {
                kind: ComplexityKind::RandomizedWorst,
                value: Some(int(t as i64)),
                witness: Some(witness),
                eps: Some(eps.clone()),
                gamma: None,
            });
        }
    }
    Err(Error::Construction("the exact full-depth tree should always be feasible".into()))
}

/// `R(f) = R_{1/3}(f)` as an integer.
pub fn randomized_complexity(f: &PartialFunction) -> Result<usize> {
    let report = randomized_worst(f, &rat(1, 3))?;
    Ok(report.value.expect("finite").to_integer().try_into().expect("small depth"))
}

/// Every Boolean tree's `(bias, cost)` under `mu`, with a way back to the tree.
pub struct BooleanCloud {
    pub points: Vec<(Rational, Rational)>,
    profiles: Vec<ShapeProfile>,
    index: Vec<(usize, u64)>,
}

impl BooleanCloud {
    pub fn new(mu: &InputDistribution) -> Result<Self> {
        let f = mu.function();
        let profiles = shape_profiles(f, f.n())?;
        let per_shape: Vec<Vec<((Rational, Rational), (usize, u64))>> = profiles
            .par_iter()
            .enumerate()
            .map(|(s, p)| {
                let masses = p.leaf_masses(mu);
                let cost = p.cost(mu);
                (0..1u64 << p.num_leaves)
                    .map(|mask| {
                        let bias: Rational = masses
                            .iter()
                            .enumerate()
                            .map(|(l, (a, b))| if (mask >> l) & 1 == 1 { b - a } else { a - b })
                            .sum();
                        ((bias, cost.clone()), (s, mask))
                    })
                    .collect()
            })
            .collect();
        let (points, index) = per_shape.into_iter().flatten().unzip();
        Ok(BooleanCloud { points, profiles, index })
    }

    pub fn tree(&self, i: usize) -> ForecastTree {
        let (s, mask) = self.index[i];
        self.profiles[s].boolean_tree(mask)
    }

    pub fn envelope(&self) -> Result<Envelope> {
        pareto_lower_envelope(&self.points)
    }

    /// `R̄^μ_γ̇` and its witness, given this cloud's envelope.
    pub fn distributional(&self, envelope: &Envelope, gamma: &Rational) -> Result<ComplexityReport> {
        if !gamma.is_positive() || *gamma > Rational::one() {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} outside (0, 1]")));
        }
        let (value, witness) = match envelope.mixture(&self.points, gamma) {
            Some(m) => {
                let support = m.parts.iter().map(|(i, w)| (w.clone(), self.tree(*i))).collect();
                (Some(m.cost), Some(RandomizedForecastTree::new(support)?))
            }
            None => (None, None),
        };
        Ok(ComplexityReport {
            kind: ComplexityKind::Distributional,
            value,
            witness,
            eps: None,
            gamma: Some(gamma.clone()),
        })
    }
}

/// `R̄^μ_γ̇(f)`: least expected cost under `mu` of a mixture of Boolean trees
/// whose expected bias under `mu` is at least `gamma`.
pub fn distributional(mu: &InputDistribution, gamma: &Rational) -> Result<ComplexityReport> {
    let cloud = BooleanCloud::new(mu)?;
    let envelope = cloud.envelope()?;
    cloud.distributional(&envelope, gamma)
}

/// Least depth of a deterministic Boolean tree whose `mu`-error is at most
/// `eps`.
pub fn distributional_depth(mu: &InputDistribution, eps: &Rational) -> Result<usize> {
    let f = mu.function();
    let profiles = shape_profiles(f, f.n())?;
    for p in &profiles {
        let masses = p.leaf_masses(mu);
        // The best labelling takes the majority class at each leaf.
        let error: Rational = masses.iter().map(|(a, b)| if a < b { a.clone() } else { b.clone() }).sum();
        if error <= *eps {
            return Ok(p.shape.depth());
        }
    }
    Err(Error::Construction("the full tree has zero error".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AvgWorstRow {
    pub gamma: Rational,
    pub value: Option<Rational>,
    pub bound: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AvgWorstReport {
    pub r_f: usize,
    pub rows: Vec<AvgWorstRow>,
}

impl AvgWorstReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "gamma": RationalJson::from(&r.gamma),
                    "gamma_f64": crate::rational::to_f64(&r.gamma),
                    "distributional": r.value.as_ref().map_or(json!("inf"), |v| json!(RationalJson::from(v))),
                    "distributional_f64": r.value.as_ref().map(crate::rational::to_f64),
                    "bound": RationalJson::from(&r.bound),
                    "bound_f64": crate::rational::to_f64(&r.bound),
                    "status": if r.pass { "pass" } else { "fail" },
                })
            })
            .collect();
        json!({ "r_f": self.r_f, "rows": rows, "status": if self.passes() { "pass" } else { "fail" } })
    }
}

/// Checks `R̄^μ_γ̇(f) ≥ γ²·R(f)/500` at each `γ`.
pub fn verify_avg_worst(mu: &InputDistribution, gammas: &[Rational]) -> Result<AvgWorstReport> {
    let r_f = randomized_complexity(mu.function())?;
    let cloud = BooleanCloud::new(mu)?;
    let envelope = cloud.envelope()?;
    let rows = gammas
        .iter()
        .map(|g| {
            let report = cloud.distributional(&envelope, g)?;
            let bound = g * g * int(r_f as i64) / int(500);
            let pass = report.value.as_ref().is_none_or(|v| *v >= bound);
            Ok(AvgWorstRow { gamma: g.clone(), value: report.value, bound, pass })
        })
        .collect::<Result<_>>()?;
    Ok(AvgWorstReport { r_f, rows })
}

/// `γ ∈ {1/10, 2/10, …, 1}`.
pub fn default_gammas() -> Vec<Rational> {
    (1..=10).map(|i| rat(i, 10)).collect()
}
