//! Linear amplification of the hs score, conversions between bias and
//! score, and the odometer amplifier that turns a good cost/score ratio
//! into a bounded-error algorithm.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundation::{render_input, ExtendedReal, PartialFunction};
use crate::rational::{int, to_f64, Rational};
use crate::scoring::ScoringRule;
use crate::trees::RandomizedForecastTree;

/// Queries allowed to a single run before it is cut off, in units of `Y`.
pub const RUN_CUTOFF_FACTOR: f64 = 2.0;
/// Query total that ends the cost-estimation phase, in units of `Y`.
pub const ESTIMATION_BUDGET_FACTOR: f64 = 10.0;
/// Hard cap on the total number of queries, in units of `Y`.
pub const FINAL_CUTOFF_FACTOR: f64 = 240.0;
/// Score guaranteed before the final cutoff.
pub const SCORE_BEFORE_CUTOFF: f64 = 7.0 / 16.0;
/// Worst-case error guaranteed by the construction.
pub const ERROR_BOUND: f64 = 1.0 / 3.0;
/// Fewest Monte-Carlo trials accepted by [`odometer_amplifier`].
pub const MIN_TRIALS: usize = 10_000;

/// `φ^(k)`: the posterior after `k` independent forecasts, treating each as
/// a likelihood ratio. A `0`/`1` clash gives `1/2`.
pub fn combine(predictions: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::InvalidArgument("combine needs at least one prediction".into()));
    }
    if let Some(&q) = predictions.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::ProbabilityOutOfRange(q));
    }
    let zeros = predictions.iter().filter(|&&q| q == 0.0).count();
    let ones = predictions.iter().filter(|&&q| q == 1.0).count();
    let log_odds: f64 = predictions
        .iter()
        .filter(|&&q| q > 0.0 && q < 1.0)
        .map(|&q| ((1.0 - q) / q).ln())
        .sum();
    Ok(Combined { zeros, ones, log_odds }.prediction())
}

/// Sufficient statistics of a multiset of forecasts for `φ^(k)`.
#[derive(Clone, Copy, Debug)]
struct Combined {
    zeros: usize,
    ones: usize,
    /// `Σ ln((1−q)/q)` over forecasts strictly inside `(0, 1)`.
    log_odds: f64,
}

impl Combined {
    fn prediction(&self) -> f64 {
        match (self.zeros > 0, self.ones > 0) {
            (true, true) => 0.5,
            (true, false) => 0.0,
            (false, true) => 1.0,
            (false, false) => 1.0 / (1.0 + self.log_odds.exp()),
        }
    }

    /// hs score against `value`, computed from the log odds directly.
    fn hs_score(&self, value: bool) -> ExtendedReal {
        match (self.zeros > 0, self.ones > 0) {
            (true, true) => ExtendedReal::Finite(0.0),
            (true, false) => if value { ExtendedReal::NegInf } else { ExtendedReal::Finite(1.0) },
            (false, true) => if value { ExtendedReal::Finite(1.0) } else { ExtendedReal::NegInf },
            (false, false) => {
                let half = if value { self.log_odds / 2.0 } else { -self.log_odds / 2.0 };
                ExtendedReal::Finite(1.0 - half.exp())
            }
        }
    }
}

/// `R` run `k` times independently on the same input, predictions merged
/// with [`combine`]. Evaluated by exact expectation over the product of the
/// per-run prediction distributions.
#[derive(Clone, Debug)]
pub struct AmplifiedTree {
    base: RandomizedForecastTree,
    k: usize,
}

pub fn amplified_tree(r: &RandomizedForecastTree, k: usize) -> Result<AmplifiedTree> {
    if k < 1 {
        return Err(Error::InvalidArgument("repetition count must be at least 1".into()));
    }
    Ok(AmplifiedTree { base: r.clone(), k })
}

impl AmplifiedTree {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &RandomizedForecastTree {
        &self.base
    }

    pub fn cost_on(&self, x: &[u8]) -> Result<Rational> {
        Ok(self.base.cost_on(x)? * int(self.k as i64))
    }

    /// Distribution of the combined statistics over the `k` runs.
    fn outcomes(&self, x: &[u8]) -> Result<Vec<(f64, Combined)>> {
        let mut distinct: Vec<(Rational, f64)> = Vec::new();
        for (p, run) in self.base.outcomes(x)? {
            if p.is_zero() {
                continue;
            }
            match distinct.iter_mut().find(|(q, _)| *q == run.prediction) {
                Some(entry) => entry.1 += to_f64(&p),
                None => distinct.push((run.prediction, to_f64(&p))),
            }
        }
        let values: Vec<(f64, f64)> = distinct.iter().map(|(q, p)| (to_f64(q), *p)).collect();
        let mut out = Vec::new();
        let mut counts = vec![0usize; values.len()];
        compositions(self.k, 0, &mut counts, &mut |counts| {
            let mut prob = 1.0;
            let mut remaining = self.k;
            let mut stats = Combined { zeros: 0, ones: 0, log_odds: 0.0 };
            for (&c, &(q, p)) in counts.iter().zip(&values) {
                prob *= binomial(remaining, c) * p.powi(c as i32);
                remaining -= c;
                if c == 0 {
                    continue;
                }
                if q == 0.0 {
                    stats.zeros += c;
                } else if q == 1.0 {
                    stats.ones += c;
                } else {
                    stats.log_odds += c as f64 * ((1.0 - q) / q).ln();
                }
            }
            out.push((prob, stats));
        });
        Ok(out)
    }

    /// Distribution of the combined prediction on `x`.
    pub fn prediction_distribution(&self, x: &[u8]) -> Result<Vec<(f64, f64)>> {
        Ok(self.outcomes(x)?.into_iter().map(|(p, s)| (p, s.prediction())).collect())
    }

    pub fn hs_score_on(&self, x: &[u8], value: bool) -> Result<ExtendedReal> {
        Ok(ExtendedReal::expectation(
            self.outcomes(x)?.into_iter().map(|(p, s)| (p, s.hs_score(value))),
        ))
    }

    /// Bias with the combined prediction read as a Bernoulli output.
    pub fn bias_on(&self, x: &[u8], value: bool) -> Result<f64> {
        Ok(self
            .prediction_distribution(x)?
            .into_iter()
            .map(|(p, q)| p * if value { 2.0 * q - 1.0 } else { 1.0 - 2.0 * q })
            .sum())
    }

    pub fn worst_bias(&self, f: &PartialFunction) -> Result<f64> {
        self.base.validate(f)?;
        (0..f.len())
            .map(|i| self.bias_on(f.input(i), f.value(i)))
            .try_fold(f64::INFINITY, |acc, b| Ok(acc.min(b?)))
    }

    pub fn worst_hs_score(&self, f: &PartialFunction) -> Result<ExtendedReal> {
        self.base.validate(f)?;
        let mut worst = ExtendedReal::PosInf;
        for i in 0..f.len() {
            let s = self.hs_score_on(f.input(i), f.value(i))?;
            if s < worst {
                worst = s;
            }
        }
        Ok(worst)
    }
}

/// Calls `visit` with every vector of `counts.len()` nonnegative integers
/// summing to `total`, in lexicographic order.
fn compositions(total: usize, pos: usize, counts: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if counts.is_empty() {
        return;
    }
    if pos + 1 == counts.len() {
        counts[pos] = total;
        visit(counts);
        return;
    }
    for c in 0..=total {
        counts[pos] = c;
        compositions(total - c, pos + 1, counts, visit);
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Relabels a Boolean tree's leaves: `1 ↦ (1+γ)/2`, `0 ↦ (1−γ)/2`.
pub fn bias_to_forecast(r: &RandomizedForecastTree, gamma: &Rational) -> Result<RandomizedForecastTree> {
    if !gamma.is_positive() || *gamma > Rational::one() {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} outside (0, 1]")));
    }
    if !r.is_boolean() {
        return Err(Error::InvalidTree("bias_to_forecast needs {0,1} leaf labels".into()));
    }
    let up = (Rational::one() + gamma) / int(2);
    let down = (Rational::one() - gamma) / int(2);
    Ok(r.map_trees(|t| t.map_labels(&|q| if q.is_one() { up.clone() } else { down.clone() })))
}

/// Reads each leaf label `q` as "output 1 with probability `q`". Labels are
/// unchanged; the trees' `bias` methods already use this reading.
pub fn forecast_to_bias(r: &RandomizedForecastTree) -> RandomizedForecastTree {
    r.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmpBounds {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

/// `(½·min{kx, 1}, 1 − (1−x)^k, min{kx, 1})`.
pub fn amp_bounds(x: f64, k: f64) -> Result<AmpBounds> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("x = {x} outside [0, 1]")));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("k = {k} must be at least 1")));
    }
    let upper = (k * x).min(1.0);
    Ok(AmpBounds { lower: upper / 2.0, value: 1.0 - (1.0 - x).powf(k), upper })
}

/// `⌈2/γ²⌉`.
pub fn majority_repetitions(gamma: &Rational) -> Result<usize> {
    if !gamma.is_positive() {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    let k = (int(2) / (gamma * gamma)).ceil();
    k.to_integer().to_usize().ok_or_else(|| Error::InvalidArgument("gamma too small".into()))
}

/// Boosts worst-case bias `γ` to at least `1/2` via forecast relabelling,
/// `⌈2/γ²⌉`-fold amplification and Bernoulli outputs.
pub fn majority_amplify(r: &RandomizedForecastTree, gamma: &Rational) -> Result<AmplifiedTree> {
    let k = majority_repetitions(gamma)?;
    let forecast = bias_to_forecast(r, gamma)?;
    amplified_tree(&forecast_to_bias(&forecast), k)
}

/// `max_x cost(R, x) / score_hs(R, x)⁺`, the smallest valid `Y`.
pub fn ratio_bound(r: &RandomizedForecastTree, f: &PartialFunction) -> Result<ExtendedReal> {
    r.validate(f)?;
    let mut worst = ExtendedReal::Finite(0.0);
    for i in 0..f.len() {
        let c = to_f64(&r.cost_on(f.input(i))?);
        let s = r.score_on(f.input(i), f.value(i), ScoringRule::Hs)?;
        let ratio = ExtendedReal::ratio_over_positive_part(c, s);
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdometerInputReport {
    pub input: String,
    pub error_estimate: f64,
    pub mean_queries: f64,
    pub max_queries: u64,
    pub cutoff_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdometerReport {
    pub y: f64,
    pub trials: usize,
    pub seed: u64,
    pub run_cutoff: u64,
    pub estimation_budget: f64,
    pub final_cutoff: u64,
    pub inputs: Vec<OdometerInputReport>,
    pub worst_input_error_estimate: f64,
    pub worst_input_query_estimate: u64,
    /// `√((1/3)(2/3)/trials)`, the binomial standard deviation at the bound.
    pub sigma: f64,
    pub error_within_bound: bool,
    pub queries_within_cap: bool,
}

impl OdometerReport {
    pub fn passes(&self) -> bool {
        self.error_within_bound && self.queries_within_cap
    }
}

/// One run of the truncated algorithm: query count and prediction.
#[derive(Clone, Copy, Debug)]
struct RunOutcome {
    queries: u64,
    prediction: f64,
}

/// Categorical sampler over run outcomes.
struct RunSampler {
    cumulative: Vec<f64>,
    outcomes: Vec<RunOutcome>,
}

impl RunSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> RunOutcome {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.outcomes.len() - 1);
        self.outcomes[i]
    }
}

/// Monte-Carlo simulation of the odometer construction on every input of
/// `f`: runs of `R` are cut off after `2Y` queries (predicting `1/2`);
/// runs are repeated until `10Y` queries have been spent, `L` counting the
/// runs; `L` further runs are combined with [`combine`]; the whole thing is
/// cut off (predicting `1/2`) once it would exceed `240Y` queries; the final
/// prediction is output as a Bernoulli bit.
pub fn odometer_amplifier(
    r: &RandomizedForecastTree,
    f: &PartialFunction,
    y: f64,
    trials: usize,
    seed: u64,
) -> Result<OdometerReport> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!("Y = {y} must be positive and finite")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!("{trials} trials; at least {MIN_TRIALS} required")));
    }
    r.validate(f)?;
    if let ExtendedReal::PosInf = ratio_bound(r, f)? {
        return Err(Error::Precondition(
            "some input has nonpositive hs score, so no finite Y exists".into(),
        ));
    }
    let run_cutoff = (RUN_CUTOFF_FACTOR * y).floor() as u64;
    let budget = ESTIMATION_BUDGET_FACTOR * y;
    let final_cutoff = (FINAL_CUTOFF_FACTOR * y).floor() as u64;

    let mut inputs = Vec::new();
    for i in 0..f.len() {
        let x = f.input(i);
        let mut cumulative = Vec::new();
        let mut outcomes = Vec::new();
        let mut total = 0.0;
        for (p, run) in r.outcomes(x)? {
            if p.is_zero() {
                continue;
            }
            let outcome = if run.depth as u64 > run_cutoff {
                RunOutcome { queries: run_cutoff, prediction: 0.5 }
            } else {
                RunOutcome { queries: run.depth as u64, prediction: to_f64(&run.prediction) }
            };
            total += to_f64(&p);
            cumulative.push(total);
            outcomes.push(outcome);
        }
        if outcomes.iter().all(|o| o.queries == 0) {
            return Err(Error::Precondition(format!(
                "the truncated algorithm makes no queries on input {}",
                render_input(x)
            )));
        }
        let sampler = RunSampler { cumulative, outcomes };
        let value = f.value(i);
        let results: Vec<(bool, u64, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((t as u64) * (f.len() as u64) + i as u64);
                simulate(&sampler, budget, final_cutoff, value, &mut rng)
            })
            .collect();
        let errors = results.iter().filter(|(e, _, _)| *e).count();
        let cutoffs = results.iter().filter(|(_, _, c)| *c).count();
        let queries: u64 = results.iter().map(|(_, q, _)| q).sum();
        inputs.push(OdometerInputReport {
            input: render_input(x),
            error_estimate: errors as f64 / trials as f64,
            mean_queries: queries as f64 / trials as f64,
            max_queries: results.iter().map(|(_, q, _)| *q).max().unwrap_or(0),
            cutoff_rate: cutoffs as f64 / trials as f64,
        });
    }
    let worst_error = inputs.iter().map(|r| r.error_estimate).fold(0.0, f64::max);
    let worst_queries = inputs.iter().map(|r| r.max_queries).max().unwrap_or(0);
    let sigma = (ERROR_BOUND * (1.0 - ERROR_BOUND) / trials as f64).sqrt();
    Ok(OdometerReport {
        y,
        trials,
        seed,
        run_cutoff,
        estimation_budget: budget,
        final_cutoff,
        inputs,
        worst_input_error_estimate: worst_error,
        worst_input_query_estimate: worst_queries,
        sigma,
        error_within_bound: worst_error <= ERROR_BOUND + 3.0 * sigma,
        queries_within_cap: worst_queries <= final_cutoff,
    })
}

/// One trial: (output was wrong, queries made, final cutoff hit).
fn simulate(sampler: &RunSampler, budget: f64, cap: u64, value: bool, rng: &mut ChaCha8Rng) -> (bool, u64, bool) {
    let mut spent = 0u64;
    let mut runs = 0u64;
    while (spent as f64) < budget {
        spent += sampler.sample(rng).queries;
        runs += 1;
    }
    let mut stats = Combined { zeros: 0, ones: 0, log_odds: 0.0 };
    let mut cut = false;
    for _ in 0..runs {
        let run = sampler.sample(rng);
        if spent + run.queries > cap {
            spent = cap;
            cut = true;
            break;
        }
        spent += run.queries;
        let q = run.prediction;
        if q == 0.0 {
            stats.zeros += 1;
        } else if q == 1.0 {
            stats.ones += 1;
        } else {
            stats.log_odds += ((1.0 - q) / q).ln();
        }
    }
    let prediction = if cut { 0.5 } else { stats.prediction() };
    let output = rng.random::<f64>() < prediction;
    (output != value, spent, cut)
}

/// Worst-case hs score guaranteed by [`bias_to_forecast`]: `1 − √(1−γ²)`.
pub fn conversion_score_floor(gamma: f64) -> f64 {
    1.0 - (1.0 - gamma * gamma).sqrt()
}

/// `γ`-biased Boolean mixture used in examples: with probability `γ` the
/// exact tree, otherwise a constant guess split evenly between 0 and 1.
pub fn gamma_mixture(f: &PartialFunction, gamma: &Rational) -> Result<RandomizedForecastTree> {
    use crate::trees::ForecastTree;
    if gamma.is_negative() || *gamma > Rational::one() {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} outside [0, 1]")));
    }
    let rest = (Rational::one() - gamma) / int(2);
    let mut support = Vec::new();
    if gamma.is_positive() {
        support.push((gamma.clone(), ForecastTree::exact(f)));
    }
    if rest.is_positive() {
        support.push((rest.clone(), ForecastTree::constant(false)));
        support.push((rest, ForecastTree::constant(true)));
    }
    RandomizedForecastTree::new(support)
}
