//! The hard input distribution of the cost/score ratio game
//! `max_μ min_R cost(R, μ) / score_hs(R, μ)⁺`, computed by a double-oracle
//! loop, plus desk-scale checks of the lower bounds built on it.
//!
//! For a fixed `μ` the best forecast at each leaf is the posterior, and a
//! leaf with class masses `a, b` contributes `(√a − √b)²` to the hs score,
//! so best responses are found by scanning shapes. For a fixed finite set of
//! labelled trees the game is linear in `μ`, and bisection on the ratio
//! reduces it to a sequence of exact LPs.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distances::{distance, Measure};
use crate::error::{Error, Result};
use crate::foundation::{ExtendedReal, InputDistribution, PartialFunction};
use crate::lp::{solve, Bounds, LinearProgram, Relation, Sense, Solution};
use crate::oracle::randomized_complexity;
use crate::rational::{int, rat, rationalize, to_f64, Rational, RationalJson};
use crate::trees::{shape_profiles, transcript_pair, ForecastTree, RandomizedForecastTree, Shape, ShapeProfile};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Denominator bound when rounding the final distribution.
pub const MU_MAX_DENOMINATOR: u64 = 1_000_000;
/// Denominator bound for score coefficients entering the restricted LP.
const SCORE_MAX_DENOMINATOR: u64 = 1_000_000_000;
/// Denominator bound for intermediate distributions, which keeps best
/// responses cheap.
const WORKING_MAX_DENOMINATOR: u64 = 1_000_000_000_000;
/// Bisection points are multiples of `2^-LAMBDA_BITS`.
const LAMBDA_BITS: i32 = 32;
/// Likelihood ratios are clipped here so that `hs = −∞` becomes a large
/// finite penalty inside the restricted LP.
const MAX_ODDS: f64 = 1e16;
/// Agreement required between the transcript Hellinger distance and the
/// closed-form optimal score.
pub const H2_CONSISTENCY: f64 = 1e-9;

/// Best hs score of a shape under `mu` and the labels achieving it.
#[derive(Clone, Debug, PartialEq)]
pub struct OptScore {
    pub score: f64,
    pub labels: Vec<Rational>,
}

fn leaf_term(a: &Rational, b: &Rational) -> f64 {
    if a == b {
        0.0
    } else {
        (to_f64(a).sqrt() - to_f64(b).sqrt()).powi(2)
    }
}

fn posterior(a: &Rational, b: &Rational) -> Rational {
    let total = a + b;
    if total.is_zero() {
        rat(1, 2)
    } else {
        b / total
    }
}

fn opt_score_profile(p: &ShapeProfile, mu: &InputDistribution) -> OptScore {
    let masses = p.leaf_masses(mu);
    OptScore {
        score: masses.iter().map(|(a, b)| leaf_term(a, b)).sum(),
        labels: masses.iter().map(|(a, b)| posterior(a, b)).collect(),
    }
}

/// `max` over leaf labellings of `score_hs(shape, μ) = Σ_leaves (√a − √b)²`,
/// with posterior labels `b/(a+b)` (`1/2` at leaves `μ` never reaches).
pub fn opt_score(shape: &Shape, mu: &InputDistribution) -> OptScore {
    opt_score_profile(&ShapeProfile::new(shape.clone(), mu.function()), mu)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub shape_index: usize,
    pub tree: ForecastTree,
    pub cost: f64,
    pub score: f64,
    pub ratio: ExtendedReal,
}

fn ratio_of(cost: f64, score: f64) -> ExtendedReal {
    ExtendedReal::ratio_over_positive_part(cost, ExtendedReal::Finite(score))
}

fn best_response_profiles(profiles: &[ShapeProfile], mu: &InputDistribution) -> BestResponse {
    let candidates: Vec<(usize, f64, OptScore, ExtendedReal)> = profiles
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let cost = to_f64(&p.cost(mu));
            let opt = opt_score_profile(p, mu);
            let ratio = ratio_of(cost, opt.score);
            (i, cost, opt, ratio)
        })
        .collect();
    let mut best = &candidates[0];
    for c in &candidates[1..] {
        if c.3 < best.3 {
            best = c;
        }
    }
    let (i, cost, opt, ratio) = best.clone();
    BestResponse { shape_index: i, tree: profiles[i].shape.label(&opt.labels), cost, score: opt.score, ratio }
}

/// The shape minimizing `cost/opt_score⁺` under `mu`, posterior-labelled;
/// ties go to the earliest shape in enumeration order.
pub fn best_response(mu: &InputDistribution) -> Result<BestResponse> {
    let f = mu.function();
    let profiles = shape_profiles(f, f.n())?;
    Ok(best_response_profiles(&profiles, mu))
}

/// A labelled tree of the restricted game with its per-input cost and
/// clipped hs score.
#[derive(Clone, Debug)]
struct GameTree {
    tree: ForecastTree,
    depth: Vec<f64>,
    score: Vec<f64>,
    score_exact: Vec<Rational>,
}

impl GameTree {
    fn new(profile: &ShapeProfile, labels: &[Rational], f: &PartialFunction) -> Self {
        let mut depth = Vec::new();
        let mut score = Vec::new();
        for i in 0..f.len() {
            let q = &labels[profile.leaf[i]];
            let (hit, miss) = if f.value(i) { (q.clone(), Rational::one() - q) } else { (Rational::one() - q, q.clone()) };
            let odds = if hit.is_zero() { MAX_ODDS } else { to_f64(&(miss / hit)).min(MAX_ODDS) };
            depth.push(profile.depth[i] as f64);
            score.push(1.0 - odds.sqrt());
        }
        let score_exact = score.iter().map(|&s| rationalize(s, SCORE_MAX_DENOMINATOR)).collect();
        GameTree { tree: profile.shape.label(labels), depth, score, score_exact }
    }

    fn ratio(&self, mu: &[f64]) -> ExtendedReal {
        let cost: f64 = self.depth.iter().zip(mu).map(|(c, m)| c * m).sum();
        let score: f64 = self.score.iter().zip(mu).map(|(s, m)| s * m).sum();
        ratio_of(cost, score)
    }
}

/// Outcome of the restricted LP at one `λ`.
struct Restricted {
    /// `max_μ min_D Σ μ(x)(cost_D(x) − λ·score_D(x))` over balanced `μ`.
    value: Rational,
    mu: Vec<Rational>,
    mixture: Vec<Rational>,
}

/// Solves `min (u₀ + u₁)/2` subject to `Σ_D p_D (cost_D(x) − λ·score_D(x)) ≤ u_{f(x)}`,
/// `Σ p = 1`. The multipliers of the per-input rows are a balanced `μ`
/// attaining the maximin.
fn restricted_lp(game: &[GameTree], f: &PartialFunction, lambda: &Rational) -> Result<Restricted> {
    let d = game.len();
    let m = f.len();
    let mut objective = vec![Rational::zero(); d];
    objective.push(rat(1, 2));
    objective.push(rat(1, 2));
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    lp.set_bounds(d, Bounds::free());
    lp.set_bounds(d + 1, Bounds::free());
    for i in 0..m {
        let mut row: Vec<Rational> = game
            .iter()
            .map(|g| int(g.depth[i] as i64) - lambda * &g.score_exact[i])
            .collect();
        row.push(if f.value(i) { Rational::zero() } else { -Rational::one() });
        row.push(if f.value(i) { -Rational::one() } else { Rational::zero() });
        lp.add(row, Relation::Le, Rational::zero());
    }
    let mut simplex = vec![Rational::one(); d];
    simplex.extend([Rational::zero(), Rational::zero()]);
    lp.add(simplex, Relation::Eq, Rational::one());
    match solve(&lp)? {
        Solution::Optimal { value, primal, dual } => {
            let mu: Vec<Rational> = dual[..m].iter().map(|y| y.abs()).collect();
            Ok(Restricted { value, mu, mixture: primal[..d].to_vec() })
        }
        _ => Err(Error::Construction("restricted game LP is always feasible and bounded".into())),
    }
}

/// The solver's output: a balanced hard distribution and the trees that
/// certify its value.
#[derive(Clone, Debug, PartialEq)]
pub struct HardDistributionCertificate {
    pub mu: InputDistribution,
    /// `min_R cost(R, μ)/score(R, μ)⁺` at the returned `μ`.
    pub lambda_star: f64,
    /// Value of the final restricted game, an upper bound on the game value.
    pub lambda_upper: f64,
    pub support_trees: Vec<SupportTree>,
    pub tolerance: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportTree {
    pub probability: f64,
    pub tree: ForecastTree,
    pub cost: f64,
    pub score: f64,
    pub ratio: ExtendedReal,
}

impl HardDistributionCertificate {
    pub fn function(&self) -> &Arc<PartialFunction> {
        self.mu.function()
    }

    pub fn to_json_value(&self) -> Value {
        let f = self.mu.function();
        let weights: Vec<RationalJson> = self.mu.weights().iter().map(RationalJson::from).collect();
        let support: Vec<Value> = self
            .support_trees
            .iter()
            .map(|s| {
                json!({
                    "probability": s.probability,
                    "tree": s.tree.to_json_value(),
                    "cost": s.cost,
                    "score": s.score,
                    "ratio": s.ratio,
                })
            })
            .collect();
        json!({
            "function": serde_json::from_str::<Value>(&f.to_json()).expect("function json"),
            "mu": { "weights": weights, "weights_f64": self.mu.weights_f64() },
            "lambda_star": self.lambda_star,
            "lambda_upper": self.lambda_upper,
            "tolerance": self.tolerance,
            "iterations": self.iterations,
            "support_trees": support,
        })
    }

    /// Reads a certificate written by [`Self::to_json_value`]. Only the
    /// function, `μ`, `λ*` and the tolerance are needed by the verifiers;
    /// the remaining fields are optional.
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let missing = |k: &str| Error::InvalidArgument(format!("certificate lacks {k:?}"));
        let f = Arc::new(PartialFunction::parse(&v.get("function").ok_or_else(|| missing("function"))?.to_string())?);
        let mu_json = v.get("mu").ok_or_else(|| missing("mu"))?;
        let mu = InputDistribution::parse(f, &mu_json.to_string())?;
        let number = |k: &str| v.get(k).and_then(Value::as_f64).ok_or_else(|| missing(k));
        let lambda_star = number("lambda_star")?;
        let tolerance = number("tolerance")?;
        let lambda_upper = v.get("lambda_upper").and_then(Value::as_f64).unwrap_or(lambda_star);
        let iterations = v.get("iterations").and_then(Value::as_u64).unwrap_or(0) as usize;
        let mut support_trees = Vec::new();
        if let Some(items) = v.get("support_trees").and_then(Value::as_array) {
            for item in items {
                let tree = ForecastTree::parse(&item.get("tree").ok_or_else(|| missing("tree"))?.to_string())?;
                let get = |k: &str| item.get(k).and_then(Value::as_f64).unwrap_or(f64::NAN);
                let ratio = item
                    .get("ratio")
                    .map(|r| serde_json::from_value(r.clone()))
                    .transpose()?
                    .unwrap_or(ExtendedReal::PosInf);
                support_trees.push(SupportTree {
                    probability: get("probability"),
                    tree,
                    cost: get("cost"),
                    score: get("score"),
                    ratio,
                });
            }
        }
        Ok(HardDistributionCertificate { mu, lambda_star, lambda_upper, support_trees, tolerance, iterations })
    }
}

/// Rounds `mu` to denominators at most [`MU_MAX_DENOMINATOR`], rescaling
/// each class so that both carry exactly half the mass.
fn round_balanced(f: &Arc<PartialFunction>, mu: &[Rational], max_den: u64) -> Result<InputDistribution> {
    let mut weights: Vec<Rational> = mu.iter().map(|w| rationalize(to_f64(w), max_den)).collect();
    for class in [false, true] {
        let idx = f.class(class);
        let total: Rational = idx.iter().map(|&i| weights[i].clone()).sum();
        for &i in &idx {
            weights[i] = if total.is_zero() {
                rat(1, 2 * idx.len() as i64)
            } else {
                &weights[i] / &total / int(2)
            };
        }
    }
    InputDistribution::new(f.clone(), weights)
}

/// Solves the ratio game for a non-constant `f`.
///
/// The lower bound is the best response value at the best `μ` seen so
/// far. The upper bound is the value of the restricted game over the trees
/// collected so far, found by bisection on `λ`. New candidates are
/// Chebyshev centres of the restricted level set halfway between the two
/// bounds, and each candidate contributes its worst-ratio trees.
pub fn solve_hard(f: &Arc<PartialFunction>, tol: f64, max_iter: usize) -> Result<HardDistributionCertificate> {
    if f.is_constant() {
        return Err(Error::ConstantFunction);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let profiles = shape_profiles(f, f.n())?;
    let full = profiles
        .iter()
        .position(|p| p.depth.iter().all(|&d| d == f.n()))
        .ok_or_else(|| Error::Construction("no full-depth shape".into()))?;

    let uniform = round_balanced(f, &vec![Rational::one(); f.len()], 1)?;
    let mut game = vec![GameTree::new(&profiles[full], &exact_labels(&profiles[full], f), f)];
    let mut lo = add_cuts(&profiles, &uniform, f64::INFINITY, &mut game);
    let mut best = uniform;
    let (mut hi, mut mixture) = restricted_value(&game, f, lo, f.n() as f64, tol)?;
    for iteration in 1..=max_iter {
        if hi - lo <= tol {
            let mu = polish(f, &profiles, &mut game, hi, tol, max_iter).unwrap_or(best);
            return finish(f, &profiles, &game, &mixture, &mu, hi, tol, iteration);
        }
        let level = (lo + hi) / 2.0;
        let Some(candidate) = chebyshev_center(&game, f, level) else {
            return Err(Error::Construction(format!("restricted level set at {level} is empty")));
        };
        let ratio = add_cuts(&profiles, &candidate, level, &mut game);
        if ratio > lo {
            lo = ratio;
            best = candidate;
        }
        (hi, mixture) = restricted_value(&game, f, lo, hi, tol)?;
    }
    Err(Error::NoConvergence { iterations: max_iter, gap: hi - lo })
}

/// Most trees added to the restricted game per candidate.
const CUTS_PER_ROUND: usize = 8;

/// Adds the posterior-labelled shapes whose ratio at `mu` falls below
/// `level`, worst first, and returns the best response ratio at `mu`.
fn add_cuts(profiles: &[ShapeProfile], mu: &InputDistribution, level: f64, game: &mut Vec<GameTree>) -> f64 {
    let f = mu.function();
    let mut scored: Vec<(ExtendedReal, usize, Vec<Rational>)> = profiles
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let opt = opt_score_profile(p, mu);
            (ratio_of(to_f64(&p.cost(mu)), opt.score), i, opt.labels)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ratios are comparable").then(a.1.cmp(&b.1)));
    let best = scored[0].0.to_f64();
    for (ratio, i, labels) in scored.into_iter().take(CUTS_PER_ROUND) {
        if ratio.to_f64() < level || game.len() < 2 {
            game.push(GameTree::new(&profiles[i], &labels, f));
        }
    }
    best
}

/// Value of the restricted game, bracketed in `[lo, hi]`, to within
/// `tol/4`, and the optimal tree mixture at the last feasible `λ`.
fn restricted_value(
    game: &[GameTree],
    f: &PartialFunction,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, Vec<Rational>)> {
    let mut a = lo.min(hi);
    let mut b = hi;
    let mut feasible = restricted_lp(game, f, &dyadic(a))?;
    if feasible.value.is_negative() {
        // Only possible through rounding of the bracket; restart from 0.
        a = 0.0;
        feasible = restricted_lp(game, f, &dyadic(a))?;
    }
    loop {
        let mu: Vec<f64> = feasible.mu.iter().map(to_f64).collect();
        let r = game.iter().map(|g| g.ratio(&mu)).fold(ExtendedReal::PosInf, |acc, x| if x < acc { x } else { acc });
        a = a.max(r.to_f64().min(b));
        if b - a <= tol / 4.0 {
            return Ok((b, feasible.mixture));
        }
        let mid = (a + b) / 2.0;
        let probe = restricted_lp(game, f, &dyadic(mid))?;
        if probe.value.is_negative() {
            b = mid;
        } else {
            a = mid;
            feasible = probe;
        }
    }
}

/// Balanced `μ` maximizing the Euclidean slack to every restricted
/// constraint `Σ μ(x)(cost_D(x) − λ·score_D(x)) ≥ 0` and to the simplex
/// facets, measured inside the balanced affine subspace. Falls back to
/// ignoring the simplex facets when those pin the slack at zero.
fn chebyshev_center(game: &[GameTree], f: &Arc<PartialFunction>, lambda: f64) -> Option<InputDistribution> {
    let m = f.len();
    let lambda = dyadic(lambda);
    let classes = [f.class(false), f.class(true)];
    let rows: Vec<(Vec<Rational>, Rational)> = game
        .iter()
        .map(|g| {
            let row: Vec<Rational> = (0..m).map(|i| int(g.depth[i] as i64) - &lambda * &g.score_exact[i]).collect();
            let mut norm2 = 0.0;
            for idx in &classes {
                let mean = idx.iter().map(|&i| to_f64(&row[i])).sum::<f64>() / idx.len() as f64;
                norm2 += idx.iter().map(|&i| (to_f64(&row[i]) - mean).powi(2)).sum::<f64>();
            }
            let norm = rationalize(norm2.sqrt().max(1e-12), 1_000_000);
            (row, norm)
        })
        .collect();
    let facets: Vec<Rational> = (0..m)
        .map(|i| {
            let k = classes[f.value(i) as usize].len() as f64;
            rationalize(((k - 1.0) / k).sqrt().max(1e-12), 1_000_000)
        })
        .collect();
    for with_facets in [true, false] {
        let mut objective = vec![Rational::zero(); m];
        objective.push(Rational::one());
        let mut lp = LinearProgram::new(Sense::Maximize, objective);
        lp.set_bounds(m, Bounds { lower: Some(Rational::zero()), upper: Some(Rational::one()) });
        for (row, norm) in &rows {
            let mut r = row.clone();
            r.push(-norm.clone());
            lp.add(r, Relation::Ge, Rational::zero());
        }
        if with_facets {
            for (i, scale) in facets.iter().enumerate() {
                let mut r = vec![Rational::zero(); m + 1];
                r[i] = Rational::one();
                r[m] = -scale.clone();
                lp.add(r, Relation::Ge, Rational::zero());
            }
        }
        for idx in &classes {
            let mut r = vec![Rational::zero(); m + 1];
            for &i in idx {
                r[i] = Rational::one();
            }
            lp.add(r, Relation::Eq, rat(1, 2));
        }
        if let Ok(Solution::Optimal { value, primal, .. }) = solve(&lp) {
            if with_facets && value.is_zero() {
                continue;
            }
            return round_balanced(f, &primal[..m], WORKING_MAX_DENOMINATOR).ok();
        }
    }
    None
}

fn dyadic(x: f64) -> Rational {
    let scale = 2f64.powi(LAMBDA_BITS);
    Rational::new(((x * scale).round() as i64).into(), (1i64 << LAMBDA_BITS).into())
}

/// The hard distribution is rarely unique. Among balanced `μ` whose
/// restricted value at `λ = upper − tol/2` is nonnegative, pick one
/// maximizing the smallest weight, growing the restricted game until the
/// best response agrees. `None` if that fails to settle.
fn polish(
    f: &Arc<PartialFunction>,
    profiles: &[ShapeProfile],
    game: &mut Vec<GameTree>,
    upper: f64,
    tol: f64,
    max_iter: usize,
) -> Option<InputDistribution> {
    let m = f.len();
    let lambda = dyadic(upper - tol / 2.0);
    for _ in 0..max_iter {
        let mut objective = vec![Rational::zero(); m];
        objective.push(Rational::one());
        let mut lp = LinearProgram::new(Sense::Maximize, objective);
        for g in game.iter() {
            let mut row: Vec<Rational> =
                (0..m).map(|i| int(g.depth[i] as i64) - &lambda * &g.score_exact[i]).collect();
            row.push(Rational::zero());
            lp.add(row, Relation::Ge, Rational::zero());
        }
        for i in 0..m {
            let mut row = vec![Rational::zero(); m + 1];
            row[i] = Rational::one();
            row[m] = -Rational::one();
            lp.add(row, Relation::Ge, Rational::zero());
        }
        for class in [false, true] {
            let mut row = vec![Rational::zero(); m + 1];
            for i in f.class(class) {
                row[i] = Rational::one();
            }
            lp.add(row, Relation::Eq, rat(1, 2));
        }
        let Ok(Solution::Optimal { primal, .. }) = solve(&lp) else {
            return None;
        };
        let mu = InputDistribution::new(f.clone(), primal[..m].to_vec()).ok()?;
        let br = best_response_profiles(profiles, &mu);
        if br.ratio.to_f64() >= upper - tol {
            return Some(mu);
        }
        let labels: Vec<Rational> = br.tree.labels().into_iter().cloned().collect();
        game.push(GameTree::new(&profiles[br.shape_index], &labels, f));
    }
    None
}

fn exact_labels(p: &ShapeProfile, f: &PartialFunction) -> Vec<Rational> {
    let mut labels = vec![rat(1, 2); p.num_leaves];
    for i in 0..f.len() {
        labels[p.leaf[i]] = if f.value(i) { Rational::one() } else { Rational::zero() };
    }
    labels
}

#[allow(clippy::too_many_arguments)]
fn finish(
    f: &Arc<PartialFunction>,
    profiles: &[ShapeProfile],
    game: &[GameTree],
    mixture: &[Rational],
    mu: &InputDistribution,
    upper: f64,
    tol: f64,
    iterations: usize,
) -> Result<HardDistributionCertificate> {
    let mu = round_balanced(f, mu.weights(), MU_MAX_DENOMINATOR)?;
    let balance = mu.balance();
    if to_f64(&balance.imbalance).abs() > tol {
        return Err(Error::Construction(format!("solver distribution is unbalanced by {}", balance.imbalance)));
    }
    let br = best_response_profiles(profiles, &mu);
    let mu_f = mu.weights_f64();
    let support_trees = game
        .iter()
        .zip(mixture)
        .filter(|(_, p)| p.is_positive())
        .map(|(g, p)| {
            let cost: f64 = g.depth.iter().zip(&mu_f).map(|(c, m)| c * m).sum();
            let score: f64 = g.score.iter().zip(&mu_f).map(|(s, m)| s * m).sum();
            SupportTree { probability: to_f64(p), tree: g.tree.clone(), cost, score, ratio: g.ratio(&mu_f) }
        })
        .collect();
    Ok(HardDistributionCertificate {
        mu,
        lambda_star: br.ratio.to_f64(),
        lambda_upper: upper,
        support_trees,
        tolerance: tol,
        iterations,
    })
}

/// Conditionals of a balanced `μ` on the two classes.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitHardPair {
    pub mu0: InputDistribution,
    pub mu1: InputDistribution,
}

/// Splits the certificate's `μ` into its class conditionals.
pub fn split(cert: &HardDistributionCertificate) -> Result<SplitHardPair> {
    split_distribution(&cert.mu, cert.tolerance)
}

pub fn split_distribution(mu: &InputDistribution, tol: f64) -> Result<SplitHardPair> {
    let imbalance = to_f64(&mu.balance().imbalance).abs();
    if imbalance > 10.0 * tol {
        return Err(Error::Precondition(format!(
            "distribution is unbalanced by {imbalance}, beyond 10·tol = {}",
            10.0 * tol
        )));
    }
    Ok(SplitHardPair { mu0: mu.conditional(false)?, mu1: mu.conditional(true)? })
}

/// The balanced mixture `(μ₀ + μ₁)/2` of a split pair.
pub fn join(pair: &SplitHardPair) -> Result<InputDistribution> {
    pair.mu0.mix(&pair.mu1, &rat(1, 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub shape: String,
    pub cost: f64,
    pub cost0: f64,
    pub cost1: f64,
    pub h2: f64,
    pub opt_score: f64,
    pub ratio: ExtendedReal,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioBoundReport {
    pub lambda_star: f64,
    pub tolerance: f64,
    pub r_f: usize,
    /// `R(f)/240`.
    pub theorem_bound: f64,
    pub min_ratio: ExtendedReal,
    pub max_h2_mismatch: f64,
    pub shapes: Vec<ShapeCheck>,
    pub pass: bool,
}

/// Per-shape transcript data under the split pair, posterior-labelled.
fn shape_checks(profiles: &[ShapeProfile], pair: &SplitHardPair) -> Result<Vec<(ShapeCheck, f64)>> {
    let mu = join(pair)?;
    profiles
        .par_iter()
        .map(|p| {
            let opt = opt_score_profile(p, &mu);
            let tree = RandomizedForecastTree::deterministic(p.shape.label(&opt.labels));
            let h2 = distance(&transcript_pair(&tree, &pair.mu0, &pair.mu1, 0.5)?, Measure::H2);
            let check = ShapeCheck {
                shape: p.shape.to_string(),
                cost: to_f64(&p.cost(&mu)),
                cost0: to_f64(&p.cost(&pair.mu0)),
                cost1: to_f64(&p.cost(&pair.mu1)),
                h2,
                opt_score: opt.score,
                ratio: ExtendedReal::PosInf,
                pass: true,
            };
            Ok((check, (h2 - opt.score).abs()))
        })
        .collect()
}

/// Checks `cost(D, μ)/h²(tran(D, μ₀), tran(D, μ₁)) ≥ λ* − tol` for every
/// posterior-labelled shape, and reports the minimum next to `R(f)/240`.
pub fn verify_ratio_bound(cert: &HardDistributionCertificate) -> Result<RatioBoundReport> {
    let f = cert.function();
    let pair = split(cert)?;
    let r_f = randomized_complexity(f)?;
    let profiles = shape_profiles(f, f.n())?;
    let mut shapes = Vec::new();
    let mut min_ratio = ExtendedReal::PosInf;
    let mut max_mismatch: f64 = 0.0;
    let theorem_bound = r_f as f64 / 240.0;
    for (mut check, mismatch) in shape_checks(&profiles, &pair)? {
        check.ratio = ratio_of(check.cost, check.h2);
        check.pass = check.ratio.to_f64() >= cert.lambda_star - cert.tolerance
            && check.ratio.to_f64() >= theorem_bound
            && mismatch <= H2_CONSISTENCY;
        if check.ratio < min_ratio {
            min_ratio = check.ratio;
        }
        max_mismatch = max_mismatch.max(mismatch);
        shapes.push(check);
    }
    let pass = shapes.iter().all(|s| s.pass);
    Ok(RatioBoundReport {
        lambda_star: cert.lambda_star,
        tolerance: cert.tolerance,
        r_f,
        theorem_bound,
        min_ratio,
        max_h2_mismatch: max_mismatch,
        shapes,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShaltielReport {
    pub r_f: usize,
    /// `R(f)/3000`.
    pub bound: f64,
    pub min_ratio: ExtendedReal,
    pub shapes: Vec<ShapeCheck>,
    pub pass: bool,
}

/// Slack allowed in `min{cost₀, cost₁} ≥ h²·R(f)/3000`.
pub const SHALTIEL_SLACK: f64 = 1e-9;

/// Checks `min{cost(D, μ₀), cost(D, μ₁)} ≥ h²(tran(D, μ₀), tran(D, μ₁))·R(f)/3000`
/// for every shape.
pub fn verify_shaltiel_free(f: &PartialFunction, pair: &SplitHardPair) -> Result<ShaltielReport> {
    let r_f = randomized_complexity(f)?;
    let profiles = shape_profiles(f, f.n())?;
    let bound = r_f as f64 / 3000.0;
    let mut shapes = Vec::new();
    let mut min_ratio = ExtendedReal::PosInf;
    for (mut check, _) in shape_checks(&profiles, pair)? {
        let cheaper = check.cost0.min(check.cost1);
        check.ratio = ratio_of(cheaper, check.h2);
        check.pass = cheaper >= check.h2 * bound - SHALTIEL_SLACK;
        if check.ratio < min_ratio {
            min_ratio = check.ratio;
        }
        shapes.push(check);
    }
    let pass = shapes.iter().all(|s| s.pass);
    Ok(ShaltielReport { r_f, bound, min_ratio, shapes, pass })
}
