use anyhow::{anyhow, bail, Result};
use clap::{Args, Subcommand};
use forecastq::amplify::{
    amp_bounds, amplified_tree, bias_to_forecast, combine, gamma_mixture, odometer_amplifier, ratio_bound,
};
use forecastq::distances::distance_relations;
use forecastq::oracle::{default_gammas, det_complexity, distributional, randomized_worst, verify_avg_worst, AvgWorstReport};
use forecastq::polyamp::{amp_const_to_small, amp_small_to_const, clamp_lipschitz, clamp_target, jackson_approx, majority_tail, Construction};
use forecastq::rational::{parse_rational, to_f64, RationalJson};
use forecastq::scoring::properness_report;
use forecastq::solver::{solve_hard, split, verify_ratio_bound, verify_shaltiel_free, HardDistributionCertificate, RatioBoundReport, ShaltielReport};
use forecastq::{distance, max_score, Error, InputDistribution, Measure, Rational, ScoringRule};
use serde_json::{json, Value};

use crate::inputs;
use crate::manifest::RunManifest;
use crate::output::{status, Outcome, Table};
use crate::Global;

#[derive(Debug, Subcommand)]
pub enum ScoresCmd {
    /// Evaluate a rule at a forecast.
    Eval {
        #[arg(long)]
        rule: ScoringRule,
        #[arg(long)]
        q: f64,
        /// Score against this outcome (0 or 1) instead of s(q).
        #[arg(long)]
        outcome: Option<u8>,
    },
    /// Grid check of properness at a true probability.
    Proper {
        #[arg(long)]
        rule: ScoringRule,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum DistancesCmd {
    /// Distance(s) of a pair, with the matching maximal score.
    Eval {
        #[arg(long)]
        measure: Option<Measure>,
        #[arg(long)]
        pair: String,
    },
    /// The eight inequalities between the measures.
    Relations {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 1e-12)]
        slack: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum AmplifyCmd {
    /// Log-odds combination of forecasts.
    Combine {
        #[arg(long = "q", required = true)]
        q: Vec<f64>,
    },
    /// `(½·min{kx,1}, 1−(1−x)^k, min{kx,1})`.
    Bounds {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        k: f64,
    },
    /// Exact hs scores of the k-fold combined tree against `1 − (1−s)^k`.
    Score {
        #[arg(long)]
        function: String,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        k: usize,
    },
    /// Monte-Carlo run of the odometer construction.
    Odometer {
        #[arg(long)]
        function: String,
        /// Forecast tree; defaults to the γ-relabelled exact tree when `--gamma` is given.
        #[arg(long)]
        tree: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        /// Cost/score ratio bound; defaults to the tree's worst-case ratio.
        #[arg(long = "Y")]
        y: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Deterministic query complexity.
    Det {
        #[arg(long)]
        function: String,
    },
    /// Randomized worst-case complexity at error ε.
    Rworst {
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "1/3")]
        eps: String,
    },
    /// Distributional complexity at bias γ.
    Dist {
        #[arg(long)]
        function: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        gamma: String,
    },
}

#[derive(Debug, Args)]
pub struct SolveHardArgs {
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Ratio of cost to transcript Hellinger distance for every shape.
    RatioBound {
        #[arg(long)]
        cert: String,
    },
    /// `min{cost₀, cost₁} ≥ h²·R(f)/3000` for every shape.
    Shaltiel {
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        cert: String,
    },
    /// `R̄^μ_γ̇(f) ≥ γ²·R(f)/500` over a γ grid.
    AvgWorst {
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        cert: Option<String>,
        /// Bias levels; defaults to 0.1, 0.2, …, 1.
        #[arg(long)]
        gamma: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PolyampCmd {
    /// Majority polynomial mapping [1/3, 1] into [1−ε, 1].
    ConstToSmall {
        #[arg(long)]
        eps: f64,
    },
    /// Polynomial mapping [γ, 1] into [1/3, 1].
    SmallToConst {
        #[arg(long)]
        gamma: f64,
    },
    /// Jackson approximation of the clamp target.
    Jackson {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        degree: usize,
    },
    /// Exact check of q(1/3) ≤ (1/3)(8/9)^k.
    MajorityTail {
        #[arg(long, default_value_t = 40)]
        k_max: usize,
    },
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

pub fn run(command: &crate::Command, global: &Global, manifest: &mut RunManifest) -> Result<Outcome> {
    use crate::Command::*;
    match command {
        Scores(c) => scores(c),
        Distances(c) => distances(c, manifest),
        Amplify(c) => amplify(c, global, manifest),
        Oracle(c) => oracle(c, manifest),
        SolveHard(a) => solve(a, manifest),
        Verify(c) => verify(c, manifest),
        Polyamp(c) => polyamp(c),
        Suite(a) => suite(a, manifest),
    }
}

fn rational(text: &str) -> Result<Rational> {
    Ok(parse_rational(text)?)
}

fn rational_json(r: &Rational) -> Value {
    json!({ "exact": RationalJson::from(r), "value": to_f64(r) })
}

fn scores(c: &ScoresCmd) -> Result<Outcome> {
    match c {
        ScoresCmd::Eval { rule, q, outcome } => {
            let value = match outcome {
                None => rule.eval(*q)?,
                Some(0) => rule.eval_outcome(*q, false)?,
                Some(1) => rule.eval_outcome(*q, true)?,
                Some(o) => bail!("outcome must be 0 or 1, got {o}"),
            };
            let mut report = json!({ "rule": rule, "q": q, "value": value });
            if let Some(o) = outcome {
                report["outcome"] = json!(o);
            }
            Ok(Outcome::ok(report))
        }
        ScoresCmd::Proper { rule, p, steps } => {
            let report = properness_report(*rule, *p, *steps)?;
            let pass = report.passes;
            Ok(Outcome::checked(annotate(serde_json::to_value(report)?), pass))
        }
    }
}

fn distances(c: &DistancesCmd, manifest: &mut RunManifest) -> Result<Outcome> {
    match c {
        DistancesCmd::Eval { measure, pair } => {
            let pair = inputs::pair(pair, manifest)?;
            let measures = match measure {
                Some(m) => vec![*m],
                None => vec![Measure::Tv, Measure::H2, Measure::Chi2s, Measure::Js],
            };
            let mut table = Table::new(&["measure", "distance", "rule", "max_score"]);
            let rows: Vec<Value> = measures
                .iter()
                .map(|&m| {
                    let d = distance(&pair, m);
                    let s = max_score(&pair, m.matching_rule());
                    table.push(vec![m.to_string(), d.to_string(), m.matching_rule().to_string(), s.to_string()]);
                    json!({ "measure": m, "distance": d, "rule": m.matching_rule(), "max_score": s })
                })
                .collect();
            Ok(Outcome::ok(json!({ "w": pair.w(), "distances": rows })).with_table(table))
        }
        DistancesCmd::Relations { pair, slack } => {
            let pair = inputs::pair(pair, manifest)?;
            let mut table = Table::new(&["relation", "lhs", "rhs", "status"]);
            let checks = distance_relations(&pair);
            let pass = checks.iter().all(|r| r.holds(*slack));
            let rows: Vec<Value> = checks
                .iter()
                .map(|r| {
                    let ok = r.holds(*slack);
                    table.push(vec![r.name.to_string(), r.lhs.to_string(), r.rhs.to_string(), status(ok).into()]);
                    json!({ "relation": r.name, "lhs": r.lhs, "rhs": r.rhs, "status": status(ok) })
                })
                .collect();
            let report = json!({ "slack": slack, "relations": rows, "status": status(pass) });
            Ok(Outcome::checked(report, pass).with_table(table))
        }
    }
}

fn amplify(c: &AmplifyCmd, global: &Global, manifest: &mut RunManifest) -> Result<Outcome> {
    match c {
        AmplifyCmd::Combine { q } => Ok(Outcome::ok(json!({ "q": q, "value": combine(q)? }))),
        AmplifyCmd::Bounds { x, k } => Ok(Outcome::ok(serde_json::to_value(amp_bounds(*x, *k)?)?)),
        AmplifyCmd::Score { function, tree, k } => {
            let f = inputs::function(function, manifest)?;
            let r = inputs::tree(tree, manifest)?;
            r.validate(&f)?;
            let amp = amplified_tree(&r, *k)?;
            let mut table = Table::new(&["input", "score", "amplified", "formula", "status"]);
            let mut pass = true;
            let mut rows = Vec::new();
            for i in 0..f.len() {
                let x = f.input(i);
                let s = r.score_on(x, f.value(i), ScoringRule::Hs)?.to_f64();
                let a = amp.hs_score_on(x, f.value(i))?.to_f64();
                let formula = 1.0 - (1.0 - s).powi(*k as i32);
                let ok = (a - formula).abs() <= 1e-10 * formula.abs().max(1.0) || a == formula;
                pass &= ok;
                let input = forecastq::foundation::render_input(x);
                table.push(vec![input.clone(), s.to_string(), a.to_string(), formula.to_string(), status(ok).into()]);
                rows.push(json!({ "input": input, "score": s, "amplified": a, "formula": formula, "status": status(ok) }));
            }
            Ok(Outcome::checked(json!({ "k": k, "inputs": rows, "status": status(pass) }), pass).with_table(table))
        }
        AmplifyCmd::Odometer { function, tree, gamma, y, trials } => {
            let f = inputs::function(function, manifest)?;
            let r = match (tree, gamma) {
                (Some(path), _) => inputs::tree(path, manifest)?,
                (None, Some(g)) => {
                    let g = rational(g)?;
                    bias_to_forecast(&gamma_mixture(&f, &g)?, &g)?
                }
                (None, None) => bail!("odometer needs --tree or --gamma"),
            };
            let y = match y {
                Some(y) => *y,
                None => ratio_bound(&r, &f)?
                    .finite()
                    .ok_or_else(|| anyhow!("the tree has unbounded cost/score ratio; pass --Y"))?,
            };
            let report = odometer_amplifier(&r, &f, y, *trials, global.seed)?;
            let pass = report.passes();
            let mut table = Table::new(&["input", "error_estimate", "mean_queries", "max_queries", "cutoff_rate"]);
            for i in &report.inputs {
                table.push(vec![
                    i.input.clone(),
                    i.error_estimate.to_string(),
                    i.mean_queries.to_string(),
                    i.max_queries.to_string(),
                    i.cutoff_rate.to_string(),
                ]);
            }
            let mut value = serde_json::to_value(&report)?;
            value["tree"] = r.to_json_value();
            value["status"] = json!(status(pass));
            Ok(Outcome::checked(value, pass).with_table(table))
        }
    }
}

fn oracle(c: &OracleCmd, manifest: &mut RunManifest) -> Result<Outcome> {
    let report = match c {
        OracleCmd::Det { function } => {
            let f = inputs::function(function, manifest)?;
            json!({ "kind": "deterministic", "value": det_complexity(&f)? })
        }
        OracleCmd::Rworst { function, eps } => {
            let f = inputs::function(function, manifest)?;
            randomized_worst(&f, &rational(eps)?)?.to_json_value()
        }
        OracleCmd::Dist { function, mu, gamma } => {
            let f = inputs::function(function, manifest)?;
            let mu = inputs::distribution(&f, mu, manifest)?;
            distributional(&mu, &rational(gamma)?)?.to_json_value()
        }
    };
    Ok(Outcome::ok(report))
}

/// Adds `"status": "pass" | "fail"` next to every boolean `"pass"` field.
fn annotate(mut v: Value) -> Value {
    match &mut v {
        Value::Object(map) => {
            for (_, child) in map.iter_mut() {
                *child = annotate(child.take());
            }
            if let Some(Value::Bool(p)) = map.get("pass").cloned() {
                map.insert("status".into(), json!(status(p)));
            }
        }
        Value::Array(items) => {
            for item in items.iter_mut() {
                *item = annotate(item.take());
            }
        }
        _ => {}
    }
    v
}

fn shape_table(shapes: &Value) -> Table {
    let mut table = Table::new(&["shape", "cost", "cost0", "cost1", "h2", "opt_score", "ratio", "status"]);
    for s in shapes.as_array().into_iter().flatten() {
        let field = |k: &str| match &s[k] {
            Value::String(t) => t.clone(),
            other => other.to_string(),
        };
        table.push(["shape", "cost", "cost0", "cost1", "h2", "opt_score", "ratio", "status"].iter().map(|k| field(k)).collect());
    }
    table
}

fn ratio_bound_json(report: &RatioBoundReport) -> Result<Value> {
    Ok(annotate(serde_json::to_value(report)?))
}

fn shaltiel_json(report: &ShaltielReport) -> Result<Value> {
    Ok(annotate(serde_json::to_value(report)?))
}

fn avg_worst_table(report: &AvgWorstReport) -> Table {
    let mut table = Table::new(&["gamma", "distributional", "bound", "status"]);
    for r in &report.rows {
        table.push(vec![
            to_f64(&r.gamma).to_string(),
            r.value.as_ref().map_or("inf".to_string(), |v| to_f64(v).to_string()),
            to_f64(&r.bound).to_string(),
            status(r.pass).into(),
        ]);
    }
    table
}

/// Solves and verifies; a failure to converge is reported rather than raised.
fn solve_and_summarize(function: &str, tol: f64, max_iter: usize, manifest: &mut RunManifest) -> Result<(Option<HardDistributionCertificate>, Value, bool)> {
    let f = inputs::function(function, manifest)?;
    let cert = match solve_hard(&f, tol, max_iter) {
        Ok(c) => c,
        Err(Error::ConstantFunction) => bail!("constant function: no hard distribution exists"),
        Err(e @ Error::NoConvergence { .. }) => {
            return Ok((None, json!({ "status": "fail", "error": e.to_string() }), false));
        }
        Err(e) => return Err(e.into()),
    };
    let ratio = verify_ratio_bound(&cert)?;
    let shaltiel = verify_shaltiel_free(&f, &split(&cert)?)?;
    let pass = ratio.pass && shaltiel.pass;
    let mut value = cert.to_json_value();
    value["verification"] = json!({
        "ratio_bound": { "min_ratio": ratio.min_ratio, "theorem_bound": ratio.theorem_bound, "status": status(ratio.pass) },
        "shaltiel": { "min_ratio": shaltiel.min_ratio, "bound": shaltiel.bound, "status": status(shaltiel.pass) },
    });
    value["status"] = json!(status(pass));
    Ok((Some(cert), value, pass))
}

fn solve(a: &SolveHardArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let (_, value, pass) = solve_and_summarize(&a.function, a.tol, a.max_iter, manifest)?;
    Ok(Outcome::checked(value, pass))
}

fn gammas(given: &[String]) -> Result<Vec<Rational>> {
    if given.is_empty() {
        return Ok(default_gammas());
    }
    given.iter().map(|g| rational(g)).collect()
}

fn verify(c: &VerifyCmd, manifest: &mut RunManifest) -> Result<Outcome> {
    match c {
        VerifyCmd::RatioBound { cert } => {
            let cert = inputs::certificate(cert, manifest)?;
            let report = verify_ratio_bound(&cert)?;
            let value = ratio_bound_json(&report)?;
            let table = shape_table(&value["shapes"]);
            Ok(Outcome::checked(value, report.pass).with_table(table))
        }
        VerifyCmd::Shaltiel { function, cert } => {
            let cert = inputs::certificate(cert, manifest)?;
            if let Some(path) = function {
                let f = inputs::function(path, manifest)?;
                if f.as_ref() != cert.function().as_ref() {
                    bail!("{path} is not the certificate's function");
                }
            }
            let report = verify_shaltiel_free(cert.function(), &split(&cert)?)?;
            let value = shaltiel_json(&report)?;
            let table = shape_table(&value["shapes"]);
            Ok(Outcome::checked(value, report.pass).with_table(table))
        }
        VerifyCmd::AvgWorst { function, mu, cert, gamma } => {
            let mu: InputDistribution = match (function, mu, cert) {
                (_, _, Some(c)) => inputs::certificate(c, manifest)?.mu,
                (Some(f), Some(m), None) => {
                    let f = inputs::function(f, manifest)?;
                    inputs::distribution(&f, m, manifest)?
                }
                _ => bail!("avg-worst needs --cert, or --function with --mu"),
            };
            let report = verify_avg_worst(&mu, &gammas(gamma)?)?;
            let pass = report.passes();
            let table = avg_worst_table(&report);
            Ok(Outcome::checked(report.to_json_value(), pass).with_table(table))
        }
    }
}

fn construction(c: &Construction) -> Result<Outcome> {
    let pass = c.grid.pass;
    let mut table = Table::new(&["domain_lo", "domain_hi", "range_lo", "range_hi", "min", "max", "status"]);
    for k in &c.grid.checks {
        table.push(vec![
            k.domain[0].to_string(),
            k.domain[1].to_string(),
            k.range[0].to_string(),
            k.range[1].to_string(),
            k.min.to_string(),
            k.max.to_string(),
            status(k.pass).into(),
        ]);
    }
    let mut value = annotate(c.to_json_value());
    value["status"] = json!(status(pass));
    Ok(Outcome::checked(value, pass).with_table(table))
}

fn polyamp(c: &PolyampCmd) -> Result<Outcome> {
    match c {
        PolyampCmd::ConstToSmall { eps } => construction(&amp_const_to_small(*eps)?),
        PolyampCmd::SmallToConst { gamma } => construction(&amp_small_to_const(*gamma)?),
        PolyampCmd::Jackson { gamma, degree } => {
            if !(*gamma > 0.0 && *gamma <= 1.0) {
                bail!("γ = {gamma} must lie in (0, 1]");
            }
            let (value, pass) = match jackson_approx(&clamp_target(*gamma), *degree, clamp_lipschitz(*gamma)) {
                Ok(j) => (
                    json!({
                        "gamma": gamma,
                        "degree": degree,
                        "grid_error": j.grid_error,
                        "bound": j.bound,
                        "polynomial": j.polynomial.to_json_value(),
                        "status": "pass",
                    }),
                    true,
                ),
                Err(e @ Error::Construction(_)) => {
                    (json!({ "gamma": gamma, "degree": degree, "error": e.to_string(), "status": "fail" }), false)
                }
                Err(e) => return Err(e.into()),
            };
            Ok(Outcome::checked(value, pass))
        }
        PolyampCmd::MajorityTail { k_max } => {
            let mut table = Table::new(&["k", "q_at_third", "bound", "status"]);
            let mut pass = true;
            let rows: Vec<Value> = (1..=*k_max)
                .map(|k| {
                    let t = majority_tail(k);
                    pass &= t.pass;
                    table.push(vec![k.to_string(), to_f64(&t.q).to_string(), to_f64(&t.bound).to_string(), status(t.pass).into()]);
                    json!({ "k": k, "q_at_third": rational_json(&t.q), "bound": rational_json(&t.bound), "status": status(t.pass) })
                })
                .collect();
            Ok(Outcome::checked(json!({ "rows": rows, "status": status(pass) }), pass).with_table(table))
        }
    }
}

fn suite(a: &SuiteArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let (cert, solve_value, solved) = solve_and_summarize(&a.function, a.tol, a.max_iter, manifest)?;
    let Some(cert) = cert else {
        return Ok(Outcome::checked(json!({ "solve_hard": solve_value, "status": "fail" }), false));
    };
    let ratio = verify_ratio_bound(&cert)?;
    let shaltiel = verify_shaltiel_free(cert.function(), &split(&cert)?)?;
    let avg = verify_avg_worst(&cert.mu, &default_gammas())?;
    let pass = solved && ratio.pass && shaltiel.pass && avg.passes();
    let report = json!({
        "solve_hard": solve_value,
        "ratio_bound": ratio_bound_json(&ratio)?,
        "shaltiel": shaltiel_json(&shaltiel)?,
        "avg_worst": avg.to_json_value(),
        "status": status(pass),
    });
    Ok(Outcome::checked(report, pass).with_table(avg_worst_table(&avg)))
}
