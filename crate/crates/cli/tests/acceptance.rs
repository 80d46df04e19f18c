//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use forecastq::amplify::{amplified_tree, bias_to_forecast, forecast_to_bias, gamma_mixture, odometer_amplifier, ratio_bound};
use forecastq::distances::distance_relations;
use forecastq::oracle::{default_gammas, randomized_complexity, verify_avg_worst};
use forecastq::polyamp::{amp_const_to_small, amp_small_to_const, clamp_lipschitz, clamp_target, jackson_approx, majority_tail};
use forecastq::rational::{rat, to_f64};
use forecastq::solver::{solve_hard, split, verify_shaltiel_free};
use forecastq::trees::{enumerate_boolean_trees, enumerate_shapes, worst_bias, worst_score};
use forecastq::{distance, max_score, FinitePair, ForecastTree, Measure, PartialFunction, RandomizedForecastTree, Rational, ScoringRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const MEASURES: [Measure; 4] = [Measure::Tv, Measure::H2, Measure::Chi2s, Measure::Js];

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_pairs(seed: u64, count: usize) -> Vec<FinitePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=6);
            let draw = |rng: &mut ChaCha8Rng| {
                let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-9).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
            };
            let nu0 = draw(&mut rng);
            let nu1 = draw(&mut rng);
            FinitePair::unlabeled(nu0, nu1, rng.random()).unwrap()
        })
        .collect()
}

/// Per-point grid search over `q = i/10⁴`, refined once inside the best cell.
fn grid_max_score(pair: &FinitePair, rule: ScoringRule) -> f64 {
    const STEPS: usize = 10_000;
    let s1 = |q: f64| match rule {
        ScoringRule::Hs => 1.0 - ((1.0 - q) / q).sqrt(),
        ScoringRule::Brier => 1.0 - 4.0 * (1.0 - q).powi(2),
        ScoringRule::Bias => 2.0 * q - 1.0,
        ScoringRule::Ls => 1.0 + q.log2(),
    };
    (0..pair.len())
        .map(|x| {
            let a = (1.0 - pair.w()) * pair.nu0()[x];
            let b = pair.w() * pair.nu1()[x];
            let value = |q: f64| {
                let term = |m: f64, s: f64| if m == 0.0 { 0.0 } else { m * s };
                term(a, s1(1.0 - q)) + term(b, s1(q))
            };
            let search = |lo: f64, hi: f64| {
                (0..=STEPS)
                    .map(|i| lo + (hi - lo) * i as f64 / STEPS as f64)
                    .map(|q| (value(q), q))
                    .filter(|(v, _)| v.is_finite())
                    .fold((f64::NEG_INFINITY, 0.5), |acc, c| if c.0 > acc.0 { c } else { acc })
            };
            let (coarse, q) = search(0.0, 1.0);
            let h = 1.0 / STEPS as f64;
            coarse.max(search((q - h).max(0.0), (q + h).min(1.0)).0)
        })
        .sum()
}

fn criterion_1() -> Check {
    let pairs = random_pairs(1, 1000);
    let (identity, grid) = pairs
        .par_iter()
        .map(|p| {
            let mut worst = (0.0f64, 0.0f64);
            for m in MEASURES {
                let s = max_score(p, m.matching_rule());
                worst.0 = worst.0.max((s - distance(p, m)).abs());
                worst.1 = worst.1.max((s - grid_max_score(p, m.matching_rule())).abs());
            }
            worst
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    ensure(identity <= 1e-9 && grid <= 1e-6, format!("max |score - distance| = {identity:.2e}, max |score - grid| = {grid:.2e}"))
}

fn criterion_2() -> Check {
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for p in random_pairs(2, 1000) {
        for r in distance_relations(&p) {
            worst = worst.max(r.lhs - r.rhs);
            failures += usize::from(!r.holds(1e-12));
        }
    }
    ensure(failures == 0, format!("8000 inequalities, {failures} violated, max lhs - rhs = {worst:.2e}"))
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> ForecastTree {
    if depth == n || rng.random_bool(0.3) {
        return ForecastTree::leaf(rat(rng.random_range(1..20), 20));
    }
    ForecastTree::Query { index: depth, children: (0..2).map(|_| random_tree(rng, n, depth + 1)).collect() }
}

fn random_forecast_trees(seed: u64, count: usize) -> Vec<(PartialFunction, RandomizedForecastTree)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let functions = [PartialFunction::xor(2), PartialFunction::and(2), PartialFunction::or(2), PartialFunction::trivial(2), PartialFunction::trivial(1)];
    (0..count)
        .map(|i| {
            let f = functions[i % functions.len()].clone();
            let k = rng.random_range(1..=3);
            let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..10)).collect();
            let total: i64 = weights.iter().sum();
            let support = weights.iter().map(|&w| (rat(w, total), random_tree(&mut rng, f.n(), 0))).collect();
            (f, RandomizedForecastTree::new(support).unwrap())
        })
        .collect()
}

fn criterion_3() -> Check {
    let mut worst: f64 = 0.0;
    for (f, r) in random_forecast_trees(3, 100) {
        for k in [1usize, 2, 3, 5] {
            let amp = amplified_tree(&r, k).map_err(|e| e.to_string())?;
            for i in 0..f.len() {
                let s = r.score_on(f.input(i), f.value(i), ScoringRule::Hs).unwrap().to_f64();
                let a = amp.hs_score_on(f.input(i), f.value(i)).unwrap().to_f64();
                worst = worst.max((a - (1.0 - (1.0 - s).powi(k as i32))).abs());
            }
        }
    }
    ensure(worst <= 1e-10, format!("100 trees x k in {{1,2,3,5}}, max deviation {worst:.2e}"))
}

fn criterion_4() -> Check {
    let functions = [PartialFunction::xor(2), PartialFunction::and(2), PartialFunction::or(2), PartialFunction::trivial(2), PartialFunction::trivial(1)];
    let mut tested = 0usize;
    let mut worst_gap = f64::INFINITY;
    for f in &functions {
        let trees: Vec<ForecastTree> = enumerate_boolean_trees(f.n(), 2).unwrap().collect();
        // Deterministic trees and every two-tree mixture at weights 1/2 and 3/4.
        let mut candidates: Vec<RandomizedForecastTree> = trees.iter().cloned().map(RandomizedForecastTree::deterministic).collect();
        for (i, a) in trees.iter().enumerate() {
            for b in &trees[i + 1..] {
                for w in [rat(1, 2), rat(3, 4)] {
                    candidates.push(RandomizedForecastTree::new(vec![(w.clone(), a.clone()), (rat(1, 1) - w, b.clone())]).unwrap());
                }
            }
        }
        let gaps: Vec<f64> = candidates
            .par_iter()
            .filter_map(|r| {
                let gamma = worst_bias(r, f).unwrap();
                if gamma <= Rational::from_integer(0.into()) {
                    return None;
                }
                let forecast = bias_to_forecast(r, &gamma).unwrap();
                let s = worst_score(&forecast, f, ScoringRule::Hs).unwrap().to_f64();
                let g = to_f64(&gamma);
                Some(s - (1.0 - (1.0 - g * g).sqrt()))
            })
            .collect();
        tested += gaps.len();
        worst_gap = gaps.into_iter().fold(worst_gap, f64::min);
    }
    let mut bias_ok = true;
    for (f, r) in random_forecast_trees(4, 100) {
        let b = forecast_to_bias(&r);
        for i in 0..f.len() {
            let s = r.score_on(f.input(i), f.value(i), ScoringRule::Hs).unwrap().to_f64();
            bias_ok &= to_f64(&b.bias_on(f.input(i), f.value(i)).unwrap()) >= s - 1e-12;
        }
    }
    ensure(
        worst_gap >= -1e-12 && bias_ok,
        format!("{tested} Boolean trees with positive bias, min (score - floor) = {worst_gap:.2e}; bias >= score on 100 forecast trees: {bias_ok}"),
    )
}

fn test_set() -> Vec<(&'static str, PartialFunction)> {
    vec![
        ("XOR2", PartialFunction::xor(2)),
        ("AND2", PartialFunction::and(2)),
        ("OR2", PartialFunction::or(2)),
        ("Trivial2", PartialFunction::trivial(2)),
        ("XOR3", PartialFunction::xor(3)),
        ("MAJ3", PartialFunction::majority(3)),
        ("AND3", PartialFunction::and(3)),
    ]
}

/// Max over a simplex grid of `min_shapes cost/score⁺`, ties broken toward
/// the largest minimum weight.
fn grid_oracle(f: &PartialFunction, steps: usize) -> (f64, Vec<f64>) {
    let shapes: Vec<(usize, Vec<(usize, usize)>)> = enumerate_shapes(f.n(), f.alphabet())
        .unwrap()
        .into_iter()
        .map(|s| (s.num_leaves(), f.domain().iter().map(|x| s.locate(x)).collect()))
        .collect();
    let m = f.len();
    let mut points: Vec<Vec<usize>> = vec![vec![]];
    for d in 0..m {
        points = points
            .into_iter()
            .flat_map(|p| {
                let used: usize = p.iter().sum();
                let range: Vec<usize> = if d + 1 == m { vec![steps - used] } else { (0..=steps - used).collect() };
                range.into_iter().map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    let ratio = |mu: &[f64]| {
        shapes
            .iter()
            .map(|(leaves, walk)| {
                let mut mass = vec![[0.0f64, 0.0]; *leaves];
                let mut cost = 0.0;
                for (i, &(leaf, depth)) in walk.iter().enumerate() {
                    mass[leaf][f.value(i) as usize] += mu[i];
                    cost += mu[i] * depth as f64;
                }
                let score: f64 = mass.iter().map(|[a, b]| (a.sqrt() - b.sqrt()).powi(2)).sum();
                if score <= 1e-15 { f64::INFINITY } else { cost / score }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let spread = |mu: &[f64]| mu.iter().copied().fold(f64::INFINITY, f64::min);
    points
        .par_iter()
        .map(|p| {
            let mu: Vec<f64> = p.iter().map(|&k| k as f64 / steps as f64).collect();
            (ratio(&mu), mu)
        })
        .reduce(
            || (f64::NEG_INFINITY, vec![]),
            |a, b| {
                let tie = (b.0 - a.0).abs() <= 1e-12;
                let wider = spread(&b.1) > spread(&a.1) || (spread(&b.1) == spread(&a.1) && b.1 < a.1);
                if b.0 > a.0 + 1e-12 || (tie && wider) {
                    b
                } else {
                    a
                }
            },
        )
}

fn criterion_5() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, f) in [("XOR2", PartialFunction::xor(2)), ("Trivial2", PartialFunction::trivial(2))] {
        let f = Arc::new(f);
        let cert = solve_hard(&f, 1e-6, 200).map_err(|e| format!("{name}: {e}"))?;
        let (value, mu) = grid_oracle(&f, 100);
        let dmu = cert.mu.weights_f64().iter().zip(&mu).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let converged = cert.lambda_upper - cert.lambda_star <= 1e-6 + 1e-12;
        ok &= converged && (cert.lambda_star - value).abs() <= 0.1 && dmu <= 0.1;
        notes.push(format!("{name}: lambda* = {:.6} vs grid {value:.6}, |dmu| = {dmu:.3}", cert.lambda_star));
    }
    for (name, f) in test_set() {
        let cert = solve_hard(&Arc::new(f), 1e-6, 200).map_err(|e| format!("{name}: {e}"))?;
        let imbalance = to_f64(&cert.mu.balance().imbalance).abs();
        ok &= imbalance <= 1e-6;
    }
    notes.push("all 7 test-set distributions balanced".into());
    ensure(ok, notes.join("; "))
}

fn criterion_6() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, f) in test_set() {
        let f = Arc::new(f);
        let cert = solve_hard(&f, 1e-6, 200).map_err(|e| format!("{name}: {e}"))?;
        let report = verify_shaltiel_free(&f, &split(&cert).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let r_f = randomized_complexity(&f).unwrap() as f64;
        // Recheck each row from its raw fields.
        let rows_ok = report.shapes.len() <= 244
            && report.shapes.iter().all(|s| s.cost0.min(s.cost1) >= s.h2 * r_f / 3000.0 - 1e-9);
        ok &= report.pass && rows_ok;
        notes.push(format!("{name} {} shapes min ratio {:.3}", report.shapes.len(), report.min_ratio.to_f64()));
    }
    ensure(ok, notes.join(", "))
}

fn criterion_7() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, f) in test_set() {
        let f = Arc::new(f);
        let cert = solve_hard(&f, 1e-6, 200).map_err(|e| format!("{name}: {e}"))?;
        let report = verify_avg_worst(&cert.mu, &default_gammas()).map_err(|e| e.to_string())?;
        ok &= report.passes();
        let failing = report.rows.iter().filter(|r| !r.pass).count();
        notes.push(format!("{name} R = {} ({failing} failing)", report.r_f));
    }
    ensure(ok, notes.join(", "))
}

fn criterion_8() -> Check {
    let f = PartialFunction::xor(2);
    let gamma = rat(1, 5);
    let r = bias_to_forecast(&gamma_mixture(&f, &gamma).unwrap(), &gamma).unwrap();
    let y = ratio_bound(&r, &f).unwrap().to_f64();
    let report = odometer_amplifier(&r, &f, y, 100_000, 8).map_err(|e| e.to_string())?;
    let err_ok = report.worst_input_error_estimate <= 1.0 / 3.0 + 3.0 * report.sigma;
    let queries_ok = report.worst_input_query_estimate as f64 <= 240.0 * y;
    ensure(
        err_ok && queries_ok,
        format!(
            "Y = {y:.4}, worst error {:.5} <= {:.5}, worst queries {} <= {:.1}",
            report.worst_input_error_estimate,
            1.0 / 3.0 + 3.0 * report.sigma,
            report.worst_input_query_estimate,
            240.0 * y
        ),
    )
}

fn criterion_9() -> Check {
    let tails_ok = (1..=40).all(|k| majority_tail(k).pass);
    let mut notes = vec![format!("q(1/3) <= (1/3)(8/9)^k for k = 1..40: {tails_ok}")];
    let mut ok = tails_ok;
    for eps in [0.3, 0.1, 0.01] {
        let c = amp_const_to_small(eps).map_err(|e| e.to_string())?;
        let k = c.details["k"].as_u64().unwrap() as usize;
        let degree_ok = c.degree == 2 * k + 1 && (c.degree as f64) <= 17.0 * (1.0 / eps).log2();
        ok &= degree_ok && c.grid.pass;
        notes.push(format!("eps {eps}: k = {k}, degree {} <= {:.1}", c.degree, c.degree_bound));
    }
    ensure(ok, notes.join("; "))
}

fn criterion_10() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for gamma in [0.5, 0.2, 0.1] {
        let k = clamp_lipschitz(gamma);
        for n in [(12.0 / gamma).ceil() as usize, (13.0 / gamma).ceil() as usize, (26.0 / gamma).ceil() as usize] {
            match jackson_approx(&clamp_target(gamma), n, k) {
                Ok(j) => ok &= j.grid_error <= 6.0 * k / n as f64,
                Err(_) => ok = false,
            }
        }
        let c = amp_small_to_const(gamma).map_err(|e| e.to_string())?;
        ok &= c.grid.pass && c.degree as f64 <= 26.0 / gamma;
        notes.push(format!("gamma {gamma}: degree {} (13/gamma = {:.0}, 26/gamma = {:.0})", c.degree, 13.0 / gamma, 26.0 / gamma));
    }
    ensure(ok, notes.join("; "))
}

fn run_suite() -> Result<String, String> {
    let function = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/functions/xor2.json");
    let out = Command::new(env!("CARGO_BIN_EXE_forecastq"))
        .args(["suite", "--function", function, "--seed", "11"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("suite exited with {}", out.status));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok(text.lines().filter(|l| !l.contains("started_unix_ms") && !l.contains("elapsed_ms")).collect::<Vec<_>>().join("\n"))
}

fn criterion_11() -> Check {
    let a = run_suite()?;
    let b = run_suite()?;
    ensure(a == b, format!("two suite runs on XOR2, {} bytes each after dropping wall-clock lines", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("score/distance equivalence", criterion_1),
        ("distance inequality chain", criterion_2),
        ("linear amplification identity", criterion_3),
        ("conversion bounds", criterion_4),
        ("hard-distribution solver", criterion_5),
        ("shaltiel-free bound at desk scale", criterion_6),
        ("average vs worst case at desk scale", criterion_7),
        ("odometer amplifier", criterion_8),
        ("majority polynomial", criterion_9),
        ("Jackson bound", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
