use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use forecastq::lp::{solve, LinearProgram, Relation, Sense};
use forecastq::rational::rat;
use forecastq::solver::{best_response, solve_hard};
use forecastq::trees::{enumerate_boolean_trees, shape_profiles};
use forecastq::{distance, FinitePair, InputDistribution, Measure, PartialFunction};

fn enumeration(c: &mut Criterion) {
    c.bench_function("boolean trees n=2", |b| b.iter(|| enumerate_boolean_trees(2, 2).unwrap().count()));
    let maj3 = PartialFunction::majority(3);
    c.bench_function("shape profiles MAJ3", |b| b.iter(|| shape_profiles(black_box(&maj3), 3).unwrap().len()));
}

fn solver(c: &mut Criterion) {
    let f = Arc::new(PartialFunction::majority(3));
    let mu = InputDistribution::uniform(f.clone());
    c.bench_function("best response MAJ3", |b| b.iter(|| best_response(black_box(&mu)).unwrap().shape_index));
    let xor2 = Arc::new(PartialFunction::xor(2));
    c.bench_function("solve_hard XOR2", |b| b.iter(|| solve_hard(&xor2, 1e-6, 200).unwrap().lambda_star));
}

fn lp(c: &mut Criterion) {
    // A 6x6 assignment-style LP with small rational data.
    let n = 6;
    let mut program = LinearProgram::new(Sense::Maximize, (0..n * n).map(|i| rat((i * 7 % 11) as i64, 3)).collect());
    for r in 0..n {
        let row = (0..n * n).map(|i| rat(i64::from(i / n == r), 1)).collect();
        program.add(row, Relation::Le, rat(1, 1));
        let col = (0..n * n).map(|i| rat(i64::from(i % n == r), 1)).collect();
        program.add(col, Relation::Le, rat(1, 1));
    }
    c.bench_function("exact simplex 36 vars", |b| b.iter(|| solve(black_box(&program)).unwrap()));
}

fn distances(c: &mut Criterion) {
    let nu0: Vec<f64> = (1..=64).map(|i| i as f64 / 2080.0).collect();
    let nu1: Vec<f64> = (1..=64).rev().map(|i| i as f64 / 2080.0).collect();
    let pair = FinitePair::unlabeled(nu0, nu1, 0.3).unwrap();
    for m in [Measure::Tv, Measure::H2, Measure::Chi2s, Measure::Js] {
        c.bench_function(&format!("distance {m} support 64"), |b| b.iter(|| distance(black_box(&pair), m)));
    }
}

criterion_group!(benches, enumeration, solver, lp, distances);
criterion_main!(benches);
