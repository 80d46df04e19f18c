use forecastq::lp::{dual_objective, pareto_lower_envelope, solve, LinearProgram, Relation, Sense, Solution};
use forecastq::oracle::{det_complexity, distributional_depth, randomized_complexity};
use forecastq::rational::{int, rat};
use forecastq::{InputDistribution, PartialFunction, Rational};
use num_traits::Signed;
use proptest::prelude::*;
use std::sync::Arc;

/// Maximum of `c·x` over `{x ≥ 0, A x ≤ b}` in two variables, by checking
/// every intersection of two boundary lines.
fn vertex_oracle(c: &[Rational; 2], rows: &[([Rational; 2], Rational)]) -> Option<Rational> {
    let mut lines: Vec<([Rational; 2], Rational)> = rows.to_vec();
    lines.push(([int(1), int(0)], int(0)));
    lines.push(([int(0), int(1)], int(0)));
    let feasible = |x: &[Rational; 2]| {
        !x[0].is_negative() && !x[1].is_negative() && rows.iter().all(|(a, b)| &a[0] * &x[0] + &a[1] * &x[1] <= *b)
    };
    let mut best: Option<Rational> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, p) = &lines[i];
            let (b, q) = &lines[j];
            let det = &a[0] * &b[1] - &a[1] * &b[0];
            if det == int(0) {
                continue;
            }
            let x = [(p * &b[1] - q * &a[1]) / &det, (&a[0] * q - &b[0] * p) / &det];
            if feasible(&x) {
                let v = &c[0] * &x[0] + &c[1] * &x[1];
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

fn small() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(
        c in [small(), small()],
        rows in prop::collection::vec(([small(), small()], (0i64..=8).prop_map(int)), 1..5),
    ) {
        let mut lp = LinearProgram::new(Sense::Maximize, c.to_vec());
        for (a, b) in &rows {
            lp.add(a.to_vec(), Relation::Le, b.clone());
        }
        // A box keeps the region bounded.
        lp.add(vec![int(1), int(1)], Relation::Le, int(10));
        let mut all = rows.clone();
        all.push(([int(1), int(1)], int(10)));
        let expected = vertex_oracle(&c, &all).expect("origin is feasible");
        match solve(&lp).unwrap() {
            Solution::Optimal { value, primal, dual } => {
                prop_assert_eq!(&value, &expected);
                prop_assert!(lp.is_feasible_point(&primal));
                prop_assert_eq!(dual_objective(&lp, &dual), value);
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn infeasible_systems_come_with_certificates(
        a in [small(), small()],
        gap in 1i64..5,
    ) {
        // a·x ≤ 0 and a·x ≥ gap cannot both hold.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(0), int(0)]);
        lp.add(a.to_vec(), Relation::Le, int(0));
        lp.add(a.to_vec(), Relation::Ge, int(gap));
        match solve(&lp).unwrap() {
            Solution::Infeasible { farkas } => prop_assert!(lp.check_farkas(&farkas)),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn envelope_is_monotone_and_convex(points in prop::collection::vec((0i64..=10, 0i64..=20), 1..12)) {
        let pts: Vec<(Rational, Rational)> = points.iter().map(|&(b, c)| (rat(b, 10), int(c))).collect();
        let env = pareto_lower_envelope(&pts).unwrap();
        let values: Vec<Option<Rational>> = (0..=10).map(|g| env.eval(&rat(g, 10))).collect();
        for w in values.windows(2) {
            if let (Some(a), Some(b)) = (&w[0], &w[1]) {
                prop_assert!(a <= b);
            }
        }
        for w in values.windows(3) {
            if let (Some(a), Some(b), Some(c)) = (&w[0], &w[1], &w[2]) {
                prop_assert!(b * int(2) <= a + c);
            }
        }
        // Every input point lies on or above the envelope.
        for (b, c) in &pts {
            let v = env.eval(b).expect("points lie within the bias range");
            prop_assert!(v <= *c);
        }
    }
}

fn test_set() -> Vec<PartialFunction> {
    vec![
        PartialFunction::xor(2),
        PartialFunction::and(2),
        PartialFunction::or(2),
        PartialFunction::trivial(2),
        PartialFunction::xor(3),
        PartialFunction::majority(3),
        PartialFunction::and(3),
    ]
}

#[test]
fn complexities_are_sandwiched() {
    // Yao: every distributional complexity at error 1/3 is at most R(f) ≤ D(f).
    for f in test_set() {
        let f = Arc::new(f);
        let d = det_complexity(&f).unwrap();
        let r = randomized_complexity(&f).unwrap();
        assert!(r <= d, "{f}: R = {r} > D = {d}");
        let uniform = InputDistribution::uniform(f.clone());
        let dist = distributional_depth(&uniform, &rat(1, 3)).unwrap();
        assert!(dist <= r, "{f}: distributional {dist} > R = {r}");
    }
}

#[test]
fn known_complexities() {
    let expected = [(PartialFunction::xor(2), 2, 2), (PartialFunction::and(2), 2, 1), (PartialFunction::xor(3), 3, 3)];
    for (f, d, r) in expected {
        assert_eq!(det_complexity(&f).unwrap(), d, "{f}");
        assert_eq!(randomized_complexity(&f).unwrap(), r, "{f}");
    }
}
