use forecastq::distances::distance_relations;
use forecastq::{distance, max_score, FinitePair, Measure, ScoringRule};
use proptest::prelude::*;

const MEASURES: [Measure; 4] = [Measure::Tv, Measure::H2, Measure::Chi2s, Measure::Js];

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn pair_strategy() -> impl Strategy<Value = FinitePair> {
    (1usize..=6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.0f64..1.0, n),
                prop::collection::vec(0.0f64..1.0, n),
                0.0f64..=1.0,
            )
        })
        .prop_filter("nonzero", |(a, b, _)| a.iter().sum::<f64>() > 1e-3 && b.iter().sum::<f64>() > 1e-3)
        .prop_map(|(a, b, w)| FinitePair::unlabeled(normalize(a), normalize(b), w).unwrap())
}

/// Per-point brute force over forecasts `q = i/steps`, refined once, written against the
/// scoring rule's closed form rather than the library.
fn grid_max_score(pair: &FinitePair, rule: ScoringRule, steps: usize) -> f64 {
    let s1 = |q: f64| -> f64 {
        match rule {
            ScoringRule::Hs => 1.0 - ((1.0 - q) / q).sqrt(),
            ScoringRule::Brier => 1.0 - 4.0 * (1.0 - q).powi(2),
            ScoringRule::Bias => 1.0 - 2.0 * (1.0 - q),
            ScoringRule::Ls => 1.0 + q.log2(),
        }
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
                (0..=steps)
                    .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
                    .map(|q| (value(q), q))
                    .filter(|(v, _)| v.is_finite())
                    .fold((f64::NEG_INFINITY, 0.5), |acc, c| if c.0 > acc.0 { c } else { acc })
            };
            // A second pass inside the winning cell resolves the steep ends of hs and ls.
            let (coarse, q) = search(0.0, 1.0);
            let h = 1.0 / steps as f64;
            coarse.max(search((q - h).max(0.0), (q + h).min(1.0)).0)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn max_score_is_the_matching_distance(pair in pair_strategy()) {
        for m in MEASURES {
            let d = distance(&pair, m);
            let s = max_score(&pair, m.matching_rule());
            prop_assert!((d - s).abs() <= 1e-9, "{m}: {d} vs {s}");
        }
    }

    #[test]
    fn max_score_matches_grid_search(pair in pair_strategy()) {
        for m in MEASURES {
            let s = max_score(&pair, m.matching_rule());
            let g = grid_max_score(&pair, m.matching_rule(), 10_000);
            prop_assert!(g <= s + 1e-9);
            prop_assert!(s - g <= 1e-6, "{m}: {s} vs grid {g}");
        }
    }

    #[test]
    fn eight_relations_hold(pair in pair_strategy()) {
        for r in distance_relations(&pair) {
            prop_assert!(r.holds(1e-12), "{}: {} > {}", r.name, r.lhs, r.rhs);
        }
    }

    #[test]
    fn distances_are_symmetric_under_relabelling(pair in pair_strategy()) {
        let swapped = FinitePair::unlabeled(pair.nu1().to_vec(), pair.nu0().to_vec(), 1.0 - pair.w()).unwrap();
        for m in MEASURES {
            prop_assert!((distance(&pair, m) - distance(&swapped, m)).abs() < 1e-12);
        }
    }

    #[test]
    fn distances_lie_in_unit_interval(pair in pair_strategy()) {
        for m in MEASURES {
            let d = distance(&pair, m);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d));
        }
    }

    #[test]
    fn proper_rules_reward_honesty(p in 0.01f64..0.99, q in 0.01f64..0.99) {
        for rule in [ScoringRule::Hs, ScoringRule::Brier, ScoringRule::Ls] {
            prop_assert!(rule.expected(p, p).to_f64() >= rule.expected(p, q).to_f64() - 1e-12);
        }
    }
}

#[test]
fn disjoint_supports_are_at_distance_one() {
    let pair = FinitePair::unlabeled(vec![1.0, 0.0], vec![0.0, 1.0], 0.5).unwrap();
    for m in MEASURES {
        assert!((distance(&pair, m) - 1.0).abs() < 1e-12, "{m}");
    }
}
