use forecastq::amplify::{amp_bounds, amplified_tree, bias_to_forecast, combine, conversion_score_floor, forecast_to_bias};
use forecastq::rational::{rat, to_f64};
use forecastq::trees::{cost, score, worst_bias, worst_score};
use forecastq::{ForecastTree, InputDistribution, PartialFunction, RandomizedForecastTree, Rational, ScoringRule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn random_tree(rng: &mut ChaCha8Rng, n: usize, depth: usize, boolean: bool) -> ForecastTree {
    if depth == n || rng.random_bool(0.3) {
        return if boolean {
            ForecastTree::constant(rng.random_bool(0.5))
        } else {
            ForecastTree::leaf(rat(rng.random_range(1..20), 20))
        };
    }
    let children = (0..2).map(|_| random_tree(rng, n, depth + 1, boolean)).collect();
    ForecastTree::Query { index: depth, children }
}

fn random_randomized(seed: u64, n: usize, boolean: bool) -> RandomizedForecastTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=3);
    let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..10)).collect();
    let total: i64 = weights.iter().sum();
    let support = weights.iter().map(|&w| (rat(w, total), random_tree(&mut rng, n, 0, boolean))).collect();
    RandomizedForecastTree::new(support).unwrap()
}

fn functions() -> Vec<PartialFunction> {
    vec![PartialFunction::xor(2), PartialFunction::and(2), PartialFunction::or(2), PartialFunction::trivial(1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amplified_score_is_one_minus_power(seed in any::<u64>(), k in prop::sample::select(vec![1usize, 2, 3, 5])) {
        for f in functions() {
            let r = random_randomized(seed, f.n(), false);
            let amp = amplified_tree(&r, k).unwrap();
            for i in 0..f.len() {
                let s = r.score_on(f.input(i), f.value(i), ScoringRule::Hs).unwrap().to_f64();
                let a = amp.hs_score_on(f.input(i), f.value(i)).unwrap().to_f64();
                let expected = 1.0 - (1.0 - s).powi(k as i32);
                prop_assert!((a - expected).abs() <= 1e-10 * expected.abs().max(1.0), "k={k}: {a} vs {expected}");
            }
        }
    }

    #[test]
    fn hs_score_never_exceeds_bias(seed in any::<u64>()) {
        for f in functions() {
            let r = random_randomized(seed, f.n(), false);
            let as_bias = forecast_to_bias(&r);
            for i in 0..f.len() {
                let s = r.score_on(f.input(i), f.value(i), ScoringRule::Hs).unwrap().to_f64();
                let b = to_f64(&as_bias.bias_on(f.input(i), f.value(i)).unwrap());
                prop_assert!(b >= s - 1e-12);
            }
        }
    }

    #[test]
    fn conversion_meets_score_floor(seed in any::<u64>()) {
        for f in functions() {
            let r = random_randomized(seed, f.n(), true);
            let gamma = worst_bias(&r, &f).unwrap();
            if gamma <= Rational::from_integer(0.into()) {
                continue;
            }
            let forecast = bias_to_forecast(&r, &gamma).unwrap();
            let s = worst_score(&forecast, &f, ScoringRule::Hs).unwrap().to_f64();
            prop_assert!(s >= conversion_score_floor(to_f64(&gamma)) - 1e-12);
        }
    }

    #[test]
    fn cost_and_score_are_linear_in_the_mixture(a in any::<u64>(), b in any::<u64>(), num in 0i64..=10) {
        let f = Arc::new(PartialFunction::xor(2));
        let mu = InputDistribution::uniform(f.clone());
        let (ra, rb) = (random_randomized(a, 2, false), random_randomized(b, 2, false));
        let lambda = rat(num, 10);
        let mix = RandomizedForecastTree::mixture(&ra, &rb, &lambda).unwrap();
        let one = rat(1, 1);
        let c = cost(&ra, &mu).unwrap() * &lambda + cost(&rb, &mu).unwrap() * (&one - &lambda);
        prop_assert_eq!(cost(&mix, &mu).unwrap(), c);
        let l = to_f64(&lambda);
        let s = l * score(&ra, &mu, ScoringRule::Hs).unwrap().to_f64()
            + (1.0 - l) * score(&rb, &mu, ScoringRule::Hs).unwrap().to_f64();
        prop_assert!((score(&mix, &mu, ScoringRule::Hs).unwrap().to_f64() - s).abs() < 1e-12);
    }

    #[test]
    fn combine_is_symmetric(ps in prop::collection::vec(0.01f64..0.99, 1..6), rot in 0usize..6) {
        let mut shuffled = ps.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        prop_assert!((combine(&ps).unwrap() - combine(&shuffled).unwrap()).abs() < 1e-12);
        let flipped: Vec<f64> = ps.iter().map(|p| 1.0 - p).collect();
        prop_assert!((combine(&ps).unwrap() + combine(&flipped).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amp_bounds_sandwich(x in 0.0f64..=1.0, k in 1.0f64..50.0) {
        let b = amp_bounds(x, k).unwrap();
        prop_assert!(b.lower <= b.value + 1e-15 && b.value <= b.upper + 1e-15);
    }
}

#[test]
fn combining_with_an_even_forecast_changes_nothing() {
    assert!((combine(&[0.3, 0.5]).unwrap() - 0.3).abs() < 1e-15);
}
