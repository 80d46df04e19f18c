//! Univariate amplification polynomials: Jackson approximation of
//! Lipschitz targets, a small-bias to constant-bias map, and the majority
//! polynomial taking constant bias to small error.
//!
//! Polynomials are stored in the Chebyshev basis. The monomial coefficients
//! of degree ~100 polynomials bounded on `[−1, 1]` run into the 10⁴⁰ range
//! and cancel catastrophically, while Chebyshev coefficients stay small.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{int, rat, to_f64, Rational};

pub const GRID_POINTS: usize = 10_000;
pub const GRID_SLACK: f64 = 1e-9;
/// Jackson's constant: `|p − α| ≤ 6·ω(1/n)`.
pub const JACKSON_CONSTANT: f64 = 6.0;
/// Target degree of the small-bias map, in units of `1/γ`.
pub const SMALL_TO_CONST_DEGREE: f64 = 13.0;
/// Fallback degree allowance of the small-bias map, in units of `1/γ`.
pub const SMALL_TO_CONST_RELAXED_DEGREE: f64 = 26.0;
/// Degree allowance of the majority polynomial, in units of `log₂(1/ε)`.
pub const MAJORITY_DEGREE_FACTOR: f64 = 17.0;
/// Sample count for Chebyshev coefficients of non-polynomial targets.
const QUADRATURE_NODES: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePolynomial {
    chebyshev: Vec<f64>,
}

impl UnivariatePolynomial {
    /// From coefficients of `T_0, T_1, …`. Trailing zeros are dropped.
    pub fn from_chebyshev(mut coefficients: Vec<f64>) -> Self {
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        UnivariatePolynomial { chebyshev: coefficients }
    }

    /// From monomial coefficients, low degree first.
    pub fn from_monomial(coefficients: &[f64]) -> Self {
        // Horner in the Chebyshev basis: p ← x·p + a_j, with x·T_k = (T_{k+1} + T_{|k−1|})/2.
        let mut acc: Vec<f64> = vec![0.0];
        for &a in coefficients.iter().rev() {
            acc = times_x(&acc);
            acc[0] += a;
        }
        Self::from_chebyshev(acc)
    }

    pub fn chebyshev_coefficients(&self) -> &[f64] {
        &self.chebyshev
    }

    /// Monomial coefficients, low degree first. Ill-conditioned at high
    /// degree; prefer [`Self::eval`] for evaluation.
    pub fn monomial_coefficients(&self) -> Vec<f64> {
        let d = self.chebyshev.len();
        let mut out = vec![0.0; d];
        // T_0 = 1, T_1 = x, T_{k+1} = 2x·T_k − T_{k−1}.
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        for (k, &c) in self.chebyshev.iter().enumerate() {
            let t = match k {
                0 => &prev,
                _ => &cur,
            };
            for (j, &v) in t.iter().enumerate() {
                out[j] += c * v;
            }
            if k >= 1 {
                let mut next = vec![0.0; cur.len() + 1];
                for (j, &v) in cur.iter().enumerate() {
                    next[j + 1] += 2.0 * v;
                }
                for (j, &v) in prev.iter().enumerate() {
                    next[j] -= v;
                }
                prev = std::mem::replace(&mut cur, next);
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.chebyshev.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.chebyshev.iter().skip(1).rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.chebyshev[0] + x * b1 - b2
    }

    /// Drops the even-degree terms, i.e. `(p(x) − p(−x))/2`.
    pub fn odd_part(&self) -> Self {
        let c = self.chebyshev.iter().enumerate().map(|(k, &c)| if k % 2 == 1 { c } else { 0.0 }).collect();
        Self::from_chebyshev(c)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "degree": self.degree(),
            "basis": "chebyshev",
            "chebyshev": self.chebyshev,
            "coefficients": self.monomial_coefficients(),
        })
    }
}

fn times_x(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        if k == 0 {
            out[1] += c;
        } else {
            out[k + 1] += c / 2.0;
            out[k - 1] += c / 2.0;
        }
    }
    out
}

/// Evaluates `p` at `x`.
pub fn eval_poly(p: &UnivariatePolynomial, x: f64) -> f64 {
    p.eval(x)
}

/// `GRID_POINTS` evenly spaced points of `[−1, 1]`, endpoints included.
pub fn grid() -> Vec<f64> {
    (0..GRID_POINTS).map(|i| -1.0 + 2.0 * i as f64 / (GRID_POINTS - 1) as f64).collect()
}

fn grid_max_error(p: &UnivariatePolynomial, target: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    grid().par_iter().map(|&x| (p.eval(x) - target(x)).abs()).reduce(|| 0.0, f64::max)
}

/// Chebyshev coefficients `c_0..=c_n` of `target` by Gauss–Chebyshev quadrature.
fn chebyshev_series(target: &(dyn Fn(f64) -> f64 + Sync), n: usize) -> Vec<f64> {
    let m = QUADRATURE_NODES.max(4 * (n + 1));
    let theta: Vec<f64> = (0..m).map(|j| PI * (j as f64 + 0.5) / m as f64).collect();
    let values: Vec<f64> = theta.iter().map(|&t| target(t.cos())).collect();
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let s: f64 = theta.iter().zip(&values).map(|(t, v)| v * (k as f64 * t).cos()).sum();
            let c = 2.0 * s / m as f64;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

/// Jackson damping factors for a degree-`n` series.
fn jackson_factors(n: usize) -> Vec<f64> {
    let big_n = (n + 1) as f64;
    let a = PI / (big_n + 1.0);
    (0..=n)
        .map(|k| {
            let k = k as f64;
            ((big_n - k + 1.0) * (a * k).cos() + (a * k).sin() / a.tan()) / (big_n + 1.0)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacksonApprox {
    pub polynomial: UnivariatePolynomial,
    pub grid_error: f64,
    /// `6K/n`.
    pub bound: f64,
}

/// Degree-`n` Jackson-kernel approximation of a `K`-Lipschitz target on
/// `[−1, 1]`, checked against `6K/n` on the grid.
pub fn jackson_approx(
    target: &(dyn Fn(f64) -> f64 + Sync),
    n: usize,
    lipschitz: f64,
) -> Result<JacksonApprox> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if !(lipschitz >= 0.0) {
        return Err(Error::InvalidArgument(format!("Lipschitz constant {lipschitz} must be nonnegative")));
    }
    let series = chebyshev_series(target, n);
    let damped = series.iter().zip(jackson_factors(n)).map(|(c, g)| c * g).collect();
    let polynomial = UnivariatePolynomial::from_chebyshev(damped);
    let grid_error = grid_max_error(&polynomial, target);
    let bound = JACKSON_CONSTANT * lipschitz / n as f64;
    if grid_error > bound + GRID_SLACK {
        return Err(Error::Construction(format!(
            "Jackson approximation of degree {n} has grid error {grid_error}, above 6K/n = {bound}"
        )));
    }
    Ok(JacksonApprox { polynomial, grid_error, bound })
}

/// `2/3` beyond `±γ` and linear in between; `K = 2/(3γ)`.
pub fn clamp_target(gamma: f64) -> impl Fn(f64) -> f64 + Sync {
    move |x: f64| (2.0 * x / (3.0 * gamma)).clamp(-2.0 / 3.0, 2.0 / 3.0)
}

pub fn clamp_lipschitz(gamma: f64) -> f64 {
    2.0 / (3.0 * gamma)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalCheck {
    pub domain: [f64; 2],
    pub range: [f64; 2],
    pub min: f64,
    pub max: f64,
    pub pass: bool,
}

/// Grid verification of interval-mapping claims.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub points: usize,
    pub slack: f64,
    pub checks: Vec<IntervalCheck>,
    pub pass: bool,
}

/// Checks `p(domain) ⊆ range` on the grid points inside each domain,
/// with [`GRID_SLACK`]. Domain endpoints are always included.
pub fn check_intervals(p: &UnivariatePolynomial, claims: &[([f64; 2], [f64; 2])]) -> GridReport {
    let xs = grid();
    let checks: Vec<IntervalCheck> = claims
        .iter()
        .map(|&(domain, range)| {
            let mut pts: Vec<f64> = xs.iter().copied().filter(|x| *x >= domain[0] && *x <= domain[1]).collect();
            pts.extend(domain);
            let (min, max) = pts
                .par_iter()
                .map(|&x| {
                    let y = p.eval(x);
                    (y, y)
                })
                .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
            let pass = min >= range[0] - GRID_SLACK && max <= range[1] + GRID_SLACK;
            IntervalCheck { domain, range, min, max, pass }
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    GridReport { points: xs.len(), slack: GRID_SLACK, checks, pass }
}

/// A polynomial construction with its degree accounting and grid report.
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub polynomial: UnivariatePolynomial,
    pub degree: usize,
    pub degree_bound: f64,
    pub details: Value,
    pub grid: GridReport,
}

impl Construction {
    pub fn to_json_value(&self) -> Value {
        json!({
            "polynomial": self.polynomial.to_json_value(),
            "degree": self.degree,
            "degree_bound": self.degree_bound,
            "details": self.details,
            "grid": self.grid,
        })
    }
}

/// Odd polynomial bounded by 1 on `[−1, 1]` that maps `[γ, 1]` into
/// `[1/3, 1]` and `[−1, −γ]` into `[−1, −1/3]`.
///
/// Starts from the degree at which `6K/n ≤ 1/3` for the clamp target and
/// raises it until the grid check passes, failing beyond `26/γ`.
pub fn amp_small_to_const(gamma: f64) -> Result<Construction> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("γ = {gamma} must lie in (0, 1)")));
    }
    let target = clamp_target(gamma);
    let k = clamp_lipschitz(gamma);
    let claims = [([-1.0, 1.0], [-1.0, 1.0]), ([gamma, 1.0], [1.0 / 3.0, 1.0]), ([-1.0, -gamma], [-1.0, -1.0 / 3.0])];
    let cap = (SMALL_TO_CONST_RELAXED_DEGREE / gamma).floor() as usize;
    let mut n = (3.0 * JACKSON_CONSTANT * k).ceil() as usize;
    let mut last_error = f64::NAN;
    while n <= cap {
        let series = chebyshev_series(&target, n);
        let damped = series.iter().zip(jackson_factors(n)).map(|(c, g)| c * g).collect();
        let polynomial = UnivariatePolynomial::from_chebyshev(damped).odd_part();
        let grid = check_intervals(&polynomial, &claims);
        last_error = grid_max_error(&polynomial, &target);
        if grid.pass {
            let degree = polynomial.degree();
            return Ok(Construction {
                polynomial,
                degree,
                degree_bound: SMALL_TO_CONST_DEGREE / gamma,
                details: json!({
                    "gamma": gamma,
                    "jackson_degree": n,
                    "approximation_error": last_error,
                    "within_degree_bound": degree as f64 <= (SMALL_TO_CONST_DEGREE / gamma).ceil(),
                    "relaxed_degree_bound": SMALL_TO_CONST_RELAXED_DEGREE / gamma,
                }),
                grid,
            });
        }
        n += 1;
    }
    Err(Error::Construction(format!(
        "no degree up to {cap} passed the grid check for γ = {gamma}; last approximation error {last_error}"
    )))
}

/// `k = ⌈ln(1/ε)/ln(9/8)⌉`.
pub fn majority_k(eps: f64) -> usize {
    ((1.0 / eps).ln() / (9.0f64 / 8.0).ln()).ceil().max(1.0) as usize
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// `q(x) = Σ_{i≤k} C(2k+1, i)·((1+x)/2)^i·((1−x)/2)^{2k+1−i}`: the probability
/// that fewer than half of `2k+1` coins with heads probability `(1+x)/2`
/// come up heads.
pub fn majority_q_exact(k: usize, x: &Rational) -> Rational {
    let heads = (Rational::one() + x) / int(2);
    let tails = (Rational::one() - x) / int(2);
    let m = 2 * k + 1;
    (0..=k)
        .map(|i| Rational::from_integer(binomial(m, i)) * pow(&heads, i) * pow(&tails, m - i))
        .sum()
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// Exact monomial coefficients of `q`, low degree first.
fn majority_q_monomial(k: usize) -> Vec<Rational> {
    let m = 2 * k + 1;
    // (1+x)^i (1−x)^{m−i} by repeated multiplication.
    let mul = |p: &[Rational], sign: i64| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); p.len() + 1];
        for (j, c) in p.iter().enumerate() {
            out[j] += c;
            out[j + 1] += c * int(sign);
        }
        out
    };
    let mut total = vec![Rational::zero(); m + 1];
    for i in 0..=k {
        let mut p = vec![Rational::one()];
        for _ in 0..i {
            p = mul(&p, 1);
        }
        for _ in 0..m - i {
            p = mul(&p, -1);
        }
        let c = Rational::from_integer(binomial(m, i));
        for (j, a) in p.into_iter().enumerate() {
            total[j] += &c * a;
        }
    }
    let scale = Rational::from_integer(BigInt::one() << m);
    total.into_iter().map(|a| a / &scale).collect()
}

/// Exact conversion to the Chebyshev basis, then rounding.
fn exact_to_chebyshev(monomial: &[Rational]) -> Vec<f64> {
    let mut acc = vec![Rational::zero()];
    for a in monomial.iter().rev() {
        let mut out = vec![Rational::zero(); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            if k == 0 {
                out[1] += c;
            } else {
                let half = c / int(2);
                out[k + 1] += &half;
                out[k - 1] += half;
            }
        }
        out[0] += a;
        acc = out;
    }
    acc.iter().map(to_f64).collect()
}

/// The majority polynomial `q` of `2k+1` coins, in floating point.
pub fn majority_q(k: usize) -> UnivariatePolynomial {
    UnivariatePolynomial::from_chebyshev(exact_to_chebyshev(&majority_q_monomial(k)))
}

/// `p = 1 − 2q`: odd, degree `2k+1`, maps `[1/3, 1]` into `[1 − ε, 1]`.
pub fn amp_const_to_small(eps: f64) -> Result<Construction> {
    if !(eps > 0.0 && eps < 2.0 / 3.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must lie in (0, 2/3)")));
    }
    let k = majority_k(eps);
    let q = majority_q_monomial(k);
    let p: Vec<Rational> = q
        .iter()
        .enumerate()
        .map(|(j, c)| if j == 0 { Rational::one() - c * int(2) } else { -(c * int(2)) })
        .collect();
    let polynomial = UnivariatePolynomial::from_chebyshev(exact_to_chebyshev(&p));
    let claims = [
        ([-1.0, 1.0], [-1.0, 1.0]),
        ([1.0 / 3.0, 1.0], [1.0 - eps, 1.0]),
        ([-1.0, -1.0 / 3.0], [-1.0, -1.0 + eps]),
    ];
    let grid = check_intervals(&polynomial, &claims);
    let tail = majority_tail(k);
    Ok(Construction {
        degree: polynomial.degree(),
        degree_bound: MAJORITY_DEGREE_FACTOR * (1.0 / eps).log2(),
        details: json!({
            "eps": eps,
            "k": k,
            "q_at_third": to_f64(&tail.q),
            "tail_bound": to_f64(&tail.bound),
            "tail_bound_holds": tail.pass,
        }),
        polynomial,
        grid,
    })
}

/// Exact comparison `q(1/3) ≤ (1/3)(8/9)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorityTail {
    pub k: usize,
    pub q: Rational,
    pub bound: Rational,
    pub pass: bool,
}

pub fn majority_tail(k: usize) -> MajorityTail {
    let q = majority_q_exact(k, &rat(1, 3));
    let bound = rat(1, 3) * pow(&rat(8, 9), k);
    let pass = q <= bound;
    MajorityTail { k, q, bound, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let p = UnivariatePolynomial::from_monomial(&[0.0, 1.0]);
        assert_eq!(eval_poly(&p, 0.3), 0.3);
        let one = UnivariatePolynomial::from_monomial(&[1.0]);
        assert_eq!(eval_poly(&one, -0.7), 1.0);
        assert_eq!(one.degree(), 0);
        let cubic = UnivariatePolynomial::from_monomial(&[1.0, -2.0, 0.0, 4.0]);
        assert_eq!(cubic.degree(), 3);
        for (a, b) in cubic.monomial_coefficients().iter().zip([1.0, -2.0, 0.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((cubic.eval(0.5) - (1.0 - 1.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn jackson_examples() {
        let c = jackson_approx(&|_| 0.4, 5, 0.0).unwrap();
        assert!(c.grid_error < 1e-12);
        let gamma = 0.2;
        let j = jackson_approx(&clamp_target(gamma), 60, clamp_lipschitz(gamma)).unwrap();
        assert!(j.grid_error <= 1.0 / 3.0);
        assert!((j.bound - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_to_const_examples() {
        let c = amp_small_to_const(0.9).unwrap();
        assert!(c.grid.pass);
        for x in grid() {
            assert!((c.polynomial.eval(-x) + c.polynomial.eval(x)).abs() < 1e-12);
        }
        let c = amp_small_to_const(0.2).unwrap();
        assert!(c.degree <= 65, "degree {}", c.degree);
    }

    #[test]
    fn majority_examples() {
        let t = majority_tail(1);
        assert_eq!(t.q, rat(7, 27));
        assert_eq!(t.bound, rat(8, 27));
        assert!(t.pass);
        assert_eq!(majority_k(0.01), 40);
        let c = amp_const_to_small(0.01).unwrap();
        assert_eq!(c.degree, 81);
        assert!((c.degree as f64) <= c.degree_bound);
        assert!(c.grid.pass);
        for k in 1..6 {
            let q = majority_q(k);
            assert!((q.eval(1.0)).abs() < 1e-12);
            assert!((q.eval(-1.0) - 1.0).abs() < 1e-12);
        }
        let p = amp_const_to_small(1.0 / 3.0).unwrap();
        assert!(p.polynomial.eval(1.0 / 3.0) >= 2.0 / 3.0);
    }
}
