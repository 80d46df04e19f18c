//! Domain types shared by every other module: partial Boolean functions on
//! `Σⁿ`, exact input distributions over their domains, and extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rat, rationalize, to_f64, Rational, RationalJson};

/// A Boolean-valued function on a finite subset of `Σⁿ`.
///
/// The domain is kept sorted lexicographically so that distribution vectors
/// have a stable index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialFunction {
    n: usize,
    alphabet: usize,
    domain: Vec<Vec<u8>>,
    values: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    n: usize,
    alphabet: usize,
    domain: Vec<String>,
    values: Vec<u8>,
}

impl PartialFunction {
    /// Builds a function from `(input, value)` pairs, sorting the domain.
    pub fn new(n: usize, alphabet: usize, entries: Vec<(Vec<u8>, bool)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidFunction("n must be positive".into()));
        }
        if !(2..=36).contains(&alphabet) {
            return Err(Error::InvalidFunction(format!(
                "alphabet size {alphabet} outside [2, 36]"
            )));
        }
        if entries.is_empty() {
            return Err(Error::InvalidFunction("empty domain".into()));
        }
        let mut entries = entries;
        for (x, _) in &entries {
            if x.len() != n {
                return Err(Error::InvalidFunction(format!(
                    "input {} has length {}, expected {n}",
                    render_input(x),
                    x.len()
                )));
            }
            if let Some(&s) = x.iter().find(|&&s| s as usize >= alphabet) {
                return Err(Error::InvalidFunction(format!(
                    "symbol {s} outside alphabet of size {alphabet}"
                )));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidFunction(format!(
                "duplicate domain string {}",
                render_input(&w[0].0)
            )));
        }
        let (domain, values) = entries.into_iter().unzip();
        Ok(PartialFunction {
            n,
            alphabet,
            domain,
            values,
        })
    }

    /// Total function on `Σⁿ` given by a predicate.
    pub fn total(n: usize, alphabet: usize, f: impl Fn(&[u8]) -> bool) -> Result<Self> {
        let entries = all_strings(n, alphabet)
            .into_iter()
            .map(|x| {
                let v = f(&x);
                (x, v)
            })
            .collect();
        Self::new(n, alphabet, entries)
    }

    pub fn xor(n: usize) -> Self {
        Self::total(n, 2, |x| x.iter().filter(|&&b| b == 1).count() % 2 == 1).unwrap()
    }

    pub fn and(n: usize) -> Self {
        Self::total(n, 2, |x| x.iter().all(|&b| b == 1)).unwrap()
    }

    pub fn or(n: usize) -> Self {
        Self::total(n, 2, |x| x.iter().any(|&b| b == 1)).unwrap()
    }

    pub fn majority(n: usize) -> Self {
        Self::total(n, 2, |x| 2 * x.iter().filter(|&&b| b == 1).count() > n).unwrap()
    }

    /// The promise function on `{0ⁿ, 1ⁿ}` returning the shared bit.
    pub fn trivial(n: usize) -> Self {
        Self::new(n, 2, vec![(vec![0; n], false), (vec![1; n], true)]).unwrap()
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self::total(n, 2, |_| value).unwrap()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: FunctionJson = serde_json::from_str(text)?;
        if raw.domain.len() != raw.values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} domain strings but {} values",
                raw.domain.len(),
                raw.values.len()
            )));
        }
        let mut entries = Vec::with_capacity(raw.domain.len());
        for (s, &v) in raw.domain.iter().zip(&raw.values) {
            let x = parse_input(s)?;
            let v = match v {
                0 => false,
                1 => true,
                other => {
                    return Err(Error::InvalidFunction(format!(
                        "value {other} outside {{0,1}}"
                    )))
                }
            };
            entries.push((x, v));
        }
        Self::new(raw.n, raw.alphabet, entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FunctionJson {
            n: self.n,
            alphabet: self.alphabet,
            domain: self.domain.iter().map(|x| render_input(x)).collect(),
            values: self.values.iter().map(|&v| v as u8).collect(),
        })
        .expect("function serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn domain(&self) -> &[Vec<u8>] {
        &self.domain
    }

    pub fn input(&self, i: usize) -> &[u8] {
        &self.domain[i]
    }

    pub fn value(&self, i: usize) -> bool {
        self.values[i]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn index_of(&self, x: &[u8]) -> Option<usize> {
        self.domain.binary_search_by(|d| d.as_slice().cmp(x)).ok()
    }

    /// Indices of the inputs mapped to `value`.
    pub fn class(&self, value: bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.values[i] == value).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

impl fmt::Display for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .domain
            .iter()
            .zip(&self.values)
            .map(|(x, &v)| format!("{}:{}", render_input(x), v as u8))
            .collect();
        write!(f, "f[n={}, |Σ|={}]{{{}}}", self.n, self.alphabet, body.join(" "))
    }
}

/// Symbols are written as base-36 digits.
pub fn render_input(x: &[u8]) -> String {
    x.iter()
        .map(|&s| std::char::from_digit(s as u32, 36).unwrap_or('?'))
        .collect()
}

pub fn parse_input(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as u8)
                .ok_or_else(|| Error::InvalidFunction(format!("bad symbol {c:?} in {s:?}")))
        })
        .collect()
}

/// Every string of `Σⁿ` in lexicographic order.
pub fn all_strings(n: usize, alphabet: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..alphabet as u8).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

/// A probability vector over `Dom(f)` with exact rational weights.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDistribution {
    function: Arc<PartialFunction>,
    weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    weights: Vec<RationalJson>,
}

/// Result of [`InputDistribution::balance`]: `μ(f⁻¹(1)) − 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Balance {
    pub balanced: bool,
    pub imbalance: Rational,
}

impl InputDistribution {
    pub fn new(function: Arc<PartialFunction>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != function.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for a domain of size {}",
                weights.len(),
                function.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(InputDistribution { function, weights })
    }

    /// Scales nonnegative weights to sum to exactly one.
    pub fn normalized(function: Arc<PartialFunction>, weights: Vec<Rational>) -> Result<Self> {
        let total: Rational = weights.iter().sum();
        if !total.is_positive() {
            return Err(Error::InvalidDistribution("total weight is zero".into()));
        }
        let weights = weights.into_iter().map(|w| w / &total).collect();
        Self::new(function, weights)
    }

    pub fn uniform(function: Arc<PartialFunction>) -> Self {
        let m = function.len() as i64;
        let weights = vec![rat(1, m); function.len()];
        InputDistribution { function, weights }
    }

    pub fn point_mass(function: Arc<PartialFunction>, index: usize) -> Self {
        let mut weights = vec![Rational::zero(); function.len()];
        weights[index] = Rational::one();
        InputDistribution { function, weights }
    }

    /// Rationalizes each double by continued fractions (denominator at most
    /// `max_den`), then renormalizes exactly.
    pub fn from_f64(function: Arc<PartialFunction>, weights: &[f64], max_den: u64) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("bad weight {w}")));
        }
        let weights = weights.iter().map(|&w| rationalize(w, max_den)).collect();
        Self::normalized(function, weights)
    }

    pub fn parse(function: Arc<PartialFunction>, text: &str) -> Result<Self> {
        let raw: DistributionJson = serde_json::from_str(text)?;
        let weights = raw
            .weights
            .iter()
            .map(|w| w.to_rational())
            .collect::<Result<Vec<_>>>()?;
        Self::new(function, weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DistributionJson {
            weights: self.weights.iter().map(RationalJson::from).collect(),
        })
        .expect("distribution serializes")
    }

    pub fn function(&self) -> &Arc<PartialFunction> {
        &self.function
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    /// Total mass on inputs with `f(x) = value`.
    pub fn class_mass(&self, value: bool) -> Rational {
        self.function
            .class(value)
            .into_iter()
            .map(|i| &self.weights[i])
            .sum()
    }

    pub fn balance(&self) -> Balance {
        let imbalance = self.class_mass(true) - rat(1, 2);
        Balance {
            balanced: imbalance.is_zero(),
            imbalance,
        }
    }

    /// `μ` conditioned on `f(x) = value`.
    pub fn conditional(&self, value: bool) -> Result<Self> {
        let mass = self.class_mass(value);
        if mass.is_zero() {
            return Err(Error::InvalidDistribution(format!(
                "no mass on f⁻¹({})",
                value as u8
            )));
        }
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                if self.function.value(i) == value {
                    w / &mass
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(InputDistribution {
            function: Arc::clone(&self.function),
            weights,
        })
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Self, lambda: &Rational) -> Result<Self> {
        if self.function != other.function {
            return Err(Error::InvalidDistribution(
                "mixing distributions over different functions".into(),
            ));
        }
        let rest = Rational::one() - lambda;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a * lambda + b * &rest)
            .collect();
        Self::new(Arc::clone(&self.function), weights)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.weights.len()).filter(|&i| !self.weights[i].is_zero())
    }
}

/// `μ(f⁻¹(1)) − 1/2` and whether it vanishes.
pub fn is_balanced(mu: &InputDistribution) -> Balance {
    mu.balance()
}

/// A real number or `±∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// `p·self` for a probability `p`, with `0·(±∞) = 0`.
    pub fn weighted(self, p: f64) -> Self {
        if p == 0.0 {
            ExtendedReal::Finite(0.0)
        } else {
            match self {
                ExtendedReal::Finite(x) => ExtendedReal::Finite(p * x),
                inf => inf,
            }
        }
    }

    /// `Σ pᵢ·vᵢ` under the probability-zero convention.
    pub fn expectation(terms: impl IntoIterator<Item = (f64, ExtendedReal)>) -> Self {
        terms
            .into_iter()
            .fold(ExtendedReal::Finite(0.0), |acc, (p, v)| acc + v.weighted(p))
    }

    /// `max(self, 0)`.
    pub fn positive_part(self) -> Self {
        match self {
            ExtendedReal::Finite(x) if x > 0.0 => self,
            ExtendedReal::PosInf => self,
            _ => ExtendedReal::Finite(0.0),
        }
    }

    /// `numerator / self⁺` with `r/0 = +∞` for every `r ≥ 0` (including `0/0`).
    pub fn ratio_over_positive_part(numerator: f64, denominator: Self) -> Self {
        match denominator.positive_part() {
            ExtendedReal::PosInf => ExtendedReal::Finite(0.0),
            ExtendedReal::Finite(d) if d > 0.0 => ExtendedReal::Finite(numerator / d),
            _ => ExtendedReal::PosInf,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    /// Panics on `∞ + (−∞)`, which the extended reals leave undefined.
    fn add(self, rhs: Self) -> Self {
        use ExtendedReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => panic!("∞ − ∞ is undefined"),
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => f.write_str("-inf"),
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::NegInf => s.serialize_str("-inf"),
            ExtendedReal::PosInf => s.serialize_str("inf"),
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ExtendedReal::Finite(x)),
            Raw::Text(t) if t == "inf" => Ok(ExtendedReal::PosInf),
            Raw::Text(t) if t == "-inf" => Ok(ExtendedReal::NegInf),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad extended real {t:?}"))),
        }
    }
}
