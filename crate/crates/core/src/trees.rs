//! Deterministic and randomized forecasting decision trees.
//!
//! A deterministic tree queries input positions and ends in a leaf labelled
//! with a forecast `q ∈ [0, 1]` for `f(x) = 1`. A randomized tree is a finite
//! probability distribution over deterministic trees. Leaf labels are read
//! two ways: as forecasts scored by a [`ScoringRule`], and as Bernoulli(`q`)
//! outputs when measuring bias.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::distances::FinitePair;
use crate::error::{Error, Result};
use crate::foundation::{ExtendedReal, InputDistribution, PartialFunction};
use crate::rational::{int, to_f64, Rational, RationalJson};
use crate::scoring::ScoringRule;

/// Largest number of Boolean trees that enumeration will produce.
pub const ENUMERATION_LIMIT: u128 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ForecastTree {
    Leaf(Rational),
    Query { index: usize, children: Vec<ForecastTree> },
}

pub type DeterministicForecastTree = ForecastTree;

/// Outcome of running a deterministic tree on one input.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub prediction: Rational,
    pub depth: usize,
    pub path: Vec<(usize, u8)>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeJson {
    Leaf { leaf: RationalJson },
    Query { query: usize, children: Vec<NodeJson> },
}

impl NodeJson {
    fn to_tree(&self) -> Result<ForecastTree> {
        Ok(match self {
            NodeJson::Leaf { leaf } => ForecastTree::Leaf(leaf.to_rational()?),
            NodeJson::Query { query, children } => ForecastTree::Query {
                index: *query,
                children: children.iter().map(NodeJson::to_tree).collect::<Result<_>>()?,
            },
        })
    }

    fn from_tree(tree: &ForecastTree) -> Self {
        match tree {
            ForecastTree::Leaf(q) => NodeJson::Leaf { leaf: q.into() },
            ForecastTree::Query { index, children } => NodeJson::Query {
                query: *index,
                children: children.iter().map(NodeJson::from_tree).collect(),
            },
        }
    }
}

impl ForecastTree {
    pub fn leaf(q: Rational) -> Self {
        ForecastTree::Leaf(q)
    }

    pub fn constant(value: bool) -> Self {
        ForecastTree::Leaf(if value { Rational::one() } else { Rational::zero() })
    }

    /// The tree that queries every position in order and labels each leaf
    /// with `label(x)`.
    pub fn full(n: usize, alphabet: usize, label: impl Fn(&[u8]) -> Rational) -> Self {
        fn build(
            prefix: &mut Vec<u8>,
            n: usize,
            alphabet: usize,
            label: &dyn Fn(&[u8]) -> Rational,
        ) -> ForecastTree {
            if prefix.len() == n {
                return ForecastTree::Leaf(label(prefix));
            }
            let index = prefix.len();
            let children = (0..alphabet as u8)
                .map(|s| {
                    prefix.push(s);
                    let child = build(prefix, n, alphabet, label);
                    prefix.pop();
                    child
                })
                .collect();
            ForecastTree::Query { index, children }
        }
        build(&mut Vec::new(), n, alphabet, &label)
    }

    /// The full-depth tree that outputs `f(x)` exactly on the domain and
    /// `1/2` elsewhere.
    pub fn exact(f: &PartialFunction) -> Self {
        Self::full(f.n(), f.alphabet(), |x| match f.index_of(x) {
            Some(i) if f.value(i) => Rational::one(),
            Some(_) => Rational::zero(),
            None => Rational::new(1.into(), 2.into()),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: NodeJson = serde_json::from_str(text)?;
        raw.to_tree()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(NodeJson::from_tree(self)).expect("tree serializes")
    }

    /// Checks query indices, arity, label range and that no path repeats a query.
    pub fn validate(&self, n: usize, alphabet: usize) -> Result<()> {
        fn go(t: &ForecastTree, n: usize, alphabet: usize, used: &mut Vec<usize>) -> Result<()> {
            match t {
                ForecastTree::Leaf(q) => {
                    if q.is_negative() || *q > Rational::one() {
                        return Err(Error::InvalidTree(format!("leaf label {q} outside [0,1]")));
                    }
                    Ok(())
                }
                ForecastTree::Query { index, children } => {
                    if *index >= n {
                        return Err(Error::InvalidTree(format!("query index {index} >= n = {n}")));
                    }
                    if used.contains(index) {
                        return Err(Error::InvalidTree(format!("index {index} queried twice on a path")));
                    }
                    if children.len() != alphabet {
                        return Err(Error::InvalidTree(format!(
                            "query node has {} children, alphabet size is {alphabet}",
                            children.len()
                        )));
                    }
                    used.push(*index);
                    for c in children {
                        go(c, n, alphabet, used)?;
                    }
                    used.pop();
                    Ok(())
                }
            }
        }
        go(self, n, alphabet, &mut Vec::new())
    }

    pub fn run(&self, x: &[u8]) -> Result<RunResult> {
        let mut node = self;
        let mut path = Vec::new();
        loop {
            match node {
                ForecastTree::Leaf(q) => {
                    return Ok(RunResult { prediction: q.clone(), depth: path.len(), path });
                }
                ForecastTree::Query { index, children } => {
                    let symbol = *x.get(*index).ok_or_else(|| {
                        Error::InvalidTree(format!("query index {index} beyond input length {}", x.len()))
                    })?;
                    node = children.get(symbol as usize).ok_or_else(|| {
                        Error::InvalidTree(format!("no child for symbol {symbol} at index {index}"))
                    })?;
                    path.push((*index, symbol));
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ForecastTree::Leaf(_) => 0,
            ForecastTree::Query { children, .. } => {
                1 + children.iter().map(ForecastTree::depth).max().unwrap_or(0)
            }
        }
    }

    /// Leaf labels in depth-first order.
    pub fn labels(&self) -> Vec<&Rational> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a ForecastTree, out: &mut Vec<&'a Rational>) {
            match t {
                ForecastTree::Leaf(q) => out.push(q),
                ForecastTree::Query { children, .. } => children.iter().for_each(|c| go(c, out)),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_boolean(&self) -> bool {
        self.labels().iter().all(|q| q.is_zero() || q.is_one())
    }

    pub fn shape(&self) -> Shape {
        match self {
            ForecastTree::Leaf(_) => Shape::Leaf,
            ForecastTree::Query { index, children } => Shape::Query {
                index: *index,
                children: children.iter().map(ForecastTree::shape).collect(),
            },
        }
    }

    /// Applies `g` to every leaf label.
    pub fn map_labels(&self, g: &impl Fn(&Rational) -> Rational) -> Self {
        match self {
            ForecastTree::Leaf(q) => ForecastTree::Leaf(g(q)),
            ForecastTree::Query { index, children } => ForecastTree::Query {
                index: *index,
                children: children.iter().map(|c| c.map_labels(g)).collect(),
            },
        }
    }

    /// Replaces subtrees below `budget` queries with a leaf labelled `label`.
    pub fn truncate(&self, budget: usize, label: &Rational) -> Self {
        match self {
            ForecastTree::Leaf(_) => self.clone(),
            ForecastTree::Query { .. } if budget == 0 => ForecastTree::Leaf(label.clone()),
            ForecastTree::Query { index, children } => ForecastTree::Query {
                index: *index,
                children: children.iter().map(|c| c.truncate(budget - 1, label)).collect(),
            },
        }
    }
}

impl fmt::Display for ForecastTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForecastTree::Leaf(q) => write!(f, "{q}"),
            ForecastTree::Query { index, children } => {
                write!(f, "x{index}(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An unlabeled tree: the query structure of a [`ForecastTree`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf,
    Query { index: usize, children: Vec<Shape> },
}

impl Shape {
    pub fn num_leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Query { children, .. } => children.iter().map(Shape::num_leaves).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Query { children, .. } => 1 + children.iter().map(Shape::depth).max().unwrap_or(0),
        }
    }

    /// The depth-first index of the leaf reached by `x`, and the number of
    /// queries made on the way.
    pub fn locate(&self, x: &[u8]) -> (usize, usize) {
        let mut node = self;
        let mut offset = 0;
        let mut depth = 0;
        while let Shape::Query { index, children } = node {
            let s = x[*index] as usize;
            offset += children[..s].iter().map(Shape::num_leaves).sum::<usize>();
            node = &children[s];
            depth += 1;
        }
        (offset, depth)
    }

    /// Attaches labels to the leaves in depth-first order.
    pub fn label(&self, labels: &[Rational]) -> ForecastTree {
        fn go(s: &Shape, labels: &[Rational], next: &mut usize) -> ForecastTree {
            match s {
                Shape::Leaf => {
                    *next += 1;
                    ForecastTree::Leaf(labels[*next - 1].clone())
                }
                Shape::Query { index, children } => ForecastTree::Query {
                    index: *index,
                    children: children.iter().map(|c| go(c, labels, next)).collect(),
                },
            }
        }
        assert_eq!(labels.len(), self.num_leaves(), "one label per leaf");
        go(self, labels, &mut 0)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf => f.write_str("*"),
            Shape::Query { index, children } => {
                write!(f, "x{index}(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// `S(k) = 1 + k·S(k−1)^|Σ|`, saturating.
pub fn shape_count(n: usize, alphabet: usize) -> u128 {
    (1..=n).fold(1u128, |prev, k| {
        1u128.saturating_add((k as u128).saturating_mul(saturating_pow(prev, alphabet)))
    })
}

/// `T(k) = 2 + k·T(k−1)^|Σ|`, saturating.
pub fn boolean_tree_count(n: usize, alphabet: usize) -> u128 {
    (1..=n).fold(2u128, |prev, k| {
        2u128.saturating_add((k as u128).saturating_mul(saturating_pow(prev, alphabet)))
    })
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

fn check_enumeration(n: usize, alphabet: usize) -> Result<()> {
    let count = boolean_tree_count(n, alphabet);
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit(format!(
            "n = {n}, |Σ| = {alphabet} has {count} Boolean trees (limit {ENUMERATION_LIMIT})"
        )));
    }
    Ok(())
}

/// Every shape with no repeated query on a path, ordered by depth, then root
/// query index, then children in order.
pub fn enumerate_shapes(n: usize, alphabet: usize) -> Result<Vec<Shape>> {
    enumerate_shapes_to_depth(n, alphabet, n)
}

/// As [`enumerate_shapes`], restricted to depth at most `max_depth`.
pub fn enumerate_shapes_to_depth(n: usize, alphabet: usize, max_depth: usize) -> Result<Vec<Shape>> {
    check_enumeration(n, alphabet)?;
    let available: Vec<usize> = (0..n).collect();
    let mut shapes = shapes_over(&available, alphabet, max_depth);
    shapes.sort_by_key(Shape::depth);
    Ok(shapes)
}

fn shapes_over(available: &[usize], alphabet: usize, max_depth: usize) -> Vec<Shape> {
    let mut out = vec![Shape::Leaf];
    if max_depth == 0 {
        return out;
    }
    for (pos, &index) in available.iter().enumerate() {
        let mut rest = available.to_vec();
        rest.remove(pos);
        let subs = shapes_over(&rest, alphabet, max_depth - 1);
        let mut combo = vec![0usize; alphabet];
        loop {
            out.push(Shape::Query {
                index,
                children: combo.iter().map(|&c| subs[c].clone()).collect(),
            });
            // Odometer over child choices, first child varying slowest.
            let mut k = alphabet;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                combo[k] += 1;
                if combo[k] < subs.len() {
                    break;
                }
                combo[k] = 0;
            }
            if combo.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    out
}

/// Every shape with every `{0,1}` leaf labelling. Within a shape, labelling
/// `m` gives leaf `i` the label `(m >> i) & 1`.
pub fn enumerate_boolean_trees(n: usize, alphabet: usize) -> Result<impl Iterator<Item = ForecastTree>> {
    let shapes = enumerate_shapes(n, alphabet)?;
    Ok(shapes.into_iter().flat_map(|shape| {
        let leaves = shape.num_leaves();
        (0..1u64 << leaves).map(move |mask| {
            let labels: Vec<Rational> = (0..leaves).map(|i| int(((mask >> i) & 1) as i64)).collect();
            shape.label(&labels)
        })
    }))
}

/// A shape together with where each domain input of a function lands.
#[derive(Clone, Debug)]
pub struct ShapeProfile {
    pub shape: Shape,
    pub num_leaves: usize,
    /// Leaf index reached by domain input `i`.
    pub leaf: Vec<usize>,
    /// Queries made on domain input `i`.
    pub depth: Vec<usize>,
}

impl ShapeProfile {
    pub fn new(shape: Shape, f: &PartialFunction) -> Self {
        let (leaf, depth) = f.domain().iter().map(|x| shape.locate(x)).unzip();
        ShapeProfile { num_leaves: shape.num_leaves(), shape, leaf, depth }
    }

    /// Per-leaf `(mass of 0-inputs, mass of 1-inputs)` under `mu`.
    pub fn leaf_masses(&self, mu: &InputDistribution) -> Vec<(Rational, Rational)> {
        let f = mu.function();
        let mut masses = vec![(Rational::zero(), Rational::zero()); self.num_leaves];
        for i in mu.support() {
            let slot = &mut masses[self.leaf[i]];
            if f.value(i) {
                slot.1 += mu.weight(i);
            } else {
                slot.0 += mu.weight(i);
            }
        }
        masses
    }

    /// `E_{x←μ}[depth]`, exact.
    pub fn cost(&self, mu: &InputDistribution) -> Rational {
        mu.support().map(|i| mu.weight(i) * int(self.depth[i] as i64)).sum()
    }

    /// The Boolean tree whose leaf `i` is labelled `(mask >> i) & 1`.
    pub fn boolean_tree(&self, mask: u64) -> ForecastTree {
        let labels: Vec<Rational> = (0..self.num_leaves).map(|i| int(((mask >> i) & 1) as i64)).collect();
        self.shape.label(&labels)
    }
}

/// Profiles of every enumerated shape of depth at most `max_depth`.
pub fn shape_profiles(f: &PartialFunction, max_depth: usize) -> Result<Vec<ShapeProfile>> {
    Ok(enumerate_shapes_to_depth(f.n(), f.alphabet(), max_depth)?
        .into_iter()
        .map(|s| ShapeProfile::new(s, f))
        .collect())
}

/// A finite probability distribution over deterministic trees.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomizedForecastTree {
    support: Vec<(Rational, ForecastTree)>,
}

#[derive(Serialize, Deserialize)]
struct WeightedJson {
    probability: RationalJson,
    tree: NodeJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RandomizedJson {
    Mixture { support: Vec<WeightedJson> },
    Single(NodeJson),
}

/// One step of a randomized tree's run: which tree was sampled and which
/// root-to-leaf path it followed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transcript {
    pub tree_index: usize,
    pub leaf_path: Vec<(usize, u8)>,
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}:", self.tree_index)?;
        for (i, (q, s)) in self.leaf_path.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "x{q}={s}")?;
        }
        Ok(())
    }
}

impl RandomizedForecastTree {
    pub fn new(support: Vec<(Rational, ForecastTree)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidTree("randomized tree has empty support".into()));
        }
        if let Some((p, _)) = support.iter().find(|(p, _)| p.is_negative()) {
            return Err(Error::InvalidTree(format!("negative tree probability {p}")));
        }
        let total: Rational = support.iter().map(|(p, _)| p).sum();
        if !total.is_one() {
            return Err(Error::InvalidTree(format!("tree probabilities sum to {total}")));
        }
        Ok(RandomizedForecastTree { support })
    }

    pub fn deterministic(tree: ForecastTree) -> Self {
        RandomizedForecastTree { support: vec![(Rational::one(), tree)] }
    }

    /// `λ·a + (1−λ)·b`, keeping the supports side by side.
    pub fn mixture(a: &Self, b: &Self, lambda: &Rational) -> Result<Self> {
        if lambda.is_negative() || *lambda > Rational::one() {
            return Err(Error::InvalidArgument(format!("mixture weight {lambda} outside [0,1]")));
        }
        let rest = Rational::one() - lambda;
        let support = a
            .support
            .iter()
            .map(|(p, t)| (p * lambda, t.clone()))
            .chain(b.support.iter().map(|(p, t)| (p * &rest, t.clone())))
            .collect();
        Self::new(support)
    }

    pub fn parse(text: &str) -> Result<Self> {
        match serde_json::from_str::<RandomizedJson>(text)? {
            RandomizedJson::Single(node) => Ok(Self::deterministic(node.to_tree()?)),
            RandomizedJson::Mixture { support } => Self::new(
                support
                    .iter()
                    .map(|w| Ok((w.probability.to_rational()?, w.tree.to_tree()?)))
                    .collect::<Result<_>>()?,
            ),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let support = self
            .support
            .iter()
            .map(|(p, t)| WeightedJson { probability: p.into(), tree: NodeJson::from_tree(t) })
            .collect();
        serde_json::to_value(RandomizedJson::Mixture { support }).expect("tree serializes")
    }

    pub fn support(&self) -> &[(Rational, ForecastTree)] {
        &self.support
    }

    pub fn validate(&self, f: &PartialFunction) -> Result<()> {
        self.support.iter().try_for_each(|(_, t)| t.validate(f.n(), f.alphabet()))
    }

    pub fn map_trees(&self, g: impl Fn(&ForecastTree) -> ForecastTree) -> Self {
        RandomizedForecastTree {
            support: self.support.iter().map(|(p, t)| (p.clone(), g(t))).collect(),
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.support.iter().all(|(_, t)| t.is_boolean())
    }

    /// The joint distribution of (tree, query count, prediction) on input `x`.
    pub fn outcomes(&self, x: &[u8]) -> Result<Vec<(Rational, RunResult)>> {
        self.support
            .iter()
            .map(|(p, t)| Ok((p.clone(), t.run(x)?)))
            .collect()
    }

    /// Expected number of queries on `x`.
    pub fn cost_on(&self, x: &[u8]) -> Result<Rational> {
        Ok(self.outcomes(x)?.iter().map(|(p, r)| p * int(r.depth as i64)).sum())
    }

    /// Expected score on `x` when the true answer is `value`.
    pub fn score_on(&self, x: &[u8], value: bool, rule: ScoringRule) -> Result<ExtendedReal> {
        Ok(ExtendedReal::expectation(self.outcomes(x)?.iter().map(|(p, r)| {
            (to_f64(p), rule.eval_outcome_unchecked(to_f64(&r.prediction), value))
        })))
    }

    /// `1 − 2·Pr[output ≠ value]` with Bernoulli(`q`) outputs at the leaves.
    pub fn bias_on(&self, x: &[u8], value: bool) -> Result<Rational> {
        let two = int(2);
        Ok(self
            .outcomes(x)?
            .iter()
            .map(|(p, r)| {
                let toward = if value { &two * &r.prediction - int(1) } else { int(1) - &two * &r.prediction };
                p * toward
            })
            .sum())
    }
}

fn check_function(r: &RandomizedForecastTree, mu: &InputDistribution) -> Result<()> {
    r.validate(mu.function())
}

/// `E_{x←μ}[cost(R, x)]`, exact.
pub fn cost(r: &RandomizedForecastTree, mu: &InputDistribution) -> Result<Rational> {
    check_function(r, mu)?;
    let f = mu.function();
    let mut total = Rational::zero();
    for i in mu.support() {
        total += mu.weight(i) * r.cost_on(f.input(i))?;
    }
    Ok(total)
}

/// `E_{x←μ}[score(R, x)]` under `rule`.
pub fn score(r: &RandomizedForecastTree, mu: &InputDistribution, rule: ScoringRule) -> Result<ExtendedReal> {
    check_function(r, mu)?;
    let f = mu.function();
    let mut terms = Vec::new();
    for i in mu.support() {
        terms.push((to_f64(mu.weight(i)), r.score_on(f.input(i), f.value(i), rule)?));
    }
    Ok(ExtendedReal::expectation(terms))
}

/// `E_{x←μ}[bias(R, x)]`, exact.
pub fn bias(r: &RandomizedForecastTree, mu: &InputDistribution) -> Result<Rational> {
    check_function(r, mu)?;
    let f = mu.function();
    let mut total = Rational::zero();
    for i in mu.support() {
        total += mu.weight(i) * r.bias_on(f.input(i), f.value(i))?;
    }
    Ok(total)
}

/// `min_{x∈Dom(f)} bias(R, x)`.
pub fn worst_bias(r: &RandomizedForecastTree, f: &PartialFunction) -> Result<Rational> {
    r.validate(f)?;
    let mut worst: Option<Rational> = None;
    for i in 0..f.len() {
        let b = r.bias_on(f.input(i), f.value(i))?;
        if worst.as_ref().is_none_or(|w| b < *w) {
            worst = Some(b);
        }
    }
    Ok(worst.expect("domain is nonempty"))
}

/// `min_{x∈Dom(f)} score(R, x)`.
pub fn worst_score(r: &RandomizedForecastTree, f: &PartialFunction, rule: ScoringRule) -> Result<ExtendedReal> {
    r.validate(f)?;
    let mut worst = ExtendedReal::PosInf;
    for i in 0..f.len() {
        let s = r.score_on(f.input(i), f.value(i), rule)?;
        if s < worst {
            worst = s;
        }
    }
    Ok(worst)
}

/// Exact distribution over transcripts when `x ← μ`.
pub fn transcript_distribution(
    r: &RandomizedForecastTree,
    mu: &InputDistribution,
) -> Result<Vec<(Transcript, Rational)>> {
    check_function(r, mu)?;
    let f = mu.function();
    let mut masses: BTreeMap<Transcript, Rational> = BTreeMap::new();
    for i in mu.support() {
        for (tree_index, (p, t)) in r.support.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let run = t.run(f.input(i))?;
            let key = Transcript { tree_index, leaf_path: run.path };
            *masses.entry(key).or_insert_with(Rational::zero) += p * mu.weight(i);
        }
    }
    Ok(masses.into_iter().collect())
}

/// The transcript distributions under `μ₀` and `μ₁` on their joint support,
/// as a [`FinitePair`] with weight `w`.
pub fn transcript_pair(
    r: &RandomizedForecastTree,
    mu0: &InputDistribution,
    mu1: &InputDistribution,
    w: f64,
) -> Result<FinitePair> {
    let d0: BTreeMap<Transcript, Rational> = transcript_distribution(r, mu0)?.into_iter().collect();
    let d1: BTreeMap<Transcript, Rational> = transcript_distribution(r, mu1)?.into_iter().collect();
    let mut keys: Vec<&Transcript> = d0.keys().chain(d1.keys()).collect();
    keys.sort();
    keys.dedup();
    let get = |d: &BTreeMap<Transcript, Rational>, k: &Transcript| d.get(k).map(to_f64).unwrap_or(0.0);
    let nu0: Vec<f64> = keys.iter().map(|k| get(&d0, k)).collect();
    let nu1: Vec<f64> = keys.iter().map(|k| get(&d1, k)).collect();
    FinitePair::new(
        keys.iter().map(|k| k.to_string()).collect(),
        renormalize(nu0),
        renormalize(nu1),
        w,
    )
}

fn renormalize(v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.into_iter().map(|p| p / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use std::sync::Arc;

    fn xor2() -> Arc<PartialFunction> {
        Arc::new(PartialFunction::xor(2))
    }

    #[test]
    fn run_examples() {
        let half = ForecastTree::leaf(rat(1, 2));
        let r = half.run(&[0, 1]).unwrap();
        assert_eq!((r.prediction, r.depth), (rat(1, 2), 0));

        let exact = ForecastTree::exact(&xor2());
        let r = exact.run(&[0, 1]).unwrap();
        assert_eq!((r.prediction, r.depth), (rat(1, 1), 2));

        let first = Shape::Query { index: 0, children: vec![Shape::Leaf, Shape::Leaf] }
            .label(&[rat(0, 1), rat(1, 1)]);
        assert_eq!(first.run(&[1, 0]).unwrap().depth, 1);
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let bad = ForecastTree::Query { index: 5, children: vec![ForecastTree::constant(true); 2] };
        assert!(bad.run(&[0, 1]).is_err());
        assert!(bad.validate(2, 2).is_err());
        let repeat = ForecastTree::Query {
            index: 0,
            children: vec![
                ForecastTree::Query { index: 0, children: vec![ForecastTree::constant(true); 2] },
                ForecastTree::constant(false),
            ],
        };
        assert!(repeat.validate(2, 2).is_err());
        assert!(ForecastTree::leaf(rat(3, 2)).validate(1, 2).is_err());
    }

    #[test]
    fn cost_examples() {
        let f = xor2();
        let mu = InputDistribution::uniform(f.clone());
        let zero = RandomizedForecastTree::deterministic(ForecastTree::leaf(rat(1, 2)));
        let full = RandomizedForecastTree::deterministic(ForecastTree::exact(&f));
        assert_eq!(cost(&zero, &mu).unwrap(), rat(0, 1));
        assert_eq!(cost(&full, &mu).unwrap(), rat(2, 1));
        let mix = RandomizedForecastTree::mixture(&zero, &full, &rat(1, 2)).unwrap();
        assert_eq!(cost(&mix, &mu).unwrap(), rat(1, 1));
    }

    #[test]
    fn score_examples() {
        let f = xor2();
        let mu = InputDistribution::uniform(f.clone());
        let full = RandomizedForecastTree::deterministic(ForecastTree::exact(&f));
        assert_eq!(score(&full, &mu, ScoringRule::Hs).unwrap(), ExtendedReal::Finite(1.0));
        let half = RandomizedForecastTree::deterministic(ForecastTree::leaf(rat(1, 2)));
        for rule in ScoringRule::ALL {
            assert_eq!(score(&half, &mu, rule).unwrap(), ExtendedReal::Finite(0.0));
        }
        let point = InputDistribution::point_mass(f.clone(), 1);
        let lean = RandomizedForecastTree::deterministic(ForecastTree::leaf(rat(4, 5)));
        let s = score(&lean, &point, ScoringRule::Hs).unwrap().to_f64();
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bias_examples() {
        let f = xor2();
        let mu = InputDistribution::uniform(f.clone());
        let full = RandomizedForecastTree::deterministic(ForecastTree::exact(&f));
        assert_eq!(bias(&full, &mu).unwrap(), rat(1, 1));
        let half = RandomizedForecastTree::deterministic(ForecastTree::leaf(rat(1, 2)));
        assert_eq!(bias(&half, &mu).unwrap(), rat(0, 1));
        // Wrong only on input 11.
        let mostly = RandomizedForecastTree::deterministic(ForecastTree::full(2, 2, |x| {
            int(if x == [0, 1] || x == [1, 0] || x == [1, 1] { 1 } else { 0 })
        }));
        assert_eq!(bias(&mostly, &mu).unwrap(), rat(1, 2));
    }

    #[test]
    fn transcript_examples() {
        let f = xor2();
        let mu = InputDistribution::uniform(f.clone());
        let full = RandomizedForecastTree::deterministic(ForecastTree::exact(&f));
        let d = transcript_distribution(&full, &mu).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.iter().all(|(_, m)| *m == rat(1, 4)));

        let zero = RandomizedForecastTree::deterministic(ForecastTree::leaf(rat(1, 2)));
        let d = transcript_distribution(&zero, &mu).unwrap();
        assert_eq!(d, vec![(Transcript { tree_index: 0, leaf_path: vec![] }, rat(1, 1))]);

        let mix = RandomizedForecastTree::mixture(&zero, &full, &rat(1, 3)).unwrap();
        let d = transcript_distribution(&mix, &mu).unwrap();
        assert_eq!(d.len(), 5);
        assert_eq!(d[0].1, rat(1, 3));
        assert!(d[1..].iter().all(|(t, m)| t.tree_index == 1 && *m == rat(1, 6)));
    }

    #[test]
    fn enumeration_counts() {
        for (n, s, t) in [(0, 1, 2), (1, 2, 6), (2, 9, 74), (3, 244, 16430)] {
            assert_eq!(shape_count(n, 2), s);
            assert_eq!(boolean_tree_count(n, 2), t);
            assert_eq!(enumerate_shapes(n, 2).unwrap().len() as u128, s);
            assert_eq!(enumerate_boolean_trees(n, 2).unwrap().count() as u128, t);
        }
        assert!(enumerate_shapes(4, 2).is_err());
        assert!(enumerate_boolean_trees(4, 2).is_err());
    }

    #[test]
    fn enumeration_is_ordered_and_distinct() {
        let shapes = enumerate_shapes(3, 2).unwrap();
        assert_eq!(shapes[0], Shape::Leaf);
        assert!(shapes.windows(2).all(|w| w[0].depth() <= w[1].depth()));
        let distinct: std::collections::HashSet<_> = shapes.iter().collect();
        assert_eq!(distinct.len(), shapes.len());
        assert_eq!(shapes, enumerate_shapes(3, 2).unwrap());
    }

    #[test]
    fn tree_json_round_trip() {
        let text = r#"{"query":0,"children":[{"leaf":{"num":1,"den":3}},{"leaf":{"num":1,"den":1}}]}"#;
        let t = ForecastTree::parse(text).unwrap();
        assert_eq!(t.run(&[0]).unwrap().prediction, rat(1, 3));
        assert_eq!(ForecastTree::parse(&t.to_json_value().to_string()).unwrap(), t);
        let r = RandomizedForecastTree::parse(text).unwrap();
        assert_eq!(RandomizedForecastTree::parse(&r.to_json_value().to_string()).unwrap(), r);
    }
}
