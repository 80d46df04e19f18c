//! Exact rational linear programming (two-phase dense simplex with Bland's
//! rule) and the lower convex envelope of a (bias, cost) point cloud.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub row: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn nonnegative() -> Self {
        Bounds { lower: Some(Rational::zero()), upper: None }
    }

    pub fn free() -> Self {
        Bounds { lower: None, upper: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    /// `dual[i]` is the multiplier of constraint `i`; entries past the
    /// constraints belong to finite upper bounds (for variables with a
    /// finite lower bound), in variable order.
    Optimal { value: Rational, primal: Vec<Rational>, dual: Vec<Rational> },
    /// Multipliers `y` (indexed like `dual`) with `y ≤ 0` on `≤` rows,
    /// `y ≥ 0` on `≥` rows, `yᵀA ≤ 0` after the bound substitution and
    /// `yᵀb > 0`; see [`LinearProgram::check_farkas`].
    Infeasible { farkas: Vec<Rational> },
    /// A feasible point and a direction along which the objective improves
    /// without bound.
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
}

impl Solution {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Solution::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, Solution::Infeasible { .. })
    }
}

/// How original variable `j` is written in terms of nonnegative
/// standard-form variables: `x_j = offset + Σ coef·s`.
#[derive(Clone, Debug)]
struct VarMap {
    offset: Rational,
    terms: Vec<(usize, Rational)>,
}

/// `A s (rel) b` over nonnegative `s`, before slacks.
struct Standardized {
    maps: Vec<VarMap>,
    rows: Vec<Vec<Rational>>,
    relations: Vec<Relation>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
    cost_offset: Rational,
}

impl LinearProgram {
    /// All variables nonnegative.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let bounds = vec![Bounds::nonnegative(); objective.len()];
        LinearProgram { sense, objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, row: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint { row, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {i} has width {}, objective has {n}",
                    c.row.len()
                )));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(Error::InvalidArgument(format!("variable {j} has lower {l} > upper {u}")));
                }
            }
        }
        Ok(())
    }

    fn standardize(&self) -> Standardized {
        let mut maps = Vec::new();
        let mut count = 0;
        let mut upper_rows = Vec::new();
        for b in &self.bounds {
            let map = match (&b.lower, &b.upper) {
                (Some(l), u) => {
                    if let Some(u) = u {
                        upper_rows.push((count, u - l));
                    }
                    count += 1;
                    VarMap { offset: l.clone(), terms: vec![(count - 1, Rational::one())] }
                }
                (None, Some(u)) => {
                    count += 1;
                    VarMap { offset: u.clone(), terms: vec![(count - 1, -Rational::one())] }
                }
                (None, None) => {
                    count += 2;
                    VarMap {
                        offset: Rational::zero(),
                        terms: vec![(count - 2, Rational::one()), (count - 1, -Rational::one())],
                    }
                }
            };
            maps.push(map);
        }
        let substitute = |coeffs: &[Rational]| -> (Vec<Rational>, Rational) {
            let mut row = vec![Rational::zero(); count];
            let mut constant = Rational::zero();
            for (a, map) in coeffs.iter().zip(&maps) {
                if a.is_zero() {
                    continue;
                }
                constant += a * &map.offset;
                for (s, c) in &map.terms {
                    row[*s] += a * c;
                }
            }
            (row, constant)
        };
        let mut rows = Vec::new();
        let mut relations = Vec::new();
        let mut rhs = Vec::new();
        for c in &self.constraints {
            let (row, constant) = substitute(&c.row);
            rows.push(row);
            relations.push(c.relation);
            rhs.push(&c.rhs - constant);
        }
        for (s, width) in upper_rows {
            let mut row = vec![Rational::zero(); count];
            row[s] = Rational::one();
            rows.push(row);
            relations.push(Relation::Le);
            rhs.push(width);
        }
        let (mut cost, mut cost_offset) = substitute(&self.objective);
        if self.sense == Sense::Maximize {
            cost.iter_mut().for_each(|c| *c = -c.clone());
            cost_offset = -cost_offset;
        }
        Standardized { maps, rows, relations, rhs, cost, cost_offset }
    }

    fn recover(&self, maps: &[VarMap], s: &[Rational]) -> Vec<Rational> {
        maps.iter()
            .map(|m| m.terms.iter().fold(m.offset.clone(), |acc, (i, c)| acc + c * &s[*i]))
            .collect()
    }

    /// Checks an infeasibility certificate against this program.
    pub fn check_farkas(&self, y: &[Rational]) -> bool {
        let st = self.standardize();
        if y.len() != st.rows.len() {
            return false;
        }
        let signs_ok = y.iter().zip(&st.relations).all(|(v, rel)| match rel {
            Relation::Le => !v.is_positive(),
            Relation::Ge => !v.is_negative(),
            Relation::Eq => true,
        });
        let width = st.cost.len();
        let columns_ok = (0..width).all(|j| {
            let s: Rational = y.iter().zip(&st.rows).map(|(v, r)| v * &r[j]).sum();
            !s.is_positive()
        });
        let rhs: Rational = y.iter().zip(&st.rhs).map(|(v, b)| v * b).sum();
        signs_ok && columns_ok && rhs.is_positive()
    }

    /// Whether `x` satisfies every constraint and bound exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x.iter().zip(&self.bounds).all(|(v, b)| {
            b.lower.as_ref().is_none_or(|l| v >= l) && b.upper.as_ref().is_none_or(|u| v <= u)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.row.iter().zip(x).map(|(a, v)| a * v).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text dump of the program, one row per line.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "{} {}\n",
            if self.sense == Sense::Maximize { "max" } else { "min" },
            join(&self.objective)
        );
        for c in &self.constraints {
            out += &format!("{} {} {}\n", join(&c.row), c.relation, c.rhs);
        }
        for (j, b) in self.bounds.iter().enumerate() {
            let show = |v: &Option<Rational>, inf: &str| v.as_ref().map_or(inf.to_string(), |v| v.to_string());
            out += &format!("x{j} in [{}, {}]\n", show(&b.lower, "-inf"), show(&b.upper, "inf"));
        }
        out
    }
}

fn join(v: &[Rational]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

/// Dense simplex tableau over `m` rows. Columns are the standard variables,
/// then slack/surplus columns, then one artificial column per row.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Column index of the first artificial variable.
    art_start: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn width(&self) -> usize {
        self.art_start + self.rows.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = p.recip();
            self.rows[r].iter_mut().for_each(|v| {
                if !v.is_zero() {
                    *v *= &inv;
                }
            });
            self.rhs[r] *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut reduced = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    reduced[j] -= cb * v;
                }
            }
        }
        reduced
    }

    /// Minimizes `cost` over columns `allowed`, Bland's rule throughout.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> PivotOutcome {
        loop {
            let reduced = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| reduced[j].is_negative()) else {
                return PivotOutcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return PivotOutcome::Unbounded(enter),
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.width()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<Solution> {
    lp.validate()?;
    let st = lp.standardize();
    let m = st.rows.len();
    let n_std = st.cost.len();

    // Slack/surplus columns, then make every rhs nonnegative.
    let slack_rows: Vec<usize> = (0..m).filter(|&i| st.relations[i] != Relation::Eq).collect();
    let art_start = n_std + slack_rows.len();
    let mut flipped = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = st.rows[i].clone();
        row.resize(art_start + m, Rational::zero());
        if let Some(k) = slack_rows.iter().position(|&r| r == i) {
            row[n_std + k] = match st.relations[i] {
                Relation::Le => Rational::one(),
                _ => -Rational::one(),
            };
        }
        let mut b = st.rhs[i].clone();
        if b.is_negative() {
            flipped[i] = true;
            row.iter_mut().for_each(|v| *v = -v.clone());
            b = -b;
        }
        row[art_start + i] = Rational::one();
        rows.push(row);
        rhs.push(b);
    }
    let mut tab = Tableau { rows, rhs, basis: (art_start..art_start + m).collect(), art_start };
    let width = tab.width();

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![Rational::zero(); width];
    phase1[art_start..].iter_mut().for_each(|c| *c = Rational::one());
    tab.optimize(&phase1, width);
    let infeasibility: Rational = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(&b, _)| b >= art_start)
        .map(|(_, v)| v.clone())
        .sum();
    let unflip = |i: usize, v: Rational| if flipped[i] { -v } else { v };
    if infeasibility.is_positive() {
        let reduced = tab.reduced_costs(&phase1);
        // Reduced cost of artificial i is 1 − yᵢ.
        let farkas = (0..m)
            .map(|i| unflip(i, Rational::one() - &reduced[art_start + i]))
            .collect();
        return Ok(Solution::Infeasible { farkas });
    }

    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] >= art_start {
            if let Some(c) = (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase 2 over the non-artificial columns.
    let mut phase2 = st.cost.clone();
    phase2.resize(width, Rational::zero());
    match tab.optimize(&phase2, art_start) {
        PivotOutcome::Unbounded(enter) => {
            let s = tab.primal();
            let mut direction = vec![Rational::zero(); width];
            direction[enter] = Rational::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                direction[b] = -tab.rows[i][enter].clone();
            }
            let point = lp.recover(&st.maps, &s);
            let ray = st
                .maps
                .iter()
                .map(|m| m.terms.iter().fold(Rational::zero(), |acc, (i, c)| acc + c * &direction[*i]))
                .collect();
            Ok(Solution::Unbounded { point, ray })
        }
        PivotOutcome::Optimal => {
            let s = tab.primal();
            let primal = lp.recover(&st.maps, &s);
            let reduced = tab.reduced_costs(&phase2);
            // Reduced cost of artificial i is −yᵢ in the minimization form.
            let sign = if lp.sense == Sense::Maximize { -Rational::one() } else { Rational::one() };
            let dual = (0..m)
                .map(|i| unflip(i, -reduced[art_start + i].clone()) * &sign)
                .collect();
            let min_value: Rational =
                st.cost.iter().zip(&s).map(|(c, v)| c * v).sum::<Rational>() + &st.cost_offset;
            let value = if lp.sense == Sense::Maximize { -min_value } else { min_value };
            Ok(Solution::Optimal { value, primal, dual })
        }
    }
}

/// Dual objective `Σ yᵢ bᵢ` (after bound substitution) plus the objective
/// constant introduced by shifted variables. Equals the optimum at optimality.
pub fn dual_objective(lp: &LinearProgram, dual: &[Rational]) -> Rational {
    let st = lp.standardize();
    let offset = if lp.sense == Sense::Maximize { -st.cost_offset } else { st.cost_offset };
    dual.iter().zip(&st.rhs).map(|(y, b)| y * b).sum::<Rational>() + offset
}

/// The lower convex envelope of a (bias, cost) cloud, restricted to the part
/// where raising the bias floor raises the cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    /// Breakpoints with strictly increasing bias and cost.
    pub breakpoints: Vec<(Rational, Rational)>,
}

/// A point of the cloud together with its position in the input.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeMixture {
    /// `(index, weight)` pairs; at most two entries.
    pub parts: Vec<(usize, Rational)>,
    pub cost: Rational,
}

fn cross(o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Builds the envelope of `points = [(bias, cost)]`.
pub fn pareto_lower_envelope(points: &[(Rational, Rational)]) -> Result<Envelope> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let mut sorted: Vec<&(Rational, Rational)> = points.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    sorted.dedup_by(|a, b| a.0 == b.0);
    let min_cost = sorted.iter().map(|p| &p.1).min().expect("nonempty");
    let start = sorted.iter().rposition(|p| p.1 == *min_cost).expect("minimum exists");
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in &sorted[start..] {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_positive() {
            hull.pop();
        }
        hull.push((*p).clone());
    }
    Ok(Envelope { breakpoints: hull })
}

impl Envelope {
    pub fn max_bias(&self) -> &Rational {
        &self.breakpoints.last().expect("nonempty").0
    }

    /// Minimum cost of a mixture with bias at least `gamma`; `None` if
    /// `gamma` exceeds every point's bias.
    pub fn eval(&self, gamma: &Rational) -> Option<Rational> {
        self.segment(gamma).map(|(i, t)| {
            let (b0, c0) = &self.breakpoints[i];
            match self.breakpoints.get(i + 1) {
                Some((_, c1)) => c0 + &t * (c1 - c0),
                None => {
                    let _ = b0;
                    c0.clone()
                }
            }
        })
    }

    /// Segment start `i` and interpolation weight `t` toward breakpoint `i+1`.
    fn segment(&self, gamma: &Rational) -> Option<(usize, Rational)> {
        let bp = &self.breakpoints;
        if gamma > self.max_bias() {
            return None;
        }
        if *gamma <= bp[0].0 {
            return Some((0, Rational::zero()));
        }
        let i = bp.iter().rposition(|(b, _)| b <= gamma).expect("gamma above first breakpoint");
        if i + 1 == bp.len() {
            return Some((i, Rational::zero()));
        }
        let t = (gamma - &bp[i].0) / (&bp[i + 1].0 - &bp[i].0);
        Some((i, t))
    }

    /// The cheapest mixture reaching bias `gamma`, expressed over the
    /// indices of `points` (the cloud the envelope was built from).
    pub fn mixture(&self, points: &[(Rational, Rational)], gamma: &Rational) -> Option<EnvelopeMixture> {
        let (i, t) = self.segment(gamma)?;
        let find = |target: &(Rational, Rational)| {
            points.iter().position(|p| p == target).expect("breakpoint comes from the cloud")
        };
        let mut parts = vec![(find(&self.breakpoints[i]), Rational::one() - &t)];
        if t.is_positive() {
            parts.push((find(&self.breakpoints[i + 1]), t));
        }
        let cost = self.eval(gamma).expect("segment exists");
        Some(EnvelopeMixture { parts, cost })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![int(1)]);
        lp.add(vec![int(1)], Relation::Le, int(3));
        let Solution::Optimal { value, primal, dual } = solve(&lp).unwrap() else { panic!() };
        assert_eq!(value, int(3));
        assert_eq!(primal, vec![int(3)]);
        assert_eq!(dual_objective(&lp, &dual), int(3));
    }

    #[test]
    fn infeasible_with_certificate() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(0)]);
        lp.add(vec![int(1)], Relation::Ge, int(1));
        lp.add(vec![int(1)], Relation::Le, int(0));
        let Solution::Infeasible { farkas } = solve(&lp).unwrap() else { panic!() };
        assert!(lp.check_farkas(&farkas));
        // The combination (x ≥ 1) − (x ≤ 0) reads 0 ≥ 1.
        assert!(farkas[0].is_positive() && farkas[1].is_negative());
        assert_eq!(&farkas[0] + &farkas[1], int(0));
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![int(1), int(1)]);
        lp.add(vec![int(1), int(-1)], Relation::Le, int(0));
        let Solution::Unbounded { ray, point } = solve(&lp).unwrap() else { panic!() };
        assert_eq!(ray, vec![int(1), int(1)]);
        assert!(lp.is_feasible_point(&point));
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min x + y with x free, x ≥ -2 via constraint, y ≤ 5 upper only, y ≥ x.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1), int(1)]);
        lp.set_bounds(0, Bounds::free());
        lp.set_bounds(1, Bounds { lower: None, upper: Some(int(5)) });
        lp.add(vec![int(1), int(0)], Relation::Ge, int(-2));
        lp.add(vec![int(-1), int(1)], Relation::Ge, int(0));
        let Solution::Optimal { value, primal, dual } = solve(&lp).unwrap() else { panic!() };
        assert_eq!(value, int(-4));
        assert!(lp.is_feasible_point(&primal));
        assert_eq!(dual_objective(&lp, &dual), value);
    }

    #[test]
    fn boxed_variables() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![int(2), int(3)]);
        lp.set_bounds(0, Bounds { lower: Some(int(1)), upper: Some(int(4)) });
        lp.set_bounds(1, Bounds { lower: Some(rat(1, 2)), upper: Some(int(2)) });
        lp.add(vec![int(1), int(1)], Relation::Le, int(5));
        let Solution::Optimal { value, primal, dual } = solve(&lp).unwrap() else { panic!() };
        assert_eq!(value, int(12));
        assert_eq!(primal, vec![int(3), int(2)]);
        assert_eq!(dual_objective(&lp, &dual), value);
    }

    #[test]
    fn dimension_mismatch() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1), int(1)]);
        lp.add(vec![int(1)], Relation::Le, int(1));
        assert!(matches!(solve(&lp), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn envelope_examples() {
        let pts = vec![(int(0), int(0)), (int(1), int(2))];
        let env = pareto_lower_envelope(&pts).unwrap();
        assert_eq!(env.eval(&rat(1, 2)), Some(int(1)));
        let mix = env.mixture(&pts, &rat(1, 2)).unwrap();
        assert_eq!(mix.parts, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        let single = pareto_lower_envelope(&[(int(1), int(2))]).unwrap();
        assert_eq!(single.eval(&int(1)), Some(int(2)));
        assert_eq!(single.eval(&rat(1, 3)), Some(int(2)));
        assert_eq!(single.eval(&rat(3, 2)), None);
    }

    #[test]
    fn envelope_ignores_dominated_points() {
        let pts = vec![
            (int(-1), int(0)),
            (int(0), int(1)),
            (rat(1, 2), int(3)),
            (int(1), int(2)),
            (rat(1, 2), int(1)),
        ];
        let env = pareto_lower_envelope(&pts).unwrap();
        assert_eq!(env.eval(&int(-1)), Some(int(0)));
        assert_eq!(env.eval(&int(0)), Some(rat(2, 3)));
        assert_eq!(env.eval(&int(1)), Some(int(2)));
    }
}
