//! Dense two-phase primal simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, ratio ties
//! broken by lowest basic index), so runs terminate and are reproducible:
//! the same program always yields the same vertex.

use num_traits::{One, Signed, Zero};

use super::rational::{dot, RatVector, Rational};
use super::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: RatVector,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bound {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn nonneg() -> Self {
        Self {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Self {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: RatVector,
    pub direction: Direction,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// All variables start free.
    pub fn new(direction: Direction, objective: RatVector) -> Self {
        let n = objective.len();
        Self {
            objective,
            direction,
            constraints: Vec::new(),
            bounds: vec![Bound::free(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn all_nonneg(self) -> Self {
        let n = self.num_vars();
        self.with_bounds(vec![Bound::nonneg(); n])
    }

    pub fn constrain(mut self, coeffs: RatVector, relation: Relation, rhs: Rational) -> Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `point` and `value` are meaningful only when `status` is `Optimal`;
/// otherwise they are empty and zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: RatVector,
    pub value: Rational,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            point: Vec::new(),
            value: Rational::zero(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `x_j = offset + sum(sign * y_k)` with every `y_k >= 0`.
struct VarMap {
    offset: Rational,
    terms: Vec<(usize, bool)>,
}

pub fn lp_optimize(lp: &LinearProgram) -> Result<LpSolution, AlgebraError> {
    let n = lp.num_vars();
    if lp.bounds.len() != n {
        return Err(AlgebraError::DimensionMismatch {
            expected: n,
            found: lp.bounds.len(),
        });
    }
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                found: c.coeffs.len(),
            });
        }
    }

    // Shift bounds so every working variable is >= 0.
    let mut maps = Vec::with_capacity(n);
    let mut ny = 0usize;
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    let mut upper_rows = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                if let Some(u) = upper {
                    upper_rows.push((ny, u - l));
                }
                maps.push(VarMap {
                    offset: l.clone(),
                    terms: vec![(ny, true)],
                });
                ny += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap {
                    offset: u.clone(),
                    terms: vec![(ny, false)],
                });
                ny += 1;
            }
            (None, None) => {
                maps.push(VarMap {
                    offset: Rational::zero(),
                    terms: vec![(ny, true), (ny + 1, false)],
                });
                ny += 2;
            }
        }
    }
    let lift = |coeffs: &[Rational]| -> (Vec<Rational>, Rational) {
        let mut row = vec![Rational::zero(); ny];
        let mut shift = Rational::zero();
        for (a, m) in coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            shift += a * &m.offset;
            for &(k, pos) in &m.terms {
                if pos {
                    row[k] += a;
                } else {
                    row[k] -= a;
                }
            }
        }
        (row, shift)
    };
    for c in &lp.constraints {
        let (row, shift) = lift(&c.coeffs);
        rows.push((row, c.relation, &c.rhs - shift));
    }
    for (k, cap) in upper_rows {
        let mut row = vec![Rational::zero(); ny];
        row[k] = Rational::one();
        rows.push((row, Relation::Le, cap));
    }
    let (mut cost, _) = lift(&lp.objective);
    if lp.direction == Direction::Maximize {
        cost.iter_mut().for_each(|c| *c = -&*c);
    }

    let y = match Tableau::build(ny, rows).solve(&cost) {
        Ok(y) => y,
        Err(status) => return Ok(LpSolution::without_point(status)),
    };
    let point: RatVector = maps
        .iter()
        .map(|m| {
            m.terms.iter().fold(m.offset.clone(), |acc, &(k, pos)| {
                if pos {
                    acc + &y[k]
                } else {
                    acc - &y[k]
                }
            })
        })
        .collect();
    let value = dot(&lp.objective, &point);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point,
        value,
    })
}

struct Tableau {
    /// Each row is `[coefficients..., rhs]`.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    num_structural: usize,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn build(ny: usize, rows: Vec<(Vec<Rational>, Relation, Rational)>) -> Self {
        // Normalize to rhs >= 0.
        let rows: Vec<_> = rows
            .into_iter()
            .map(|(row, rel, rhs)| {
                if rhs.is_negative() {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (row.into_iter().map(|a| -a).collect(), flipped, -rhs)
                } else {
                    (row, rel, rhs)
                }
            })
            .collect();
        let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let num_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_artificial = ny + num_slack;
        let width = first_artificial + num_art;
        let mut slack = ny;
        let mut art = first_artificial;
        let mut table = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        for (coeffs, rel, rhs) in rows {
            let mut row = coeffs;
            row.resize(width + 1, Rational::zero());
            match rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
            }
            row[width] = rhs;
            table.push(row);
        }
        Self {
            rows: table,
            basis,
            num_structural: ny,
            first_artificial,
        }
    }

    fn width(&self) -> usize {
        self.rows
            .first()
            .map_or(self.first_artificial, |r| r.len() - 1)
    }

    /// Minimizes `cost . y`; returns the optimal structural values.
    fn solve(mut self, cost: &[Rational]) -> Result<RatVector, LpStatus> {
        let width = self.width();
        if width > self.first_artificial {
            let mut phase1 = vec![Rational::zero(); width];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = Rational::one();
            }
            self.run(&phase1, width)
                .expect("phase one is bounded below by zero");
            let infeasibility: Rational = self
                .basis
                .iter()
                .zip(&self.rows)
                .filter(|(&b, _)| b >= self.first_artificial)
                .map(|(_, r)| r[width].clone())
                .sum();
            if infeasibility.is_positive() {
                return Err(LpStatus::Infeasible);
            }
            self.expel_artificials();
        }
        let mut full_cost = cost.to_vec();
        full_cost.resize(width, Rational::zero());
        self.run(&full_cost, self.first_artificial)?;
        let mut y = vec![Rational::zero(); self.num_structural];
        for (r, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_structural {
                y[b] = r[width].clone();
            }
        }
        Ok(y)
    }

    /// Artificials left basic at level zero are pivoted out, or their row
    /// dropped when it is redundant.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    /// Bland-rule simplex over columns `< allowed`.
    fn run(&mut self, cost: &[Rational], allowed: usize) -> Result<(), LpStatus> {
        let width = self.width();
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: Rational = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(r, &b)| &cost[b] * &r[j])
                    .sum();
                (&cost[j] - z).is_negative()
            });
            let Some(e) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if !r[e].is_positive() {
                    continue;
                }
                let ratio = &r[width] / &r[e];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((l, _)) = leave else {
                return Err(LpStatus::Unbounded);
            };
            self.pivot(l, e);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, pr) in row.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *x -= &f * pr;
                }
            }
        }
        self.basis[r] = c;
    }
}
