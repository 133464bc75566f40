//! Dense two-phase primal simplex.
//!
//! The tableau is kept in condensed (Tucker) form: one row per constraint and
//! one column per nonbasic variable, with row and column labels swapped on
//! each pivot. Slack columns never need to be stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
pub const PHASE1_TOL: f64 = 1e-8;
pub const FEASIBILITY_TOL: f64 = 1e-8;
const COST_TOL: f64 = 1e-9;
/// Primal slack allowed by the first pass of the Harris ratio test.
const HARRIS_TOL: f64 = 1e-10;
/// Pivots between rebuilds of the tableau from the original rows.
const REINVERT_EVERY: usize = 400;
/// Primal infeasibility the dual simplex still tolerates.
const DUAL_FEAS_TOL: f64 = 1e-9;
/// Dual slack allowed by the first pass of the dual ratio test.
const DUAL_HARRIS_TOL: f64 = 1e-9;
const COST_PERTURBATION: f64 = 1e-7;
const RHS_PERTURBATION: f64 = 1e-7;
/// Pivots smaller than this fraction of their row (or column) are avoided.
const REL_PIVOT_TOL: f64 = 1e-7;
/// Primal infeasibility that signals a numerically lost basis.
const LOST_FEASIBILITY: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective . x` subject to linear constraints and per-variable bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `-inf` for no lower bound.
    pub lower: Vec<f64>,
    /// `+inf` for no upper bound.
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// All variables start nonnegative and unbounded above.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            num_vars: n,
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn set_free(&mut self, var: usize) {
        self.lower[var] = f64::NEG_INFINITY;
        self.upper[var] = f64::INFINITY;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn count(&self, relation: Relation) -> usize {
        self.constraints.iter().filter(|c| c.relation == relation).count()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        if self.objective.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(Error::MalformedLp("objective/bounds length differs from num_vars".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp("non-finite objective coefficient".into()));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(Error::MalformedLp(format!("invalid bounds [{l}, {u}] on variable {j}")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedLp(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedLp(format!("constraint {i} has a non-finite entry")));
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal { solution: Vec<f64>, objective_value: f64, iterations: usize },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }
}

/// How an original variable is expressed in nonnegative standard-form columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = offset + sign * y[col]`
    Shifted { col: usize, offset: f64, sign: f64 },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

/// Condensed tableau. Columns of `a0` are the standard-form variables `z`
/// (structural and surplus); each row `i` owns one more variable `u_i`, a
/// slack or an artificial, with `a0[i] . z + u_i = b0[i]`.
///
/// Labels: `z_j` is `j`, the slack of row `i` is `cols + 2i` and its
/// artificial is `cols + 2i + 1`.
#[derive(Clone, Debug)]
struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols`; `x_B[i] = rhs[i] - sum_j t[i][j] x_N[j]`.
    t: Vec<f64>,
    rhs: Vec<f64>,
    /// Reduced costs; the objective is `obj + cost . x_N`.
    cost1: Vec<f64>,
    cost2: Vec<f64>,
    obj1: f64,
    obj2: f64,
    row_label: Vec<usize>,
    col_label: Vec<usize>,
    /// Columns temporarily barred from entering (phase 1 only).
    blocked: Vec<bool>,
    iterations: usize,
    since_reinvert: usize,
    /// Rows whose own `u` is an artificial.
    has_artificial: Vec<bool>,
    /// Anti-degeneracy relaxation of each row's right-hand side.
    rhs_shift: Vec<f64>,
    /// Rows the dual simplex could not pivot on stably.
    skipped: Vec<bool>,
    /// Whether the phase-2 reduced costs carry the anti-degeneracy shift.
    perturbed: bool,
    a0: Vec<f64>,
    b0: Vec<f64>,
    /// Phase-2 cost of each `z` column.
    zcost: Vec<f64>,
}

enum DualRatio {
    Pivot(usize),
    /// No column can repair the row: the program is infeasible.
    None,
    TooSmall,
}

enum Step {
    Optimal,
    Unbounded,
    Infeasible,
    Pivoted,
}

impl Tableau {
    fn is_artificial(&self, label: usize) -> bool {
        label >= self.cols && (label - self.cols) % 2 == 1
    }

    /// Row index of the `u` variable behind `label`, if it is one.
    fn u_row(&self, label: usize) -> Option<usize> {
        (label >= self.cols).then(|| (label - self.cols) / 2)
    }

    fn label_costs(&self, label: usize) -> (f64, f64) {
        if label < self.cols {
            (0.0, self.zcost[label])
        } else if self.is_artificial(label) {
            (1.0, 0.0)
        } else {
            (0.0, 0.0)
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + s];
        let inv = 1.0 / p;
        {
            let prow = &mut self.t[r * cols..(r + 1) * cols];
            for v in prow.iter_mut() {
                *v *= inv;
            }
            prow[s] = inv;
        }
        self.rhs[r] *= inv;
        let prow: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        let br = self.rhs[r];
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            let f = row[s];
            if f == 0.0 {
                continue;
            }
            for (v, &pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            row[s] = -f * inv;
            self.rhs[i] -= f * br;
        }
        for (cost, obj) in [(&mut self.cost1, &mut self.obj1), (&mut self.cost2, &mut self.obj2)] {
            let f = cost[s];
            if f != 0.0 {
                for (v, &pv) in cost.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                cost[s] = -f * inv;
                *obj += f * br;
            }
        }
        std::mem::swap(&mut self.row_label[r], &mut self.col_label[s]);
        self.iterations += 1;
        self.since_reinvert += 1;
        self.blocked.iter_mut().for_each(|b| *b = false);
    }

    /// Appends the row `a . z + u = b` with its slack `u` basic.
    fn append_row(&mut self, a: &[f64], b: f64) {
        let cols = self.cols;
        let mut row = vec![0.0; cols];
        let mut rhs = b;
        for (c, slot) in row.iter_mut().enumerate() {
            let label = self.col_label[c];
            if label < cols {
                *slot = a[label];
            }
        }
        for p in 0..self.rows {
            let label = self.row_label[p];
            if label >= cols || a[label] == 0.0 {
                continue;
            }
            let w = a[label];
            rhs -= w * self.rhs[p];
            for (v, &tv) in row.iter_mut().zip(&self.t[p * cols..(p + 1) * cols]) {
                *v -= w * tv;
            }
        }
        self.t.extend_from_slice(&row);
        self.rhs.push(rhs);
        self.a0.extend_from_slice(a);
        self.b0.push(b);
        self.row_label.push(cols + 2 * self.rows);
        self.skipped.push(false);
        self.has_artificial.push(false);
        self.rhs_shift.push(0.0);
        self.rows += 1;
    }

    fn row_rhs(&self, i: usize) -> f64 {
        self.b0[i] + self.rhs_shift[i]
    }

    /// Relaxes every row whose slack is basic by a small row-dependent
    /// amount, breaking primal degeneracy. Only the slack's own value
    /// moves, so no other entry of the tableau changes.
    fn perturb_rhs(&mut self) {
        for p in 0..self.rows {
            let label = self.row_label[p];
            if label < self.cols || self.is_artificial(label) {
                continue;
            }
            let i = (label - self.cols) / 2;
            let u = (i as f64 * 0.618_033_988_749_895).fract();
            let delta = RHS_PERTURBATION * (1.0 + u);
            self.rhs_shift[i] += delta;
            self.rhs[p] += delta;
        }
    }

    fn has_negative_cost1(&self) -> bool {
        (0..self.cols).any(|c| !self.is_artificial(self.col_label[c]) && self.cost1[c] < -COST_TOL)
    }

    fn has_negative_cost(&self) -> bool {
        (0..self.cols).any(|c| !self.is_artificial(self.col_label[c]) && self.cost2[c] < -COST_TOL)
    }

    /// Recomputes the tableau for the current basis from the original rows.
    /// Returns `false` (leaving the tableau untouched) if the basis looks singular.
    fn reinvert(&mut self) -> bool {
        self.since_reinvert = 0;
        let (rows, cols) = (self.rows, self.cols);
        let basic_z: Vec<(usize, usize)> = (0..rows)
            .filter(|&p| self.row_label[p] < cols)
            .map(|p| (p, self.row_label[p]))
            .collect();
        let free_u: Vec<(usize, usize)> = (0..cols)
            .filter_map(|c| self.u_row(self.col_label[c]).map(|i| (c, i)))
            .collect();
        let r = basic_z.len();
        if free_u.len() != r {
            return false;
        }
        let mut m = vec![0.0; r * r];
        for (a, &(_, i)) in free_u.iter().enumerate() {
            for (k, &(_, s)) in basic_z.iter().enumerate() {
                m[a * r + k] = self.a0[i * cols + s];
            }
        }
        let Some(minv) = invert(&m, r) else {
            return false;
        };
        // y = minv . a0[free rows, :], beta = minv . b0[free rows]
        let mut y = vec![0.0; r * cols];
        let mut beta = vec![0.0; r];
        for k in 0..r {
            let yk = &mut y[k * cols..(k + 1) * cols];
            for (a, &(_, i)) in free_u.iter().enumerate() {
                let f = minv[k * r + a];
                if f == 0.0 {
                    continue;
                }
                for (v, &av) in yk.iter_mut().zip(&self.a0[i * cols..(i + 1) * cols]) {
                    *v += f * av;
                }
                beta[k] += f * self.row_rhs(i);
            }
        }
        let mut t = vec![0.0; rows * cols];
        let mut rhs = vec![0.0; rows];
        for (k, &(p, _)) in basic_z.iter().enumerate() {
            rhs[p] = beta[k];
            for c in 0..cols {
                let label = self.col_label[c];
                if label < cols {
                    t[p * cols + c] = y[k * cols + label];
                }
            }
            for (a, &(c, _)) in free_u.iter().enumerate() {
                t[p * cols + c] = minv[k * r + a];
            }
        }
        let mut wm = vec![0.0; r];
        let mut wy = vec![0.0; cols];
        for p in 0..rows {
            let Some(i) = self.u_row(self.row_label[p]) else {
                continue;
            };
            let arow = &self.a0[i * cols..(i + 1) * cols];
            wm.iter_mut().for_each(|v| *v = 0.0);
            wy.iter_mut().for_each(|v| *v = 0.0);
            let mut b = self.row_rhs(i);
            for (k, &(_, s)) in basic_z.iter().enumerate() {
                let w = arow[s];
                if w == 0.0 {
                    continue;
                }
                b -= w * beta[k];
                for (v, &yv) in wy.iter_mut().zip(&y[k * cols..(k + 1) * cols]) {
                    *v += w * yv;
                }
                for (v, &mv) in wm.iter_mut().zip(&minv[k * r..(k + 1) * r]) {
                    *v += w * mv;
                }
            }
            rhs[p] = b;
            for c in 0..cols {
                let label = self.col_label[c];
                if label < cols {
                    t[p * cols + c] = arow[label] - wy[label];
                }
            }
            for (a, &(c, _)) in free_u.iter().enumerate() {
                t[p * cols + c] = -wm[a];
            }
        }
        let mut cost1 = vec![0.0; cols];
        let mut cost2 = vec![0.0; cols];
        for c in 0..cols {
            (cost1[c], cost2[c]) = self.label_costs(self.col_label[c]);
        }
        let (mut obj1, mut obj2) = (0.0, 0.0);
        for p in 0..rows {
            let (c1, c2) = self.label_costs(self.row_label[p]);
            if c1 == 0.0 && c2 == 0.0 {
                continue;
            }
            obj1 += c1 * rhs[p];
            obj2 += c2 * rhs[p];
            let row = &t[p * cols..(p + 1) * cols];
            for c in 0..cols {
                cost1[c] -= c1 * row[c];
                cost2[c] -= c2 * row[c];
            }
        }
        self.t = t;
        self.rhs = rhs;
        self.cost1 = cost1;
        self.cost2 = cost2;
        self.obj1 = obj1;
        self.obj2 = obj2;
        if self.perturbed {
            self.perturb_costs();
        }
        true
    }

    /// Raises every nonbasic phase-2 reduced cost by a small label-dependent
    /// amount. This breaks the ties that make the dual simplex stall; the
    /// next reinversion with `perturbed` unset removes it.
    fn perturb_costs(&mut self) {
        self.perturbed = true;
        for c in 0..self.cols {
            let u = (self.col_label[c] as f64 * 0.618_033_988_749_895).fract();
            self.cost2[c] = self.cost2[c].max(0.0) + COST_PERTURBATION * (1.0 + u);
        }
    }

    /// Pivots artificials out wherever some column can replace one without
    /// losing primal feasibility, which skips most of phase 1 on easy starts.
    fn crash(&mut self) {
        let cols = self.cols;
        for r in 0..self.rows {
            if !self.is_artificial(self.row_label[r]) {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for s in 0..cols {
                let a = self.t[r * cols + s];
                if self.is_artificial(self.col_label[s]) || a <= PIVOT_TOL || best.is_some_and(|(_, b)| a <= b) {
                    continue;
                }
                let theta = self.rhs[r] / a;
                let feasible = (0..self.rows).all(|i| {
                    let ai = self.t[i * cols + s];
                    ai <= PIVOT_TOL || self.rhs[i] - ai * theta >= 0.0
                });
                if feasible {
                    best = Some((s, a));
                }
            }
            if let Some((s, _)) = best {
                self.pivot(r, s);
            }
        }
    }

    /// Pivot entry of row `i` in column `s` as seen by the ratio test. Basic
    /// artificials sit at zero and block movement in either direction.
    fn ratio_entry(&self, i: usize, s: usize) -> f64 {
        let a = self.t[i * self.cols + s];
        if self.is_artificial(self.row_label[i]) {
            a.abs()
        } else {
            a
        }
    }

    /// Smallest acceptable pivot in column `s`.
    fn pivot_floor(&self, s: usize) -> f64 {
        let scale = (0..self.rows).map(|i| self.t[i * self.cols + s].abs()).fold(0.0, f64::max);
        PIVOT_TOL.max(REL_PIVOT_TOL * scale)
    }

    fn ratio_bland(&self, s: usize) -> Option<usize> {
        let floor = self.pivot_floor(s);
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.ratio_entry(i, s);
            if a <= floor {
                continue;
            }
            let ratio = self.rhs[i].max(0.0) / a;
            let better = match leave {
                None => true,
                Some((li, lr)) => {
                    if (ratio - lr).abs() <= 1e-12 * (1.0 + lr) {
                        self.row_label[i] < self.row_label[li]
                    } else {
                        ratio < lr
                    }
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        leave.map(|(i, _)| i)
    }

    /// Two-pass ratio test: among rows within a small primal tolerance of the
    /// minimum ratio, take the largest pivot.
    fn ratio_harris(&self, s: usize) -> Option<usize> {
        let floor = self.pivot_floor(s);
        let mut theta = f64::INFINITY;
        for i in 0..self.rows {
            let a = self.ratio_entry(i, s);
            if a > floor {
                theta = theta.min((self.rhs[i].max(0.0) + HARRIS_TOL) / a);
            }
        }
        if !theta.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.ratio_entry(i, s);
            if a > floor && self.rhs[i].max(0.0) / a <= theta && best.is_none_or(|(_, ba)| a > ba) {
                best = Some((i, a));
            }
        }
        best.map(|(i, _)| i)
    }

    fn primal_step(&mut self, phase2: bool, bland: bool) -> Step {
        let cost = if phase2 { &self.cost2 } else { &self.cost1 };
        let mut enter: Option<usize> = None;
        for j in 0..self.cols {
            if self.is_artificial(self.col_label[j]) || self.blocked[j] || cost[j] >= -COST_TOL {
                continue;
            }
            enter = match enter {
                None => Some(j),
                Some(e) if bland && self.col_label[j] < self.col_label[e] => Some(j),
                Some(e) if !bland && cost[j] < cost[e] => Some(j),
                keep => keep,
            };
        }
        let Some(s) = enter else {
            return Step::Optimal;
        };
        let leave = if bland { self.ratio_bland(s) } else { self.ratio_harris(s) };
        match leave {
            // Phase 1 is bounded below, so a missing ratio row is round-off: bar the column.
            None if !phase2 => {
                self.blocked[s] = true;
                Step::Pivoted
            }
            None => Step::Unbounded,
            Some(r) => {
                self.pivot(r, s);
                Step::Pivoted
            }
        }
    }

    /// One dual simplex pivot on the phase-2 objective, assuming the reduced
    /// costs are (nearly) nonnegative. Rows whose only pivots are tiny
    /// relative to the row are skipped until the next successful pivot.
    fn dual_step(&mut self, bland: bool) -> Step {
        loop {
            let mut leave: Option<usize> = None;
            for i in 0..self.rows {
                if self.rhs[i] >= -DUAL_FEAS_TOL || self.is_artificial(self.row_label[i]) || self.skipped[i] {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(l) if bland && self.row_label[i] < self.row_label[l] => Some(i),
                    Some(l) if !bland && self.rhs[i] < self.rhs[l] => Some(i),
                    keep => keep,
                };
            }
            let Some(r) = leave else {
                return Step::Optimal;
            };
            match self.dual_ratio(r, bland) {
                DualRatio::Pivot(s) => {
                    self.pivot(r, s);
                    self.skipped.iter_mut().for_each(|b| *b = false);
                    return Step::Pivoted;
                }
                DualRatio::None => return Step::Infeasible,
                DualRatio::TooSmall => self.skipped[r] = true,
            }
        }
    }

    fn dual_ratio(&self, r: usize, bland: bool) -> DualRatio {
        let cols = self.cols;
        let row = &self.t[r * cols..(r + 1) * cols];
        let usable = |c: usize| !self.is_artificial(self.col_label[c]);
        let scale = (0..cols).filter(|&c| usable(c)).map(|c| row[c].abs()).fold(0.0, f64::max);
        let floor = PIVOT_TOL.max(REL_PIVOT_TOL * scale);
        if !(0..cols).any(|c| usable(c) && row[c] < -PIVOT_TOL) {
            return DualRatio::None;
        }
        let eligible = |c: usize| usable(c) && row[c] < -floor;
        let mut theta = f64::INFINITY;
        for c in (0..cols).filter(|&c| eligible(c)) {
            theta = theta.min((self.cost2[c].max(0.0) + DUAL_HARRIS_TOL) / -row[c]);
        }
        if !theta.is_finite() {
            return DualRatio::TooSmall;
        }
        let mut best: Option<(usize, f64)> = None;
        for c in (0..cols).filter(|&c| eligible(c)) {
            if self.cost2[c].max(0.0) / -row[c] > theta {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, _)) if bland => self.col_label[c] < self.col_label[b],
                Some((_, ba)) => -row[c] > ba,
            };
            if better {
                best = Some((c, -row[c]));
            }
        }
        DualRatio::Pivot(best.expect("theta is attained").0)
    }

    /// Pivots until `step` stops. `primal` runs must keep the basis feasible;
    /// losing feasibility beyond round-off aborts.
    fn run(&mut self, budget: &Budget, primal: bool, mut step: impl FnMut(&mut Self, bool) -> Step) -> Result<Step> {
        loop {
            let done = self.iterations - budget.start;
            if done >= budget.limit {
                return Err(Error::IterationLimit(budget.limit));
            }
            if self.since_reinvert >= REINVERT_EVERY {
                let rebuilt = self.reinvert();
                if primal && !rebuilt {
                    return Err(Error::NumericalTrouble { violation: f64::NAN });
                }
                let worst = self.min_rhs();
                if primal && worst < -LOST_FEASIBILITY {
                    return Err(Error::NumericalTrouble { violation: -worst });
                }
            }
            match step(self, done >= budget.bland_after) {
                Step::Pivoted => continue,
                other => return Ok(other),
            }
        }
    }

    fn min_rhs(&self) -> f64 {
        (0..self.rows)
            .filter(|&i| !self.is_artificial(self.row_label[i]))
            .map(|i| self.rhs[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Phase 2 from a basis that is dual feasible, primal feasible, or both.
    fn optimize(&mut self, budget: &Budget) -> Result<Step> {
        for _ in 0..8 {
            if self.min_rhs() < -DUAL_FEAS_TOL {
                self.perturb_costs();
                let step = self.run(budget, false, |t, bland| t.dual_step(bland));
                self.perturbed = false;
                self.skipped.iter_mut().for_each(|b| *b = false);
                if !self.reinvert() {
                    return Err(Error::NumericalTrouble { violation: f64::NAN });
                }
                if let Step::Infeasible = step? {
                    return Ok(Step::Infeasible);
                }
            } else if self.has_negative_cost() {
                self.perturb_rhs();
                let step = self.run(budget, true, |t, bland| t.primal_step(true, bland));
                self.rhs_shift.iter_mut().for_each(|d| *d = 0.0);
                if !self.reinvert() {
                    return Err(Error::NumericalTrouble { violation: f64::NAN });
                }
                if let Step::Unbounded = step? {
                    return Ok(Step::Unbounded);
                }
            } else {
                break;
            }
        }
        Ok(Step::Optimal)
    }
}

struct Budget {
    start: usize,
    bland_after: usize,
    limit: usize,
}

/// A simplex solver that keeps its final basis, so that inequality rows can
/// be added and the program re-solved from there with the dual simplex.
#[derive(Clone, Debug)]
pub struct Solver {
    lp: LinearProgram,
    maps: Vec<VarMap>,
    ny: usize,
    tab: Tableau,
    solved: bool,
}

impl Solver {
    pub fn new(lp: &LinearProgram) -> Result<Self> {
        lp.validate()?;

        let mut maps = Vec::with_capacity(lp.num_vars);
        let mut ny = 0usize;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for j in 0..lp.num_vars {
            let (l, u) = (lp.lower[j], lp.upper[j]);
            let map = if l.is_finite() {
                if u.is_finite() {
                    bound_rows.push((ny, u - l));
                }
                VarMap::Shifted { col: ny, offset: l, sign: 1.0 }
            } else if u.is_finite() {
                VarMap::Shifted { col: ny, offset: u, sign: -1.0 }
            } else {
                ny += 1;
                VarMap::Split { pos: ny - 1, neg: ny }
            };
            ny += 1;
            maps.push(map);
        }

        let mut obj = vec![0.0; ny];
        for (j, m) in maps.iter().enumerate() {
            let c = lp.objective[j];
            match *m {
                VarMap::Shifted { col, sign, .. } => obj[col] += c * sign,
                VarMap::Split { pos, neg } => {
                    obj[pos] += c;
                    obj[neg] -= c;
                }
            }
        }

        let mut std_rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                let (coeffs, rhs) = standard_row(&maps, ny, &c.coeffs, c.rhs);
                (coeffs, c.relation, rhs)
            })
            .collect();
        for &(col, width) in &bound_rows {
            let mut coeffs = vec![0.0; ny];
            coeffs[col] = 1.0;
            std_rows.push((coeffs, Relation::Le, width));
        }

        // Orient every row so its starting basic variable is nonnegative: a
        // slack for `<=` rows with `rhs >= 0`, otherwise an artificial (plus a
        // surplus column for `>=` rows).
        let mut surplus_rows = Vec::new();
        let mut needs_artificial = Vec::with_capacity(std_rows.len());
        for (i, (coeffs, relation, rhs)) in std_rows.iter_mut().enumerate() {
            if *rhs < 0.0 {
                *rhs = -*rhs;
                coeffs.iter_mut().for_each(|a| *a = -*a);
                *relation = match *relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            if *relation == Relation::Ge && *rhs == 0.0 {
                coeffs.iter_mut().for_each(|a| *a = -*a);
                *relation = Relation::Le;
            }
            match *relation {
                Relation::Le => needs_artificial.push(false),
                Relation::Eq => needs_artificial.push(true),
                Relation::Ge => {
                    surplus_rows.push(i);
                    needs_artificial.push(true);
                }
            }
        }

        let rows = std_rows.len();
        let cols = ny + surplus_rows.len();
        let mut t = vec![0.0; rows * cols];
        let mut rhs = vec![0.0; rows];
        for (i, (coeffs, _, b)) in std_rows.iter().enumerate() {
            t[i * cols..i * cols + ny].copy_from_slice(coeffs);
            rhs[i] = *b;
        }
        for (k, &i) in surplus_rows.iter().enumerate() {
            // a.y - s = b  =>  art = b - a.y + s
            t[i * cols + ny + k] = -1.0;
        }

        let row_label: Vec<usize> = (0..rows).map(|i| cols + 2 * i + needs_artificial[i] as usize).collect();
        let mut cost1 = vec![0.0; cols];
        let mut obj1 = 0.0;
        for i in (0..rows).filter(|&i| needs_artificial[i]) {
            for j in 0..cols {
                cost1[j] -= t[i * cols + j];
            }
            obj1 += rhs[i];
        }
        let mut cost2 = vec![0.0; cols];
        cost2[..ny].copy_from_slice(&obj);

        let tab = Tableau {
            rows,
            cols,
            a0: t.clone(),
            b0: rhs.clone(),
            zcost: cost2.clone(),
            t,
            rhs,
            cost1,
            cost2,
            obj1,
            obj2: 0.0,
            row_label,
            col_label: (0..cols).collect(),
            blocked: vec![false; cols],
            iterations: 0,
            since_reinvert: 0,
            perturbed: false,
            skipped: vec![false; rows],
            has_artificial: needs_artificial,
            rhs_shift: vec![0.0; rows],
        };
        Ok(Solver { lp: lp.clone(), maps, ny, tab, solved: false })
    }

    /// The program as currently posed, including added rows.
    pub fn program(&self) -> &LinearProgram {
        &self.lp
    }

    /// Total simplex pivots so far, across all solves.
    pub fn iterations(&self) -> usize {
        self.tab.iterations
    }

    /// Adds an inequality row. After a solve, the next [`Solver::solve`]
    /// starts from the previous optimal basis.
    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<()> {
        if coeffs.len() != self.lp.num_vars {
            return Err(Error::MalformedLp(format!(
                "constraint has {} coefficients, expected {}",
                coeffs.len(),
                self.lp.num_vars
            )));
        }
        if !rhs.is_finite() || coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::MalformedLp("constraint has a non-finite entry".into()));
        }
        let sign = match relation {
            Relation::Le => 1.0,
            Relation::Ge => -1.0,
            Relation::Eq => return Err(Error::MalformedLp("only inequality rows can be added".into())),
        };
        let (mut a, b) = standard_row(&self.maps, self.ny, &coeffs, rhs);
        a.iter_mut().for_each(|v| *v *= sign);
        a.resize(self.tab.cols, 0.0);
        self.tab.append_row(&a, sign * b);
        self.lp.add_constraint(coeffs, relation, rhs);
        Ok(())
    }

    pub fn solve(&mut self) -> Result<LpOutcome> {
        let tab = &mut self.tab;
        let size = tab.rows + tab.cols;
        let budget = Budget { start: tab.iterations, bland_after: 5 * size, limit: 50 * size + 10_000 };
        if !self.solved {
            if (0..tab.rows).any(|i| tab.is_artificial(tab.row_label[i])) {
                tab.crash();
                for _ in 0..4 {
                    if !matches!(tab.run(&budget, true, |t, bland| t.primal_step(false, bland))?, Step::Optimal) {
                        return Err(Error::NumericalTrouble { violation: f64::NAN });
                    }
                    // Confirm on a rebuilt tableau.
                    let stale = tab.since_reinvert > 0;
                    if !stale || !tab.reinvert() || !tab.has_negative_cost1() {
                        break;
                    }
                }
                if tab.obj1 > PHASE1_TOL {
                    return Ok(LpOutcome::Infeasible);
                }
                tab.drive_out_artificials();
            }
            self.solved = true;
        }
        match tab.optimize(&budget)? {
            Step::Unbounded => return Ok(LpOutcome::Unbounded),
            Step::Infeasible => return Ok(LpOutcome::Infeasible),
            _ => {}
        }

        let mut y = vec![0.0; tab.cols];
        for (i, &label) in tab.row_label.iter().enumerate() {
            if label < tab.cols {
                y[label] = tab.rhs[i];
            }
        }
        let x: Vec<f64> = self
            .maps
            .iter()
            .map(|m| match *m {
                VarMap::Shifted { col, offset, sign } => offset + sign * y[col],
                VarMap::Split { pos, neg } => y[pos] - y[neg],
            })
            .collect();
        let violation = self.lp.max_violation(&x);
        if violation > FEASIBILITY_TOL {
            return Err(Error::NumericalTrouble { violation });
        }
        Ok(LpOutcome::Optimal { objective_value: self.lp.objective_at(&x), solution: x, iterations: tab.iterations })
    }
}

impl Tableau {
    /// Pivots zero-level basic artificials out where a usable column exists.
    fn drive_out_artificials(&mut self) {
        let cols = self.cols;
        for r in 0..self.rows {
            if !self.is_artificial(self.row_label[r]) {
                continue;
            }
            let pick = (0..cols)
                .filter(|&j| !self.is_artificial(self.col_label[j]))
                .max_by(|&a, &b| self.t[r * cols + a].abs().total_cmp(&self.t[r * cols + b].abs()));
            if let Some(s) = pick {
                if self.t[r * cols + s].abs() > PIVOT_TOL {
                    self.pivot(r, s);
                }
            }
        }
    }
}

/// `coeffs . x <= rhs` rewritten over the standard-form columns.
fn standard_row(maps: &[VarMap], ny: usize, coeffs: &[f64], rhs: f64) -> (Vec<f64>, f64) {
    let mut out = vec![0.0; ny];
    let mut rhs = rhs;
    for (j, m) in maps.iter().enumerate() {
        let a = coeffs[j];
        if a == 0.0 {
            continue;
        }
        match *m {
            VarMap::Shifted { col, offset, sign } => {
                out[col] += a * sign;
                rhs -= a * offset;
            }
            VarMap::Split { pos, neg } => {
                out[pos] += a;
                out[neg] -= a;
            }
        }
    }
    (out, rhs)
}

/// Solves `lp`. Optimal results are verified against the original constraints.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    Solver::new(lp)?.solve()
}

/// Inverse of the row-major `n x n` matrix `m` by Gauss-Jordan elimination
/// with partial pivoting; `None` if a pivot falls below a relative threshold.
fn invert(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))?;
        if a[piv * n + col].abs() <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        let d = 1.0 / a[col * n + col];
        for j in 0..n {
            a[col * n + j] *= d;
            inv[col * n + j] *= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[i * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[i * n + j] -= f * a[col * n + j];
                inv[i * n + j] -= f * inv[col * n + j];
            }
        }
    }
    Some(inv)
}
