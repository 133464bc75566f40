//! Sampled linear programs for the classes of extremal polynomials that bound
//! `gap(v)`, and their conversion into rigorous bounds.
//!
//! Each program fixes `f(0) = 1`, so the ratio `f^(0) / f(0)` becomes the
//! linear objective `c_0`. The continuous sign condition is imposed on a
//! uniform grid and then tightened by adding the most violated points of the
//! previous solution (a few exchange rounds). Whatever violation remains is
//! measured rigorously and removed with a constant shift `g = f + sign * defect`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, SpeedVector};
use crate::lpcore::{self, LinearProgram, LpOutcome, Relation};
use crate::trigpoly::{self, CertifiedExtremum, TrigPoly};

/// Violations shallower than this are left to the final shift.
const REFINE_TOL: f64 = 1e-11;
/// Sample points closer than this are merged.
const POINT_MERGE_TOL: f64 = 1e-7;
/// Each violated interval is split into this many parts.
const REFINE_SPLIT: usize = 4;
/// Exchange rounds stop once the certified defect is below this.
const DEFECT_TARGET: f64 = 1e-9;
/// For lower bounds the shifted polynomial must keep `g(0)` above this.
const MIN_LOWER_NORMALIZATION: f64 = 1e-6;
pub const DEFAULT_REFINE_ROUNDS: usize = 40;

/// Which side of `gap(v)` a program bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// `f >= 0` on `[0, 1/2]`, `c_k <= 0` off the speeds; gives an upper bound.
    Plus,
    /// `f <= 0` on a tail interval, `c_k >= 0` off the speeds; gives a lower bound.
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub v: SpeedVector,
    pub sign: Sign,
    /// Selects the improved lower-bound class on `[1/q, 1/2]`.
    pub q: Option<u64>,
    pub degree: usize,
    pub samples: usize,
    pub certify: bool,
    /// Exchange rounds after the initial grid solve; 0 keeps the plain grid.
    pub refine_rounds: usize,
}

/// `2 max(v)`.
pub fn default_degree(v: &SpeedVector) -> usize {
    2 * v.max_speed() as usize
}

/// `8 D + 1`.
pub fn default_samples(degree: usize) -> usize {
    8 * degree + 1
}

impl BoundSpec {
    fn with_sign(v: SpeedVector, sign: Sign, q: Option<u64>) -> Self {
        let degree = default_degree(&v);
        BoundSpec {
            v,
            sign,
            q,
            degree,
            samples: default_samples(degree),
            certify: true,
            refine_rounds: DEFAULT_REFINE_ROUNDS,
        }
    }

    pub fn upper(v: SpeedVector) -> Self {
        Self::with_sign(v, Sign::Plus, None)
    }

    pub fn lower(v: SpeedVector) -> Self {
        Self::with_sign(v, Sign::Minus, None)
    }

    pub fn lower_q(v: SpeedVector, q: u64) -> Self {
        Self::with_sign(v, Sign::Minus, Some(q))
    }

    /// Sets the degree and resets the sample count to its default for that degree.
    pub fn degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self.samples = default_samples(degree);
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn certify(mut self, certify: bool) -> Self {
        self.certify = certify;
        self
    }

    pub fn refine_rounds(mut self, rounds: usize) -> Self {
        self.refine_rounds = rounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < self.v.max_speed() as usize {
            return Err(Error::InvalidArgument(format!(
                "degree {} is below the largest speed {}",
                self.degree,
                self.v.max_speed()
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidArgument("need at least 2 sample points".into()));
        }
        match (self.sign, self.q) {
            (Sign::Plus, Some(_)) => {
                Err(Error::InvalidArgument("the q-class is only defined for lower bounds".into()))
            }
            (Sign::Minus, Some(q)) if q < 3 => Err(Error::InvalidArgument(format!("q = {q} must be at least 3"))),
            (Sign::Minus, None) if self.v.len() < 2 => {
                Err(Error::InvalidArgument("the lower-bound class needs at least two speeds".into()))
            }
            _ => Ok(()),
        }
    }

    /// Interval on which the sign condition is imposed.
    pub fn region(&self) -> (f64, f64) {
        match (self.sign, self.q) {
            (Sign::Plus, _) => (0.0, 0.5),
            (Sign::Minus, Some(q)) => (1.0 / q as f64, 0.5),
            (Sign::Minus, None) => {
                let s = self.v.speeds();
                let n = s.len();
                (1.0 / (s[n - 1] + s[n - 2]) as f64, 0.5)
            }
        }
    }

    /// Coefficient indices free of the sign condition: 0 and the speeds.
    pub fn is_free_index(&self, k: usize) -> bool {
        k == 0 || self.v.contains(k as u64)
    }

    /// Cap on sample rows accumulated by the exchange rounds.
    pub fn max_points(&self) -> usize {
        (16 * self.samples).max(4000)
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.region();
        let n = self.samples;
        (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
    }
}

/// `[1, 2 cos(2 pi x), ..., 2 cos(2 pi D x)]`, so that `row . c = f(x)`.
fn evaluation_row(degree: usize, x: f64) -> Vec<f64> {
    let mut row = vec![1.0; degree + 1];
    for (k, slot) in row.iter_mut().enumerate().skip(1) {
        *slot = 2.0 * (2.0 * std::f64::consts::PI * k as f64 * x).cos();
    }
    row
}

/// The sampled program on the spec's uniform grid.
pub fn build_lp(spec: &BoundSpec) -> Result<LinearProgram> {
    spec.validate()?;
    Ok(build_lp_at(spec, &spec.grid()))
}

fn build_lp_at(spec: &BoundSpec, points: &[f64]) -> LinearProgram {
    let d = spec.degree;
    let eps = spec.sign.factor();
    let mut objective = vec![0.0; d + 1];
    objective[0] = eps;
    let mut lp = LinearProgram::new(objective);
    for j in 0..=d {
        lp.set_free(j);
    }
    lp.add_constraint(evaluation_row(d, 0.0), Relation::Eq, 1.0);
    for &x in points {
        let row = evaluation_row(d, x).into_iter().map(|a| eps * a).collect();
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    for k in (1..=d).filter(|&k| !spec.is_free_index(k)) {
        let mut row = vec![0.0; d + 1];
        row[k] = eps;
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    lp
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundStatus {
    Certified,
    SolvedUncertified,
    Infeasible,
    Unbounded,
}

impl BoundStatus {
    pub fn code(self) -> &'static str {
        match self {
            BoundStatus::Certified => "certified",
            BoundStatus::SolvedUncertified => "uncertified",
            BoundStatus::Infeasible => "infeasible",
            BoundStatus::Unbounded => "unbounded",
        }
    }
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub sign: Sign,
    /// For the q-class: the bound holds only if the maximum of `mu(t v)` is
    /// attained at a time with denominator `q`.
    pub assumes_denominator: Option<u64>,
    pub degree: usize,
    /// Highest index with a non-negligible coefficient in the solution.
    pub active_degree: usize,
    pub samples: usize,
    /// Total sample rows in the final program, including exchange points.
    pub lp_points: usize,
    pub refine_rounds_used: usize,
    pub lp_iterations: usize,
    /// `f^(0) / f(0)` of the raw solution.
    pub lp_value: Option<f64>,
    /// The repaired polynomial when certified, else the raw solution.
    pub polynomial: Option<TrigPoly>,
    pub certified_value: Option<f64>,
    /// The constant `defect` added as `sign * defect`.
    pub repair_shift: f64,
    /// `2 sum e_k` over zeroed coefficients of the wrong sign.
    pub coefficient_repair: f64,
    /// Certified minimum of `sign * f` over the region before the shift.
    pub region_min: Option<f64>,
    pub status: BoundStatus,
}

impl BoundResult {
    fn unsolved(spec: &BoundSpec, status: BoundStatus, lp_points: usize, rounds: usize) -> Self {
        BoundResult {
            sign: spec.sign,
            assumes_denominator: spec.q,
            degree: spec.degree,
            active_degree: 0,
            samples: spec.samples,
            lp_points,
            refine_rounds_used: rounds,
            lp_iterations: 0,
            lp_value: None,
            polynomial: None,
            certified_value: None,
            repair_shift: 0.0,
            coefficient_repair: 0.0,
            region_min: None,
            status,
        }
    }
}

/// Minimizes `g` on a bracket: golden-section search followed by Newton polishing.
fn local_min(g: &TrigPoly, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (lo, hi) = (a, b);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (g.eval(x1), g.eval(x2));
    for _ in 0..40 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = g.eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = g.eval(x2);
        }
    }
    let (mut x, mut y) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..4 {
        let (_, d1, d2) = g.eval_derivs(x);
        if d2 <= 0.0 {
            break;
        }
        let nx = (x - d1 / d2).clamp(lo, hi);
        let ny = g.eval(nx);
        if ny >= y {
            break;
        }
        x = nx;
        y = ny;
    }
    (x, y)
}

/// New sample points for the next exchange round.
///
/// Every interval between consecutive points of `existing` (sorted) whose
/// continuous minimum of `g` is below `-REFINE_TOL` is split into
/// `REFINE_SPLIT` parts, and the minimizer itself is added. Violations inside a
/// degenerate optimal face move between neighbouring intervals, so the
/// splitting is kept uniform rather than clustered at the last minimizer.
fn refinement_points(g: &TrigPoly, lo: f64, hi: f64, existing: &[f64]) -> Vec<f64> {
    let mut suspects: Vec<usize> = Vec::new();
    let slopes: Vec<f64> = existing.iter().map(|&x| g.eval_derivs(x).1).collect();
    for i in 0..existing.len().saturating_sub(1) {
        if slopes[i] < 0.0 && slopes[i + 1] > 0.0 {
            suspects.push(i);
        }
    }
    // Coarse scan as a backstop for intervals holding several extrema.
    let n = (((hi - lo) * 32.0 * (g.degree() + 1) as f64).ceil() as usize).max(8);
    let mut prev = (lo, g.eval(lo));
    let mut cur = (lo + (hi - lo) / n as f64, 0.0);
    cur.1 = g.eval(cur.0);
    for i in 2..=n + 1 {
        let next_x = if i <= n { lo + (hi - lo) * i as f64 / n as f64 } else { hi };
        let next = (next_x, if i <= n { g.eval(next_x) } else { f64::INFINITY });
        if cur.1 <= prev.1 && cur.1 <= next.1 && cur.1 < 0.0 {
            let idx = existing.partition_point(|&p| p <= cur.0).saturating_sub(1);
            suspects.push(idx.min(existing.len().saturating_sub(2)));
        }
        prev = cur;
        cur = next;
    }
    suspects.sort_unstable();
    suspects.dedup();

    let mut out = Vec::new();
    for i in suspects {
        let (a, b) = (existing[i], existing[i + 1]);
        let (x, y) = local_min(g, a, b);
        if y >= -REFINE_TOL {
            continue;
        }
        out.push(x);
        for k in 1..REFINE_SPLIT {
            out.push(a + (b - a) * k as f64 / REFINE_SPLIT as f64);
        }
    }
    out.retain(|&x| x >= lo && x <= hi);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= POINT_MERGE_TOL);
    out.retain(|&x| {
        let idx = existing.partition_point(|&p| p < x);
        let near = |j: usize| existing.get(j).is_some_and(|&p| (p - x).abs() <= POINT_MERGE_TOL);
        !(near(idx) || (idx > 0 && near(idx - 1)))
    });
    out
}

fn raw_polynomial(outcome: &LpOutcome) -> Option<TrigPoly> {
    match outcome {
        LpOutcome::Optimal { solution, .. } => Some(TrigPoly::new(solution.clone())),
        _ => None,
    }
}

/// Solves the sampled program, runs the exchange rounds and certifies.
pub fn compute(spec: &BoundSpec) -> Result<BoundResult> {
    spec.validate()?;
    let (lo, hi) = spec.region();
    let eps = spec.sign.factor();
    let mut points = seed_points(spec);
    let mut solver = lpcore::Solver::new(&build_lp_at(spec, &points))?;
    let mut rounds = 0;
    let mut last: Option<(LpOutcome, usize)> = None;
    let outcome = loop {
        let outcome = match solver.solve() {
            Ok(outcome) => outcome,
            // A refined program the solver cannot handle: keep the last good round.
            Err(Error::NumericalTrouble { .. } | Error::IterationLimit(_)) if last.is_some() => {
                let (outcome, n) = last.take().expect("checked above");
                points.truncate(n);
                rounds -= 1;
                break outcome;
            }
            Err(e) => return Err(e),
        };
        let Some(f) = raw_polynomial(&outcome) else {
            let status = match outcome {
                LpOutcome::Infeasible => BoundStatus::Infeasible,
                _ => BoundStatus::Unbounded,
            };
            if spec.sign == Sign::Plus && status == BoundStatus::Infeasible {
                return Err(Error::Internal("upper-bound program reported infeasible".into()));
            }
            return Ok(BoundResult::unsolved(spec, status, points.len(), rounds));
        };
        if rounds == spec.refine_rounds || points.len() >= spec.max_points() {
            break outcome;
        }
        let g = f.scaled(eps);
        let defect = -trigpoly::rigorous_min(&g, lo, hi)?.bound;
        if defect <= DEFECT_TARGET {
            break outcome;
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        let mut fresh = refinement_points(&g, lo, hi, &sorted);
        if fresh.is_empty() {
            break outcome;
        }
        last = Some((outcome, points.len()));
        for &x in &fresh {
            let row = evaluation_row(spec.degree, x).into_iter().map(|a| eps * a).collect();
            solver.add_constraint(row, Relation::Ge, 0.0)?;
        }
        points.append(&mut fresh);
        rounds += 1;
    };
    let mut result = certify(spec, &outcome)?;
    result.lp_points = points.len();
    result.refine_rounds_used = rounds;
    result.lp_iterations = solver.iterations();
    Ok(result)
}

/// The uniform grid, plus (when refinement is enabled) the points `j/q` in the
/// region for the denominator of the spec and of the exact gap's maximizer.
/// Those are the nodes where extremal polynomials vanish, and for `ε = −1`
/// they keep the sampled program bounded.
fn seed_points(spec: &BoundSpec) -> Vec<f64> {
    let mut points = spec.grid();
    if spec.refine_rounds == 0 {
        return points;
    }
    let (lo, hi) = spec.region();
    let mut dens = vec![exact::gap(&spec.v).q];
    dens.extend(spec.q);
    dens.sort_unstable();
    dens.dedup();
    let mut extra = Vec::new();
    for q in dens {
        for j in 1..=q / 2 {
            let x = j as f64 / q as f64;
            if x >= lo - 1e-15 && x <= hi + 1e-15 {
                extra.push(x.clamp(lo, hi));
            }
        }
    }
    for x in extra {
        if points.iter().all(|p| (p - x).abs() > POINT_MERGE_TOL) {
            points.push(x);
        }
    }
    points.sort_by(f64::total_cmp);
    points
}

/// Turns an optimal sampled solution into a rigorous bound.
///
/// Coefficients of the wrong sign are zeroed and charged `2 e_k`; the
/// remaining sign defect on the continuous region is bounded with
/// [`trigpoly::rigorous_min`]; the total is removed by a constant shift.
pub fn certify(spec: &BoundSpec, raw: &LpOutcome) -> Result<BoundResult> {
    let Some(f) = raw_polynomial(raw) else {
        return Err(Error::InvalidArgument("certify needs an optimal LP outcome".into()));
    };
    let eps = spec.sign.factor();
    let lp_value = f.mass() / f.at_zero();
    let mut result = BoundResult::unsolved(spec, BoundStatus::SolvedUncertified, spec.samples, 0);
    result.lp_value = Some(lp_value);
    result.active_degree = f.active_degree(1e-12);
    if !spec.certify {
        result.polynomial = Some(f);
        return Ok(result);
    }

    let mut repaired = f.clone();
    let mut coefficient_repair = 0.0;
    for k in (1..=repaired.degree()).filter(|&k| !spec.is_free_index(k)) {
        let excess = eps * repaired.coeff(k);
        if excess > 0.0 {
            coefficient_repair += 2.0 * excess;
            repaired.set_coeff(k, 0.0);
        }
    }
    let (lo, hi) = spec.region();
    let extremum = trigpoly::rigorous_min(&repaired.scaled(eps), lo, hi)?;
    let defect = (-extremum.bound).max(0.0) + coefficient_repair;
    let g = repaired.shift_const(eps * defect);
    result.coefficient_repair = coefficient_repair;
    result.repair_shift = defect;
    result.region_min = Some(extremum.bound);

    let g0 = g.at_zero();
    if spec.sign == Sign::Minus && g0 <= MIN_LOWER_NORMALIZATION {
        result.polynomial = Some(g);
        return Ok(result);
    }
    // Round the ratio outward by its floating-point error.
    let value = g.mass() / g0;
    let slack = 4.0 * f64::EPSILON * (g.degree() as f64 + 4.0) * value.abs().max(f64::MIN_POSITIVE);
    result.certified_value = Some(value + eps * slack);
    result.polynomial = Some(g);
    result.status = BoundStatus::Certified;
    Ok(result)
}

/// Certified upper bound `gap(v) <= lambda_+`.
pub fn lambda_plus(v: &SpeedVector, degree: usize, samples: usize) -> Result<BoundResult> {
    compute(&BoundSpec::upper(v.clone()).degree(degree).samples(samples))
}

/// Certified lower bound `lambda_- <= gap(v)`.
pub fn lambda_minus(v: &SpeedVector, degree: usize, samples: usize) -> Result<BoundResult> {
    compute(&BoundSpec::lower(v.clone()).degree(degree).samples(samples))
}

/// Lower bound valid when the maximum of `mu(t v)` is attained at denominator `q`.
pub fn lambda_minus_q(v: &SpeedVector, q: u64, degree: usize, samples: usize) -> Result<BoundResult> {
    compute(&BoundSpec::lower_q(v.clone(), q).degree(degree).samples(samples))
}

/// Independent membership check of a polynomial in a bound class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    /// Every coefficient off the speeds has the required sign, exactly.
    pub coefficient_signs: bool,
    /// Certified minimum of `sign * g` over the region.
    pub region: CertifiedExtremum,
    pub ratio: f64,
}

impl Audit {
    pub fn admissible(&self, tol: f64) -> bool {
        self.coefficient_signs && self.region.bound >= -tol
    }
}

pub fn audit(spec: &BoundSpec, g: &TrigPoly) -> Result<Audit> {
    let eps = spec.sign.factor();
    let coefficient_signs = (1..=g.degree()).filter(|&k| !spec.is_free_index(k)).all(|k| eps * g.coeff(k) <= 0.0);
    let (lo, hi) = spec.region();
    let region = trigpoly::rigorous_min(&g.scaled(eps), lo, hi)?;
    Ok(Audit { coefficient_signs, region, ratio: g.mass() / g.at_zero() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(s: &[u64]) -> SpeedVector {
        SpeedVector::new(s.to_vec()).unwrap()
    }

    #[test]
    fn constraint_counts() {
        let spec = BoundSpec::upper(sv(&[1, 2])).degree(2).samples(3);
        let lp = build_lp(&spec).unwrap();
        assert_eq!(lp.num_vars, 3);
        assert_eq!(lp.count(Relation::Eq), 1);
        assert_eq!(lp.count(Relation::Ge), 3);
        assert_eq!(lp.count(Relation::Le), 0);
    }

    #[test]
    fn coefficient_constraint_only_off_support() {
        let spec = BoundSpec::upper(sv(&[1, 3])).degree(3);
        let lp = build_lp(&spec).unwrap();
        let le: Vec<_> = lp.constraints.iter().filter(|c| c.relation == Relation::Le).collect();
        assert_eq!(le.len(), 1);
        assert_eq!(le[0].coeffs, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn q_region() {
        let spec = BoundSpec::lower_q(sv(&[1, 2, 3]), 4);
        assert_eq!(spec.region(), (0.25, 0.5));
        assert_eq!(BoundSpec::lower(sv(&[1, 2, 3])).region(), (0.2, 0.5));
        let g = spec.grid();
        assert_eq!((g[0], *g.last().unwrap()), (0.25, 0.5));
    }

    #[test]
    fn spec_validation() {
        assert!(BoundSpec::upper(sv(&[1, 5])).degree(4).validate().is_err());
        assert!(BoundSpec::lower(sv(&[3])).validate().is_err());
        assert!(BoundSpec::lower_q(sv(&[1, 2]), 2).validate().is_err());
        let mut s = BoundSpec::upper(sv(&[1, 2]));
        s.q = Some(4);
        assert!(s.validate().is_err());
        assert!(BoundSpec::upper(sv(&[1, 2])).samples(1).validate().is_err());
    }

    fn optimal(c: Vec<f64>) -> LpOutcome {
        LpOutcome::Optimal { objective_value: c[0], solution: c, iterations: 0 }
    }

    #[test]
    fn certify_exact_fejer() {
        let spec = BoundSpec::upper(sv(&[1, 2, 3])).degree(3);
        let sol: Vec<f64> = trigpoly::fejer(4).unwrap().scaled(0.25).coeffs().to_vec();
        let r = certify(&spec, &optimal(sol)).unwrap();
        assert_eq!(r.status, BoundStatus::Certified);
        assert!(r.repair_shift < 1e-9);
        assert!((r.certified_value.unwrap() - 0.25).abs() < 1e-9);
        assert!((r.lp_value.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn certify_shift_formula() {
        // f = 0.25 + 0.375 cos(2 pi x) with min -1e-7 + ... : build f(0) = 1 and min -1e-7.
        // f(x) = c0 + 2 c1 cos(2 pi x); f(0) = 1, f(1/2) = c0 - 2 c1 = -1e-7.
        let c1 = (1.0 + 1e-7) / 4.0;
        let c0 = 1.0 - 2.0 * c1;
        let spec = BoundSpec::upper(sv(&[1])).degree(1);
        let r = certify(&spec, &optimal(vec![c0, c1])).unwrap();
        assert_eq!(r.status, BoundStatus::Certified);
        let expect = (c0 + 1e-7) / (1.0 + 1e-7);
        assert!((r.certified_value.unwrap() - expect).abs() < 1e-10, "{r:?}");
        assert!(r.certified_value.unwrap() >= expect);
    }

    #[test]
    fn certify_lower_guard() {
        // f(x) = 0.5 + 0.25 cos(2 pi 2x) ... region [1/3, 1/2] for v=(1,2); positive there, defect >= 1.
        let spec = BoundSpec::lower(sv(&[1, 2])).degree(2);
        let r = certify(&spec, &optimal(vec![0.5, 0.0, 0.25])).unwrap();
        assert!(r.repair_shift >= 1.0 - 1e-9);
        assert_eq!(r.status, BoundStatus::SolvedUncertified);
        assert!(r.certified_value.is_none());
    }

    #[test]
    fn certify_repairs_coefficients() {
        // c_2 = 0.01 > 0 is illegal for the upper class when 2 is not a speed.
        let spec = BoundSpec::upper(sv(&[1, 3])).degree(3);
        let r = certify(&spec, &optimal(vec![0.5, 0.2, 0.01, 0.04])).unwrap();
        assert!((r.coefficient_repair - 0.02).abs() < 1e-15);
        let g = r.polynomial.unwrap();
        assert_eq!(g.coeff(2), 0.0);
        assert!(audit(&spec, &g).unwrap().admissible(1e-12));
    }

    #[test]
    fn uncertified_when_disabled() {
        let spec = BoundSpec::upper(sv(&[1, 2, 3])).degree(3).certify(false);
        let r = compute(&spec).unwrap();
        assert_eq!(r.status, BoundStatus::SolvedUncertified);
        assert!(r.lp_value.is_some() && r.certified_value.is_none());
    }

    #[test]
    fn upper_bound_equality_cases() {
        let r = lambda_plus(&sv(&[1, 2, 3]), 3, 25).unwrap();
        assert_eq!(r.status, BoundStatus::Certified);
        assert!((r.certified_value.unwrap() - 0.25).abs() < 1e-6, "{r:?}");
        let r = lambda_plus(&sv(&[1, 3, 5]), 5, 41).unwrap();
        assert!((r.certified_value.unwrap() - 0.5).abs() < 1e-6);
        let r = lambda_plus(&sv(&[2, 4, 6]), 6, 49).unwrap();
        assert!((r.certified_value.unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn q_class_equality_cases() {
        let r = lambda_minus_q(&sv(&[1, 2, 3]), 4, 3, 25).unwrap();
        assert_eq!(r.status, BoundStatus::Certified);
        assert!((r.certified_value.unwrap() - 0.25).abs() < 1e-6, "{r:?}");
        assert_eq!(r.assumes_denominator, Some(4));
        let r = lambda_minus_q(&sv(&[1, 2, 3, 4]), 5, 4, 33).unwrap();
        assert!((r.certified_value.unwrap() - 0.2).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn infeasible_lower_is_reported() {
        match lambda_minus(&sv(&[1, 2]), 2, 4) {
            Ok(r) => {
                if r.status == BoundStatus::Certified {
                    assert!(r.certified_value.unwrap() <= 0.5 / 1.0 + 1e-12);
                }
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
