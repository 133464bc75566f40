//! Closed-form equality cases: vectors whose bound equals the gap, together
//! with their optimal polynomials, plus the inequality chain and the
//! complementary-slackness conditions behind them.

use serde::{Deserialize, Serialize};

use crate::bounds::Sign;
use crate::error::{Error, Result};
use crate::exact::{self, SpeedVector};
use crate::rational::{gcd_u64, Rational};
use crate::trigpoly::{self, TrigPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    /// Every speed odd; `cos(pi v_1 x)^2` is optimal and the gap is 1/2.
    AllOdd,
    /// `a {1, ..., m-1}` among the speeds, the rest not divisible by `m`; `K_m(a x)` is optimal.
    FejerDilate { a: u64, m: u64 },
    /// `v = a v'` with `v'` in the inner case; the inner polynomial dilated by `a`.
    GcdReduce { a: u64, inner: Box<CaseKind> },
    /// `a {1, ..., q-1}` among the speeds, the rest not divisible by `q`.
    Thm31 { a: u64, q: u64 },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityCase {
    pub kind: CaseKind,
    pub polynomial: Option<TrigPoly>,
    pub predicted_gap: Option<Rational>,
}

impl EqualityCase {
    fn none() -> Self {
        EqualityCase { kind: CaseKind::None, polynomial: None, predicted_gap: None }
    }

    pub fn is_none(&self) -> bool {
        self.kind == CaseKind::None
    }

    fn reduced(self, a: u64) -> Result<Self> {
        if self.is_none() {
            return Ok(self);
        }
        let polynomial = match self.polynomial {
            Some(p) => Some(p.dilate(a as usize)?),
            None => None,
        };
        Ok(EqualityCase {
            kind: CaseKind::GcdReduce { a, inner: Box::new(self.kind) },
            polynomial,
            predicted_gap: self.predicted_gap,
        })
    }
}

/// True when `a {1, ..., m-1}` are speeds and no other speed is divisible by `m`.
fn arithmetic_block(v: &SpeedVector, a: u64, m: u64) -> bool {
    if gcd_u64(a, m) != 1 || (1..m).any(|j| !v.contains(a * j)) {
        return false;
    }
    v.speeds().iter().all(|&s| (s % a == 0 && s / a < m) || s % m != 0)
}

/// Equality cases for the upper bound.
///
/// A common factor is removed first, then the all-odd rule is tried, then
/// pairs `(a, m)` by increasing `m` and then `a`.
pub fn detect_thm12(v: &SpeedVector) -> Result<EqualityCase> {
    let g = v.gcd();
    if g > 1 {
        return detect_thm12(&v.divided(g)?)?.reduced(g);
    }
    if v.speeds().iter().all(|s| s % 2 == 1) {
        return Ok(EqualityCase {
            kind: CaseKind::AllOdd,
            polynomial: Some(trigpoly::cos_sq(v.speeds()[0] as usize)?),
            predicted_gap: Some(Rational::new(1, 2)),
        });
    }
    let max = v.max_speed();
    for m in 2..=max + 1 {
        for a in (1..).take_while(|a| a * (m - 1) <= max) {
            if arithmetic_block(v, a, m) {
                return Ok(EqualityCase {
                    kind: CaseKind::FejerDilate { a, m },
                    polynomial: Some(trigpoly::fejer(m as usize)?.dilate(a as usize)?),
                    predicted_gap: Some(Rational::new(1, m as i128)),
                });
            }
        }
    }
    Ok(EqualityCase::none())
}

/// Equality cases for the lower bound with denominator `q`.
///
/// Under a common factor `g` the inner vector is tried with `q` and, when `g`
/// divides it, with `q / g`, since the maximizer's denominator scales with `g`.
pub fn detect_thm31(v: &SpeedVector, q: u64) -> Result<EqualityCase> {
    if q < 3 {
        return Ok(EqualityCase::none());
    }
    let g = v.gcd();
    if g > 1 {
        let inner = v.divided(g)?;
        let mut qs = vec![q];
        if q % g == 0 {
            qs.push(q / g);
        }
        for q in qs {
            let case = detect_thm31(&inner, q)?;
            if !case.is_none() {
                return case.reduced(g);
            }
        }
        return Ok(EqualityCase::none());
    }
    for a in (1..).take_while(|a| a * (q - 1) <= v.max_speed()) {
        if arithmetic_block(v, a, q) {
            return Ok(EqualityCase {
                kind: CaseKind::Thm31 { a, q },
                polynomial: Some(trigpoly::thm31_poly(a as usize, q as usize)?),
                predicted_gap: Some(Rational::new(1, q as i128)),
            });
        }
    }
    Ok(EqualityCase::none())
}

/// Residuals of the two equality conditions at the smallest maximizer `t = p/q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlacknessReport {
    /// `max |f^(k)|` over `1 <= k <= D` outside the speeds.
    pub support_residual: f64,
    /// `max |f(k p/q)|` over `k in {1, ..., q-1}` not divisible by `b`, where `gap = a/b`.
    pub orbit_residual: f64,
    pub t: Rational,
    pub gap: Rational,
}

impl SlacknessReport {
    pub fn support_holds(&self, tol: f64) -> bool {
        self.support_residual < tol
    }

    pub fn orbit_holds(&self, tol: f64) -> bool {
        self.orbit_residual < tol
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.support_holds(tol) && self.orbit_holds(tol)
    }
}

pub fn slackness_check(f: &TrigPoly, v: &SpeedVector) -> SlacknessReport {
    let g = exact::gap(v);
    let support_residual = (1..=f.degree())
        .filter(|&k| !v.contains(k as u64))
        .map(|k| f.coeff(k).abs())
        .fold(0.0, f64::max);
    let (p, q, b) = (g.t_min.numer(), g.t_min.denom(), g.gap.denom());
    let orbit_residual = (1..q)
        .filter(|k| k % b != 0)
        .map(|k| f.eval(((k * p) % q) as f64 / q as f64).abs())
        .fold(0.0, f64::max);
    SlacknessReport { support_residual, orbit_residual, t: g.t_min, gap: g.gap }
}

/// The three terms of the inequality chain behind the bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// `delta f^(0)`.
    pub lhs: f64,
    /// `sum_{|k| <= D} f^(k) h(t k)` with the periodized hat of width `delta`.
    pub mid: f64,
    /// `delta^2 f(0)`.
    pub rhs: f64,
}

impl Chain {
    /// `lhs >= mid >= rhs` for the upper class, reversed for the lower ones.
    pub fn holds(&self, sign: Sign, tol: f64) -> bool {
        match sign {
            Sign::Plus => self.lhs >= self.mid - tol && self.mid >= self.rhs - tol,
            Sign::Minus => self.lhs <= self.mid + tol && self.mid <= self.rhs + tol,
        }
    }

    /// Both inequalities are equalities.
    pub fn tight(&self, tol: f64) -> bool {
        (self.lhs - self.mid).abs() <= tol && (self.mid - self.rhs).abs() <= tol
    }
}

/// Evaluates the chain at `delta = gap(v)` and `t` its smallest maximizer.
pub fn montgomery_chain(f: &TrigPoly, v: &SpeedVector) -> Chain {
    let g = exact::gap(v);
    let (delta, t) = (g.gap.to_f64(), g.t_min);
    let mid = f.mass() * delta
        + 2.0
            * (1..=f.degree())
                .map(|k| {
                    let tk = (t * k as i128).dist_to_nearest_integer().to_f64();
                    f.coeff(k) * trigpoly::hat(delta, tk)
                })
                .sum::<f64>();
    Chain { lhs: delta * f.mass(), mid, rhs: delta * delta * f.at_zero() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `(1, ..., n-3, n-1, 2n-4)`, `n = 2 (mod 6)`.
    A,
    /// `(1, ..., n-4, n-2, n-1, 2n-6)`, `n = 3 (mod 30)`.
    B,
}

/// Tight vectors with gap `1/n` attained at denominator `n`.
pub fn goddyn_wong_family(n: u64, family: Family) -> Result<SpeedVector> {
    let speeds = match family {
        Family::A if n >= 8 && n % 6 == 2 => (1..=n - 3).chain([n - 1, 2 * n - 4]).collect(),
        Family::B if n >= 33 && n % 30 == 3 => (1..=n - 4).chain([n - 2, n - 1, 2 * n - 6]).collect(),
        _ => return Err(Error::InvalidArgument(format!("n = {n} is not admissible for family {family:?}"))),
    };
    SpeedVector::new(speeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(s: &[u64]) -> SpeedVector {
        SpeedVector::new(s.to_vec()).unwrap()
    }

    #[test]
    fn all_odd() {
        let c = detect_thm12(&sv(&[1, 3, 5])).unwrap();
        assert_eq!(c.kind, CaseKind::AllOdd);
        assert_eq!(c.predicted_gap, Some(Rational::new(1, 2)));
        assert_eq!(c.polynomial.unwrap().coeffs(), &[0.5, 0.25]);
    }

    #[test]
    fn fejer_block() {
        let c = detect_thm12(&sv(&[1, 2, 3, 5])).unwrap();
        assert_eq!(c.kind, CaseKind::FejerDilate { a: 1, m: 4 });
        assert_eq!(c.predicted_gap, Some(Rational::new(1, 4)));
        assert_eq!(c.polynomial.unwrap(), trigpoly::fejer(4).unwrap());
    }

    #[test]
    fn gcd_reduction() {
        let c = detect_thm12(&sv(&[2, 6, 10])).unwrap();
        assert_eq!(c.kind, CaseKind::GcdReduce { a: 2, inner: Box::new(CaseKind::AllOdd) });
        let p = c.polynomial.unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coeffs(), &[0.5, 0.0, 0.25]);
        assert_eq!(c.predicted_gap, Some(Rational::new(1, 2)));
    }

    #[test]
    fn no_case() {
        assert!(detect_thm12(&sv(&[1, 4, 7])).unwrap().is_none());
        assert!(detect_thm31(&sv(&[1, 4, 7]), 8).unwrap().is_none());
    }

    #[test]
    fn dilated_block() {
        // a = 2, m = 3: {2, 4} plus 5, which is not divisible by 3.
        let c = detect_thm12(&sv(&[2, 4, 5])).unwrap();
        assert_eq!(c.kind, CaseKind::FejerDilate { a: 2, m: 3 });
        assert_eq!(exact::gap(&sv(&[2, 4, 5])).gap, Rational::new(1, 3));
    }

    #[test]
    fn leftover_divisible_blocks_match() {
        // {1, 2} is a block for m = 3 but 6 is divisible by 3.
        let c = detect_thm12(&sv(&[1, 2, 6])).unwrap();
        assert_ne!(c.kind, CaseKind::FejerDilate { a: 1, m: 3 });
    }

    #[test]
    fn thm31_cases() {
        let c = detect_thm31(&sv(&[1, 2, 3]), 4).unwrap();
        assert_eq!(c.kind, CaseKind::Thm31 { a: 1, q: 4 });
        assert_eq!(c.predicted_gap, Some(Rational::new(1, 4)));
        let c = detect_thm31(&sv(&[2, 4, 6]), 4).unwrap();
        assert_eq!(c.kind, CaseKind::GcdReduce { a: 2, inner: Box::new(CaseKind::Thm31 { a: 1, q: 4 }) });
        let q = exact::gap(&sv(&[2, 4, 6])).q;
        assert!(!detect_thm31(&sv(&[2, 4, 6]), q).unwrap().is_none());
    }

    #[test]
    fn slackness() {
        let r = slackness_check(&trigpoly::fejer(4).unwrap(), &sv(&[1, 2, 3]));
        assert!(r.support_residual < 1e-10 && r.orbit_residual < 1e-10, "{r:?}");
        let r = slackness_check(&trigpoly::cos_sq(3).unwrap(), &sv(&[1, 3, 5]));
        assert!(r.support_holds(1e-12));
        let r = slackness_check(&trigpoly::fejer(4).unwrap(), &sv(&[1, 4, 7]));
        assert!(!r.support_holds(1e-8));
    }

    #[test]
    fn chain_examples() {
        let c = montgomery_chain(&trigpoly::fejer(4).unwrap(), &sv(&[1, 2, 3]));
        assert!(c.tight(1e-12) && (c.lhs - 0.25).abs() < 1e-12, "{c:?}");
        let c = montgomery_chain(&trigpoly::cos_sq(3).unwrap(), &sv(&[1, 3, 5]));
        assert!(c.tight(1e-12) && (c.lhs - 0.25).abs() < 1e-12, "{c:?}");
        let c = montgomery_chain(&TrigPoly::constant(1.0), &sv(&[1, 2, 3]));
        assert_eq!((c.lhs, c.mid, c.rhs), (0.25, 0.25, 0.0625));
        assert!(c.holds(Sign::Plus, 0.0) && !c.tight(1e-3));
    }

    #[test]
    fn lower_chain_reverses() {
        let f = trigpoly::thm31_poly(1, 5).unwrap();
        let c = montgomery_chain(&f, &sv(&[1, 2, 3, 4]));
        assert!(c.holds(Sign::Minus, 1e-9) && c.tight(1e-8), "{c:?}");
    }

    #[test]
    fn families() {
        assert_eq!(goddyn_wong_family(8, Family::A).unwrap().speeds(), &[1, 2, 3, 4, 5, 7, 12]);
        let a14: Vec<u64> = (1..=11).chain([13, 24]).collect();
        assert_eq!(goddyn_wong_family(14, Family::A).unwrap().speeds(), &a14[..]);
        let b33: Vec<u64> = (1..=29).chain([31, 32, 60]).collect();
        assert_eq!(goddyn_wong_family(33, Family::B).unwrap().speeds(), &b33[..]);
        assert!(goddyn_wong_family(9, Family::A).is_err());
        assert!(goddyn_wong_family(2, Family::A).is_err());
        assert!(goddyn_wong_family(63, Family::B).is_ok());
        assert!(goddyn_wong_family(34, Family::B).is_err());
    }
}
