//! Even real trigonometric polynomials
//! `f(x) = c_0 + 2 * sum_{k=1..D} c_k cos(2 pi k x)`, so that `c_k = f^(k)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::gcd_u64;

const TWO_PI: f64 = 2.0 * PI;

/// Energy above which recovered sine/imaginary parts reject the input.
pub const ODD_ENERGY_TOL: f64 = 1e-9;

/// Distance to the nearest integer.
pub fn dist_nearest(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    coeffs: Vec<f64>,
}

impl TrigPoly {
    /// `coeffs[k]` is `c_k`; an empty slice is the zero polynomial of degree 0.
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return TrigPoly { coeffs: vec![0.0] };
        }
        TrigPoly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c_k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, k: usize, value: f64) {
        if k >= self.coeffs.len() {
            self.coeffs.resize(k + 1, 0.0);
        }
        self.coeffs[k] = value;
    }

    /// `f^(0) = c_0`.
    pub fn mass(&self) -> f64 {
        self.coeffs[0]
    }

    /// `f(0) = c_0 + 2 sum c_k`.
    pub fn at_zero(&self) -> f64 {
        self.coeffs[0] + 2.0 * self.coeffs[1..].iter().sum::<f64>()
    }

    /// Highest index with a coefficient above `tol` in magnitude.
    pub fn active_degree(&self, tol: f64) -> usize {
        self.coeffs.iter().rposition(|c| c.abs() > tol).unwrap_or(0)
    }

    /// `B = |c_0| + 2 sum |c_k|`, a bound on `sup |f|`.
    pub fn sup_norm_bound(&self) -> f64 {
        self.coeffs[0].abs() + 2.0 * self.coeffs[1..].iter().map(|c| c.abs()).sum::<f64>()
    }

    /// Bound on `sup |f'|`: the smaller of Bernstein's `2 pi D B` and the termwise sum.
    pub fn first_derivative_bound(&self) -> f64 {
        let termwise: f64 = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| 2.0 * TWO_PI * k as f64 * c.abs()).sum();
        termwise.min(self.bernstein_bound())
    }

    /// Bound on `sup |f''|`.
    pub fn second_derivative_bound(&self) -> f64 {
        let termwise: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| 2.0 * (TWO_PI * k as f64).powi(2) * c.abs())
            .sum();
        let d = TWO_PI * self.degree() as f64;
        termwise.min(d * d * self.sup_norm_bound())
    }

    /// Bound on `sup |f'''|`.
    pub fn third_derivative_bound(&self) -> f64 {
        let d = TWO_PI * self.degree() as f64;
        self.weighted_abs_sum(3).min(d * d * d * self.sup_norm_bound())
    }

    /// `2 sum_k (2 pi k)^p |c_k|`.
    fn weighted_abs_sum(&self, p: i32) -> f64 {
        self.coeffs.iter().enumerate().skip(1).map(|(k, c)| 2.0 * (TWO_PI * k as f64).powi(p) * c.abs()).sum()
    }

    /// `2 pi D B`.
    pub fn bernstein_bound(&self) -> f64 {
        TWO_PI * self.degree() as f64 * self.sup_norm_bound()
    }

    /// Upper bound on the floating-point error of [`TrigPoly::eval`].
    pub fn eval_error_bound(&self) -> f64 {
        4.0 * f64::EPSILON * (self.degree() as f64 + 2.0 * RESEED as f64 + 2.0) * self.sup_norm_bound()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for_each_harmonic(self.degree(), x, |k, cos, _| acc += self.coeffs[k] * cos);
        self.coeffs[0] + 2.0 * acc
    }

    /// `(f(x), f'(x), f''(x))`.
    pub fn eval_derivs(&self, x: f64) -> (f64, f64, f64) {
        let (mut f, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for_each_harmonic(self.degree(), x, |k, cos, sin| {
            let c = self.coeffs[k];
            let w = TWO_PI * k as f64;
            f += c * cos;
            d1 -= c * w * sin;
            d2 -= c * w * w * cos;
        });
        (self.coeffs[0] + 2.0 * f, 2.0 * d1, 2.0 * d2)
    }

    pub fn scaled(&self, s: f64) -> TrigPoly {
        TrigPoly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `f + s`.
    pub fn shift_const(&self, s: f64) -> TrigPoly {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `g(x) = f(a x)`.
    pub fn dilate(&self, a: usize) -> Result<TrigPoly> {
        if a == 0 {
            return Err(Error::InvalidArgument("dilation factor must be >= 1".into()));
        }
        let mut coeffs = vec![0.0; a * self.degree() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[a * k] = c;
        }
        Ok(TrigPoly { coeffs })
    }
}

const RESEED: usize = 32;

/// Calls `visit(k, cos(2 pi k x), sin(2 pi k x))` for `k = 1..=degree` using a
/// rotation recurrence that is re-seeded from libm every [`RESEED`] steps.
fn for_each_harmonic(degree: usize, x: f64, mut visit: impl FnMut(usize, f64, f64)) {
    if degree == 0 {
        return;
    }
    let theta = TWO_PI * (x - x.floor());
    let (s1, c1) = theta.sin_cos();
    let (mut s, mut c) = (s1, c1);
    for k in 1..=degree {
        if k > 1 {
            if (k - 1) % RESEED == 0 {
                let (sk, ck) = (theta * k as f64).sin_cos();
                s = sk;
                c = ck;
            } else {
                let next_c = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = next_c;
            }
        }
        visit(k, c, s);
    }
}

/// Fejér kernel `K_m(x) = (1/m) (sin(pi m x) / sin(pi x))^2`, coefficients `1 - j/m`.
pub fn fejer(m: usize) -> Result<TrigPoly> {
    if m == 0 {
        return Err(Error::InvalidArgument("Fejér kernel order must be >= 1".into()));
    }
    let coeffs = (0..m).map(|j| 1.0 - j as f64 / m as f64).collect();
    Ok(TrigPoly::new(coeffs))
}

/// Closed form of the Fejér kernel, valid away from integers.
pub fn fejer_closed_form(m: usize, x: f64) -> f64 {
    let r = (PI * m as f64 * x).sin() / (PI * x).sin();
    r * r / m as f64
}

/// `cos(pi v x)^2 = 1/2 + (1/2) cos(2 pi v x)`.
pub fn cos_sq(v: usize) -> Result<TrigPoly> {
    if v == 0 {
        return Err(Error::InvalidArgument("cos_sq frequency must be >= 1".into()));
    }
    let mut coeffs = vec![0.0; v + 1];
    coeffs[0] = 0.5;
    coeffs[v] = 0.25;
    Ok(TrigPoly::new(coeffs))
}

/// Recovers the cosine coefficients of an even trigonometric polynomial of
/// degree at most `degree` from `2 degree + 1` equispaced samples.
pub fn dft_coeffs(sample_fn: impl Fn(f64) -> f64, degree: usize) -> Result<TrigPoly> {
    dft_coeffs_offset(sample_fn, degree, 0.0)
}

/// As [`dft_coeffs`], sampling at `x_j = (j + offset) / M`.
///
/// The inversion uses the actual sample positions, so the offset needs no
/// separate phase correction.
pub fn dft_coeffs_offset(sample_fn: impl Fn(f64) -> f64, degree: usize, offset: f64) -> Result<TrigPoly> {
    let m = 2 * degree + 1;
    let xs: Vec<f64> = (0..m).map(|j| (j as f64 + offset) / m as f64).collect();
    let samples: Vec<f64> = xs.iter().map(|&x| sample_fn(x)).collect();
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut odd_energy = 0.0;
    for k in 0..=degree {
        let (mut re, mut im) = (0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&samples) {
            let (s, c) = (TWO_PI * k as f64 * x).sin_cos();
            re += y * c;
            im -= y * s;
        }
        coeffs.push(re / m as f64);
        odd_energy += (im / m as f64).powi(2);
    }
    if !(odd_energy <= ODD_ENERGY_TOL) {
        return Err(Error::NotEvenTrigPoly { energy: odd_energy });
    }
    Ok(TrigPoly::new(coeffs))
}

/// The extremal polynomial for the improved lower bound class with denominator `q`:
/// `K_q(a x) (1 - cos(pi/q)^2) / (cos(pi a x)^2 - cos(pi/q)^2)`.
///
/// The quotient is a polynomial in `cos(2 pi a x)`: each zero of the
/// denominator is a double zero of `K_q(a x)`. It is recovered in the variable
/// `y = a x` and then dilated.
pub fn thm31_poly(a: usize, q: usize) -> Result<TrigPoly> {
    if a == 0 || q < 3 {
        return Err(Error::InvalidArgument(format!("need a >= 1 and q >= 3, got a={a}, q={q}")));
    }
    if gcd_u64(a as u64, q as u64) != 1 {
        return Err(Error::InvalidArgument(format!("a={a} and q={q} are not coprime")));
    }
    let kernel = fejer(q)?;
    let c2 = (PI / q as f64).cos().powi(2);
    let quotient = |y: f64| {
        let den = (PI * y).cos().powi(2) - c2;
        kernel.eval(y) * (1.0 - c2) / den
    };
    let degree = q - 1;
    let m = 2 * degree + 1;
    let singular = |offset: f64| {
        (0..m).any(|j| (dist_nearest((j as f64 + offset) / m as f64) - 1.0 / q as f64).abs() < 1e-9)
    };
    let offset = [0.0, 0.25, 1.0 / 3.0, 0.125]
        .into_iter()
        .find(|&o| !singular(o))
        .ok_or_else(|| Error::ClosedFormCheck("no sampling grid avoids the removable singularities".into()))?;
    let base = dft_coeffs_offset(quotient, degree, offset)?;

    let f0 = base.at_zero();
    if (f0 - q as f64).abs() > 1e-8 {
        return Err(Error::ClosedFormCheck(format!("f(0) = {f0}, expected {q}")));
    }
    if (base.mass() - 1.0).abs() > 1e-8 {
        return Err(Error::ClosedFormCheck(format!("mass = {}, expected 1", base.mass())));
    }
    base.dilate(a)
}

/// A certified lower bound on the minimum of a polynomial over an interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedExtremum {
    /// Guaranteed `<= min_{[lo, hi]} f`.
    pub bound: f64,
    /// Smallest value actually observed; `>= min f`.
    pub observed_min: f64,
    pub argmin: f64,
    /// Number of evaluations performed.
    pub grid_points: usize,
    pub sup_norm_bound: f64,
    /// Bernstein bound `2 pi D B` on `|f'|`.
    pub derivative_bound: f64,
    /// `observed_min - bound`.
    pub margin: f64,
}

/// Default slack target relative to `max(1, B)`.
pub const RIGOROUS_MIN_REL_TOL: f64 = 1e-10;

const MAX_EVALS: usize = 4_000_000;

/// Certified minimum of `f` over `[lo, hi]`, within `1e-10 max(1, B)` of the true minimum.
pub fn rigorous_min(f: &TrigPoly, lo: f64, hi: f64) -> Result<CertifiedExtremum> {
    rigorous_min_tol(f, lo, hi, RIGOROUS_MIN_REL_TOL)
}

/// Branch and bound over subintervals. On an interval of half-width `r` around
/// `c`, Taylor's theorem with `|f''| <= M2` gives
/// `min f >= f(c) - |f'(c)| r - M2 r^2 / 2`, `|f'| <= M1` gives
/// `min f >= f(c) - M1 r`, and `|f'''| <= M3` gives
/// `min f >= f(c) + min_{|h|<=r} (f'(c) h + f''(c) h^2 / 2) - M3 r^3 / 6`. An interval is closed once its bound is within the
/// slack target of the smallest value seen so far; otherwise it is bisected.
/// Every bound also subtracts a floating-point evaluation error allowance.
pub fn rigorous_min_tol(f: &TrigPoly, lo: f64, hi: f64, rel_tol: f64) -> Result<CertifiedExtremum> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    let b = f.sup_norm_bound();
    let m1 = f.first_derivative_bound();
    let m2 = f.second_derivative_bound();
    let m3 = f.third_derivative_bound();
    let round = f.eval_error_bound();
    let scale = 4.0 * f64::EPSILON * (f.degree() as f64 + 2.0 * RESEED as f64 + 2.0);
    let (round1, round2) = (scale * f.weighted_abs_sum(1), scale * f.weighted_abs_sum(2));
    let tol = rel_tol * b.max(1.0);
    let cubic = |y: f64, d1: f64, d2: f64, r: f64| {
        let q = |h: f64| d1 * h + 0.5 * d2 * h * h;
        let mut m = q(r).min(q(-r));
        if d2 > 0.0 && d1.abs() <= d2 * r {
            m = m.min(-d1 * d1 / (2.0 * d2));
        }
        y + m - round1 * r - 0.5 * round2 * r * r - m3 * r * r * r / 6.0
    };

    let mut evals = 0usize;
    let (mut upper, mut argmin) = (f64::INFINITY, lo);
    for x in [lo, hi] {
        let y = f.eval(x);
        evals += 1;
        if y < upper {
            upper = y;
            argmin = x;
        }
    }

    let pieces = (((hi - lo) * 16.0 * (f.degree() + 1) as f64).ceil() as usize).max(4);
    let width = (hi - lo) / pieces as f64;
    // (center, half-width, f, f', f'')
    let mut pending: Vec<(f64, f64, f64, f64, f64)> = Vec::with_capacity(pieces);
    for i in 0..pieces {
        let c = lo + (i as f64 + 0.5) * width;
        let (y, d1, d2) = f.eval_derivs(c);
        evals += 1;
        if y < upper {
            upper = y;
            argmin = c;
        }
        pending.push((c, width / 2.0, y, d1, d2));
    }
    // Deepest-value intervals last so they are popped first and tighten `upper` early.
    pending.sort_by(|a, b| b.2.total_cmp(&a.2));

    let mut bound = f64::INFINITY;
    while let Some((c, r, y, d1, d2)) = pending.pop() {
        let taylor = y - d1.abs() * r - 0.5 * m2 * r * r;
        let lipschitz = y - m1 * r;
        let lower = taylor.max(lipschitz).max(cubic(y, d1, d2, r)) - round;
        if lower >= upper - tol || evals >= MAX_EVALS || r < 1e-14 {
            bound = bound.min(lower);
            continue;
        }
        let h = r / 2.0;
        for cc in [c - h, c + h] {
            let (yy, dd, dd2) = f.eval_derivs(cc);
            evals += 1;
            if yy < upper {
                upper = yy;
                argmin = cc;
            }
            pending.push((cc, h, yy, dd, dd2));
        }
    }
    let bound = bound.min(upper);
    Ok(CertifiedExtremum {
        bound,
        observed_min: upper,
        argmin,
        grid_points: evals,
        sup_norm_bound: b,
        derivative_bound: f.bernstein_bound(),
        margin: upper - bound,
    })
}

/// Periodized hat `(delta - ||x||)_+`.
pub fn hat(delta: f64, x: f64) -> f64 {
    (delta - dist_nearest(x)).max(0.0)
}

/// Fourier coefficients of [`hat`]: `(sin(pi delta k) / (pi k))^2`, and `delta^2` at `k = 0`.
pub fn hat_coeff(delta: f64, k: i64) -> f64 {
    if k == 0 {
        return delta * delta;
    }
    let w = PI * k as f64;
    ((w * delta).sin() / w).powi(2)
}
