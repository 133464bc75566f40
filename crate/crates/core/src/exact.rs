//! Exact gap of loneliness over a finite set of rational candidate times.
//!
//! `t -> mu(t v)` is piecewise linear with slopes `±v_i`, so every local
//! maximum sits where two of its pieces cross. Those crossings are rationals
//! whose denominators divide some `v_j ± v_i`; searching all of them (plus the
//! denominators of `2 v_i`) is exhaustive.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{cmp_fractions, gcd_u64, Rational};

/// Strictly increasing positive integer speeds `v_1 < ... < v_{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct SpeedVector(Vec<u64>);

impl SpeedVector {
    pub fn new(speeds: Vec<u64>) -> Result<Self> {
        if speeds.is_empty() {
            return Err(Error::InvalidSpeeds("at least one speed is required".into()));
        }
        if speeds[0] == 0 {
            return Err(Error::InvalidSpeeds("speeds must be positive".into()));
        }
        if let Some(w) = speeds.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpeeds(format!(
                "speeds must be strictly increasing ({} is followed by {})",
                w[0], w[1]
            )));
        }
        Ok(SpeedVector(speeds))
    }

    /// Accepts signed input so that zero and negative speeds get a proper diagnostic.
    pub fn from_signed(speeds: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(speeds.len());
        for &s in speeds {
            if s <= 0 {
                return Err(Error::InvalidSpeeds(format!("speed {s} is not positive")));
            }
            out.push(s as u64);
        }
        SpeedVector::new(out)
    }

    /// `1, 2, ..., n-1`.
    pub fn dirichlet(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need n >= 2 runners".into()));
        }
        SpeedVector::new((1..n).collect())
    }

    pub fn speeds(&self) -> &[u64] {
        &self.0
    }

    /// Number of runners, counting the stationary one.
    pub fn runners(&self) -> usize {
        self.0.len() + 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_speed(&self) -> u64 {
        *self.0.last().unwrap()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn gcd(&self) -> u64 {
        self.0.iter().fold(0, |g, &s| gcd_u64(g, s))
    }

    pub fn scaled(&self, a: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidArgument("dilation factor must be positive".into()));
        }
        let speeds = self
            .0
            .iter()
            .map(|&s| s.checked_mul(a).ok_or_else(|| Error::InvalidArgument("speed overflow".into())))
            .collect::<Result<Vec<_>>>()?;
        SpeedVector::new(speeds)
    }

    /// Divides every speed by `d`, which must divide all of them.
    pub fn divided(&self, d: u64) -> Result<Self> {
        if d == 0 || self.0.iter().any(|s| s % d != 0) {
            return Err(Error::InvalidArgument(format!("{d} does not divide every speed")));
        }
        SpeedVector::new(self.0.iter().map(|s| s / d).collect())
    }
}

impl TryFrom<Vec<u64>> for SpeedVector {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        SpeedVector::new(v)
    }
}

impl From<SpeedVector> for Vec<u64> {
    fn from(v: SpeedVector) -> Self {
        v.0
    }
}

impl FromStr for SpeedVector {
    type Err = Error;

    /// Parses `1,3,4` (commas, semicolons or whitespace).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<i64>()
                    .map_err(|_| Error::InvalidSpeeds(format!("cannot parse {p:?} as an integer")))
            })
            .collect::<Result<_>>()?;
        SpeedVector::from_signed(&parts)
    }
}

impl fmt::Display for SpeedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for SpeedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The exact gap together with every time attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapResult {
    pub gap: Rational,
    /// Smallest maximizer in `(0, 1)`.
    pub t_min: Rational,
    pub maximizers: Vec<Rational>,
    /// Denominator of `t_min`.
    pub q: u64,
    pub candidate_count: usize,
}

pub fn dist_to_nearest_integer(x: Rational) -> Rational {
    x.dist_to_nearest_integer()
}

/// `min_i ||t v_i||`.
pub fn mu(v: &SpeedVector, t: Rational) -> Rational {
    v.speeds()
        .iter()
        .map(|&s| (t * s as i128).dist_to_nearest_integer())
        .min()
        .unwrap()
}

fn divisors(n: u64, out: &mut BTreeSet<u64>) {
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.insert(d);
            out.insert(n / d);
        }
        d += 1;
    }
}

/// Every denominator that can carry a maximizer: divisors of `|v_j ± v_i|` and of `2 v_i`.
fn candidate_denominators(v: &SpeedVector) -> BTreeSet<u64> {
    let s = v.speeds();
    let mut values = BTreeSet::new();
    for (i, &a) in s.iter().enumerate() {
        values.insert(2 * a);
        for &b in &s[i + 1..] {
            values.insert(b - a);
            values.insert(a + b);
        }
    }
    let mut qs = BTreeSet::new();
    for n in values {
        divisors(n, &mut qs);
    }
    qs.remove(&1);
    qs
}

/// All reduced `p/q` in `(0, 1)` with `q` a candidate denominator, sorted.
pub fn candidate_times(v: &SpeedVector) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in candidate_denominators(v) {
        for p in 1..q {
            if gcd_u64(p, q) == 1 {
                out.push(Rational::new(p as i128, q as i128));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Numerator of `mu(p/q * v)` over the common denominator `q`.
fn mu_numerator(speeds: &[u64], p: u64, q: u64) -> u64 {
    speeds
        .iter()
        .map(|&s| {
            let r = ((p as u128 * (s % q) as u128) % q as u128) as u64;
            r.min(q - r)
        })
        .min()
        .unwrap()
}

/// Exhaustive maximum of `mu(t v)` over [`candidate_times`].
pub fn gap(v: &SpeedVector) -> GapResult {
    let speeds = v.speeds();
    let mut best = (0u64, 1u64);
    let mut maximizers: Vec<(u64, u64)> = Vec::new();
    let mut count = 0usize;
    for q in candidate_denominators(v) {
        for p in 1..q {
            if gcd_u64(p, q) != 1 {
                continue;
            }
            count += 1;
            let m = mu_numerator(speeds, p, q);
            match cmp_fractions(m, q, best.0, best.1) {
                std::cmp::Ordering::Greater => {
                    best = (m, q);
                    maximizers.clear();
                    maximizers.push((p, q));
                }
                std::cmp::Ordering::Equal => maximizers.push((p, q)),
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut maximizers: Vec<Rational> = maximizers
        .into_iter()
        .map(|(p, q)| Rational::new(p as i128, q as i128))
        .collect();
    maximizers.sort_unstable();
    let t_min = maximizers[0];
    GapResult {
        gap: Rational::new(best.0 as i128, best.1 as i128),
        t_min,
        q: t_min.denom() as u64,
        maximizers,
        candidate_count: count,
    }
}

/// Floating-point lower estimate `max_j mu(j/N v)`, independent of the candidate set.
///
/// Never exceeds the exact gap and is within `max(v) / (2N)` of it.
pub fn dense_grid_gap_lower(v: &SpeedVector, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("grid size must be at least 2".into()));
    }
    let residues: Vec<u64> = v.speeds().iter().map(|s| s % n).collect();
    let mut best = 0u64;
    for j in 1..n {
        let m = residues
            .iter()
            .map(|&s| {
                let r = ((j as u128 * s as u128) % n as u128) as u64;
                r.min(n - r)
            })
            .min()
            .unwrap();
        best = best.max(m);
    }
    Ok(best as f64 / n as f64)
}
