//! Batch computation of gaps and all three bounds over many speed vectors.

use std::collections::BTreeSet;
use std::io::Write;

use itertools::Itertools;
use lonely_core::bounds::{self, BoundSpec};
use lonely_core::{exact, BoundResult, Error, Rational, SpeedVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// CSV column order.
pub const HEADER: [&str; 18] = [
    "n",
    "speeds",
    "gap_num",
    "gap_den",
    "t_num",
    "t_den",
    "q",
    "lambda_plus",
    "lambda_plus_cert",
    "lambda_minus",
    "lambda_minus_cert",
    "lambda_minus_q",
    "lambda_minus_q_cert",
    "degree",
    "samples",
    "status_plus",
    "status_minus",
    "status_minus_q",
];

/// Status for a bound whose class is undefined for the vector (one speed, or `q < 3`).
pub const STATUS_SKIPPED: &str = "skipped";
pub const STATUS_ERROR: &str = "error";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    /// Semicolon-joined, e.g. `1;2;3;5`.
    pub speeds: String,
    pub gap_num: i128,
    pub gap_den: i128,
    pub t_num: i128,
    pub t_den: i128,
    pub q: u64,
    pub lambda_plus: Option<f64>,
    pub lambda_plus_cert: Option<f64>,
    pub lambda_minus: Option<f64>,
    pub lambda_minus_cert: Option<f64>,
    pub lambda_minus_q: Option<f64>,
    pub lambda_minus_q_cert: Option<f64>,
    pub degree: usize,
    pub samples: usize,
    pub status_plus: String,
    pub status_minus: String,
    pub status_minus_q: String,
}

impl ScanRow {
    pub fn speed_vector(&self) -> Result<SpeedVector, Error> {
        self.speeds.replace(';', ",").parse()
    }

    pub fn gap(&self) -> Rational {
        Rational::new(self.gap_num, self.gap_den)
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    /// Runner count; vectors have `n - 1` speeds.
    pub n: usize,
    pub max_speed: u64,
    pub count: usize,
    pub seed: u64,
    pub exhaustive: bool,
    pub degree: Option<usize>,
    pub samples: Option<usize>,
    pub threads: Option<usize>,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::Input(format!("--n must be at least 2, got {}", self.n)));
        }
        let k = self.n - 1;
        if (self.max_speed as usize) < k {
            return Err(CliError::Input(format!("cannot pick {k} distinct speeds from 1..={}", self.max_speed)));
        }
        if let Some(d) = self.degree {
            if d < self.max_speed as usize {
                return Err(CliError::Input(format!("--degree {d} is below --max-speed {}", self.max_speed)));
            }
        }
        if self.samples.is_some_and(|s| s < 2) {
            return Err(CliError::Input("--samples must be at least 2".into()));
        }
        if !self.exhaustive && binomial(self.max_speed, k as u64) < self.count as u128 {
            return Err(CliError::Input(format!(
                "only {} vectors exist, fewer than --count {}",
                binomial(self.max_speed, k as u64),
                self.count
            )));
        }
        Ok(())
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The vectors of a scan in output order: lexicographic when exhaustive,
/// otherwise `count` distinct uniform draws in draw order.
pub fn vectors(cfg: &ScanConfig) -> Result<Vec<SpeedVector>, CliError> {
    cfg.validate()?;
    let k = cfg.n - 1;
    let build = |s: Vec<u64>| SpeedVector::new(s).map_err(|e| CliError::Input(e.to_string()));
    if cfg.exhaustive {
        return (1..=cfg.max_speed).combinations(k).map(build).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(cfg.count);
    while out.len() < cfg.count {
        let mut s: Vec<u64> =
            rand::seq::index::sample(&mut rng, cfg.max_speed as usize, k).into_iter().map(|i| i as u64 + 1).collect();
        s.sort_unstable();
        if seen.insert(s.clone()) {
            out.push(build(s)?);
        }
    }
    Ok(out)
}

fn summarize(outcome: Result<BoundResult, Error>) -> (Option<f64>, Option<f64>, String) {
    match outcome {
        Ok(r) => (r.lp_value, r.certified_value, r.status.code().to_string()),
        Err(Error::InvalidArgument(_)) => (None, None, STATUS_SKIPPED.to_string()),
        Err(_) => (None, None, STATUS_ERROR.to_string()),
    }
}

/// Gap and the three bounds for one vector, with `q` the maximizer's denominator.
pub fn row(v: &SpeedVector, degree: Option<usize>, samples: Option<usize>) -> ScanRow {
    let g = exact::gap(v);
    let d = degree.unwrap_or_else(|| bounds::default_degree(v));
    let n = samples.unwrap_or_else(|| bounds::default_samples(d));
    let run = |spec: BoundSpec| summarize(bounds::compute(&spec.degree(d).samples(n)));
    let plus = run(BoundSpec::upper(v.clone()));
    let minus = run(BoundSpec::lower(v.clone()));
    let minus_q = run(BoundSpec::lower_q(v.clone(), g.q));
    ScanRow {
        n: v.runners(),
        speeds: v.speeds().iter().join(";"),
        gap_num: g.gap.numer(),
        gap_den: g.gap.denom(),
        t_num: g.t_min.numer(),
        t_den: g.t_min.denom(),
        q: g.q,
        lambda_plus: plus.0,
        lambda_plus_cert: plus.1,
        lambda_minus: minus.0,
        lambda_minus_cert: minus.1,
        lambda_minus_q: minus_q.0,
        lambda_minus_q_cert: minus_q.1,
        degree: d,
        samples: n,
        status_plus: plus.2,
        status_minus: minus.2,
        status_minus_q: minus_q.2,
    }
}

/// Computes every row; the output order is the vector order regardless of scheduling.
pub fn run(cfg: &ScanConfig, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> Result<Vec<ScanRow>, CliError> {
    let vs = vectors(cfg)?;
    let total = vs.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let work = || {
        vs.par_iter()
            .map(|v| {
                let r = row(v, cfg.degree, cfg.samples);
                let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if let Some(p) = progress {
                    p(k, total);
                }
                r
            })
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Other(e.to_string()))?;
    Ok(pool.install(work))
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::Other(e.to_string()))
}

/// Reads a scan CSV, rejecting files whose header differs from [`HEADER`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ScanRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| CliError::Input(format!("unreadable CSV header: {e}")))?;
    let missing: Vec<&str> = HEADER.iter().copied().filter(|h| !header.iter().any(|c| c == *h)).collect();
    if !missing.is_empty() {
        return Err(CliError::Input(format!("CSV is missing columns: {}", missing.join(", "))));
    }
    r.deserialize().map(|row| row.map_err(|e| CliError::Input(format!("malformed CSV row: {e}")))).collect()
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Other(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, max_speed: u64, count: usize) -> ScanConfig {
        ScanConfig { n, max_speed, count, seed: 1, exhaustive: false, degree: None, samples: None, threads: Some(1) }
    }

    #[test]
    fn exhaustive_count() {
        let c = ScanConfig { exhaustive: true, ..cfg(3, 6, 0) };
        let vs = vectors(&c).unwrap();
        assert_eq!(vs.len(), 15);
        assert_eq!(vs[0].speeds(), &[1, 2]);
        assert_eq!(vs[14].speeds(), &[5, 6]);
    }

    #[test]
    fn random_vectors_are_distinct_and_seeded() {
        let a = vectors(&cfg(6, 50, 100)).unwrap();
        let b = vectors(&cfg(6, 50, 100)).unwrap();
        assert_eq!(a, b);
        let set: BTreeSet<_> = a.iter().map(|v| v.speeds().to_vec()).collect();
        assert_eq!(set.len(), 100);
        assert!(a.iter().all(|v| v.len() == 5 && v.max_speed() <= 50));
        let c = vectors(&ScanConfig { seed: 2, ..cfg(6, 50, 100) }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_ranges() {
        assert!(matches!(vectors(&cfg(1, 5, 1)), Err(CliError::Input(_))));
        assert!(matches!(vectors(&cfg(5, 3, 1)), Err(CliError::Input(_))));
        assert!(matches!(vectors(&cfg(3, 4, 7)), Err(CliError::Input(_))));
        assert!(matches!(vectors(&ScanConfig { degree: Some(3), ..cfg(3, 6, 1) }), Err(CliError::Input(_))));
    }

    #[test]
    fn row_fields() {
        let v: SpeedVector = "1,2,3".parse().unwrap();
        let r = row(&v, None, None);
        assert_eq!((r.n, r.speeds.as_str(), r.gap_num, r.gap_den, r.q), (4, "1;2;3", 1, 4, 4));
        assert_eq!((r.degree, r.samples), (6, 49));
        assert_eq!(r.status_plus, "certified");
        assert!((r.lambda_plus_cert.unwrap() - 0.25).abs() < 1e-6);
        assert_eq!(r.speed_vector().unwrap(), v);
    }

    #[test]
    fn skipped_classes() {
        let r = row(&"1".parse().unwrap(), None, None);
        assert_eq!(r.status_minus, STATUS_SKIPPED);
        // gap 1/2 at t = 1/2: the q-class needs q >= 3.
        assert_eq!(r.q, 2);
        assert_eq!(r.status_minus_q, STATUS_SKIPPED);
        assert!(r.lambda_minus_q.is_none());
    }

    #[test]
    fn csv_round_trip() {
        let rows = run(&ScanConfig { exhaustive: true, ..cfg(3, 4, 0) }, None).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER.join(","));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn missing_columns_rejected() {
        assert!(matches!(read_csv("n,speeds\n".as_bytes()), Err(CliError::Input(_))));
    }
}
