//! Command-line front end: `gap`, `bound`, `equality`, `scan` and `figure`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use lonely_core::bounds::{self, BoundSpec};
use lonely_core::equality::{self, EqualityCase};
use lonely_core::{exact, BoundResult, BoundStatus, Error, SpeedVector};
use serde_json::json;

pub mod figure;
pub mod scan;

/// Failures, each with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, speeds or files: exit 2.
    Input(String),
    /// The solver reported an infeasible or unbounded program: exit 3.
    Solver(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Solver(m) | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InvalidSpeeds(_) => CliError::Input(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "lonely", version, about = "Gaps of loneliness and their linear-programming bounds")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Suppress progress and informational messages.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Upper,
    Lower,
    LowerQ,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact gap of loneliness.
    Gap {
        /// Comma-separated increasing speeds.
        #[arg(long = "v")]
        v: String,
    },
    /// Certified bound from the sampled linear program.
    Bound {
        kind: BoundKind,
        #[arg(long = "v")]
        v: String,
        /// Denominator for `lower-q`; defaults to that of the smallest maximizer.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Exchange rounds after the initial grid (0 solves the plain grid).
        #[arg(long)]
        refine_rounds: Option<usize>,
        #[arg(long)]
        no_certify: bool,
        /// Write the polynomial's coefficients as JSON.
        #[arg(long)]
        dump_poly: Option<PathBuf>,
    },
    /// Closed-form equality cases and the slackness conditions.
    Equality {
        #[arg(long = "v")]
        v: String,
        /// Denominator for the lower-bound case; defaults to that of the smallest maximizer.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Gap and all three bounds for many vectors, written as CSV.
    Scan {
        /// Runner count; vectors have n - 1 speeds.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        max_speed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
        /// Every vector in range instead of a random sample.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// SVG scatter of a scan.
    Figure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "figure.svg")]
        out: PathBuf,
        /// Vertical reference line; defaults to 1/n of the scan.
        #[arg(long)]
        vline: Option<f64>,
    },
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn parse_speeds(s: &str) -> Result<SpeedVector, CliError> {
    s.parse().map_err(|e: Error| CliError::Input(format!("bad --v {s:?}: {e}")))
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Gap { v } => cmd_gap(cli, &parse_speeds(v)?, out),
        Command::Bound { kind, v, q, degree, samples, refine_rounds, no_certify, dump_poly } => {
            let v = parse_speeds(v)?;
            let mut spec = match kind {
                BoundKind::Upper => BoundSpec::upper(v.clone()),
                BoundKind::Lower => BoundSpec::lower(v.clone()),
                BoundKind::LowerQ => BoundSpec::lower_q(v.clone(), q.unwrap_or_else(|| exact::gap(&v).q)),
            };
            if q.is_some() && *kind != BoundKind::LowerQ {
                return Err(CliError::Input("--q only applies to lower-q".into()));
            }
            if let Some(d) = degree {
                spec = spec.degree(*d);
            }
            if let Some(n) = samples {
                spec = spec.samples(*n);
            }
            if let Some(r) = refine_rounds {
                spec = spec.refine_rounds(*r);
            }
            let spec = spec.certify(!no_certify);
            let r = bounds::compute(&spec)?;
            cmd_bound(cli, &spec, &r, dump_poly.as_deref(), out)
        }
        Command::Equality { v, q } => cmd_equality(cli, &parse_speeds(v)?, *q, out),
        Command::Scan { n, max_speed, count, seed, out: path, exhaustive, degree, samples, threads } => {
            let cfg = scan::ScanConfig {
                n: *n,
                max_speed: *max_speed,
                count: *count,
                seed: *seed,
                exhaustive: *exhaustive,
                degree: *degree,
                samples: *samples,
                threads: *threads,
            };
            cmd_scan(cli, &cfg, path, out, err)
        }
        Command::Figure { input, out: path, vline } => cmd_figure(cli, input, path, *vline, out),
    }
}

fn cmd_gap(cli: &Cli, v: &SpeedVector, out: &mut dyn Write) -> Result<(), CliError> {
    let g = exact::gap(v);
    if cli.json {
        writeln!(out, "{}", json!({ "speeds": v.speeds(), "result": g }))?;
        return Ok(());
    }
    writeln!(out, "gap = {} at t = {}", g.gap, g.t_min)?;
    if !cli.quiet {
        let all: Vec<String> = g.maximizers.iter().map(|t| t.to_string()).collect();
        writeln!(out, "maximizers: {}", all.join(", "))?;
        writeln!(out, "q = {}", g.q)?;
        writeln!(out, "candidates: {}", g.candidate_count)?;
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |x| format!("{x:.12}"))
}

fn cmd_bound(
    cli: &Cli,
    spec: &BoundSpec,
    r: &BoundResult,
    dump: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if let (Some(path), Some(p)) = (dump, &r.polynomial) {
        let text = serde_json::to_string_pretty(p).map_err(|e| CliError::Other(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
    }
    if cli.json {
        writeln!(out, "{}", json!({ "spec": spec, "result": r }))?;
    } else {
        writeln!(out, "status = {}", r.status)?;
        writeln!(out, "lp_value = {}", fmt_opt(r.lp_value))?;
        writeln!(out, "certified_value = {}", fmt_opt(r.certified_value))?;
        writeln!(out, "repair_shift = {:.3e}", r.repair_shift)?;
        if !cli.quiet {
            writeln!(out, "coefficient_repair = {:.3e}", r.coefficient_repair)?;
            writeln!(out, "degree = {} (active {})", r.degree, r.active_degree)?;
            writeln!(out, "samples = {} (program rows {}, rounds {})", r.samples, r.lp_points, r.refine_rounds_used)?;
            if let Some(q) = r.assumes_denominator {
                writeln!(out, "assumes the maximum is attained at denominator {q}")?;
            }
        }
    }
    match r.status {
        BoundStatus::Infeasible | BoundStatus::Unbounded => Err(CliError::Solver(format!(
            "the sampled program is {}; try a larger --degree or --samples",
            r.status
        ))),
        _ => Ok(()),
    }
}

fn case_json(c: &EqualityCase) -> serde_json::Value {
    json!({
        "kind": c.kind,
        "predicted_gap": c.predicted_gap,
        "coeffs": c.polynomial.as_ref().map(|p| p.coeffs().to_vec()),
    })
}

fn cmd_equality(cli: &Cli, v: &SpeedVector, q: Option<u64>, out: &mut dyn Write) -> Result<(), CliError> {
    let g = exact::gap(v);
    let q = q.unwrap_or(g.q);
    let upper = equality::detect_thm12(v)?;
    let lower = equality::detect_thm31(v, q)?;
    let slack = upper.polynomial.as_ref().map(|f| equality::slackness_check(f, v));
    let chain = upper.polynomial.as_ref().map(|f| equality::montgomery_chain(f, v));
    if cli.json {
        writeln!(
            out,
            "{}",
            json!({
                "speeds": v.speeds(),
                "gap": g.gap,
                "q": q,
                "upper": case_json(&upper),
                "lower_q": case_json(&lower),
                "slackness": slack,
                "chain": chain,
            })
        )?;
        return Ok(());
    }
    writeln!(out, "gap = {} at t = {}", g.gap, g.t_min)?;
    writeln!(out, "upper case: {:?}", upper.kind)?;
    writeln!(out, "lower case (q = {q}): {:?}", lower.kind)?;
    if let (Some(s), Some(c)) = (slack, chain) {
        writeln!(out, "slackness: support {:.3e}, orbit {:.3e}", s.support_residual, s.orbit_residual)?;
        writeln!(out, "chain: {:.12} >= {:.12} >= {:.12}", c.lhs, c.mid, c.rhs)?;
    }
    Ok(())
}

fn cmd_scan(
    cli: &Cli,
    cfg: &scan::ScanConfig,
    path: &std::path::Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let quiet = cli.quiet;
    let progress = move |k: usize, total: usize| {
        if !quiet && (k % 10 == 0 || k == total) {
            eprintln!("scan: {k}/{total}");
        }
    };
    let rows = scan::run(cfg, Some(&progress))?;
    let file = std::fs::File::create(path)?;
    scan::write_csv(&rows, std::io::BufWriter::new(file))?;
    if cli.json {
        writeln!(out, "{}", serde_json::to_string(&rows).map_err(|e| CliError::Other(e.to_string()))?)?;
    } else if !cli.quiet {
        writeln!(err, "wrote {} rows to {}", rows.len(), path.display())?;
    }
    Ok(())
}

fn cmd_figure(
    cli: &Cli,
    input: &std::path::Path,
    path: &std::path::Path,
    vline: Option<f64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let file = std::fs::File::open(input).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let rows = scan::read_csv(file)?;
    let vline = vline.unwrap_or_else(|| rows.first().map_or(1.0 / 6.0, |r| 1.0 / r.n as f64));
    let svg = figure::render(&rows, vline);
    std::fs::write(path, &svg)?;
    let counts = figure::marker_counts(&svg);
    if cli.json {
        writeln!(
            out,
            "{}",
            json!({ "rows": rows.len(), "lambda_minus_q": counts[0], "lambda_minus": counts[1], "lambda_plus": counts[2] })
        )?;
    } else if !cli.quiet {
        writeln!(out, "{} rows; markers: {} / {} / {}", rows.len(), counts[0], counts[1], counts[2])?;
    }
    Ok(())
}
