mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ffmoment_core::bounds::{lalfa_report, mv_values, preset_n, LalfaReport};
use ffmoment_core::eulerprod::{coefficients, conjecture_q, EulerConfig};
use ffmoment_core::ffpoly::Poly;
use ffmoment_core::lfun::{compute_l_with, value_at_half, zeros, LMethod};
use ffmoment_core::moments::{ensemble_sweep, kth_moment, shifted_moment, theory_comparison, SweepOptions};
use ffmoment_core::verify::{run_suite, SuiteResult, VerifyOptions, SUITES};
use ffmoment_core::{Error, QuadraticAlgebraic};

use config::{Format, Settings};
use output::{emit, num, render, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// 1 = verification or numerical failure, 2 = invalid configuration or
    /// input, 3 = enumeration budget exceeded.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Budget { .. }) => 3,
            CliError::Core(Error::InvalidConfig(_) | Error::InvalidInput(_) | Error::Cache(_) | Error::Io(_)) => 2,
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Core(_) | CliError::Verify(_) => 1,
        }
    }
}

/// Moments of quadratic Dirichlet L-functions over F_q[x].
///
/// Parameters come from the defaults, then the --config file (key = value
/// lines using the long flag names with underscores, e.g. `cache_dir`), then
/// FFMOMENT_CACHE_DIR, then flags. Exit codes: 0 success, 1 verification
/// failure, 2 invalid configuration, 3 budget exceeded.
#[derive(Parser, Debug)]
#[command(name = "ffmoment", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Field size: a prime ≡ 1 (mod 4)
    #[arg(long, global = true)]
    q: Option<u32>,
    /// Genus; discriminants have degree 2g+1
    #[arg(long, global = true)]
    g: Option<u32>,
    /// Moment order (even)
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Euler products: largest prime degree kept
    #[arg(long, global = true)]
    cutoff: Option<u32>,
    /// Euler products: working precision in bits
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Maximum number of polynomials any single enumeration may visit
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Ensemble sweeps: number of shards (one thread each)
    #[arg(long, global = true)]
    shards: Option<usize>,
    /// Threads for the contour quadrature
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Contour quadrature: nodes per circle
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Contour quadrature: circle radius
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Real part of s in [1/2, 1]
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Angle on the critical circle, in [0, π)
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// L-polynomial cache directory
    #[arg(long, global = true, env = "FFMOMENT_CACHE_DIR")]
    cache_dir: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact k-th moment over H_{2g+1}.
    ///
    /// CSV columns: q,g,k,ensemble_size,exact_a,exact_b,value,three_term,conjecture
    /// (the exact sum is exact_a + exact_b·√q). With --theta, also the moment of
    /// |L| on the circle |u| = q^{-1/2} at that angle.
    Moment {
        /// Also compute the main-term polynomial and the conjectured value
        #[arg(long)]
        theory: bool,
    },
    /// L-polynomial of one discriminant (--d), or of every D in H_{2g+1}.
    ///
    /// CSV columns: D_code,D,c0..c2g (D as base-q digits, constant term first).
    Lpoly {
        /// Discriminant as base-q digits, constant coefficient first
        #[arg(long)]
        d: Option<String>,
    },
    /// Main-term coefficients both ways, constants and identity checks.
    ///
    /// CSV columns: kind,name,value,tail_or_error,pass. Exit 1 when an
    /// asserted identity fails.
    Coeffs,
    /// The conjectured polynomial Q from contour quadrature.
    ///
    /// CSV columns: i,x_coeff,g_coeff,shifted_moment (Q(x) = Σ x_coeff·x^i,
    /// Q(2g+1)/ζ_q(2) = Σ g_coeff·g^i).
    Conjecture,
    /// Exact fourth moments for g = 1..=g next to the theoretical values.
    ///
    /// CSV columns: g,exact_a,exact_b,exact,three_term,conjecture,ratio_three_term,ratio_conjecture
    Compare,
    /// Run a verification suite (or `all`).
    ///
    /// CSV columns: suite,cases,failures,passed,summary. Exit 1 on any failure.
    Verify {
        /// Suite name or `all`
        suite: String,
        /// Minorant degree
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Per-D values L(1/2, χ_D) = a + b√q as exact fractions.
    ///
    /// CSV columns: D_code,g,a,b
    Export,
    /// Explicit log|L(α+it)| bound against the computed value over H_{2g+1}.
    ///
    /// CSV columns: D_code,alpha,t,N,lhs,explicit_rhs,gap,tail_term,skipped,M,V
    /// (t = --theta; N = --N or the log_q g preset).
    BoundsReport {
        #[arg(long = "N")]
        n: Option<usize>,
    },
}

fn settings(c: &Common) -> Result<Settings, CliError> {
    let mut s = Settings {
        workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        ..Default::default()
    };
    if let Some(p) = &c.config {
        s.apply_file(p)?;
    }
    let r = &mut s.run;
    macro_rules! over {
        ($($f:ident),*) => { $( if let Some(v) = c.$f.clone() { r.$f = v; } )* };
    }
    over!(q, g, k, cutoff, precision, budget, shards, nodes, radius, alpha, theta);
    if c.cache_dir.is_some() {
        r.cache_dir = c.cache_dir.clone();
    }
    if let Some(f) = c.format {
        s.format = f;
    }
    if let Some(w) = c.workers {
        s.workers = w.max(1);
    }
    s.run.validate()?;
    Ok(s)
}

fn sweep_opts(s: &Settings) -> SweepOptions {
    SweepOptions {
        shards: s.run.shards,
        cache_dir: s.run.cache_dir.as_ref().map(PathBuf::from),
        budget: s.run.budget,
        method: LMethod::Auto,
    }
}

fn euler(s: &Settings) -> Result<EulerConfig, CliError> {
    Ok(EulerConfig::new(s.run.q, s.run.cutoff, s.run.precision)?)
}

fn qa_cells(v: &QuadraticAlgebraic) -> [String; 2] {
    let (a, b) = v.to_strings();
    [a, b]
}

#[derive(Serialize)]
struct MomentOutput {
    report: ffmoment_core::moments::MomentReport,
    shifted: Option<ffmoment_core::moments::ShiftedMomentPoint>,
}

fn cmd_moment(s: &Settings, theory: bool) -> Result<String, CliError> {
    let r = &s.run;
    let mut report = kth_moment(r.q, r.g as usize, r.k, &sweep_opts(s))?;
    if theory {
        let cfg = euler(s)?;
        let cs = coefficients(&cfg)?;
        let conj = conjecture_q(&cfg, r.nodes, r.radius, s.workers)?;
        report = report.with_theory([cs.a10.to_f64(), cs.a9.to_f64(), cs.a8.to_f64()], Some(&conj));
    }
    let shifted = if r.theta != 0.0 {
        let ls = ensemble_sweep(r.q, r.g as usize, &sweep_opts(s))?;
        Some(shifted_moment(&ls, r.theta, r.k as f64)?)
    } else {
        None
    };
    eprintln!("moment: {} discriminants in {} ms", report.ensemble_size, report.elapsed_ms);
    let out = MomentOutput { report, shifted };
    render("moment", s, &out, || {
        let m = &out.report;
        let mut t = Table::new(&["q", "g", "k", "ensemble_size", "exact_a", "exact_b", "value", "three_term", "conjecture"]);
        let [a, b] = qa_cells(&m.exact_sum);
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        t.push(vec![
            m.q.to_string(),
            m.g.to_string(),
            m.k.to_string(),
            m.ensemble_size.to_string(),
            a,
            b,
            num(m.float_value),
            opt(m.theory_thm1),
            opt(m.theory_conjecture),
        ]);
        t
    })
}

#[derive(Serialize)]
struct LpolyOutput {
    d: String,
    d_code: u64,
    g: usize,
    coeffs: Vec<i64>,
    value_at_half: QuadraticAlgebraic,
    zeros: ffmoment_core::lfun::ZeroSet,
}

fn cmd_lpoly(s: &Settings, d: Option<&str>) -> Result<String, CliError> {
    let r = &s.run;
    let ls = match d {
        Some(digits) => {
            let p = Poly::from_digits(r.q, digits)?;
            vec![compute_l_with(&p, LMethod::Auto, r.budget)?]
        }
        None => ensemble_sweep(r.q, r.g as usize, &sweep_opts(s))?,
    };
    let recs = ls
        .iter()
        .map(|l| {
            Ok(LpolyOutput {
                d: l.d.digits(),
                d_code: l.d.code(),
                g: l.g,
                coeffs: l.coeffs.clone(),
                value_at_half: value_at_half(l),
                zeros: zeros(l)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let gmax = ls.iter().map(|l| l.g).max().unwrap_or(0);
    render("lpoly", s, &recs, || {
        let mut cols: Vec<String> = ["D_code", "D", "g"].iter().map(|c| c.to_string()).collect();
        cols.extend((0..=2 * gmax).map(|n| format!("c{n}")));
        let width = cols.len();
        let mut t = Table::with_columns(cols);
        for l in &recs {
            let mut row = vec![l.d_code.to_string(), l.d.clone(), l.g.to_string()];
            row.extend(l.coeffs.iter().map(|c| c.to_string()));
            row.resize(width, String::new());
            t.push(row);
        }
        t
    })
}

fn cmd_coeffs(s: &Settings) -> Result<(String, bool), CliError> {
    let cs = coefficients(&euler(s)?)?;
    let rep = cs.report();
    let text = render("coeffs", s, &rep, || {
        let mut t = Table::new(&["kind", "name", "value", "tail_or_error", "pass"]);
        for (k, v) in &rep.constants {
            t.push(vec!["constant".into(), k.clone(), v.value.clone(), num(v.tail_bound), String::new()]);
        }
        for c in &rep.checks {
            t.push(vec![
                if c.asserted { "check" } else { "alternative" }.into(),
                format!("\"{}\"", c.name),
                num(c.lhs),
                num(c.error),
                c.pass.to_string(),
            ]);
        }
        t
    })?;
    Ok((text, rep.all_pass))
}

fn cmd_conjecture(s: &Settings) -> Result<String, CliError> {
    let start = Instant::now();
    let c = conjecture_q(&euler(s)?, s.run.nodes, s.run.radius, s.workers)?;
    eprintln!("conjecture: {} nodes in {:.1} s", c.nodes, start.elapsed().as_secs_f64());
    render("conjecture", s, &c, || {
        let mut t = Table::new(&["i", "x_coeff", "g_coeff", "shifted_moment"]);
        for i in 0..c.x_coeffs.len() {
            t.push(vec![i.to_string(), num(c.x_coeffs[i]), num(c.g_coeffs[i]), num(c.shifted_moments[i])]);
        }
        t
    })
}

fn cmd_compare(s: &Settings) -> Result<String, CliError> {
    let r = &s.run;
    let cfg = euler(s)?;
    let cs = coefficients(&cfg)?;
    let conj = conjecture_q(&cfg, r.nodes, r.radius, s.workers)?;
    let gs: Vec<usize> = (1..=r.g as usize).collect();
    let rows = theory_comparison(r.q, &gs, [cs.a10.to_f64(), cs.a9.to_f64(), cs.a8.to_f64()], &conj, &sweep_opts(s))?;
    render("compare", s, &rows, || {
        let mut t = Table::new(&[
            "g",
            "exact_a",
            "exact_b",
            "exact",
            "three_term",
            "conjecture",
            "ratio_three_term",
            "ratio_conjecture",
        ]);
        for row in &rows {
            let [a, b] = qa_cells(&row.exact);
            t.push(vec![
                row.g.to_string(),
                a,
                b,
                num(row.exact_value),
                num(row.three_term),
                num(row.conjecture),
                num(row.ratio_three_term),
                num(row.ratio_conjecture),
            ]);
        }
        t
    })
}

fn cmd_verify(s: &Settings, suite: &str, n: Option<usize>, c: &Common) -> Result<(String, bool), CliError> {
    let r = &s.run;
    // only parameters given as flags narrow a suite; otherwise each suite
    // runs its full default grid
    let opts = VerifyOptions {
        budget: r.budget,
        cutoff: r.cutoff,
        precision: r.precision,
        nodes: r.nodes,
        radius: r.radius,
        workers: s.workers,
        shards: r.shards,
        q: c.q,
        g: c.g.map(|g| g as usize),
        n,
        alpha: c.alpha,
    };
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut results: Vec<SuiteResult> = Vec::new();
    for name in names {
        let res = run_suite(name, &opts)?;
        eprintln!(
            "verify {name}: {} ({} cases, {} failures, {} ms)",
            if res.passed() { "pass" } else { "FAIL" },
            res.cases,
            res.failures.len(),
            res.elapsed_ms
        );
        results.push(res);
    }
    let ok = results.iter().all(|r| r.passed());
    let text = render("verify", s, &results, || {
        let mut t = Table::new(&["suite", "cases", "failures", "passed", "summary"]);
        for r in &results {
            t.push(vec![
                r.suite.clone(),
                r.cases.to_string(),
                r.failures.len().to_string(),
                r.passed().to_string(),
                format!("\"{}\"", r.summary.replace('"', "'")),
            ]);
        }
        t
    })?;
    Ok((text, ok))
}

#[derive(Serialize)]
struct ExportRow {
    d_code: u64,
    g: usize,
    a: String,
    b: String,
}

fn cmd_export(s: &Settings) -> Result<String, CliError> {
    let ls = ensemble_sweep(s.run.q, s.run.g as usize, &sweep_opts(s))?;
    let rows: Vec<ExportRow> = ls
        .iter()
        .map(|l| {
            let (a, b) = value_at_half(l).to_strings();
            ExportRow {
                d_code: l.d.code(),
                g: l.g,
                a,
                b,
            }
        })
        .collect();
    render("export", s, &rows, || {
        let mut t = Table::new(&["D_code", "g", "a", "b"]);
        for r in &rows {
            t.push(vec![r.d_code.to_string(), r.g.to_string(), r.a.clone(), r.b.clone()]);
        }
        t
    })
}

#[derive(Serialize)]
struct BoundsOutput {
    m: f64,
    v: f64,
    rows: Vec<LalfaReport>,
}

fn cmd_bounds(s: &Settings, n: Option<usize>) -> Result<String, CliError> {
    let r = &s.run;
    let n = n.unwrap_or_else(|| preset_n(r.q, r.g as f64, r.alpha));
    let ls = ensemble_sweep(r.q, r.g as usize, &sweep_opts(s))?;
    let rows = ls
        .iter()
        .map(|l| lalfa_report(l, r.alpha, r.theta, n))
        .collect::<Result<Vec<_>, Error>>()?;
    let (m, v) = mv_values(r.theta, r.g as f64);
    let out = BoundsOutput { m, v, rows };
    render("bounds-report", s, &out, || {
        let mut t = Table::new(&[
            "D_code",
            "alpha",
            "t",
            "N",
            "lhs",
            "explicit_rhs",
            "gap",
            "tail_term",
            "skipped",
            "M",
            "V",
        ]);
        for x in &out.rows {
            t.push(vec![
                x.d_code.to_string(),
                num(x.alpha),
                num(x.t),
                x.n.to_string(),
                num(x.lhs),
                num(x.explicit_rhs),
                num(x.gap),
                num(x.tail_term),
                x.skipped.to_string(),
                num(m),
                num(v),
            ]);
        }
        t
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let s = settings(&cli.common)?;
    let out = cli.common.out.as_deref();
    let (text, ok, what) = match &cli.command {
        Command::Moment { theory } => (cmd_moment(&s, *theory)?, true, ""),
        Command::Lpoly { d } => (cmd_lpoly(&s, d.as_deref())?, true, ""),
        Command::Coeffs => {
            let (t, ok) = cmd_coeffs(&s)?;
            (t, ok, "an asserted coefficient identity failed")
        }
        Command::Conjecture => (cmd_conjecture(&s)?, true, ""),
        Command::Compare => (cmd_compare(&s)?, true, ""),
        Command::Verify { suite, n } => {
            let (t, ok) = cmd_verify(&s, suite, *n, &cli.common)?;
            (t, ok, "suite reported failures")
        }
        Command::Export => (cmd_export(&s)?, true, ""),
        Command::BoundsReport { n } => (cmd_bounds(&s, *n)?, true, ""),
    };
    // results are written even when a check fails, so failures can be inspected
    emit(&text, out)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Verify(what.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
