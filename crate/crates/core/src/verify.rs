//! Named verification suites. Each runs one family of exact identities or
//! tolerance checks end to end and reports the offending inputs.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::{f1_eval, minorant_check, minorant_mean};
use crate::characters::{gauss_closed_suite, poisson_suite, polya_vinogradov, sumd_check};
use crate::error::{Error, Result};
use crate::eulerprod::{coefficients, conjecture_q, EulerConfig};
use crate::ffpoly::{monic_codes, Poly};
use crate::lfun::{explicit_formula_check, log_modulus_identity, zeros};
use crate::moments::{afe_suite, ensemble_sweep, SweepOptions};
use crate::trigsums::{
    geometric_trig, harmonic_block, harmonic_ladder, master_ladder, power_ladder, power_trig, power_trig_scale,
    truncated_ladder, ubvar_sweep, TrigKind, UBVAR_CONSTANT,
};

/// Suite names accepted by [`run_suite`], in criterion order.
pub const SUITES: [&str; 12] = [
    "afe",
    "fe-rh",
    "poisson",
    "gauss",
    "sumd",
    "polya-vinogradov",
    "euler-chain",
    "coefficients",
    "conjecture",
    "explicit",
    "minorant",
    "trig",
];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub budget: u64,
    pub cutoff: u32,
    pub precision: u32,
    /// Coarse node count of the conjecture quadrature; the suite also runs
    /// twice as many.
    pub nodes: usize,
    pub radius: f64,
    pub workers: usize,
    pub shards: usize,
    /// Overrides of the suite's own parameter grid; `None` runs the full
    /// default grid.
    pub q: Option<u32>,
    pub g: Option<usize>,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: crate::config::DEFAULT_BUDGET,
            cutoff: crate::config::DEFAULT_CUTOFF,
            precision: crate::config::DEFAULT_PRECISION,
            nodes: 32,
            radius: 0.05,
            workers: 1,
            shards: 1,
            q: None,
            g: None,
            n: None,
            alpha: None,
        }
    }
}

impl VerifyOptions {
    fn q(&self) -> u32 {
        self.q.unwrap_or(5)
    }

    fn genera(&self, default: &[usize]) -> Vec<usize> {
        self.g.map(|g| vec![g]).unwrap_or_else(|| default.to_vec())
    }

    fn sweep(&self) -> SweepOptions {
        SweepOptions {
            budget: self.budget,
            shards: self.shards,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: usize,
    /// One line per failing input.
    pub failures: Vec<String>,
    /// Headline numbers (worst error, margins) for the log.
    pub summary: String,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Acc {
    cases: usize,
    failures: Vec<String>,
}

impl Acc {
    fn new() -> Self {
        Acc {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteResult> {
    let start = Instant::now();
    let (acc, summary) = match name {
        "afe" => afe(opts)?,
        "fe-rh" => fe_rh(opts)?,
        "poisson" => poisson(opts)?,
        "gauss" => gauss(opts)?,
        "sumd" => sumd(opts)?,
        "polya-vinogradov" => pv(opts)?,
        "euler-chain" => euler_chain(opts)?,
        "coefficients" => coeffs(opts)?,
        "conjecture" => conjecture(opts)?,
        "explicit" => explicit(opts)?,
        "minorant" => minorant(opts)?,
        "trig" => trig()?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteResult {
        suite: name.to_string(),
        cases: acc.cases,
        failures: acc.failures,
        summary,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn afe(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let mut parts = Vec::new();
    for g in opts.genera(&[1, 2]) {
        let s = afe_suite(opts.q(), g, opts.budget)?;
        acc.cases += s.cases;
        acc.failures.extend(s.failures.iter().map(|d| format!("g={g} D={d}: L(1/2)^4 != AFE sum")));
        acc.failures.extend(
            s.layer_mismatches
                .iter()
                .map(|d| format!("g={g} D={d}: AFE layer != coefficient of L^4")),
        );
        parts.push(format!("g={g}: {} exact", s.cases - s.failures.len()));
    }
    Ok((acc, parts.join(", ")))
}

fn fe_rh(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let mut worst = 0.0f64;
    for g in opts.genera(&[1, 2]) {
        let ls = ensemble_sweep(opts.q(), g, &opts.sweep())?;
        for l in &ls {
            acc.check(l.has_symmetry(), || format!("D={}: coefficients not symmetric", l.d.digits()));
            let z = zeros(l)?;
            worst = worst.max(z.modulus_deviation);
            acc.check(z.modulus_deviation <= 1e-8, || {
                format!("D={}: ||alpha|-1| = {:.2e}", l.d.digits(), z.modulus_deviation)
            });
        }
    }
    Ok((acc, format!("max ||alpha_j|-1| = {worst:.1e}")))
}

fn poisson(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let s = poisson_suite(opts.q(), 5, 5, opts.budget)?;
    let acc = Acc {
        cases: s.cases,
        failures: s
            .failures
            .iter()
            .map(|f| format!("f={} m={}: error {:.2e}", f.f, f.m, f.abs_error))
            .collect(),
    };
    Ok((acc, format!("max error/sqrt|f| = {:.1e}", s.max_error)))
}

fn gauss(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let (cases, worst) = gauss_closed_suite(opts.q(), 2, 4, opts.budget)?;
    let mut acc = Acc { cases, failures: Vec::new() };
    if !(worst <= 1e-9) {
        acc.failures.push(format!("max |closed - direct| = {worst:.2e}"));
    }
    Ok((acc, format!("max |closed - direct| = {worst:.1e}")))
}

fn sumd(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let g = opts.g.unwrap_or(1);
    for n in 0..=4 {
        for c in monic_codes(opts.q(), n) {
            let f = Poly::from_code(opts.q(), c);
            let s = sumd_check(&f, g, opts.budget)?;
            acc.check(s.lhs == s.rhs, || format!("f={}: {} != {}", f.digits(), s.lhs, s.rhs));
        }
    }
    let s = format!("{} monic f, exact", acc.cases);
    Ok((acc, s))
}

fn pv(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let s = polya_vinogradov(opts.q(), 5, opts.budget)?;
    let acc = Acc {
        cases: s.cases,
        failures: s
            .violations
            .iter()
            .map(|(f, m, v)| format!("f={f} m={m}: sum = {v}"))
            .collect(),
    };
    Ok((
        acc,
        format!(
            "max |S|/sqrt|f| = {:.4} (square-free), {:.4} (other non-squares, not asserted)",
            s.max_ratio_squarefree, s.max_ratio_nonsquare
        ),
    ))
}

fn euler_chain(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let cfg = EulerConfig::new(opts.q(), opts.cutoff, opts.precision)?;
    let cs = coefficients(&cfg)?;
    let mut acc = Acc::new();
    let mut parts = Vec::new();
    for name in ["H(1/q) = A", "C(1,1/q) = A"] {
        let c = cs.check(name).ok_or_else(|| Error::Numerical(format!("missing check {name}")))?;
        acc.check(c.error <= 1e-12, || format!("{name}: error {:.2e}", c.error));
        parts.push(format!("{name}: {:.1e}", c.error));
    }
    Ok((acc, parts.join(", ")))
}

fn coeffs(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let mut parts = Vec::new();
    for q in opts.q.map(|q| vec![q]).unwrap_or_else(|| vec![5, 13]) {
        let cfg = EulerConfig::new(q, opts.cutoff, opts.precision)?;
        let cs = coefficients(&cfg)?;
        let mut worst = 0.0f64;
        for c in cs.checks.iter().filter(|c| c.asserted) {
            worst = worst.max(c.error / c.tolerance);
            acc.check(c.pass, || format!("q={q} {}: error {:.2e} > {:.0e}", c.name, c.error, c.tolerance));
        }
        parts.push(format!("q={q}: worst error/tolerance {worst:.1e}"));
    }
    Ok((acc, parts.join(", ")))
}

fn conjecture(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let cfg = EulerConfig::new(opts.q(), opts.cutoff, opts.precision)?;
    let cs = coefficients(&cfg)?;
    let coarse = conjecture_q(&cfg, opts.nodes, opts.radius, opts.workers)?;
    let fine = conjecture_q(&cfg, 2 * opts.nodes, opts.radius, opts.workers)?;
    let mut worst_b = 0.0f64;
    for (i, b) in [(10, &cs.b10), (9, &cs.b9), (8, &cs.b8)] {
        let b = b.to_f64();
        let rel = ((fine.g_coeffs[i] - b) / b).abs();
        worst_b = worst_b.max(rel);
        acc.check(rel <= 1e-6, || format!("g^{i}: quadrature {} vs b = {b} (rel {rel:.2e})", fine.g_coeffs[i]));
    }
    // stability of every coefficient, judged against the size of the
    // polynomial's terms at g = 1 so that near-zero coefficients do not blow up
    let scale = fine.g_coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut worst_d = 0.0f64;
    for (i, (f, c)) in fine.g_coeffs.iter().zip(&coarse.g_coeffs).enumerate() {
        let rel = (f - c).abs() / f.abs().max(1e-3 * scale);
        worst_d = worst_d.max(rel);
        acc.check(rel <= 1e-8, || {
            format!("g^{i}: {} nodes give {c}, {} nodes give {f} (rel {rel:.2e})", opts.nodes, 2 * opts.nodes)
        });
    }
    Ok((
        acc,
        format!(
            "max rel |Q coeff - b| = {worst_b:.1e}, node doubling {}->{}: {worst_d:.1e}",
            opts.nodes,
            2 * opts.nodes
        ),
    ))
}

/// Even test functions of Fourier degree 0..=3, listed ĥ(−N) … ĥ(N).
pub fn explicit_test_functions() -> Vec<Vec<f64>> {
    vec![
        vec![1.0],
        vec![0.5, 1.0, 0.5],
        vec![1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0],
        vec![0.1, -0.3, 0.7, 1.2, 0.7, -0.3, 0.1],
    ]
}

fn explicit(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let mut ls = Vec::new();
    for g in opts.genera(&[1, 2]) {
        let h = ensemble_sweep(opts.q(), g, &opts.sweep())?;
        if h.len() <= 100 {
            ls.extend(h);
        } else {
            // 50 D spread evenly over the ensemble
            let stride = h.len() / 50;
            ls.extend(h.into_iter().step_by(stride).take(50));
        }
    }
    let mut worst = 0.0f64;
    for l in &ls {
        for h in explicit_test_functions() {
            let c = explicit_formula_check(l, &h)?;
            worst = worst.max(c.error);
            acc.check(c.error <= 1e-7, || {
                format!("D={} deg h={}: zero side {} vs prime side {}", l.d.digits(), h.len() / 2, c.zero_side, c.prime_side)
            });
        }
    }
    Ok((acc, format!("max |zero side - prime side| = {worst:.1e}")))
}

fn minorant(opts: &VerifyOptions) -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let q = opts.q();
    let ns = opts.n.map(|n| vec![n]).unwrap_or_else(|| vec![5, 10, 20]);
    let alphas = opts.alpha.map(|a| vec![a]).unwrap_or_else(|| vec![0.5, 0.75, 1.0]);
    let mut worst_v = f64::NEG_INFINITY;
    for &n in &ns {
        for &alpha in &alphas {
            let c = minorant_check(n, alpha, q, 10_000)?;
            worst_v = worst_v.max(c.max_violation);
            acc.check(c.max_violation <= 1e-10, || {
                format!("N={n} alpha={alpha}: r - f1 = {:.2e} at x = {}", c.max_violation, c.worst_x)
            });
        }
    }
    for &alpha in &alphas {
        let means: Vec<f64> = (1..=40).map(|n| minorant_mean(n, alpha, q)).collect();
        acc.check(means.windows(2).all(|w| w[1] >= w[0]), || format!("alpha={alpha}: r(0) not nondecreasing in N"));
    }
    // f₁ by its Fourier series and by the log ratio; at α = ½ the series
    // converges only like 1/M and is not compared
    let mut worst_f = 0.0f64;
    let f1_alphas: Vec<f64> = alphas.iter().map(|&a| if a == 0.5 { 0.6 } else { a }).collect();
    for &alpha in &f1_alphas {
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let e = f1_eval(x, alpha, q, 400)?;
            worst_f = worst_f.max(e.difference);
            acc.check(e.difference <= 1e-10, || format!("f1 at x={x} alpha={alpha}: paths differ by {:.2e}", e.difference));
        }
    }
    let h3 = ensemble_sweep(q, opts.g.unwrap_or(1), &opts.sweep())?;
    let mut worst_l = 0.0f64;
    let mut singular = 0;
    for l in &h3 {
        for &alpha in &alphas {
            for t in [0.0, 0.7, 2.1] {
                let c = log_modulus_identity(l, alpha, t)?;
                if c.singular {
                    singular += 1;
                    continue;
                }
                worst_l = worst_l.max(c.error);
                acc.check(c.error <= 1e-7, || {
                    format!("D={} alpha={alpha} t={t}: log-modulus error {:.2e}", l.d.digits(), c.error)
                });
            }
        }
    }
    Ok((
        acc,
        format!(
            "max violation {worst_v:.1e}, f1 dual path {worst_f:.1e}, log-modulus {worst_l:.1e} ({singular} zeros skipped)"
        ),
    ))
}

fn trig() -> Result<(Acc, String)> {
    let mut acc = Acc::new();
    let mut worst_id = 0.0f64;
    for g in [1u64, 2, 7, 50, 333, 1000] {
        for i in 1..40 {
            let theta = 2.0 * PI * i as f64 / 40.0 + 1e-3;
            let r = geometric_trig(g, theta)?;
            worst_id = worst_id.max(r.max_deviation);
            acc.check(r.max_deviation <= 1e-9, || format!("geometric sums g={g} theta={theta}: {:.2e}", r.max_deviation));
        }
    }
    for k in 1..=9 {
        for g in [3u64, 17, 64, 500] {
            for theta in [0.3, 1.0, 2.5, PI] {
                for kind in [TrigKind::Sin, TrigKind::Cos] {
                    let r = power_trig(k, g, theta, kind)?;
                    if !r.in_regime {
                        continue;
                    }
                    let e = (r.direct - r.closed).abs() / power_trig_scale(k, g);
                    worst_id = worst_id.max(e);
                    acc.check(e <= 1e-9, || format!("power sum k={k} g={g} theta={theta} {kind:?}: {e:.2e}"));
                }
            }
        }
    }
    for m in [5u64, 20, 100, 400] {
        for alpha in [1u64, 2, 5, 9] {
            let h = harmonic_block(m, alpha)?;
            let ok = (h.a_direct - h.a_formula).abs() <= h.a_tail_bound + 1e-12
                && (h.b_direct - h.b_formula).abs() <= h.b_tail_bound + 1e-12;
            acc.check(ok, || format!("harmonic block m={m} alpha={alpha}: {h:?}"));
        }
    }
    let ub = ubvar_sweep(10_000, 400);
    acc.check(ub <= UBVAR_CONSTANT, || format!("cosine-sum bound slack {ub} > {UBVAR_CONSTANT}"));

    let mut ladders = Vec::new();
    for k in [1, 2, 5, 9] {
        for kind in [TrigKind::Sin, TrigKind::Cos] {
            ladders.push((format!("power k={k} {kind:?}"), power_ladder(k, kind)?));
        }
    }
    ladders.push(("truncated sine series".into(), truncated_ladder()?));
    let (la, lb) = harmonic_ladder(10, 50)?;
    ladders.push(("harmonic A".into(), la));
    ladders.push(("harmonic B".into(), lb));
    for k in 0..=2 {
        ladders.push((format!("master k={k}"), master_ladder(k)?));
    }
    let mut worst_ratio = 0.0f64;
    for (name, l) in &ladders {
        worst_ratio = worst_ratio.max(l.max / l.median);
        acc.check(l.stable, || format!("ladder {name}: max {} > 4 x median {}", l.max, l.median));
    }
    Ok((
        acc,
        format!(
            "identities to {worst_id:.1e}, {} ladders, worst max/median {worst_ratio:.2}",
            ladders.len()
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_config_error() {
        assert!(matches!(run_suite("nope", &VerifyOptions::default()), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn sumd_suite_passes() {
        let r = run_suite("sumd", &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.cases, 781);
    }

    #[test]
    fn explicit_test_functions_are_even() {
        for h in explicit_test_functions() {
            let n = h.len();
            assert!(n % 2 == 1);
            for i in 0..n {
                assert_eq!(h[i], h[n - 1 - i]);
            }
        }
    }
}
