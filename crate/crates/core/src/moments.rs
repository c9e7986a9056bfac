//! Sweeps over the hyperelliptic ensemble H_{2g+1}: exact moments of
//! L(1/2, χ_D), the per-D approximate functional equation, moments on the
//! circle |u| = q^{−1/2}, and the diagonal main-term sum.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::time::Instant;

use crate::bounds::mv_values;
use crate::cache;
use crate::characters::{divisors_of_power, ResidueCharacter};
use crate::config::{check_budget, qpow};
use crate::error::{Error, Result};
use crate::eulerprod::ConjectureQ;
use crate::ffpoly::{binom3, enumerate, monic_codes, shared_table, FactorTable, Poly, PolySet};
use crate::lfun::{compute_l_with, validate_discriminant, value_at_half, LMethod, LPolynomial, PrimeContext};
use crate::quad::QuadraticAlgebraic;

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub shards: usize,
    pub cache_dir: Option<PathBuf>,
    pub budget: u64,
    pub method: LMethod,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            shards: 1,
            cache_dir: None,
            budget: crate::config::DEFAULT_BUDGET,
            method: LMethod::Auto,
        }
    }
}

/// |H_n| = q^{n−1}(q−1) for n ≥ 2.
pub fn ensemble_size(q: u32, g: usize) -> u128 {
    qpow(q, 2 * g as u32) * (q as u128 - 1)
}

/// H_{2g+1} in code order.
pub fn ensemble(q: u32, g: usize, budget: u64) -> Result<Vec<Poly>> {
    Ok(enumerate(q, PolySet::SquareFree(2 * g + 1), budget)?.collect())
}

/// Contiguous shard boundaries over `len` items.
fn shard_range(len: usize, shard: usize, shards: usize) -> std::ops::Range<usize> {
    let lo = len * shard / shards;
    let hi = len * (shard + 1) / shards;
    lo..hi
}

fn compute_shard(ds: &[Poly], g: usize, method: LMethod, budget: u64) -> Result<Vec<LPolynomial>> {
    let method = match method {
        LMethod::Auto if g <= 2 => LMethod::Exhaustive,
        LMethod::Auto => LMethod::PrimePowers,
        m => m,
    };
    if method == LMethod::PrimePowers && !ds.is_empty() {
        let ctx = PrimeContext::new(ds[0].q(), g)?;
        return Ok(ds.iter().map(|d| ctx.l_polynomial(d, g)).collect());
    }
    ds.iter().map(|d| compute_l_with(d, method, budget)).collect()
}

/// Every D ∈ H_{2g+1} exactly once, with its L-polynomial, in code order.
/// Shards run on scoped threads; with a cache directory, finished shards are
/// loaded instead of recomputed.
pub fn ensemble_sweep(q: u32, g: usize, opts: &SweepOptions) -> Result<Vec<LPolynomial>> {
    crate::config::validate_modulus(q)?;
    if opts.shards == 0 {
        return Err(Error::InvalidConfig("shards must be at least 1".into()));
    }
    check_budget(format!("H_{}", 2 * g + 1), qpow(q, 2 * g as u32 + 1), opts.budget)?;
    let ds = ensemble(q, g, opts.budget)?;
    let shards = opts.shards;
    let results: Vec<Result<Vec<LPolynomial>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..shards)
            .map(|i| {
                let part = &ds[shard_range(ds.len(), i, shards)];
                let cache_dir = opts.cache_dir.clone();
                s.spawn(move || -> Result<Vec<LPolynomial>> {
                    if let Some(dir) = &cache_dir {
                        let path = cache::shard_path(dir, q, g, i, shards);
                        if let Some(ls) = cache::read_shard(&path, q, g, i, shards)? {
                            if ls.len() == part.len() && ls.iter().zip(part).all(|(l, d)| &l.d == d) {
                                return Ok(ls);
                            }
                            return Err(Error::Cache(format!("{}: shard contents do not match H_{}", path.display(), 2 * g + 1)));
                        }
                        let ls = compute_shard(part, g, opts.method, opts.budget)?;
                        cache::write_shard(&path, q, g, i, shards, &ls)?;
                        Ok(ls)
                    } else {
                        compute_shard(part, g, opts.method, opts.budget)
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard panicked")).collect()
    });
    let mut out = Vec::with_capacity(ds.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub q: u32,
    pub g: usize,
    pub k: u32,
    pub exact_sum: QuadraticAlgebraic,
    pub float_value: f64,
    /// Relative difference between `float_value` and a direct double
    /// precision sum of L(1/2)^k.
    pub float_check: f64,
    pub ensemble_size: u128,
    pub theory_thm1: Option<f64>,
    pub theory_conjecture: Option<f64>,
    pub code_version: String,
    /// Wall time; not serialized, so reports are reproducible byte for byte.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

/// Σ_D L(1/2, χ_D)^k over precomputed L-polynomials, exactly; shards are
/// reduced separately and merged in index order.
pub fn moment_from(ls: &[LPolynomial], k: u32, shards: usize) -> Result<QuadraticAlgebraic> {
    if k % 2 == 1 {
        return Err(Error::InvalidConfig(format!("k = {k} must be even")));
    }
    let q = ls.first().map(|l| l.q()).ok_or_else(|| Error::input("empty ensemble"))?;
    let shards = shards.max(1);
    let parts: Vec<QuadraticAlgebraic> = (0..shards)
        .map(|i| {
            let mut acc = QuadraticAlgebraic::zero(q);
            for l in &ls[shard_range(ls.len(), i, shards)] {
                acc += &value_at_half(l).pow(k);
            }
            acc
        })
        .collect();
    let mut total = QuadraticAlgebraic::zero(q);
    for p in &parts {
        total += p;
    }
    Ok(total)
}

pub fn kth_moment(q: u32, g: usize, k: u32, opts: &SweepOptions) -> Result<MomentReport> {
    if k % 2 == 1 {
        return Err(Error::InvalidConfig(format!("k = {k} must be even")));
    }
    let start = Instant::now();
    let ls = ensemble_sweep(q, g, opts)?;
    let exact = moment_from(&ls, k, opts.shards)?;
    let float_value = exact.to_f64();
    let s = (q as f64).sqrt();
    let direct: f64 = ls
        .iter()
        .map(|l| l.eval(Complex64::new(1.0 / s, 0.0)).re.powi(k as i32))
        .sum();
    Ok(MomentReport {
        q,
        g,
        k,
        exact_sum: exact,
        float_value,
        float_check: (float_value - direct).abs() / float_value.abs().max(1e-300),
        ensemble_size: ls.len() as u128,
        theory_thm1: None,
        theory_conjecture: None,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

impl MomentReport {
    /// Fills the theory columns: q^{2g+1}(a₁₀g¹⁰ + a₉g⁹ + a₈g⁸) from the main-term
    /// coefficients [a₁₀, a₉, a₈], and |H_{2g+1}|·Q(2g+1) from the conjectured
    /// polynomial when given.
    pub fn with_theory(mut self, a: [f64; 3], conj: Option<&ConjectureQ>) -> Self {
        let g = self.g as f64;
        let scale = (self.q as f64).powi(2 * self.g as i32 + 1);
        self.theory_thm1 = Some(scale * (a[0] * g.powi(10) + a[1] * g.powi(9) + a[2] * g.powi(8)));
        self.theory_conjecture = conj.map(|c| self.ensemble_size as f64 * c.eval(2.0 * g + 1.0));
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub g: usize,
    /// Exact moment as a ℚ(√q) pair of fraction strings, and as a float.
    pub exact: QuadraticAlgebraic,
    pub exact_value: f64,
    pub three_term: f64,
    pub conjecture: f64,
    pub ratio_three_term: f64,
    pub ratio_conjecture: f64,
}

/// Exact fourth moments for each g next to the three-term main term and the
/// full conjectured polynomial. Purely descriptive: at small g the lower
/// order terms dominate the three-term truncation.
pub fn theory_comparison(
    q: u32,
    gs: &[usize],
    a: [f64; 3],
    conj: &ConjectureQ,
    opts: &SweepOptions,
) -> Result<Vec<ComparisonRow>> {
    if conj.q != q {
        return Err(Error::input(format!("conjectured polynomial is for q = {}, not {q}", conj.q)));
    }
    gs.iter()
        .map(|&g| {
            let r = kth_moment(q, g, 4, opts)?.with_theory(a, Some(conj));
            let three_term = r.theory_thm1.unwrap_or(f64::NAN);
            let conjecture = r.theory_conjecture.unwrap_or(f64::NAN);
            Ok(ComparisonRow {
                g,
                exact_value: r.float_value,
                ratio_three_term: r.float_value / three_term,
                ratio_conjecture: r.float_value / conjecture,
                exact: r.exact_sum,
                three_term,
                conjecture,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Approximate functional equation

/// d₄ for every monic polynomial of degree ≤ 4g, laid out like
/// [`ResidueCharacter::monic_residues`].
pub struct AfeContext {
    q: u32,
    g: usize,
    d4: Vec<Vec<u32>>,
}

impl AfeContext {
    pub fn new(q: u32, g: usize, budget: u64) -> Result<Self> {
        let top = 4 * g;
        check_budget(format!("M_≤{top}"), 2 * qpow(q, top as u32), budget)?;
        let table = FactorTable::new(q, top.max(1), budget)?;
        let size = 2 * qpow(q, top as u32) as usize;
        // exponent of the smallest prime and the cofactor free of it
        let mut e = vec![0u8; size];
        let mut rest = vec![1u32; size];
        let mut d4 = vec![0u32; size];
        d4[1] = 1;
        for n in 1..=top {
            for c in monic_codes(q, n) {
                let (p, c1) = table.split(c);
                let (ee, r) = if c1 > 1 && table.split(c1 as u64).0 == p {
                    (e[c1 as usize] + 1, rest[c1 as usize])
                } else {
                    (1, c1)
                };
                e[c as usize] = ee;
                rest[c as usize] = r;
                d4[c as usize] = binom3(ee as u32) as u32 * d4[r as usize];
            }
        }
        let layers = (0..=top)
            .map(|n| monic_codes(q, n).map(|c| d4[c as usize]).collect())
            .collect();
        Ok(AfeContext { q, g, d4: layers })
    }

    /// A_n = Σ_{f∈𝓜_n} d₄(f)χ_D(f) for n ≤ 4g.
    pub fn layers(&self, d: &Poly) -> Result<Vec<i64>> {
        let rc = ResidueCharacter::new(d, u64::MAX)?;
        let res = rc.monic_residues(4 * self.g);
        let chi = rc.table();
        Ok(res
            .iter()
            .zip(&self.d4)
            .map(|(r, w)| r.iter().zip(w).map(|(&ri, &wi)| wi as i64 * chi[ri as usize] as i64).sum())
            .collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AfeCheck {
    pub lhs: QuadraticAlgebraic,
    pub rhs: QuadraticAlgebraic,
    pub equal: bool,
    /// Each layer A_n agrees with coefficient n of 𝓛(u,χ_D)⁴.
    pub layers_match_power: bool,
}

fn poly_power(c: &[i64], k: u32) -> Vec<i128> {
    let mut acc: Vec<i128> = vec![1];
    for _ in 0..k {
        let mut next = vec![0i128; acc.len() + c.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in c.iter().enumerate() {
                next[i + j] += a * b as i128;
            }
        }
        acc = next;
    }
    acc
}

/// L(1/2)⁴ = Σ_{f∈𝓜_{≤4g}} d₄(f)χ_D(f)/√|f| + Σ_{f∈𝓜_{≤4g−1}} d₄(f)χ_D(f)/√|f|,
/// exactly in ℚ(√q).
pub fn afe_check_with(ctx: &AfeContext, l: &LPolynomial) -> Result<AfeCheck> {
    if l.q() != ctx.q || l.g != ctx.g {
        return Err(Error::input("AFE context built for another (q, g)"));
    }
    let q = l.q();
    let g = l.g;
    let a = ctx.layers(&l.d)?;
    let mut rhs = QuadraticAlgebraic::zero(q);
    for (n, &an) in a.iter().enumerate() {
        let mult = if n < 4 * g { 2 } else { 1 };
        rhs += &QuadraticAlgebraic::scaled_power(q, &BigInt::from(mult * an), n as u32);
    }
    let lhs = value_at_half(l).pow(4);
    let pw = poly_power(&l.coeffs, 4);
    let layers_match_power = a.iter().enumerate().all(|(n, &an)| pw[n] == an as i128);
    Ok(AfeCheck {
        equal: lhs == rhs,
        lhs,
        rhs,
        layers_match_power,
    })
}

pub fn afe_check(d: &Poly) -> Result<AfeCheck> {
    let g = validate_discriminant(d)?;
    let ctx = AfeContext::new(d.q(), g, crate::config::DEFAULT_BUDGET)?;
    afe_check_with(&ctx, &compute_l_with(d, LMethod::Auto, u64::MAX)?)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AfeSuite {
    pub cases: usize,
    pub failures: Vec<String>,
    pub layer_mismatches: Vec<String>,
}

/// The AFE for every D ∈ H_{2g+1}.
pub fn afe_suite(q: u32, g: usize, budget: u64) -> Result<AfeSuite> {
    let ctx = AfeContext::new(q, g, budget)?;
    let ls = ensemble_sweep(q, g, &SweepOptions { budget, ..Default::default() })?;
    let mut out = AfeSuite::default();
    for l in &ls {
        let c = afe_check_with(&ctx, l)?;
        out.cases += 1;
        if !c.equal {
            out.failures.push(l.d.digits());
        }
        if !c.layers_match_power {
            out.layer_mismatches.push(l.d.digits());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Moments on the circle and distribution diagnostics

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftedMomentPoint {
    pub theta: f64,
    pub k: f64,
    pub value: f64,
    /// 𝓜(u,g) and 𝓥(u,g) for the report.
    pub m: f64,
    pub v: f64,
}

/// Σ_D |𝓛(e^{iθ}/√q, χ_D)|^k.
pub fn shifted_moment(ls: &[LPolynomial], theta: f64, k: f64) -> Result<ShiftedMomentPoint> {
    if !(0.0..std::f64::consts::PI).contains(&theta) {
        return Err(Error::input("theta must lie in [0, π)"));
    }
    let q = ls.first().map(|l| l.q()).ok_or_else(|| Error::input("empty ensemble"))?;
    let g = ls[0].g;
    let u = Complex64::from_polar((q as f64).powf(-0.5), theta);
    let value = ls.iter().map(|l| l.eval(u).norm().powf(k)).sum();
    let (m, v) = mv_values(theta, g as f64);
    Ok(ShiftedMomentPoint { theta, k, value, m, v })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionStats {
    pub theta: f64,
    pub mean: f64,
    pub variance: f64,
    pub m: f64,
    pub v: f64,
    /// (bin lower edge, count)
    pub histogram: Vec<(f64, usize)>,
    pub bin_width: f64,
    /// D with 𝓛(e^{iθ}/√q) = 0, left out of the statistics.
    pub excluded: Vec<String>,
}

/// Empirical distribution of log|𝓛(e^{iθ}/√q, χ_D)| over the ensemble.
pub fn distribution_stats(ls: &[LPolynomial], theta: f64, bins: usize) -> Result<DistributionStats> {
    let q = ls.first().map(|l| l.q()).ok_or_else(|| Error::input("empty ensemble"))?;
    let g = ls[0].g;
    let u = Complex64::from_polar((q as f64).powf(-0.5), theta);
    let mut vals = Vec::with_capacity(ls.len());
    let mut excluded = Vec::new();
    for l in ls {
        let exact_zero = theta == 0.0 && value_at_half(l).is_zero();
        let v = l.eval(u).norm();
        if exact_zero || v < 1e-12 {
            excluded.push(l.d.digits());
        } else {
            vals.push(v.ln());
        }
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let variance = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bins = bins.max(1);
    let width = ((hi - lo) / bins as f64).max(1e-12);
    let mut counts = vec![0usize; bins];
    for x in &vals {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let (m, v) = mv_values(theta, g as f64);
    Ok(DistributionStats {
        theta,
        mean,
        variance,
        m,
        v,
        histogram: counts.into_iter().enumerate().map(|(i, c)| (lo + i as f64 * width, c)).collect(),
        bin_width: width,
        excluded,
    })
}

// ---------------------------------------------------------------------------
// Diagonal main term

/// M = q^{2g+1}(1−1/q) Σ_{f=l², d(f)≤4g} d₄(f)φ(f)/|f|^{3/2} · Σ_{C|f^∞, d(C)≤y} |C|^{−2}.
pub fn main_term_direct(q: u32, g: usize, y: usize) -> Result<f64> {
    if y > g {
        return Err(Error::input(format!("y = {y} exceeds g = {g}")));
    }
    let table = shared_table(q, 2 * g)?;
    let qf = q as f64;
    let mut total = 0.0f64;
    for n in 0..=2 * g {
        for c in monic_codes(q, n) {
            let fac = table.factor_code(c);
            let d4: u64 = fac.iter().map(|&(_, e)| binom3(2 * e)).product();
            // φ(l²)/|l²|^{3/2} = ∏(1 − 1/|P|) / |l|
            let mut phi_ratio = 1.0;
            for &(p, _) in &fac {
                let dp = Poly::from_code(q, p as u64).deg().unwrap();
                phi_ratio *= 1.0 - qf.powi(-(dp as i32));
            }
            let l = Poly::from_code(q, c);
            let csum: f64 = divisors_of_power(&l, y)?
                .iter()
                .map(|cc| qf.powi(-2 * cc.deg().unwrap() as i32))
                .sum();
            total += d4 as f64 * phi_ratio * qf.powi(-(n as i32)) * csum;
        }
    }
    Ok(qf.powi(2 * g as i32 + 1) * (1.0 - 1.0 / qf) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::chi;
    use crate::ffpoly::arithmetic_functions;
    use num_rational::BigRational;

    #[test]
    fn ensemble_sizes() {
        let o = SweepOptions::default();
        assert_eq!(ensemble_sweep(5, 1, &o).unwrap().len(), 100);
        assert_eq!(ensemble_sweep(5, 2, &o).unwrap().len(), 2500);
        assert_eq!(ensemble_size(13, 1), 2028);
    }

    #[test]
    fn sharding_and_cache_resume() {
        let dir = std::env::temp_dir().join(format!("ffmoment-sweep-{}", std::process::id()));
        let plain = ensemble_sweep(5, 2, &SweepOptions::default()).unwrap();
        let o = SweepOptions {
            shards: 3,
            cache_dir: Some(dir.clone()),
            ..Default::default()
        };
        assert_eq!(ensemble_sweep(5, 2, &o).unwrap(), plain);
        // simulate an interrupted run: drop one shard file, resume
        std::fs::remove_file(cache::shard_path(&dir, 5, 2, 1, 3)).unwrap();
        assert_eq!(ensemble_sweep(5, 2, &o).unwrap(), plain);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn moment_examples() {
        let o = SweepOptions::default();
        let m0 = kth_moment(5, 1, 0, &o).unwrap();
        assert_eq!(m0.exact_sum, QuadraticAlgebraic::from_integer(5, 100));
        assert!(kth_moment(5, 1, 3, &o).is_err());
        let m2 = kth_moment(5, 1, 2, &o).unwrap();
        let m4 = kth_moment(5, 1, 4, &o).unwrap();
        assert!(m4.float_check < 1e-12);
        assert!(m2.float_value.powi(2) <= m0.float_value * m4.float_value);
        assert!(m4.float_value > 0.0);
    }

    #[test]
    fn fourth_moment_fixture_q5_g1() {
        // oracle: 100-term sum with L(1/2) assembled straight from the
        // definition χ_D(f) = (D/f) over f of degree ≤ 2
        let q = 5;
        let mut oracle = QuadraticAlgebraic::zero(q);
        for d in ensemble(q, 1, u64::MAX).unwrap() {
            let mut v = QuadraticAlgebraic::zero(q);
            for n in 0..=2usize {
                let c: i64 = enumerate(q, PolySet::Monic(n), u64::MAX)
                    .unwrap()
                    .map(|f| chi(&d, &f).unwrap() as i64)
                    .sum();
                v += &QuadraticAlgebraic::scaled_power(q, &BigInt::from(c), n as u32);
            }
            oracle += &v.pow(4);
        }
        let m4 = kth_moment(q, 1, 4, &SweepOptions::default()).unwrap();
        assert_eq!(m4.exact_sum, oracle);
        // frozen
        let frozen = QuadraticAlgebraic::new(
            5,
            "20456/5".parse::<BigRational>().unwrap(),
            "0".parse::<BigRational>().unwrap(),
        );
        assert_eq!(m4.exact_sum, frozen, "got {}", m4.exact_sum);
    }

    #[test]
    fn moment_shard_additivity() {
        let ls = ensemble_sweep(5, 2, &SweepOptions::default()).unwrap();
        let one = moment_from(&ls, 4, 1).unwrap();
        for shards in [2, 3, 7] {
            assert_eq!(moment_from(&ls, 4, shards).unwrap(), one);
        }
        // arbitrary partition
        let (a, b) = ls.split_at(999);
        assert_eq!(&moment_from(a, 4, 1).unwrap() + &moment_from(b, 4, 1).unwrap(), one);
    }

    #[test]
    fn afe_all_h3() {
        let s = afe_suite(5, 1, u64::MAX).unwrap();
        assert_eq!(s.cases, 100);
        assert!(s.failures.is_empty() && s.layer_mismatches.is_empty());
    }

    #[test]
    fn afe_layers_against_direct_d4() {
        // oracle for the layers: d₄ and χ_D from their definitions
        let q = 5;
        let d = Poly::from_i64(q, &[1, 1, 0, 1]);
        let ctx = AfeContext::new(q, 1, u64::MAX).unwrap();
        let layers = ctx.layers(&d).unwrap();
        for (n, &an) in layers.iter().enumerate() {
            let direct: i64 = enumerate(q, PolySet::Monic(n), u64::MAX)
                .unwrap()
                .map(|f| arithmetic_functions(&f).unwrap().d4 as i64 * chi(&d, &f).unwrap() as i64)
                .sum();
            assert_eq!(an, direct, "n = {n}");
        }
        let c = afe_check(&d).unwrap();
        assert!(c.equal);
        let zs = crate::lfun::zeros(&compute_l_with(&d, LMethod::Auto, u64::MAX).unwrap()).unwrap();
        let from_zeros: f64 = zs
            .alphas()
            .iter()
            .map(|a| Complex64::new(1.0, 0.0) - a)
            .product::<Complex64>()
            .re
            .powi(4);
        assert!((from_zeros - c.lhs.to_f64()).abs() <= 1e-8 * c.lhs.to_f64().abs().max(1.0));
    }

    #[test]
    fn shifted_moments() {
        let o = SweepOptions::default();
        for g in [1usize, 2] {
            let ls = ensemble_sweep(5, g, &o).unwrap();
            let m4 = moment_from(&ls, 4, 1).unwrap().to_f64();
            let at0 = shifted_moment(&ls, 0.0, 4.0).unwrap();
            assert!((at0.value - m4).abs() <= 1e-10 * m4);
            let half = shifted_moment(&ls, std::f64::consts::FRAC_PI_2, 4.0).unwrap();
            assert!(half.value <= at0.value);
            assert_eq!(shifted_moment(&ls, 0.7, 0.0).unwrap().value, ls.len() as f64);
        }
    }

    #[test]
    fn distribution_consistency() {
        let ls = ensemble_sweep(5, 2, &SweepOptions::default()).unwrap();
        let st = distribution_stats(&ls, 0.3, 20).unwrap();
        assert_eq!(st.histogram.iter().map(|h| h.1).sum::<usize>() + st.excluded.len(), ls.len());
        // ∫e^{kV}dN reproduces the k-th moment
        let u = Complex64::from_polar(5f64.powf(-0.5), 0.3);
        let via_logs: f64 = ls
            .iter()
            .map(|l| l.eval(u).norm())
            .filter(|v| *v >= 1e-12)
            .map(|v| (4.0 * v.ln()).exp())
            .sum();
        let m = shifted_moment(&ls, 0.3, 4.0).unwrap().value;
        assert!((via_logs - m).abs() <= 1e-6 * m);
    }

    #[test]
    fn main_term_monotone_in_y() {
        let g = 2;
        let mut prev = 0.0;
        for y in 0..=g {
            let v = main_term_direct(5, g, y).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(main_term_direct(5, 1, 2).is_err());
    }

    #[test]
    fn main_term_g1_by_hand() {
        // y = 0: Σ_{d(l)≤2} d₄(l²)φ(l²)/|l|³, enumerated with the generic
        // arithmetic-function code
        let q = 5u32;
        let mut s = 0.0;
        for l in enumerate(q, PolySet::MonicUpTo(2), u64::MAX).unwrap() {
            let f = &l * &l;
            let af = arithmetic_functions(&f).unwrap();
            s += af.d4 as f64 * af.euler_phi as f64 / (f.norm() as f64).powf(1.5);
        }
        let want = 125.0 * 0.8 * s;
        assert!((main_term_direct(q, 1, 0).unwrap() - want).abs() < 1e-9 * want);
    }
}
