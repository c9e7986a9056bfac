//! The L-polynomial 𝓛(u, χ_D) of a quadratic character, its value at the
//! critical point, its zeros, and the identities tying zeros to primes.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::characters::{jacobi_unchecked, ResidueCharacter};
use crate::config::{check_budget, qpow};
use crate::error::{Error, Result};
use crate::ffpoly::{shared_table, Poly};
use crate::quad::QuadraticAlgebraic;

/// Coefficients c₀ … c_{2g} of 𝓛(u, χ_D) = Σ_{f monic} χ_D(f) u^{d(f)}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub d: Poly,
    pub g: usize,
    pub coeffs: Vec<i64>,
}

/// How the coefficients are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LMethod {
    /// c_n = Σ_{f∈𝓜_n} χ_D(f) for every n ≤ 2g.
    Exhaustive,
    /// c_1 … c_g from prime-power sums over primes of degree ≤ g (Newton's
    /// identities), the rest from c_{2g−n} = q^{g−n} c_n.
    PrimePowers,
    /// Exhaustive for g ≤ 2, prime powers beyond.
    Auto,
}

/// Returns g for a valid D (monic, square-free, odd degree 2g+1).
pub fn validate_discriminant(d: &Poly) -> Result<usize> {
    let n = d.deg().ok_or_else(|| Error::input("D = 0"))?;
    if !d.is_monic() {
        return Err(Error::input(format!("D = {d} is not monic")));
    }
    if n % 2 == 0 {
        return Err(Error::input(format!("D = {d} has even degree {n}")));
    }
    if !d.is_squarefree() {
        return Err(Error::input(format!("D = {d} is not square-free")));
    }
    Ok((n - 1) / 2)
}

impl LPolynomial {
    pub fn from_coeffs(d: Poly, coeffs: Vec<i64>) -> Result<Self> {
        let g = validate_discriminant(&d)?;
        if coeffs.len() != 2 * g + 1 {
            return Err(Error::input(format!(
                "expected {} coefficients, got {}",
                2 * g + 1,
                coeffs.len()
            )));
        }
        Ok(LPolynomial { d, g, coeffs })
    }

    pub fn q(&self) -> u32 {
        self.d.q()
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * u + c as f64)
    }

    /// c_{2g−n} = q^{g−n} c_n for all n.
    pub fn has_symmetry(&self) -> bool {
        let q = self.q() as i128;
        let g = self.g;
        (0..=g).all(|n| self.coeffs[2 * g - n] as i128 == q.pow((g - n) as u32) * self.coeffs[n] as i128)
    }
}

/// 𝓛(u, χ_D), exhaustively, with the degree-(2g+1) sum checked to vanish.
pub fn compute_l(d: &Poly) -> Result<LPolynomial> {
    compute_l_with(d, LMethod::Exhaustive, crate::config::DEFAULT_BUDGET)
}

pub fn compute_l_with(d: &Poly, method: LMethod, budget: u64) -> Result<LPolynomial> {
    let g = validate_discriminant(d)?;
    let method = match method {
        LMethod::Auto if g <= 2 => LMethod::Exhaustive,
        LMethod::Auto => LMethod::PrimePowers,
        m => m,
    };
    match method {
        LMethod::Exhaustive => {
            check_budget(format!("M_≤{}", 2 * g + 1), 2 * qpow(d.q(), 2 * g as u32 + 1), budget)?;
            // χ_D(f) = (D/f) = (f/D) for monic f by reciprocity, so the
            // coefficients are character sums modulo D.
            let rc = ResidueCharacter::new(d, budget)?;
            let sums = rc.char_sums_up_to(2 * g + 1);
            if sums[2 * g + 1] != 0 {
                return Err(Error::Numerical(format!(
                    "degree-{} character sum of {d} is {} (should vanish)",
                    2 * g + 1,
                    sums[2 * g + 1]
                )));
            }
            Ok(LPolynomial {
                d: d.clone(),
                g,
                coeffs: sums[..=2 * g].to_vec(),
            })
        }
        _ => {
            let ctx = PrimeContext::new(d.q(), g)?;
            Ok(ctx.l_polynomial(d, g))
        }
    }
}

/// Quadratic-residue tables for every monic prime of degree ≤ max_deg,
/// reused across many D.
pub struct PrimeContext {
    q: u32,
    primes: Vec<(Poly, usize, Vec<i8>)>,
}

impl PrimeContext {
    pub fn new(q: u32, max_deg: usize) -> Result<Self> {
        let table = shared_table(q, max_deg)?;
        let mut primes = Vec::new();
        for d in 1..=max_deg {
            for c in table.primes_of_degree(d) {
                let p = Poly::from_code(q, c as u64);
                let size = p.norm() as usize;
                let mut qr = vec![-1i8; size];
                qr[0] = 0;
                for s in 1..size as u64 {
                    let sp = Poly::from_code(q, s);
                    qr[(&sp * &sp).rem(&p)?.code() as usize] = 1;
                }
                primes.push((p, d, qr));
            }
        }
        Ok(PrimeContext { q, primes })
    }

    /// χ_D(P) for each prime, paired with its degree.
    pub fn chi_primes<'a>(&'a self, d: &'a Poly) -> impl Iterator<Item = (usize, i8)> + 'a {
        self.primes
            .iter()
            .map(move |(p, deg, qr)| (*deg, qr[d.rem(p).unwrap().code() as usize]))
    }

    /// p_n = Σ_{d(f)=n} χ_D(f)Λ(f) for n = 0 … n_max (p₀ = 0).
    pub fn prime_power_sums(&self, d: &Poly, n_max: usize) -> Vec<i64> {
        let mut p = vec![0i64; n_max + 1];
        for (deg, chi) in self.chi_primes(d) {
            if deg > n_max {
                continue;
            }
            let mut k = 1;
            while k * deg <= n_max {
                let v = if k % 2 == 0 { (chi * chi) as i64 } else { chi as i64 };
                p[k * deg] += deg as i64 * v;
                k += 1;
            }
        }
        p
    }

    pub fn l_polynomial(&self, d: &Poly, g: usize) -> LPolynomial {
        let p = self.prime_power_sums(d, g);
        let mut c = vec![0i64; 2 * g + 1];
        c[0] = 1;
        for n in 1..=g {
            let s: i64 = (1..=n).map(|k| p[k] * c[n - k]).sum();
            debug_assert_eq!(s % n as i64, 0);
            c[n] = s / n as i64;
        }
        let q = self.q as i64;
        for n in 0..g {
            c[2 * g - n] = q.pow((g - n) as u32) * c[n];
        }
        LPolynomial {
            d: d.clone(),
            g,
            coeffs: c,
        }
    }
}

/// p_n = Σ_{d(f)=n} χ_D(f)Λ(f), n ≤ n_max, directly from the definition.
pub fn prime_power_sums(d: &Poly, n_max: usize) -> Result<Vec<i64>> {
    let table = shared_table(d.q(), n_max)?;
    let mut p = vec![0i64; n_max + 1];
    for &c in table.prime_codes() {
        let pp = Poly::from_code(d.q(), c as u64);
        let deg = pp.deg().unwrap();
        if deg > n_max {
            continue;
        }
        let chi = jacobi_unchecked(d, &pp) as i64;
        let mut k = 1;
        while k * deg <= n_max {
            p[k * deg] += deg as i64 * chi.pow(k as u32);
            k += 1;
        }
    }
    Ok(p)
}

/// Σ_{f∈𝓜_m} χ_D(f) for m = 2g+1 … 2g+extra; all should vanish.
pub fn truncation_sums(d: &Poly, extra: usize, budget: u64) -> Result<Vec<i64>> {
    let g = validate_discriminant(d)?;
    let rc = ResidueCharacter::new(d, budget)?;
    let top = 2 * g + extra;
    check_budget(format!("M_{top}"), 2 * qpow(d.q(), top as u32), budget)?;
    let all = rc.char_sums_up_to(top);
    Ok(all[2 * g + 1..].to_vec())
}

/// L(1/2, χ_D) = 𝓛(q^{−1/2}) exactly in ℚ(√q).
pub fn value_at_half(l: &LPolynomial) -> QuadraticAlgebraic {
    let q = l.q();
    let mut v = QuadraticAlgebraic::zero(q);
    for (n, &c) in l.coeffs.iter().enumerate() {
        v += &QuadraticAlgebraic::scaled_power(q, &BigInt::from(c), n as u32);
    }
    v
}

// ---------------------------------------------------------------------------
// Zeros

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroSet {
    /// θ_j ∈ [0,1), α_j = e^{2πiθ_j}, sorted, with multiplicity.
    pub thetas: Vec<f64>,
    /// max |𝓛(u_j)| over computed roots u_j.
    pub residual: f64,
    /// max_j | |α_j| − 1 |.
    pub modulus_deviation: f64,
}

impl ZeroSet {
    pub fn alphas(&self) -> Vec<Complex64> {
        self.thetas
            .iter()
            .map(|t| Complex64::from_polar(1.0, 2.0 * PI * t))
            .collect()
    }
}

type RatPoly = Vec<BigRational>;

fn rp_trim(mut a: RatPoly) -> RatPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn rp_divrem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let b = rp_trim(b.clone());
    let mut r = rp_trim(a.clone());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut quo = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= &c * bi;
        }
        quo[k] = c;
        r.pop();
        r = rp_trim(r);
    }
    (quo, r)
}

fn rp_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let (mut a, mut b) = (rp_trim(a.clone()), rp_trim(b.clone()));
    while !b.is_empty() {
        let (_, r) = rp_divrem(&a, &b);
        a = b;
        b = r;
    }
    let lead = a.last().cloned().unwrap_or_else(BigRational::one);
    a.iter().map(|c| c / &lead).collect()
}

fn rp_deriv(a: &RatPoly) -> RatPoly {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(i.into()))
        .collect()
}

/// Yun's square-free decomposition: factors[k] has roots of multiplicity k+1.
fn squarefree_decomposition(f: &RatPoly) -> Vec<RatPoly> {
    let f = rp_trim(f.clone());
    let mut out = Vec::new();
    let fp = rp_deriv(&f);
    let mut a = rp_gcd(&f, &fp);
    let mut b = rp_divrem(&f, &a).0;
    let mut c = rp_divrem(&fp, &a).0;
    let mut d: RatPoly = {
        let bp = rp_deriv(&b);
        let n = c.len().max(bp.len());
        (0..n)
            .map(|i| {
                c.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - bp.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect()
    };
    loop {
        let bt = rp_trim(b.clone());
        if bt.len() <= 1 {
            break;
        }
        a = rp_gcd(&b, &d);
        out.push(a.clone());
        b = rp_divrem(&b, &a).0;
        c = rp_divrem(&d, &a).0;
        let bp = rp_deriv(&b);
        let n = c.len().max(bp.len());
        d = (0..n)
            .map(|i| {
                c.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - bp.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect();
    }
    out
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of a polynomial with simple roots (Aberth–Ehrlich iteration,
/// polished by Newton steps).
pub fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = c[n].norm();
    let radius = 1.0 + c[..n].iter().map(|a| a.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius.min(1.5), 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * sum);
            z[i] -= w;
            max_step = max_step.max(w.norm());
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    if !converged {
        let worst = z.iter().map(|&zi| horner(&c, zi).0.norm()).fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(Error::Numerical(format!(
                "root finder did not converge (residual {worst:e})"
            )));
        }
    }
    Ok(z)
}

fn normalize_theta(t: f64) -> f64 {
    let mut t = t.rem_euclid(1.0);
    if (1.0 - t).abs() < 1e-12 {
        t = 0.0;
    }
    t
}

/// Zeros of 𝓛: repeated factors are split off exactly (over ℚ) before the
/// numerical root finder runs, so multiple zeros keep full accuracy.
pub fn zeros(l: &LPolynomial) -> Result<ZeroSet> {
    let q = l.q();
    let rat: RatPoly = l
        .coeffs
        .iter()
        .map(|&c| BigRational::from_integer(c.into()))
        .collect();
    let s = (q as f64).sqrt();
    let mut thetas = Vec::with_capacity(2 * l.g);
    let mut residual = 0.0f64;
    let mut dev = 0.0f64;
    for (k, factor) in squarefree_decomposition(&rat).iter().enumerate() {
        if factor.len() <= 1 {
            continue;
        }
        // work in z = u√q
        let zc: Vec<f64> = factor
            .iter()
            .enumerate()
            .map(|(n, c)| crate::quad::rat_to_f64(c) / s.powi(n as i32))
            .collect();
        for z in aberth(&zc)? {
            let u = z / s;
            residual = residual.max(l.eval(u).norm());
            let alpha = 1.0 / z;
            dev = dev.max((alpha.norm() - 1.0).abs());
            let t = normalize_theta(alpha.arg() / (2.0 * PI));
            for _ in 0..=k {
                thetas.push(t);
            }
        }
    }
    if thetas.len() != 2 * l.g {
        return Err(Error::Numerical(format!(
            "found {} zeros, expected {}",
            thetas.len(),
            2 * l.g
        )));
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ZeroSet {
        thetas,
        residual,
        modulus_deviation: dev,
    })
}

/// Coefficients of ∏_j (1 − u√q α_j), to compare against 𝓛.
pub fn reconstruct_from_zeros(z: &ZeroSet, q: u32) -> Vec<f64> {
    let s = (q as f64).sqrt();
    let mut c = vec![Complex64::one()];
    for a in z.alphas() {
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * a * s;
        }
        c = next;
    }
    c.iter().map(|x| x.re).collect()
}

// ---------------------------------------------------------------------------
// Functional equations

/// Raw polynomial functional equation 𝓛(u) = (qu²)^g 𝓛(1/(qu)); returns
/// |difference| / max(|𝓛(u)|, 1).
pub fn polynomial_fe_error(l: &LPolynomial, u: Complex64) -> f64 {
    let q = l.q() as f64;
    let lhs = l.eval(u);
    let rhs = (q * u * u).powi(l.g as i32) * l.eval(1.0 / (q * u));
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub error: f64,
    /// Error with X_D(s)^{−1/2} continued analytically as q^{g(s−1/2)}.
    pub analytic_error: f64,
    /// The principal-branch values satisfy Λ(s) = −Λ(1−s) instead.
    pub branch_flip: bool,
    /// The principal square root agrees with the analytic continuation at s.
    /// Since Log X(1−s) = −Log X(s) off the cut, both sides change sheet
    /// together and the check itself is insensitive to the choice.
    pub principal_is_analytic: bool,
}

/// L(s, χ_D) = 𝓛(q^{−s}).
pub fn l_at(l: &LPolynomial, s: Complex64) -> Complex64 {
    let lnq = (l.q() as f64).ln();
    l.eval((-s * lnq).exp())
}

/// Λ(s) = L(s)·X_D(s)^{−1/2}, X_D(s) = |D|^{1/2−s} q^{s−1/2}, principal
/// square root; compares Λ(s) with Λ(1−s).
pub fn completed_fe_check(l: &LPolynomial, s: Complex64) -> FeCheck {
    let q = l.q() as f64;
    let lnq = q.ln();
    let deg_d = (2 * l.g + 1) as f64;
    let lambda_principal = |s: Complex64| {
        let log_x = (0.5 - s) * deg_d * lnq + (s - 0.5) * lnq;
        let x = log_x.exp();
        l_at(l, s) * (-0.5 * x.ln()).exp()
    };
    let lambda_analytic = |s: Complex64| l_at(l, s) * ((s - 0.5) * l.g as f64 * lnq).exp();
    let one = Complex64::one();
    let (lhs, rhs) = (lambda_principal(s), lambda_principal(one - s));
    let scale = lhs.norm().max(1.0);
    let error = (lhs - rhs).norm() / scale;
    let flipped = (lhs + rhs).norm() / scale;
    let (la, ra) = (lambda_analytic(s), lambda_analytic(one - s));
    FeCheck {
        lhs,
        rhs,
        error,
        analytic_error: (la - ra).norm() / la.norm().max(1.0),
        branch_flip: flipped < error,
        principal_is_analytic: (lhs - la).norm() <= 1e-8 * scale,
    }
}

// ---------------------------------------------------------------------------
// Explicit formula and the log-modulus identity

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplicitCheck {
    pub zero_side: f64,
    pub prime_side: f64,
    pub error: f64,
}

/// h(θ) = Σ_{|k|≤N} ĥ(k) e(kθ) with `hhat` listing ĥ(−N) … ĥ(N).
pub fn explicit_formula_check(l: &LPolynomial, hhat: &[f64]) -> Result<ExplicitCheck> {
    if hhat.len() % 2 == 0 {
        return Err(Error::input("hhat must list ĥ(−N) … ĥ(N)"));
    }
    let n = hhat.len() / 2;
    for k in 1..=n {
        if (hhat[n + k] - hhat[n - k]).abs() > 1e-15 * (1.0 + hhat[n + k].abs()) {
            return Err(Error::input(format!("hhat is not even at k = {k}")));
        }
    }
    let z = zeros(l)?;
    let zero_side: f64 = z
        .thetas
        .iter()
        .map(|t| {
            hhat[n]
                + 2.0
                    * (1..=n)
                        .map(|k| hhat[n + k] * (2.0 * PI * k as f64 * t).cos())
                        .sum::<f64>()
        })
        .sum();
    let p = prime_power_sums(&l.d, n)?;
    let q = l.q() as f64;
    let prime_side = 2.0 * l.g as f64 * hhat[n]
        - 2.0
            * (1..=n)
                .map(|k| hhat[n + k] * p[k] as f64 / q.powf(k as f64 / 2.0))
                .sum::<f64>();
    Ok(ExplicitCheck {
        zero_side,
        prime_side,
        error: (zero_side - prime_side).abs(),
    })
}

/// a = (q² − 1)/(2q): the constant at α = 5/2.
pub fn log_modulus_a(q: u32) -> f64 {
    let q = q as f64;
    (q * q - 1.0) / (2.0 * q)
}

/// b(α) = (q^{α−1/2} − 1)/(2q^{α/2−1/4}), from |1 − re^{iφ}|² =
/// (1 − r)² + 4r sin²(φ/2) with r = q^{1/2−α}. Vanishes at α = 1/2.
pub fn log_modulus_b(q: u32, alpha: f64) -> f64 {
    let q = q as f64;
    (q.powf(alpha - 0.5) - 1.0) / (2.0 * q.powf(alpha / 2.0 - 0.25))
}

/// The variant without the −1 in the numerator; kept for comparison — it
/// does not satisfy the identity.
pub fn log_modulus_b_without_shift(q: u32, alpha: f64) -> f64 {
    let q = q as f64;
    q.powf(alpha - 0.5) / (2.0 * q.powf(alpha / 2.0 - 0.25))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogModulusCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
    /// L(α+it) vanishes (lhs = −∞); nothing is asserted.
    pub singular: bool,
}

/// log|L(α+it)| against g(5/2−α)log q + log|L(5/2+it)| +
/// ½Σ_j log[(b² + sin²(πθ_j − t log q/2))/(a² + sin²(πθ_j − t log q/2))].
pub fn log_modulus_identity(l: &LPolynomial, alpha: f64, t: f64) -> Result<LogModulusCheck> {
    log_modulus_identity_with(l, alpha, t, log_modulus_b(l.q(), alpha))
}

pub fn log_modulus_identity_with(l: &LPolynomial, alpha: f64, t: f64, b: f64) -> Result<LogModulusCheck> {
    if !(0.5..=1.0).contains(&alpha) {
        return Err(Error::input("alpha must lie in [1/2, 1]"));
    }
    let q = l.q();
    let lnq = (q as f64).ln();
    let val = l_at(l, Complex64::new(alpha, t));
    let exact_zero = alpha == 0.5 && t == 0.0 && value_at_half(l).is_zero();
    let scale: f64 = l
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| (c as f64).abs() * (q as f64).powf(-alpha * n as f64))
        .sum();
    if exact_zero || val.norm() <= 1e-13 * scale {
        return Ok(LogModulusCheck {
            lhs: f64::NEG_INFINITY,
            rhs: f64::NAN,
            error: f64::NAN,
            singular: true,
        });
    }
    let lhs = val.norm().ln();
    let a = log_modulus_a(q);
    let z = zeros(l)?;
    let sum: f64 = z
        .thetas
        .iter()
        .map(|th| {
            let s2 = (PI * th - t * lnq / 2.0).sin().powi(2);
            ((b * b + s2) / (a * a + s2)).ln()
        })
        .sum();
    let rhs = l.g as f64 * (2.5 - alpha) * lnq + l_at(l, Complex64::new(2.5, t)).norm().ln() + 0.5 * sum;
    Ok(LogModulusCheck {
        lhs,
        rhs,
        error: (lhs - rhs).abs(),
        singular: false,
    })
}
