//! Euler products over the monic irreducibles of 𝔽_q[x] at high precision,
//! their first and second derivatives, and the prime sums built from the
//! same local factors.
//!
//! Every product is accumulated as Σ_d π_q(d)·log f_d, one block per degree d
//! (all primes of one degree share the factor f_d evaluated at |P| = q^d),
//! and exponentiated once. Raising a factor to π_q(d) ≈ q^d/d multiplies its
//! rounding error by the same amount, so the working precision carries
//! ⌈N·log₂q⌉ guard bits on top of the requested precision.
//!
//! Truncation error: block d of the log-sum is modelled as C·d^j·q^{−d}
//! (every factor here is 1 + O(|P|^{−2}), and a derivative of order j brings
//! down j powers of d). C is the largest observed value of
//! block·q^d/d^j over the computed degrees, and the tail bound is
//! 2·C·Σ_{d>N} d^j q^{−d}, pushed through the final exponential.

use rug::Float;
use serde::Serialize;

use crate::config::validate_modulus;
use crate::error::{Error, Result};
use crate::jet::Jet2;

mod coefficients;
mod conjecture;

pub use coefficients::{
    coefficients, qr_polynomials, theorem_coefficients_from_qr, CPartials, CoefficientSet, IdentityCheck,
    QrPolynomials,
};
pub use conjecture::{conjecture_q, conjecture_q_converged, ConjectureQ};

fn mobius(mut n: u32) -> i32 {
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

/// π_q(n): number of monic irreducibles of degree n, by Möbius inversion.
/// Panics if q^n does not fit in an i128.
pub fn irreducible_count(q: u32, n: u32) -> u128 {
    let mut s: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            let qd = (q as i128).checked_pow(d).expect("q^n overflows i128");
            s += mobius(n / d) as i128 * qd;
        }
    }
    (s / n as i128) as u128
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EulerConfig {
    pub q: u32,
    /// Largest prime degree N included in every truncated product.
    pub cutoff: u32,
    /// Bits of the reported values.
    pub prec: u32,
}

impl EulerConfig {
    pub fn new(q: u32, cutoff: u32, prec: u32) -> Result<Self> {
        validate_modulus(q)?;
        if cutoff == 0 {
            return Err(Error::InvalidConfig("cutoff degree must be at least 1".into()));
        }
        if (q as i128).checked_pow(cutoff + 1).map_or(true, |v| v > (1i128 << 120)) {
            return Err(Error::InvalidConfig(format!("cutoff {cutoff} too large for q = {q}")));
        }
        if prec < 64 {
            return Err(Error::InvalidConfig("precision must be at least 64 bits".into()));
        }
        Ok(EulerConfig { q, cutoff, prec })
    }

    pub fn work_prec(&self) -> u32 {
        self.prec + (self.cutoff as f64 * (self.q as f64).log2()).ceil() as u32 + 32
    }

    pub fn with_cutoff(&self, cutoff: u32) -> Result<Self> {
        Self::new(self.q, cutoff, self.prec)
    }

    pub fn with_prec(&self, prec: u32) -> Result<Self> {
        Self::new(self.q, self.cutoff, prec)
    }

    /// q as a working-precision float.
    pub fn qf(&self) -> Float {
        Float::with_val(self.work_prec(), self.q)
    }

    /// 1/q^k at working precision.
    pub fn q_inv_pow(&self, k: u32) -> Float {
        let wp = self.work_prec();
        Float::with_val(wp, 1u32 / Float::with_val(wp, Float::u_pow_u(self.q, k)))
    }

    /// ζ_q(2) = q/(q − 1).
    pub fn zeta2(&self) -> Float {
        let wp = self.work_prec();
        Float::with_val(wp, self.q) / (self.q - 1)
    }
}

/// A real value together with a bound on the error from truncating the
/// product or sum it came from.
#[derive(Clone, Debug)]
pub struct Tracked {
    pub value: Float,
    pub tail_bound: f64,
}

impl Tracked {
    pub fn exact(value: Float) -> Self {
        Tracked { value, tail_bound: 0.0 }
    }
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
    pub fn rel_tail(&self) -> f64 {
        self.tail_bound / self.to_f64().abs()
    }
    pub fn scale(&self, k: &Float) -> Tracked {
        Tracked {
            value: Float::with_val(self.value.prec(), &self.value * k),
            tail_bound: self.tail_bound * k.to_f64().abs(),
        }
    }
    pub fn scale_f(&self, k: f64) -> Tracked {
        self.scale(&Float::with_val(self.value.prec(), k))
    }
    pub fn div(&self, k: &Float) -> Tracked {
        Tracked {
            value: Float::with_val(self.value.prec(), &self.value / k),
            tail_bound: self.tail_bound / k.to_f64().abs(),
        }
    }
}

impl std::ops::Add for &Tracked {
    type Output = Tracked;
    fn add(self, o: &Tracked) -> Tracked {
        Tracked {
            value: Float::with_val(self.value.prec(), &self.value + &o.value),
            tail_bound: self.tail_bound + o.tail_bound,
        }
    }
}

impl std::ops::Sub for &Tracked {
    type Output = Tracked;
    fn sub(self, o: &Tracked) -> Tracked {
        Tracked {
            value: Float::with_val(self.value.prec(), &self.value - &o.value),
            tail_bound: self.tail_bound + o.tail_bound,
        }
    }
}

impl std::ops::Mul for &Tracked {
    type Output = Tracked;
    fn mul(self, o: &Tracked) -> Tracked {
        Tracked {
            value: Float::with_val(self.value.prec(), &self.value * &o.value),
            tail_bound: self.to_f64().abs() * o.tail_bound
                + o.to_f64().abs() * self.tail_bound
                + self.tail_bound * o.tail_bound,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProductValue {
    pub value: Float,
    pub tail_bound: f64,
    pub cutoff: u32,
}

impl ProductValue {
    pub fn tracked(&self) -> Tracked {
        Tracked {
            value: self.value.clone(),
            tail_bound: self.tail_bound,
        }
    }
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// A truncated product carried as a jet: value and partials up to order 2.
#[derive(Clone, Debug)]
pub struct JetProduct {
    pub jet: Jet2,
    /// Tail bounds on the six jet coefficients.
    pub tails: [f64; 6],
    pub cutoff: u32,
}

impl JetProduct {
    fn tr(&self, v: Float, t: f64) -> Tracked {
        Tracked { value: v, tail_bound: t }
    }
    pub fn value(&self) -> Tracked {
        self.tr(self.jet.value().clone(), self.tails[0])
    }
    pub fn dx(&self) -> Tracked {
        self.tr(self.jet.dx(), self.tails[1])
    }
    pub fn dy(&self) -> Tracked {
        self.tr(self.jet.dy(), self.tails[2])
    }
    pub fn dxx(&self) -> Tracked {
        self.tr(self.jet.dxx(), 2.0 * self.tails[3])
    }
    pub fn dxy(&self) -> Tracked {
        self.tr(self.jet.dxy(), self.tails[4])
    }
    pub fn dyy(&self) -> Tracked {
        self.tr(self.jet.dyy(), 2.0 * self.tails[5])
    }
    pub fn product_value(&self) -> ProductValue {
        ProductValue {
            value: self.jet.value().clone(),
            tail_bound: self.tails[0],
            cutoff: self.cutoff,
        }
    }
}

/// Derivative order carried by each jet coefficient.
const JET_ORDER: [i32; 6] = [0, 1, 1, 2, 2, 2];

/// 2·C·Σ_{n>N} n^j q^{−n}, where C bounds block_n·q^n/n^j over the computed
/// degrees n = 1..N.
pub fn tail_from_blocks(q: u32, blocks: &[f64], j: i32) -> f64 {
    let qf = q as f64;
    let c = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let n = (i + 1) as f64;
            b * qf.powf(n) / n.powi(j)
        })
        .fold(0.0, f64::max);
    if c == 0.0 {
        return 0.0;
    }
    let n0 = blocks.len();
    let mut s = 0.0;
    for n in n0 + 1..n0 + 2000 {
        let t = (n as f64).powi(j) * qf.powf(-(n as f64));
        s += t;
        if t < 1e-20 * s {
            break;
        }
    }
    2.0 * c * s
}

/// Pushes tail bounds on the coefficients of a log-jet S through exp(S).
fn exp_tails(s: &Jet2, t: &[f64; 6]) -> [f64; 6] {
    let v0 = s.value().to_f64().exp();
    let sf: Vec<f64> = s.c.iter().map(|c| c.to_f64()).collect();
    let e = t[0].exp_m1();
    let big = t[0].exp();
    [
        v0 * e,
        v0 * (e * sf[1].abs() + big * t[1]),
        v0 * (e * sf[2].abs() + big * t[2]),
        v0 * (e * (sf[3] + sf[1] * sf[1] / 2.0).abs() + big * (t[3] + sf[1].abs() * t[1] + t[1] * t[1] / 2.0)),
        v0 * (e * (sf[4] + sf[1] * sf[2]).abs()
            + big * (t[4] + sf[1].abs() * t[2] + sf[2].abs() * t[1] + t[1] * t[2])),
        v0 * (e * (sf[5] + sf[2] * sf[2] / 2.0).abs() + big * (t[5] + sf[2].abs() * t[2] + t[2] * t[2] / 2.0)),
    ]
}

/// ∏_{d ≤ N} f_d^{π_q(d)} as a jet; `factor(d, p)` returns f_d at |P| = p = q^d.
pub(crate) fn euler_jet<F>(cfg: &EulerConfig, mut factor: F) -> Result<JetProduct>
where
    F: FnMut(u32, &Float) -> Result<Jet2>,
{
    let wp = cfg.work_prec();
    let mut sum = Jet2::from_f64(0.0, wp);
    let mut blocks = vec![[0.0f64; 6]; cfg.cutoff as usize];
    for d in 1..=cfg.cutoff {
        let p = Float::with_val(wp, Float::u_pow_u(cfg.q, d));
        let f = factor(d, &p)?;
        if !(*f.value() > 0) {
            return Err(Error::Numerical(format!(
                "Euler factor at degree {d} is not positive ({})",
                f.value().to_f64()
            )));
        }
        let count = Float::with_val(wp, irreducible_count(cfg.q, d));
        let l = f.ln().scale(&count);
        for k in 0..6 {
            blocks[d as usize - 1][k] = l.c[k].to_f64().abs();
        }
        sum = &sum + &l;
    }
    let log_tails: [f64; 6] = std::array::from_fn(|k| {
        let col: Vec<f64> = blocks.iter().map(|b| b[k]).collect();
        tail_from_blocks(cfg.q, &col, JET_ORDER[k])
    });
    Ok(JetProduct {
        jet: sum.exp().with_prec(cfg.prec),
        tails: exp_tails(&sum, &log_tails),
        cutoff: cfg.cutoff,
    })
}

/// The closed-form constant
/// A = ∏_P (|P|−1)^6(|P|^5+7|P|^4−3|P|^3+6|P|^2−4|P|+1) / (|P|^{10}(|P|+1)).
pub fn closed_a(cfg: &EulerConfig) -> Result<ProductValue> {
    let j = euler_jet(cfg, |_, p| Ok(Jet2::constant(closed_a_factor(p))))?;
    Ok(j.product_value())
}

pub(crate) fn closed_a_factor(p: &Float) -> Float {
    let wp = p.prec();
    let pm1 = Float::with_val(wp, p - 1u32);
    let num = Float::with_val(wp, powu(&pm1, 6u32)) * horner(p, &[1, 7, -3, 6, -4, 1]);
    let den = Float::with_val(wp, powu(p, 10u32)) * Float::with_val(wp, p + 1u32);
    num / den
}

pub(crate) fn powu(x: &Float, k: u32) -> Float {
    Float::with_val(x.prec(), rug::ops::Pow::pow(x, k))
}

/// Σ c_i p^{k−i} for coefficients listed from the leading one down.
pub(crate) fn horner(p: &Float, coeffs: &[i64]) -> Float {
    let mut acc = Float::new(p.prec());
    for &c in coeffs {
        acc *= p;
        acc += c;
    }
    acc
}

fn check_h_region(q: u32, w: f64, u: f64) -> Result<()> {
    let qf = q as f64;
    if !((w * u).abs() < 1.0 / qf && w.abs() < qf.powf(-0.5) && u.abs() < 1.0) {
        return Err(Error::input(format!(
            "(w, u) = ({w}, {u}) lies outside |wu| < 1/q, |w| < q^(-1/2), |u| < 1"
        )));
    }
    Ok(())
}

fn check_b_region(q: u32, x: f64, w: f64, u: f64) -> Result<()> {
    let qf = q as f64;
    let (x, w, u) = (x.abs(), w.abs(), u.abs());
    let conds = [
        w < qf.powf(-0.5),
        w * u < 1.0 / qf,
        x * w * u < 1.0 / qf,
        qf * x * w * w * u < 1.0 / qf,
        x * w < qf.powf(-0.5),
        qf * qf * x * x * w.powi(4) < 1.0 / qf,
        qf * x * w.powi(3) < 1.0 / qf,
        qf * x * x * w.powi(3) < 1.0 / qf,
    ];
    if let Some(i) = conds.iter().position(|c| !c) {
        return Err(Error::input(format!(
            "(x, w, u) = ({x}, {w}, {u}) violates convergence condition {} of 8",
            i + 1
        )));
    }
    Ok(())
}

/// Local factor of ℋ with W = w^d, U = u^d:
/// (1−W)^{10}·[1 + (p−1)W(10 − 5W + 4W² − W³) / (p(1−U)(1−W)^4)].
pub(crate) fn h_factor(p: &Float, w: &Jet2, u: &Jet2) -> Jet2 {
    let one_m_w = 1.0 - w;
    let w2 = w * w;
    let w3 = &w2 * w;
    let poly = &(&(&(w * -5.0) + &(&w2 * 4.0)) - &w3) + 10.0;
    let pm1 = Float::with_val(p.prec(), p - 1u32);
    let num = &(w * &pm1) * &poly;
    let den = &(&(1.0 - u) * &one_m_w.powi(4)) * p;
    &one_m_w.powi(10) * &((&num / &den) + 1.0)
}

/// Local factor of ℬ with X = x^d, W = w^d, U = u^d.
pub(crate) fn b_factor(p: &Float, x: &Jet2, w: &Jet2, u: &Jet2) -> Jet2 {
    let wp = p.prec();
    let pw = |k: u32| Float::with_val(wp, powu(p, k));
    let mut wpow = vec![Jet2::from_f64(1.0, wp)];
    for i in 1..=8 {
        let next = &wpow[i - 1] * w;
        wpow.push(next);
    }
    let mut xpow = vec![Jet2::from_f64(1.0, wp)];
    for i in 1..=4 {
        let next = &xpow[i - 1] * x;
        xpow.push(next);
    }
    // (coefficient, power of p, of W, of X, of U)
    const TERMS: [(f64, u32, usize, usize, bool); 14] = [
        (4.0, 0, 1, 0, false),
        (-4.0, 0, 1, 1, false),
        (6.0, 1, 2, 1, false),
        (4.0, 1, 2, 1, true),
        (-10.0, 0, 2, 1, false),
        (4.0, 1, 3, 1, false),
        (-4.0, 1, 3, 2, false),
        (5.0, 1, 4, 2, false),
        (1.0, 2, 4, 2, false),
        (-6.0, 2, 4, 2, true),
        (-4.0, 2, 6, 3, false),
        (4.0, 3, 6, 3, true),
        (1.0, 3, 8, 4, false),
        (-1.0, 4, 8, 4, true),
    ];
    let mut br = Jet2::from_f64(0.0, wp);
    for &(c, pk, wk, xk, with_u) in &TERMS {
        let mut t = &wpow[wk] * &xpow[xk];
        if with_u {
            t = &t * u;
        }
        t = &t * &(Float::with_val(wp, &pw(pk) * c));
        br = &br + &t;
    }
    let one_m_w = 1.0 - w;
    let pw2x = &(&wpow[2] * x) * p;
    let wx = w * x;
    let front = &(&one_m_w.powi(4) * &(1.0 - &pw2x).powi(6)) / &(1.0 - &wx).powi(4);
    &front * &((&br / &(1.0 - u)) + 1.0)
}

/// ℋ(w, u) truncated at prime degree N.
pub fn compute_h(cfg: &EulerConfig, w: &Float, u: &Float) -> Result<ProductValue> {
    check_h_region(cfg.q, w.to_f64(), u.to_f64())?;
    let wp = cfg.work_prec();
    let (w, u) = (Float::with_val(wp, w), Float::with_val(wp, u));
    let j = euler_jet(cfg, |d, p| {
        let wd = Jet2::constant(Float::with_val(wp, powu(&w, d)));
        let ud = Jet2::constant(Float::with_val(wp, powu(&u, d)));
        Ok(h_factor(p, &wd, &ud))
    })?;
    Ok(j.product_value())
}

/// ℋ(·, u) as a jet in w at w₀ (the jet's x-slot).
pub fn compute_h_jet(cfg: &EulerConfig, w0: &Float, u: &Float) -> Result<JetProduct> {
    check_h_region(cfg.q, w0.to_f64(), u.to_f64())?;
    let wp = cfg.work_prec();
    let w = Jet2::var_x(Float::with_val(wp, w0));
    let u = Float::with_val(wp, u);
    euler_jet(cfg, |d, p| {
        let ud = Jet2::constant(Float::with_val(wp, powu(&u, d)));
        Ok(h_factor(p, &w.powi(d as i32), &ud))
    })
}

/// ℬ(x, w, u) truncated at prime degree N.
pub fn compute_b(cfg: &EulerConfig, x: &Float, w: &Float, u: &Float) -> Result<ProductValue> {
    Ok(compute_b_jet(cfg, x, w, u)?.product_value())
}

/// ℬ(·, ·, u) as a jet in (x, w) at (x₀, w₀).
pub fn compute_b_jet(cfg: &EulerConfig, x0: &Float, w0: &Float, u: &Float) -> Result<JetProduct> {
    check_b_region(cfg.q, x0.to_f64(), w0.to_f64(), u.to_f64())?;
    let wp = cfg.work_prec();
    let x = Jet2::var_x(Float::with_val(wp, x0));
    let w = Jet2::var_y(Float::with_val(wp, w0));
    let u = Float::with_val(wp, u);
    euler_jet(cfg, |d, p| {
        let ud = Jet2::constant(Float::with_val(wp, powu(&u, d)));
        Ok(b_factor(p, &x.powi(d as i32), &w.powi(d as i32), &ud))
    })
}

/// 𝒞(x, w) = ℬ(x, w, 1/(q²x)) as a jet in (x, w); the x-derivatives include
/// the dependence through u.
pub fn compute_c_jet(cfg: &EulerConfig, x0: &Float, w0: &Float) -> Result<JetProduct> {
    let wp = cfg.work_prec();
    let u0 = Float::with_val(wp, cfg.q_inv_pow(2) / x0);
    check_b_region(cfg.q, x0.to_f64(), w0.to_f64(), u0.to_f64())?;
    let x = Jet2::var_x(Float::with_val(wp, x0));
    let w = Jet2::var_y(Float::with_val(wp, w0));
    euler_jet(cfg, |d, p| {
        let xd = x.powi(d as i32);
        let ud = xd.recip().scale(&cfg.q_inv_pow(2 * d));
        Ok(b_factor(p, &xd, &w.powi(d as i32), &ud))
    })
}

pub fn compute_c(cfg: &EulerConfig, x: &Float, w: &Float) -> Result<ProductValue> {
    Ok(compute_c_jet(cfg, x, w)?.product_value())
}

/// A(z₁, z₂, 0, 0) as a jet in (z₁, z₂) at the origin, where
/// A(z) = ∏_P ∏_{i≤j}(1 − |P|^{−1−zᵢ−zⱼ}) ·
///        [½(∏_j(1 − |P|^{−½−zⱼ})^{−1} + ∏_j(1 + |P|^{−½−zⱼ})^{−1}) + 1/|P|] / (1 + 1/|P|).
pub fn a_shift_jet(cfg: &EulerConfig) -> Result<JetProduct> {
    let wp = cfg.work_prec();
    let lq = Float::with_val(wp, cfg.qf().ln_ref());
    let z1 = Jet2::var_x(Float::new(wp));
    let z2 = Jet2::var_y(Float::new(wp));
    euler_jet(cfg, |d, p| {
        let dl = Float::with_val(wp, &lq * d) * -1i32;
        // t_j = |P|^{−z_j}
        let one = Jet2::from_f64(1.0, wp);
        let t = [z1.scale(&dl).exp(), z2.scale(&dl).exp(), one.clone(), one];
        let pinv = Float::with_val(wp, 1u32 / p);
        let s = Float::with_val(wp, pinv.sqrt_ref());
        let mut pairs = Jet2::from_f64(1.0, wp);
        for i in 0..4 {
            for j in i..4 {
                pairs = &pairs * &(1.0 - &(&t[i] * &t[j]).scale(&pinv));
            }
        }
        let mut minus = Jet2::from_f64(1.0, wp);
        let mut plus = Jet2::from_f64(1.0, wp);
        for tj in &t {
            let a = tj.scale(&s);
            minus = &minus * &(1.0 - &a);
            plus = &plus * &(&a + 1.0);
        }
        let avg = (&minus.recip() + &plus.recip()) * 0.5;
        let norm = Float::with_val(wp, &pinv + 1u32);
        Ok(&pairs * &avg.add_scalar(&pinv).scale(&Float::with_val(wp, 1u32 / &norm)))
    })
}

/// Truncated prime sums Σ_{d(P) ≤ N} of the local rational functions that
/// express the derivatives of ℋ, 𝒞 and A in closed form.
#[derive(Clone, Debug)]
pub struct PrimeSums {
    pub a: Tracked,
    pub h: Tracked,
    pub b: Tracked,
    pub e: Tracked,
    pub r: Tracked,
    pub f: Tracked,
    /// Σ d(P)/(|P|²−1), which equals 1/(q−1).
    pub zeta_id1: Tracked,
    /// Σ d(P)²|P|²/(|P|²−1)², which equals q/(q−1)².
    pub zeta_id2: Tracked,
}

pub fn prime_sums(cfg: &EulerConfig) -> PrimeSums {
    let wp = cfg.work_prec();
    // (power of d, term without the d factor); summed with weight π_q(d)
    let sum = |dpow: i32, term: &dyn Fn(&Float) -> Float| -> Tracked {
        let mut acc = Float::new(wp);
        let mut blocks = Vec::new();
        for d in 1..=cfg.cutoff {
            let p = Float::with_val(wp, Float::u_pow_u(cfg.q, d));
            let count = Float::with_val(wp, irreducible_count(cfg.q, d));
            let v = term(&p) * count * (d as u64).pow(dpow as u32);
            blocks.push(v.to_f64().abs());
            acc += &v;
        }
        Tracked {
            value: Float::with_val(cfg.prec, &acc),
            tail_bound: tail_from_blocks(cfg.q, &blocks, dpow - 1),
        }
    };
    let d5 = |p: &Float| horner(p, &[1, 7, -3, 6, -4, 1]);
    let pm1 = |p: &Float| Float::with_val(wp, p - 1u32);
    let pp1 = |p: &Float| Float::with_val(wp, p + 1u32);
    let sq = |v: Float| Float::with_val(wp, &v * &v);
    let den2 = |p: &Float| sq(pm1(p)) * sq(d5(p));
    PrimeSums {
        a: sum(1, &|p| horner(p, &[25, -16, 30, -20, 5]) / (pm1(p) * d5(p))),
        h: sum(2, &|p| -(Float::with_val(wp, p * horner(p, &[17, 26, 13, 57, -117, 113, -65, 27, -8, 1]))) / den2(p)),
        b: sum(2, &|p| horner(p, &[45, 117, -73, 330, -485, 450, -295, 138, -40, 5, 0]) / den2(p)),
        e: sum(2, &|p| horner(p, &[90, 234, -146, 660, -970, 900, -590, 276, -80, 10, 0]) / den2(p)),
        r: sum(2, &|p| {
            horner(p, &[38, 220, 123, 305, 89, -98, 34, 20, -89, 98, -43, 7, 0]) / (den2(p) * sq(pp1(p)))
        }),
        f: sum(2, &|p| {
            Float::with_val(wp, p * horner(p, &[28, 91, -86, 273, -368, 337, -230, 111, -32, 4])) / den2(p)
        }),
        zeta_id1: sum(1, &|p| Float::with_val(wp, 1u32 / (Float::with_val(wp, p * p) - 1u32))),
        zeta_id2: sum(2, &|p| {
            let p2 = Float::with_val(wp, p * p);
            let m = Float::with_val(wp, &p2 - 1u32);
            p2 / sq(m)
        }),
    }
}
