//! Trigonometric sums behind the circle-method bookkeeping: geometric
//! sine/cosine sums, their power-weighted derivatives, truncated sin-series,
//! harmonic blocks and the double sum A(k, θ).
//!
//! Identities are checked against direct summation; asymptotic statements
//! are checked by doubling ladders on the ratio remainder / claimed order.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Truncated Taylor series Σ c_i εⁱ, i ≤ order.
#[derive(Clone, Debug, PartialEq)]
pub struct Taylor {
    pub c: Vec<f64>,
}

impl Taylor {
    pub fn constant(x: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x;
        Taylor { c }
    }

    /// The independent variable x₀ + ε.
    pub fn var(x0: f64, order: usize) -> Self {
        let mut t = Self::constant(x0, order);
        if order > 0 {
            t.c[1] = 1.0;
        }
        t
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn scale(&self, s: f64) -> Self {
        Taylor { c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Taylor { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Taylor { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Taylor { c }
    }

    pub fn div(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (1..=i).map(|k| o.c[k] * c[i - k]).sum();
            c[i] = (self.c[i] - s) / o.c[0];
        }
        Taylor { c }
    }

    /// (sin u, cos u) from s′ = u′c, c′ = −u′s.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for i in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for k in 1..=i {
                let w = k as f64 * self.c[k];
                ss += w * c[i - k];
                cc -= w * s[i - k];
            }
            s[i] = ss / i as f64;
            c[i] = cc / i as f64;
        }
        (Taylor { c: s }, Taylor { c })
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * (1..=k).map(|i| i as f64).product::<f64>()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrigSumResult {
    pub direct: f64,
    pub closed: f64,
    pub remainder: f64,
    /// The size the remainder is claimed to be O(·) of, evaluated.
    pub order_scale: f64,
    pub claimed_order: String,
    /// Whether the parameters are in the regime the statement is about
    /// (gθ large for the power sums, aθ large for the truncated series).
    pub in_regime: bool,
}

impl TrigSumResult {
    pub fn ratio(&self) -> f64 {
        (self.remainder / self.order_scale).abs()
    }
}

fn off_singularity(theta: f64) -> Result<()> {
    let r = theta.rem_euclid(2.0 * PI);
    if r.min(2.0 * PI - r) < 1e-12 {
        return Err(Error::input(format!("θ = {theta} is a multiple of 2π")));
    }
    Ok(())
}

/// Σ_{m=1}^{2g} sin(mθ) = (cos(θ/2) − cos((2g+½)θ))/(2 sin(θ/2)).
fn sin_sum_jet(g: u64, theta: &Taylor) -> Taylor {
    let half = theta.scale(0.5);
    let (sh, ch) = half.sin_cos();
    let (_, ct) = theta.scale(2.0 * g as f64 + 0.5).sin_cos();
    ch.sub(&ct).div(&sh.scale(2.0))
}

/// Σ_{m=1}^{2g} cos(mθ) = (sin((2g+½)θ) − sin(θ/2))/(2 sin(θ/2)).
fn cos_sum_jet(g: u64, theta: &Taylor) -> Taylor {
    let (sh, _) = theta.scale(0.5).sin_cos();
    let (st, _) = theta.scale(2.0 * g as f64 + 0.5).sin_cos();
    st.sub(&sh).div(&sh.scale(2.0))
}

/// The cosine closed form with +sin(θ/2) in the numerator, as it is often
/// quoted; it exceeds the true sum by exactly 1 (and so has the same
/// derivatives).
pub fn cos_sum_plus_variant(g: u64, theta: f64) -> f64 {
    ((theta / 2.0).sin() + (((2 * g) as f64 + 0.5) * theta).sin()) / (2.0 * (theta / 2.0).sin())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometricTrig {
    pub sin_sum: f64,
    pub cos_sum: f64,
    pub sin_direct: f64,
    pub cos_direct: f64,
    pub max_deviation: f64,
}

pub fn geometric_trig(g: u64, theta: f64) -> Result<GeometricTrig> {
    off_singularity(theta)?;
    let t = Taylor::var(theta, 0);
    let sin_sum = sin_sum_jet(g, &t).c[0];
    let cos_sum = cos_sum_jet(g, &t).c[0];
    let (mut sd, mut cd) = (0.0, 0.0);
    for m in 1..=2 * g {
        let (s, c) = (m as f64 * theta).sin_cos();
        sd += s;
        cd += c;
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    Ok(GeometricTrig {
        sin_sum,
        cos_sum,
        sin_direct: sd,
        cos_direct: cd,
        max_deviation: rel(sin_sum, sd).max(rel(cos_sum, cd)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// Σ_{m=1}^{2g} m^k sin(mθ) or m^k cos(mθ): `closed` is the k-th
/// derivative of the geometric closed form (order-k jets), `remainder` is
/// direct minus the leading term ∓(2g)^k {cos,sin}((2g+½)θ)/(2 sin(θ/2)),
/// claimed O(g^{k−1}/sin²(θ/2)).
pub fn power_trig(k: usize, g: u64, theta: f64, kind: TrigKind) -> Result<TrigSumResult> {
    if !(1..=9).contains(&k) {
        return Err(Error::input(format!("k = {k} outside 1..=9")));
    }
    off_singularity(theta)?;
    let t = Taylor::var(theta, k);
    let fk = sin_sum_jet(g, &t).derivative(k);
    let hk = cos_sum_jet(g, &t).derivative(k);
    // d^k/dθ^k of sin(mθ), cos(mθ) cycle with period 4
    let closed = match (kind, k % 4) {
        (TrigKind::Sin, 0) => fk,
        (TrigKind::Sin, 1) => -hk,
        (TrigKind::Sin, 2) => -fk,
        (TrigKind::Sin, _) => hk,
        (TrigKind::Cos, 0) => hk,
        (TrigKind::Cos, 1) => fk,
        (TrigKind::Cos, 2) => -hk,
        (TrigKind::Cos, _) => -fk,
    };
    let direct: f64 = (1..=2 * g)
        .map(|m| {
            let mf = m as f64;
            let w = mf.powi(k as i32);
            match kind {
                TrigKind::Sin => w * (mf * theta).sin(),
                TrigKind::Cos => w * (mf * theta).cos(),
            }
        })
        .sum();
    let s = (theta / 2.0).sin();
    let top = (2.0 * g as f64).powi(k as i32);
    let phase = (2.0 * g as f64 + 0.5) * theta;
    let leading = match kind {
        TrigKind::Sin => -top * phase.cos() / (2.0 * s),
        TrigKind::Cos => top * phase.sin() / (2.0 * s),
    };
    Ok(TrigSumResult {
        direct,
        closed,
        remainder: direct - leading,
        order_scale: (g as f64).powi(k as i32 - 1) / (s * s),
        claimed_order: "g^(k-1)/sin^2(theta/2)".into(),
        in_regime: 2.0 * g as f64 * s >= 2.0,
    })
}

/// Scale against which power-sum identities are judged: Σ m^k.
pub fn power_trig_scale(k: usize, g: u64) -> f64 {
    (1..=2 * g).map(|m| (m as f64).powi(k as i32)).sum()
}

/// Σ_{k=1}^{a−1} sin(kθ)/k against (π−θ)/2 − cos(aθ)/(2a sin(θ/2)) − sin(aθ)/(2a).
pub fn truncated_sin_series(a: u64, theta: f64) -> Result<TrigSumResult> {
    if a < 2 || !(theta > 0.0 && theta < 2.0 * PI) {
        return Err(Error::input(format!("need a ≥ 2 and 0 < θ < 2π (a = {a}, θ = {theta})")));
    }
    let direct: f64 = (1..a).map(|k| (k as f64 * theta).sin() / k as f64).sum();
    let af = a as f64;
    let s = (theta / 2.0).sin();
    let closed = (PI - theta) / 2.0 - (af * theta).cos() / (2.0 * af * s) - (af * theta).sin() / (2.0 * af);
    Ok(TrigSumResult {
        direct,
        closed,
        remainder: direct - closed,
        order_scale: 1.0 / (af * af * s * s),
        claimed_order: "1/(a^2 sin^2(theta/2))".into(),
        in_regime: af * s >= 2.0,
    })
}

/// The same with the tail cos((a−½)θ)/(2a sin(θ/2)) kept whole, which is
/// what the partial-summation argument actually yields; it differs from the
/// short form by cos(aθ)(1 − cos(θ/2))/(2a sin(θ/2)) = O(θ/a).
pub fn truncated_sin_series_full_tail(a: u64, theta: f64) -> Result<TrigSumResult> {
    let mut r = truncated_sin_series(a, theta)?;
    let af = a as f64;
    r.closed = (PI - theta) / 2.0 - ((af - 0.5) * theta).cos() / (2.0 * af * (theta / 2.0).sin());
    r.remainder = r.direct - r.closed;
    Ok(r)
}

/// B₂, B₄, …, B₁₈.
const BERNOULLI_EVEN: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];
const BERNOULLI_TERMS: usize = 8;

/// Σ_{k=1}^{8} B_{2k}/(2k)·(x^{−2k} − y^{−2k}) and a bound for the
/// discarded tail (twice the first omitted terms).
fn bernoulli_tail(x: f64, y: f64) -> (f64, f64) {
    let term = |k: usize, z: f64| BERNOULLI_EVEN[k - 1] / (2 * k) as f64 * z.powi(-2 * k as i32);
    let s = (1..=BERNOULLI_TERMS).map(|k| term(k, x) - term(k, y)).sum();
    let k = BERNOULLI_TERMS + 1;
    (s, 2.0 * (term(k, x).abs() + term(k, y).abs()))
}

/// Σ_{k≥2} (−1)^{k+1}x^k/k = log(1+x) − x, by the series when it converges
/// quickly and by log1p otherwise.
fn log1p_minus_x(x: f64) -> f64 {
    if x.abs() <= 0.5 {
        let mut s = 0.0;
        let mut p = x;
        for k in 2..200 {
            p *= -x;
            let t = p / k as f64;
            s += t;
            if t.abs() < 1e-18 * s.abs().max(1e-300) {
                break;
            }
        }
        s
    } else {
        x.ln_1p() - x
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HarmonicBlock {
    /// Σ_{j<α} 1/(2m+j) − α/(2m), summed directly.
    pub a_direct: f64,
    /// Euler–Maclaurin expansion with the Bernoulli tail cut at B₁₆.
    pub a_formula: f64,
    pub a_tail_bound: f64,
    /// Σ_{j<α} 1/(2m−j) − α/(2m).
    pub b_direct: f64,
    pub b_formula: f64,
    pub b_tail_bound: f64,
}

pub fn harmonic_block(m: u64, alpha: u64) -> Result<HarmonicBlock> {
    if alpha == 0 || 2 * m <= alpha {
        return Err(Error::input(format!("need 2m > α ≥ 1 (m = {m}, α = {alpha})")));
    }
    let (mf, af) = (m as f64, alpha as f64);
    let a_direct = direct_block(m, alpha, 1) - af / (2.0 * mf);
    let b_direct = direct_block(m, alpha, -1) - af / (2.0 * mf);

    // H_{2m+α−1} − H_{2m−1}
    let (lo, hi) = (2.0 * mf - 1.0, 2.0 * mf + af - 1.0);
    let (ta, ea) = bernoulli_tail(lo, hi);
    let a_formula = af / (2.0 * mf * lo) - af / (2.0 * lo * hi) + log1p_minus_x(af / lo) + ta;

    // H_{2m} − H_{2m−α}
    let (lo, hi) = (2.0 * mf - af, 2.0 * mf);
    let (tb, eb) = bernoulli_tail(lo, hi);
    let b_formula = -log1p_minus_x(-af / hi) + 1.0 / (2.0 * hi) - 1.0 / (2.0 * lo) + tb;

    Ok(HarmonicBlock {
        a_direct,
        a_formula,
        a_tail_bound: ea,
        b_direct,
        b_formula,
        b_tail_bound: eb,
    })
}

fn direct_block(m: u64, alpha: u64, sign: i64) -> f64 {
    (0..alpha as i64)
        .map(|j| 1.0 / (2 * m as i64 + sign * j) as f64)
        .sum()
}

/// Σ_j 1/(2m+j) + Σ_{j≠2m} 1/(2m−j) − α/m; the j = 2m term of the second
/// block has no finite value and is left out.
fn ab_sum_for_master(m: u64, alpha: u64) -> f64 {
    let two_m = 2 * m as i64;
    let plus: f64 = (0..alpha as i64).map(|j| 1.0 / (two_m + j) as f64).sum();
    let minus: f64 = (0..alpha as i64)
        .filter(|&j| j != two_m)
        .map(|j| 1.0 / (two_m - j) as f64)
        .sum();
    plus + minus - alpha as f64 / m as f64
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MasterA {
    pub direct: f64,
    pub case_formula: f64,
    pub remainder: f64,
    pub envelope: f64,
    /// k = 1 only: the case formula with the cot(2πθ) term outside the
    /// α/2 bracket, kept to show which grouping the direct sum supports.
    pub alt_formula: Option<f64>,
}

/// sin(2πθ n)/n with the value 2πθ at n = 0.
fn sinc_term(theta: f64, n: i64) -> f64 {
    if n == 0 {
        2.0 * PI * theta
    } else {
        (2.0 * PI * theta * n as f64).sin() / n as f64
    }
}

/// Direct A(k, θ) for all k ≤ k_max at once.
pub fn master_direct(k_max: usize, theta: f64, alpha: u64, g: u64) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    let a = alpha as i64;
    for m in 0..=2 * g as i64 {
        let mut block = 0.0;
        for j in 0..a {
            block += sinc_term(theta, 2 * m - j);
            if m >= 1 {
                block += sinc_term(theta, 2 * m + j);
            }
        }
        let mut w = 1.0;
        for o in out.iter_mut() {
            *o += w * block;
            w *= m as f64;
        }
    }
    out
}

pub fn master_a(k: usize, theta: f64, alpha: u64, g: u64) -> Result<MasterA> {
    if k > 9 {
        return Err(Error::input(format!("k = {k} outside 0..=9")));
    }
    if !(theta > 0.0 && theta < 0.25) {
        return Err(Error::input("θ must lie in (0, 1/4)"));
    }
    let direct = master_direct(k, theta, alpha, g)[k];
    master_a_from_direct(k, theta, alpha, g, direct)
}

pub fn master_a_from_direct(k: usize, theta: f64, alpha: u64, g: u64, direct: f64) -> Result<MasterA> {
    let (af, gf) = (alpha as f64, g as f64);
    let x = 8.0 * gf * PI * theta;
    let tpt = 2.0 * PI * theta;
    let (case_formula, envelope, alt) = match k {
        0 => (
            PI * af / 2.0 - af / 2.0 * (x.cos() / (2.0 * gf * tpt) - x.sin() / (2.0 * gf)),
            theta * af.powi(3) / gf + af / (gf * gf * theta * theta),
            None,
        ),
        1 => {
            let ab: f64 = (1..=2 * g)
                .map(|m| m as f64 * (4.0 * PI * m as f64 * theta).sin() * ab_sum_for_master(m, alpha))
                .sum();
            let cot = 1.0 / tpt.tan();
            let main = x.cos() / tpt - x.sin();
            (
                -af / 2.0 * (main - cot) + ab,
                theta * af.powi(3),
                Some(-af / 2.0 * main - cot + ab),
            )
        }
        _ => {
            let p = (2.0 * gf).powi(k as i32 - 1);
            (
                -af / 2.0 * (p * x.cos() / tpt - p * x.sin()),
                gf.powi(k as i32 - 1) * theta * af.powi(3) + gf.powi(k as i32 - 2) * af / theta,
                None,
            )
        }
    };
    Ok(MasterA {
        direct,
        case_formula,
        remainder: direct - case_formula,
        envelope,
        alt_formula: alt,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UbvarCheck {
    pub sum: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Σ_{n≤g} cos(2nθ)/n against log min{g, 1/(2‖θ‖)}, where ‖θ‖ is the
/// distance from θ to πℤ (the sum has period π, so the bound must too).
pub fn ubvar_check(g: u64, theta: f64) -> Result<UbvarCheck> {
    if !(0.0..PI).contains(&theta) || g == 0 {
        return Err(Error::input("need θ ∈ [0, π) and g ≥ 1"));
    }
    let sum: f64 = (1..=g).map(|n| (2.0 * n as f64 * theta).cos() / n as f64).sum();
    let bound = ubvar_bound(g, theta);
    Ok(UbvarCheck { sum, bound, slack: sum - bound })
}

fn ubvar_bound(g: u64, theta: f64) -> f64 {
    let d = theta.min(PI - theta);
    let cap = if d == 0.0 { g as f64 } else { (g as f64).min(1.0 / (2.0 * d)) };
    cap.ln()
}

/// max over g ≤ g_max and an even θ-grid of Σ cos(2nθ)/n − bound.
pub fn ubvar_sweep(g_max: u64, thetas: usize) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..thetas {
        let theta = PI * i as f64 / thetas as f64;
        let mut s = 0.0;
        for n in 1..=g_max {
            s += (2.0 * n as f64 * theta).cos() / n as f64;
            worst = worst.max(s - ubvar_bound(n, theta));
        }
    }
    worst
}

/// Frozen bound on the additive constant: `ubvar_sweep(10⁴, 400)` gives
/// exactly 1, attained at g = 1, θ = 0 (H₁ − log 1); for large g the slack
/// near θ = 0 tends to Euler's γ.
pub const UBVAR_CONSTANT: f64 = 1.0 + 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ladder {
    pub rungs: Vec<f64>,
    pub median: f64,
    pub max: f64,
    pub stable: bool,
}

/// Ratio stability over a doubling ladder: max ≤ 4 × median.
pub fn ladder(rungs: Vec<f64>) -> Ladder {
    let mut s = rungs.clone();
    s.sort_by(f64::total_cmp);
    let median = if s.len() % 2 == 1 {
        s[s.len() / 2]
    } else {
        0.5 * (s[s.len() / 2 - 1] + s[s.len() / 2])
    };
    let max = *s.last().unwrap_or(&0.0);
    Ladder {
        stable: rungs.len() >= 6 && max <= 4.0 * median && max.is_finite(),
        rungs,
        median,
        max,
    }
}

/// θ window around θ₀ over which each rung takes its largest ratio, so that
/// a rung cannot look small just because of an oscillating phase.
pub fn theta_window(theta0: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| theta0 * (1.0 + 0.5 * i as f64 / points as f64))
}

pub fn power_ladder(k: usize, kind: TrigKind) -> Result<Ladder> {
    let mut rungs = Vec::new();
    for e in 6..=12u32 {
        let g = 1u64 << e;
        let mut r: f64 = 0.0;
        for th in theta_window((g as f64).powf(-0.5), 16) {
            r = r.max(power_trig(k, g, th, kind)?.ratio());
        }
        rungs.push(r);
    }
    Ok(ladder(rungs))
}

pub fn truncated_ladder() -> Result<Ladder> {
    let mut rungs = Vec::new();
    for e in 6..=12u32 {
        let g = 1u64 << e;
        let mut r: f64 = 0.0;
        for th in theta_window((g as f64).powf(-0.5), 16) {
            r = r.max(truncated_sin_series(4 * g, th)?.ratio());
        }
        rungs.push(r);
    }
    Ok(ladder(rungs))
}

/// |A(m)|·m²/α and |B(m)|·m²/α over m = m₀·2^i.
pub fn harmonic_ladder(alpha: u64, m0: u64) -> Result<(Ladder, Ladder)> {
    let mut ra = Vec::new();
    let mut rb = Vec::new();
    for i in 0..7 {
        let m = m0 << i;
        let h = harmonic_block(m, alpha)?;
        let s = (m * m) as f64 / alpha as f64;
        ra.push(h.a_direct.abs() * s);
        rb.push(h.b_direct.abs() * s);
    }
    Ok((ladder(ra), ladder(rb)))
}

/// |remainder|/envelope for A(k, θ) with θ = g^{−1/2}, α = 100⌊log g⌋,
/// g = 2⁸ … 2¹³. Smaller g has α > 4g, where the α-blocks no longer fit
/// inside the m-range and the case formulas are not meant to apply.
pub fn master_ladder(k: usize) -> Result<Ladder> {
    let mut rungs = Vec::new();
    for e in 8..=13u32 {
        let g = 1u64 << e;
        let alpha = 100 * (g as f64).ln().floor() as u64;
        let mut r: f64 = 0.0;
        for th in theta_window((g as f64).powf(-0.5), 4) {
            let d = master_direct(k, th, alpha, g)[k];
            let m = master_a_from_direct(k, th, alpha, g, d)?;
            r = r.max((m.remainder / m.envelope).abs());
        }
        rungs.push(r);
    }
    Ok(ladder(rungs))
}
