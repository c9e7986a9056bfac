//! Upper-bound machinery for log|L(α+it, χ_D)|: the function f₁ and its
//! Fourier series, the extremal trigonometric minorant of f₁, the resulting
//! explicit inequality, and the 𝓜/𝓥 diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lfun::{l_at, log_modulus_a, log_modulus_b, value_at_half, zeros, LPolynomial};

/// 𝓜(u,g) = ½ log min{g, 1/(2θ)} and 𝓥(u,g) = 𝓜 + ½ log g.
pub fn mv_values(theta: f64, g: f64) -> (f64, f64) {
    let cap = if theta <= 0.0 { g } else { g.min(1.0 / (2.0 * theta)) };
    let m = 0.5 * cap.ln();
    (m, m + 0.5 * g.ln())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&alpha) {
        return Err(Error::input(format!("alpha = {alpha} outside [1/2, 1]")));
    }
    Ok(())
}

/// f₁(x) = log((a² + sin²πx)/(b² + sin²πx)) − (5/2 − α) log q.
pub fn f1_closed(x: f64, alpha: f64, q: u32) -> f64 {
    let a = log_modulus_a(q);
    let b = log_modulus_b(q, alpha);
    let s2 = (PI * x).sin().powi(2);
    ((a * a + s2) / (b * b + s2)).ln() - (2.5 - alpha) * (q as f64).ln()
}

/// Σ_{0<|n|≤M} e(nx)/|n| · (q^{−(α−½)|n|} − q^{−2|n|}).
pub fn f1_fourier(x: f64, alpha: f64, q: u32, m: usize) -> f64 {
    let qf = q as f64;
    let (rb, ra) = (qf.powf(0.5 - alpha), qf.powi(-2));
    let (mut pb, mut pa) = (1.0, 1.0);
    let mut s = 0.0;
    for n in 1..=m {
        pb *= rb;
        pa *= ra;
        s += (2.0 * PI * n as f64 * x).cos() * (pb - pa) / n as f64;
    }
    2.0 * s
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct F1Eval {
    pub fourier: f64,
    pub closed: f64,
    pub difference: f64,
}

pub fn f1_eval(x: f64, alpha: f64, q: u32, m: usize) -> Result<F1Eval> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::input("Fourier truncation must be at least 1"));
    }
    let fourier = f1_fourier(x, alpha, q, m);
    let closed = f1_closed(x, alpha, q);
    Ok(F1Eval {
        fourier,
        closed,
        difference: (fourier - closed).abs(),
    })
}

/// Σ_{k≥0} (−1)^k a_k by the Cohen–Rodriguez Villegas–Zagier weights,
/// using n terms (error ≈ 5.8^{−n} for totally monotone a_k).
fn alternating_sum_accelerated(a: impl Fn(usize) -> f64, n: usize) -> f64 {
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for k in 0..n {
        c = b - c;
        s += c * a(k);
        let (kf, nf) = (k as f64, n as f64);
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorantPolynomial {
    pub n: usize,
    pub alpha: f64,
    pub q: u32,
    /// r̂(0), r̂(1), …, r̂(N); r̂(−m) = r̂(m).
    pub rhat: Vec<f64>,
}

impl MinorantPolynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.rhat[0]
            + 2.0
                * self.rhat[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r * (2.0 * PI * (i + 1) as f64 * x).cos())
                    .sum::<f64>()
    }

    pub fn coeff(&self, m: i64) -> f64 {
        self.rhat.get(m.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }
}

/// r̂(0) = −(2/(N+1)) log((1 + q^{−(α−½)(N+1)})/(1 + q^{−2(N+1)})).
pub fn minorant_mean(n: usize, alpha: f64, q: u32) -> f64 {
    let l = (n + 1) as f64;
    let qf = q as f64;
    -(2.0 / l) * ((1.0 + qf.powf(-(alpha - 0.5) * l)) / (1.0 + qf.powf(-2.0 * l))).ln()
}

/// r̂(m), 1 ≤ m ≤ N, from the alternating k-series
/// Σ_k (−1)^k (k+1)[(s^{m+kL} terms)/(m+kL) − (s^{(k+2)L−m} terms)/((k+2)L−m)],
/// L = N+1. For α > ½ the terms decay geometrically and are summed until
/// below 10⁻³⁰; at α = ½ they decay only like 1/k and the series is summed
/// with convergence acceleration.
pub fn minorant_coefficient(m: usize, n: usize, alpha: f64, q: u32) -> f64 {
    assert!(m >= 1 && m <= n);
    let l = (n + 1) as f64;
    let mf = m as f64;
    let lnq = (q as f64).ln();
    let beta = alpha - 0.5;
    let term = |k: usize| -> f64 {
        let kf = k as f64;
        let e1 = mf + kf * l;
        let e2 = (kf + 2.0) * l - mf;
        let p1 = (-beta * e1 * lnq).exp() - (-2.0 * e1 * lnq).exp();
        let p2 = (-beta * e2 * lnq).exp() - (-2.0 * e2 * lnq).exp();
        (kf + 1.0) * (p1 / e1 - p2 / e2)
    };
    // geometric decay rate of the terms
    let rate = (-beta * l * lnq).exp();
    if rate < 0.5 {
        let mut s = 0.0;
        for k in 0..100_000 {
            let t = term(k);
            s += if k % 2 == 0 { t } else { -t };
            if t.abs() < 1e-30 {
                break;
            }
        }
        s
    } else {
        alternating_sum_accelerated(term, 60)
    }
}

pub fn minorant_coeffs(n: usize, alpha: f64, q: u32) -> Result<MinorantPolynomial> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::input("N must be at least 1"));
    }
    let mut rhat = vec![minorant_mean(n, alpha, q)];
    rhat.extend((1..=n).map(|m| minorant_coefficient(m, n, alpha, q)));
    Ok(MinorantPolynomial { n, alpha, q, rhat })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorantCheck {
    /// max over the grid of r(x) − f₁(x); ≤ 0 for a minorant.
    pub max_violation: f64,
    pub worst_x: f64,
    /// ∫r − (closed-form extremal value); zero by construction.
    pub integral_gap: f64,
    /// min over the grid of f₁(x) − r(x) — how closely r touches f₁.
    pub closest_approach: f64,
}

pub fn minorant_check(n: usize, alpha: f64, q: u32, grid_size: usize) -> Result<MinorantCheck> {
    if grid_size < 1000 {
        return Err(Error::input("grid_size must be at least 1000"));
    }
    let r = minorant_coeffs(n, alpha, q)?;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_x = 0.0;
    let mut closest = f64::INFINITY;
    for i in 0..grid_size {
        // offset grid avoids the pole of f₁ at x = 0 when α = 1/2
        let x = (i as f64 + 0.5) / grid_size as f64;
        let d = r.eval(x) - f1_closed(x, alpha, q);
        if d > worst {
            worst = d;
            worst_x = x;
        }
        closest = closest.min(-d);
    }
    Ok(MinorantCheck {
        max_violation: worst,
        worst_x,
        integral_gap: r.rhat[0] - minorant_mean(n, alpha, q),
        closest_approach: closest,
    })
}

/// Power sums p_n = Σ_{d(f)=n} χ_D(f)Λ(f) from the coefficients of 𝓛 via
/// u𝓛′/𝓛 = Σ p_n uⁿ (exact integer recursion).
pub fn power_sums_from_coeffs(l: &LPolynomial, n_max: usize) -> Vec<i64> {
    let c = |k: usize| l.coeffs.get(k).copied().unwrap_or(0) as i128;
    let mut p = vec![0i128; n_max + 1];
    for n in 1..=n_max {
        p[n] = n as i128 * c(n) - (1..n).map(|k| p[k] * c(n - k)).sum::<i128>();
    }
    p.into_iter().map(|v| v as i64).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LalfaReport {
    pub d_code: u64,
    pub alpha: f64,
    pub t: f64,
    pub n: usize,
    pub lhs: f64,
    pub explicit_rhs: f64,
    pub gap: f64,
    /// log|L(5/2+it)|: the part of the gap that does not come from r ≤ f₁.
    pub tail_term: f64,
    pub skipped: bool,
}

/// log|L(α+it)| against (2g/(N+1)) log((1+q^{−(α−½)(N+1)})/(1+q^{−2(N+1)}))
/// + Re Σ_{d(f)≤N} r̂(d(f))χ_D(f)Λ(f)/|f|^{½+it}.
pub fn lalfa_report(l: &LPolynomial, alpha: f64, t: f64, n: usize) -> Result<LalfaReport> {
    let r = minorant_coeffs(n, alpha, l.q())?;
    let q = l.q() as f64;
    let val = l_at(l, Complex64::new(alpha, t)).norm();
    let skipped = (alpha == 0.5 && t == 0.0 && value_at_half(l).is_zero()) || val < 1e-13;
    let p = power_sums_from_coeffs(l, n);
    let lnq = q.ln();
    let prime_part: f64 = (1..=n)
        .map(|k| r.rhat[k] * p[k] as f64 * q.powf(-(k as f64) / 2.0) * (k as f64 * t * lnq).cos())
        .sum();
    let explicit_rhs = -(l.g as f64) * r.rhat[0] + prime_part;
    let lhs = if skipped { f64::NEG_INFINITY } else { val.ln() };
    Ok(LalfaReport {
        d_code: l.d.code(),
        alpha,
        t,
        n,
        lhs,
        explicit_rhs,
        gap: if skipped { f64::NAN } else { lhs - explicit_rhs },
        tail_term: l_at(l, Complex64::new(2.5, t)).norm().ln(),
        skipped,
    })
}

/// The minorant inequality gives gap ≤ log|L(5/2+it)| ≤ log ζ_q(5/2) =
/// −log(1 − q^{−3/2}).
pub fn lalfa_gap_ceiling(q: u32) -> f64 {
    -(1.0 - (q as f64).powf(-1.5)).ln()
}

/// −½Σ_j (r − f₁)(θ_j − t log q/2π) ≥ 0, the zero-side slack of the
/// inequality, recomputed from the zeros as a cross-check of `gap`.
pub fn lalfa_zero_side_slack(l: &LPolynomial, alpha: f64, t: f64, n: usize) -> Result<f64> {
    let r = minorant_coeffs(n, alpha, l.q())?;
    let shift = t * (l.q() as f64).ln() / (2.0 * PI);
    let z = zeros(l)?;
    Ok(z.thetas
        .iter()
        .map(|th| 0.5 * (f1_closed(th - shift, alpha, l.q()) - r.eval(th - shift)))
        .sum())
}

/// Parameter presets N = 2 log_q g − 4 log_q log_q g (α = ½) and
/// N = 2 log_q g (α > ½), floored and at least 1.
pub fn preset_n(q: u32, g: f64, alpha: f64) -> usize {
    let lq = |x: f64| x.ln() / (q as f64).ln();
    let v = if alpha == 0.5 {
        let ll = lq(g);
        2.0 * ll - if ll > 1.0 { 4.0 * lq(ll) } else { 0.0 }
    } else {
        2.0 * lq(g)
    };
    (v.floor() as i64).max(1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfun::{compute_l, prime_power_sums};
    use crate::moments::{ensemble_sweep, SweepOptions};

    /// Oracle: r̂(m) = ∫_{q^{−2}}^{q^{−(α−½)}} (t^{m−1} − t^{2L−m−1})/(1+t^L)² dt,
    /// by composite Gauss–Legendre quadrature.
    fn rhat_integral(m: usize, n: usize, alpha: f64, q: u32) -> f64 {
        let l = (n + 1) as i32;
        let (lo, hi) = ((q as f64).powi(-2), (q as f64).powf(0.5 - alpha));
        let f = |t: f64| {
            (t.powi(m as i32 - 1) - t.powi(2 * l - m as i32 - 1)) / (1.0 + t.powi(l)).powi(2)
        };
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let panels = 4000;
        let h = (hi - lo) / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            let c = lo + (i as f64 + 0.5) * h;
            for (x, w) in nodes {
                s += w * f(c + 0.5 * h * x) * 0.5 * h;
            }
        }
        s
    }

    #[test]
    fn mv_examples() {
        let g = 100.0;
        assert!((mv_values(0.0, g).0 - 0.5 * g.ln()).abs() < 1e-15);
        let (m1, _) = mv_values(1.0 / (2.0 * g), g);
        assert!((m1 - 0.5 * g.ln()).abs() < 1e-12);
        assert!((mv_values(1.0, g).0 - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        let (m, v) = mv_values(0.3, g);
        assert!((v - m - 0.5 * g.ln()).abs() < 1e-15);
    }

    #[test]
    fn f1_dual_path() {
        for alpha in [0.6, 0.75, 1.0] {
            for i in 0..200 {
                let x = i as f64 / 200.0 + 0.001;
                let e = f1_eval(x, alpha, 5, 400).unwrap();
                assert!(e.difference <= 1e-10, "α={alpha} x={x} {e:?}");
                assert!((f1_closed(-x, alpha, 5) - f1_closed(x, alpha, 5)).abs() < 1e-12);
            }
        }
        let e = f1_eval(0.3, 0.75, 5, 200).unwrap();
        assert!(e.difference <= 1e-10);
    }

    #[test]
    fn f1_coefficients_by_quadrature() {
        // periodic trapezoid rule is spectrally accurate for analytic f₁
        let (alpha, q) = (0.75, 5);
        let pts = 4096;
        for n in 0..6 {
            let c: f64 = (0..pts)
                .map(|i| {
                    let x = i as f64 / pts as f64;
                    f1_closed(x, alpha, q) * (2.0 * PI * n as f64 * x).cos()
                })
                .sum::<f64>()
                / pts as f64;
            let want = if n == 0 {
                0.0
            } else {
                (5f64.powf(-0.25 * n as f64) - 5f64.powi(-2 * n)) / n as f64
            };
            assert!((c - want).abs() < 1e-8, "n={n} {c} {want}");
        }
    }

    #[test]
    fn minorant_mean_example() {
        let v = minorant_mean(10, 0.5, 5);
        let want = -(2.0 / 11.0) * (2.0 / (1.0 + 5f64.powi(-22))).ln();
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn k_series_matches_integral_oracle() {
        for &alpha in &[0.5, 0.75, 1.0] {
            for &n in &[5usize, 10, 20] {
                for m in 1..=n {
                    let a = minorant_coefficient(m, n, alpha, 5);
                    let b = rhat_integral(m, n, alpha, 5);
                    assert!((a - b).abs() < 1e-12, "α={alpha} N={n} m={m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn mean_is_integral_minus_log_term() {
        // at m = 0 the integral also contains log(q^{−(α−½)}/q^{−2}), which
        // the closed form for r̂(0) leaves out
        for &alpha in &[0.5, 0.75, 1.0] {
            for &n in &[5usize, 10] {
                let full = rhat_integral(0, n, alpha, 5);
                let log_term = (2.0 - (alpha - 0.5)) * 5f64.ln();
                assert!((full - log_term - minorant_mean(n, alpha, 5)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn leading_term_asymptotic() {
        let (n, alpha, q) = (20, 0.75, 5u32);
        let qf = q as f64;
        let env = 1.0 / ((n + 1) as f64 * qf.powf((n + 1) as f64 * (alpha - 0.5)));
        for m in 1..=n {
            let lead = (qf.powf(-(m as f64) * (alpha - 0.5)) - qf.powf(-2.0 * m as f64)) / m as f64;
            let d = (minorant_coefficient(m, n, alpha, q) - lead).abs();
            assert!(d <= 4.0 * env, "m={m}: {d} vs {env}");
        }
    }

    #[test]
    fn minorant_property_small() {
        for &alpha in &[0.5, 0.75, 1.0] {
            let c = minorant_check(5, alpha, 5, 2000).unwrap();
            assert!(c.max_violation <= 1e-10, "{c:?}");
            assert_eq!(c.integral_gap, 0.0);
        }
        assert!(minorant_check(5, 0.4, 5, 2000).is_err());
    }

    #[test]
    fn mean_nondecreasing_in_n() {
        for &alpha in &[0.5, 0.75, 1.0] {
            let v: Vec<f64> = (1..40).map(|n| minorant_mean(n, alpha, 5)).collect();
            assert!(v.windows(2).all(|w| w[1] >= w[0]));
            assert!(v.iter().all(|&x| x <= 0.0));
        }
    }

    #[test]
    fn power_sums_agree() {
        for d in crate::moments::ensemble(5, 1, u64::MAX).unwrap().iter().step_by(9) {
            let l = compute_l(d).unwrap();
            assert_eq!(power_sums_from_coeffs(&l, 6), prime_power_sums(d, 6).unwrap());
        }
    }

    #[test]
    fn lalfa_gap_is_bounded_and_explained() {
        let ls = ensemble_sweep(5, 1, &SweepOptions::default()).unwrap();
        let ceiling = lalfa_gap_ceiling(5);
        for l in &ls {
            for n in [2usize, 4, 8] {
                let r = lalfa_report(l, 0.5, 0.0, n).unwrap();
                if r.skipped {
                    continue;
                }
                assert!(r.gap <= r.tail_term + 1e-9);
                assert!(r.gap <= ceiling);
                // gap = log|L(5/2)| − slack from the zeros
                let slack = lalfa_zero_side_slack(l, 0.5, 0.0, n).unwrap();
                assert!((r.gap - (r.tail_term - slack)).abs() < 1e-8, "{r:?} slack {slack}");
            }
        }
    }

    #[test]
    fn presets() {
        assert_eq!(preset_n(5, 5f64.powi(4), 0.75), 8);
        assert!(preset_n(5, 10.0, 0.5) >= 1);
    }
}
