//! The conjectured fourth-moment polynomial Q(x), from a fourfold contour
//! integral evaluated by product trapezoid quadrature.
//!
//! With η(s) = s/(1 − q^{−s}) and V(z) = ∏_{i<j}(zⱼ − zᵢ)²(zᵢ + zⱼ),
//!
//!   Q(x) = (1/24)·[z₁⁷z₂⁷z₃⁷z₄⁷] F₀(z)·q^{(x−1)(z₁+…+z₄)/2},
//!   F₀(z) = A(z)·∏ⱼ η(2zⱼ)·∏_{i<j} η(zᵢ + zⱼ)·V(z),
//!
//! which is the usual ∮ G(z)Δ(z²)²∏zⱼ^{−7} q^{xΣz/2} integral with the ζ_q
//! poles cancelled analytically, so F₀ is holomorphic near the origin.
//! Expanding the exponential, Q(x) = (1/24)Σ_m M_m (L/2)^m (x−1)^m/m! with
//! L = log q and M_m = [z⁷⁷⁷⁷] F₀(z)(Σz)^m, m ≤ 10 (V has degree 18, so
//! higher m do not contribute).
//!
//! Every factor except A(z) splits over single nodes or node pairs and is
//! tabulated once; only the ½(∏(1−aⱼ)^{−1} + ∏(1+aⱼ)^{−1}) part of A couples
//! all four variables. V vanishes when two nodes coincide, so only strictly
//! increasing node quadruples are visited (each with weight 4!).

use rug::float::Constant;
use rug::{Assign, Complex, Float};
use serde::Serialize;

use super::{irreducible_count, powu, EulerConfig};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureQ {
    pub q: u32,
    pub cutoff: u32,
    pub prec: u32,
    pub nodes: usize,
    pub radius: f64,
    /// M_m, m = 0..=10.
    pub shifted_moments: Vec<f64>,
    /// Q(x) = Σᵢ x_coeffs[i]·xⁱ.
    pub x_coeffs: Vec<f64>,
    /// Q(2g+1)/ζ_q(2) = Σᵢ g_coeffs[i]·gⁱ; the top three are b₁₀, b₉, b₈.
    pub g_coeffs: Vec<f64>,
}

impl ConjectureQ {
    pub fn eval(&self, x: f64) -> f64 {
        self.x_coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Q(2g+1).
    pub fn at_genus(&self, g: u32) -> f64 {
        let zeta = self.q as f64 / (self.q as f64 - 1.0);
        zeta * self.g_coeffs.iter().rev().fold(0.0, |acc, c| acc * g as f64 + c)
    }
}

/// s/(1 − q^{−s}), with its Taylor series near the removable point s = 0.
fn eta(s: &Complex, lq: &Float) -> Complex {
    let prec = s.prec().0;
    let x = Complex::with_val(prec, s * lq);
    if Float::with_val(prec, x.abs_ref()).to_f64() < 1e-6 {
        // x/(1 − e^{−x}) = Σ B_n^+ xⁿ/n!
        const C: [f64; 11] = [
            1.0,
            0.5,
            1.0 / 12.0,
            0.0,
            -1.0 / 720.0,
            0.0,
            1.0 / 30240.0,
            0.0,
            -1.0 / 1209600.0,
            0.0,
            1.0 / 47900160.0,
        ];
        let mut acc = Complex::new(prec);
        for c in C.iter().rev() {
            acc *= &x;
            acc += Float::with_val(prec, *c);
        }
        return acc / lq;
    }
    let den = Complex::with_val(prec, 1) - Complex::with_val(prec, -&x).exp();
    Complex::with_val(prec, s / &den)
}

struct Degree {
    count: Float,
    /// ⌈log₂ count⌉: how far the count amplifies a truncation error
    count_bits: u32,
    pinv: Float,
}

/// Replaces y by log(1 + y). Small arguments use 2·atanh(y/(2 + y)), whose
/// odd series in w² ≈ y²/4 is far cheaper than a full complex logarithm;
/// terms stop once they fall below 2^{−(prec + extra_bits)}.
fn log1p(y: &mut Complex, scratch: &mut [Complex; 3], extra_bits: u32) {
    let prec = y.prec().0;
    let mag = {
        let (re, im) = (y.real().to_f64(), y.imag().to_f64());
        re.hypot(im)
    };
    if !(mag < 0.0625) {
        *y += 1u32;
        y.ln_mut();
        return;
    }
    if mag == 0.0 {
        return;
    }
    let [w, w2, term] = scratch;
    w.assign(&*y + 2u32);
    w.recip_mut();
    *w *= &*y;
    w2.assign(w.square_ref());
    let w2_mag = (mag / (2.0 - mag)).powi(2);
    let target = -((prec + extra_bits + 2) as f64);
    y.assign(&*w);
    term.assign(&*w);
    let mut k = 1u32;
    let mut lg = (mag / (2.0 - mag)).log2();
    loop {
        *term *= &*w2;
        lg += w2_mag.log2();
        k += 2;
        if lg - (k as f64).log2() < target {
            break;
        }
        *y += Complex::with_val(prec, &*term / k);
    }
    *y <<= 1;
}

pub fn conjecture_q(cfg: &EulerConfig, nodes: usize, radius: f64, workers: usize) -> Result<ConjectureQ> {
    if nodes < 16 {
        return Err(Error::InvalidConfig(format!("need at least 16 quadrature nodes, got {nodes}")));
    }
    if !(radius > 0.0 && radius < 0.25) {
        return Err(Error::InvalidConfig(format!("contour radius {radius} outside (0, 1/4)")));
    }
    let prec = cfg.prec;
    let n = nodes;
    let cx = |re: Float, im: Float| Complex::with_val(prec, (re, im));
    let lq = Float::with_val(prec, cfg.q).ln();
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let r = Float::with_val(prec, radius);

    let mut z: Vec<Complex> = Vec::with_capacity(n);
    for k in 0..n {
        if n % 2 == 0 && k >= n / 2 {
            // exact antipodes
            let m = Complex::with_val(prec, -&z[k - n / 2]);
            z.push(m);
            continue;
        }
        let ang = Float::with_val(prec, &two_pi * k as u32) / n as u32;
        let (s, c) = ang.sin_cos(Float::new(prec));
        z.push(cx(Float::with_val(prec, &r * &c), Float::with_val(prec, &r * &s)));
    }

    let degs: Vec<Degree> = (1..=cfg.cutoff)
        .map(|d| {
            let p = Float::with_val(prec, Float::u_pow_u(cfg.q, d));
            Degree {
                count: Float::with_val(prec, irreducible_count(cfg.q, d)),
                count_bits: 128 - irreducible_count(cfg.q, d).leading_zeros(),
                pinv: Float::with_val(prec, 1u32 / &p),
            }
        })
        .collect();
    let nd = degs.len();

    // t[k][d] = |P|^{−z_k} for deg P = d+1
    let t: Vec<Vec<Complex>> = z
        .iter()
        .map(|zk| {
            let base = Complex::with_val(prec, -Complex::with_val(prec, zk * &lq)).exp();
            let mut v = Vec::with_capacity(nd);
            let mut cur = base.clone();
            for _ in 0..nd {
                v.push(cur.clone());
                cur *= &base;
            }
            v
        })
        .collect();
    let half_inv: Vec<(Vec<Complex>, Vec<Complex>)> = t
        .iter()
        .map(|tk| {
            let mut minus = Vec::with_capacity(nd);
            let mut plus = Vec::with_capacity(nd);
            for (ti, dg) in tk.iter().zip(&degs) {
                let a = Complex::with_val(prec, ti * Float::with_val(prec, dg.pinv.sqrt_ref()));
                minus.push(Complex::with_val(prec, 1u32 / Complex::with_val(prec, 1 - &a)));
                plus.push(Complex::with_val(prec, 1u32 / Complex::with_val(prec, &a + 1u32)));
            }
            (minus, plus)
        })
        .collect();

    // Σ_d π(d)·log(1 − t_k t_l/|P|) for the pair (k, l)
    let pair_log = |k: usize, l: usize| -> Complex {
        let mut acc = Complex::new(prec);
        for (i, dg) in degs.iter().enumerate() {
            let tt = Complex::with_val(prec, &t[k][i] * &t[l][i]) * &dg.pinv;
            let lg = Complex::with_val(prec, 1 - tt).ln();
            acc += lg * &dg.count;
        }
        acc
    };
    let node_tab: Vec<Complex> = (0..n)
        .map(|k| {
            let two_z = Complex::with_val(prec, &z[k] * 2u32);
            let zpow = Complex::with_val(prec, rug::ops::Pow::pow(&z[k], -7i32));
            pair_log(k, k).exp() * eta(&two_z, &lq) * zpow
        })
        .collect();
    let mut pair_tab = vec![Complex::new(prec); n * n];
    for k in 0..n {
        for l in k + 1..n {
            let s = Complex::with_val(prec, &z[k] + &z[l]);
            let dz = Complex::with_val(prec, &z[l] - &z[k]);
            let v = Complex::with_val(prec, dz.square_ref()) * &s * eta(&s, &lq);
            pair_tab[k * n + l] = pair_log(k, l).exp() * v;
        }
    }
    let mut norm_log = Float::new(prec);
    for dg in &degs {
        norm_log -= Float::with_val(prec, Float::with_val(prec, &dg.pinv + 1u32).ln_ref()) * &dg.count;
    }
    let norm = norm_log.exp();

    // outer node k1 → partial sums Σ val·(Σz)^m
    let outer = |k1: usize| -> Vec<Complex> {
        let mut acc = vec![Complex::new(prec); 11];
        let mut m2 = vec![Complex::new(prec); nd];
        let mut p2 = vec![Complex::new(prec); nd];
        let mut m3 = vec![Complex::new(prec); nd];
        let mut p3 = vec![Complex::new(prec); nd];
        let mut mm = Complex::new(prec);
        let mut pp = Complex::new(prec);
        let mut lsum = Complex::new(prec);
        let mut scratch = [Complex::new(prec), Complex::new(prec), Complex::new(prec)];
        for k2 in k1 + 1..n {
            let b2 = Complex::with_val(prec, &node_tab[k1] * &node_tab[k2]) * &pair_tab[k1 * n + k2];
            for i in 0..nd {
                m2[i] = Complex::with_val(prec, &half_inv[k1].0[i] * &half_inv[k2].0[i]);
                p2[i] = Complex::with_val(prec, &half_inv[k1].1[i] * &half_inv[k2].1[i]);
            }
            let s2 = Complex::with_val(prec, &z[k1] + &z[k2]);
            for k3 in k2 + 1..n {
                let b3 = Complex::with_val(prec, &b2 * &node_tab[k3])
                    * &pair_tab[k1 * n + k3]
                    * &pair_tab[k2 * n + k3];
                for i in 0..nd {
                    m3[i] = Complex::with_val(prec, &m2[i] * &half_inv[k3].0[i]);
                    p3[i] = Complex::with_val(prec, &p2[i] * &half_inv[k3].1[i]);
                }
                let s3 = Complex::with_val(prec, &s2 + &z[k3]);
                for k4 in k3 + 1..n {
                    let b4 = Complex::with_val(prec, &b3 * &node_tab[k4])
                        * &pair_tab[k1 * n + k4]
                        * &pair_tab[k2 * n + k4]
                        * &pair_tab[k3 * n + k4];
                    lsum.assign(0);
                    for (i, dg) in degs.iter().enumerate() {
                        mm.assign(&m3[i] * &half_inv[k4].0[i]);
                        pp.assign(&p3[i] * &half_inv[k4].1[i]);
                        mm += &pp;
                        mm >>= 1;
                        mm += &dg.pinv;
                        // mm = 1 + y; high degrees have |y| ≲ q^{−d(1−2r)}
                        mm -= 1u32;
                        log1p(&mut mm, &mut scratch, dg.count_bits);
                        mm *= &dg.count;
                        lsum += &mm;
                    }
                    let val = b4 * Complex::with_val(prec, lsum.exp_ref());
                    let s4 = Complex::with_val(prec, &s3 + &z[k4]);
                    let mut pw = val;
                    for a in acc.iter_mut() {
                        *a += &pw;
                        pw *= &s4;
                    }
                }
            }
        }
        acc
    };

    let workers = workers.max(1).min(n);
    let mut per_node: Vec<Option<Vec<Complex>>> = vec![None; n];
    if workers == 1 {
        for (k1, slot) in per_node.iter_mut().enumerate() {
            *slot = Some(outer(k1));
        }
    } else {
        let results: Vec<Vec<(usize, Vec<Complex>)>> = std::thread::scope(|sc| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let outer = &outer;
                    sc.spawn(move || (w..n).step_by(workers).map(|k1| (k1, outer(k1))).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("quadrature worker panicked")).collect()
        });
        for (k1, v) in results.into_iter().flatten() {
            per_node[k1] = Some(v);
        }
    }
    // fixed reduction order, independent of the worker count
    let mut total = vec![Complex::new(prec); 11];
    for v in per_node.into_iter().flatten() {
        for (t, x) in total.iter_mut().zip(v) {
            *t += x;
        }
    }
    let n4 = powu(&Float::with_val(prec, n as u32), 4);
    let weight = Float::with_val(prec, &norm * 24u32) / n4;
    let moments: Vec<Float> = total
        .iter()
        .map(|c| Float::with_val(prec, c.real() * &weight))
        .collect();

    // Q(x) = Σ_m c_m (x−1)^m, c_m = M_m (L/2)^m / (24 m!)
    let mut fact = Float::with_val(prec, 1);
    let mut cm = Vec::with_capacity(11);
    let mut gm = Vec::with_capacity(11);
    let zeta = cfg.zeta2();
    for (m, mv) in moments.iter().enumerate() {
        if m > 0 {
            fact *= m as u32;
        }
        let lm = Float::with_val(prec, powu(&lq, m as u32));
        let base = Float::with_val(prec, mv * &lm) / &fact / 24u32;
        gm.push(Float::with_val(prec, &base / &zeta).to_f64());
        cm.push(base >> m as u32);
    }
    let mut xc = vec![Float::new(prec); 11];
    for (m, c) in cm.iter().enumerate() {
        // (x − 1)^m = Σ_i C(m,i) x^i (−1)^{m−i}
        let mut binom = Float::with_val(prec, 1);
        for i in 0..=m {
            if i > 0 {
                binom = binom * (m - i + 1) as u32 / i as u32;
            }
            let term = Float::with_val(prec, c * &binom);
            if (m - i) % 2 == 0 {
                xc[i] += term;
            } else {
                xc[i] -= term;
            }
        }
    }
    Ok(ConjectureQ {
        q: cfg.q,
        cutoff: cfg.cutoff,
        prec,
        nodes,
        radius,
        shifted_moments: moments.iter().map(|m| m.to_f64()).collect(),
        x_coeffs: xc.iter().map(|c| c.to_f64()).collect(),
        g_coeffs: gm,
    })
}

/// Runs the quadrature at `nodes` and `2·nodes`; returns the finer result and
/// the largest relative change of the b₁₀, b₉, b₈ coefficients, or an error
/// carrying both estimates when that change exceeds `tol`.
pub fn conjecture_q_converged(
    cfg: &EulerConfig,
    nodes: usize,
    radius: f64,
    workers: usize,
    tol: f64,
) -> Result<(ConjectureQ, f64)> {
    let coarse = conjecture_q(cfg, nodes, radius, workers)?;
    let fine = conjecture_q(cfg, 2 * nodes, radius, workers)?;
    let delta = (8..=10)
        .map(|i| ((fine.g_coeffs[i] - coarse.g_coeffs[i]) / fine.g_coeffs[i]).abs())
        .fold(0.0, f64::max);
    if !(delta <= tol) {
        return Err(Error::Numerical(format!(
            "quadrature not converged (relative change {delta:.2e} > {tol:.0e}): {} nodes give {:?}, {} nodes give {:?}",
            nodes,
            &coarse.g_coeffs[8..],
            2 * nodes,
            &fine.g_coeffs[8..]
        )));
    }
    Ok((fine, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerprod::coefficients;

    #[test]
    fn eta_is_smooth_through_zero() {
        let prec = 192;
        let lq = Float::with_val(prec, 5).ln();
        let near = eta(&Complex::with_val(prec, (1e-7, 2e-7)), &lq);
        let at = eta(&Complex::new(prec), &lq);
        let direct = eta(&Complex::with_val(prec, (1e-3, 0)), &lq);
        assert!((at.real().to_f64() - 1.0 / lq.to_f64()).abs() < 1e-15);
        assert!((near.real().to_f64() - 1.0 / lq.to_f64()).abs() < 1e-6);
        // series and closed form agree across the switch
        let series_at = |x: f64| 1.0 / lq.to_f64() * (1.0 + x * lq.to_f64() / 2.0 + (x * lq.to_f64()).powi(2) / 12.0);
        assert!((direct.real().to_f64() - series_at(1e-3)).abs() < 1e-12);
    }

    #[test]
    fn leading_coefficients_match_prime_sum_route() {
        let cfg = EulerConfig::new(5, 20, 192).unwrap();
        let q = conjecture_q(&cfg, 16, 0.05, 1).unwrap();
        let cs = coefficients(&cfg).unwrap();
        for (i, b) in [(10, &cs.b10), (9, &cs.b9), (8, &cs.b8)] {
            let rel = (q.g_coeffs[i] - b.to_f64()).abs() / b.to_f64().abs();
            assert!(rel < 1e-6, "g^{i}: {} vs {}", q.g_coeffs[i], b.to_f64());
        }
        // x- and g-forms describe the same polynomial
        for g in 1..4u32 {
            let a = q.at_genus(g);
            let b = q.eval(2.0 * g as f64 + 1.0);
            assert!((a - b).abs() < 1e-9 * a.abs());
        }
    }
}
