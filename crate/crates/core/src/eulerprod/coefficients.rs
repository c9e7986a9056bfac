//! Main-term coefficients of the fourth moment, assembled two ways: from the
//! jets of ℋ and 𝒞, and from the closed constant A with the prime sums.

use std::collections::BTreeMap;

use rug::Float;
use serde::Serialize;

use super::{a_shift_jet, closed_a, compute_c_jet, compute_h_jet, prime_sums, EulerConfig, PrimeSums, Tracked};
use crate::error::{Error, Result};

const FACT10: u32 = 3_628_800;

/// Largest relative tail tolerated on an assembled coefficient.
pub const COEFF_TAIL_LIMIT: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs|, divided by |rhs| when `relative`.
    pub error: f64,
    pub relative: bool,
    pub tolerance: f64,
    /// Informational checks (alternative readings of a formula) do not count
    /// towards [`CoefficientSet::all_pass`].
    pub asserted: bool,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: &str, lhs: &Float, rhs: &Float, relative: bool, tolerance: f64, asserted: bool) -> Self {
        let mut err = Float::with_val(lhs.prec(), lhs - rhs).abs().to_f64();
        if relative {
            err /= rhs.to_f64().abs();
        }
        IdentityCheck {
            name: name.to_string(),
            lhs: lhs.to_f64(),
            rhs: rhs.to_f64(),
            error: err,
            relative,
            tolerance,
            asserted,
            pass: err <= tolerance,
        }
    }
}

/// 𝒞(x, w) and its partials at (1, 1/q).
#[derive(Clone, Debug)]
pub struct CPartials {
    pub value: Tracked,
    pub x: Tracked,
    pub w: Tracked,
    pub xx: Tracked,
    pub xw: Tracked,
    pub ww: Tracked,
}

#[derive(Clone, Debug)]
pub struct CoefficientSet {
    pub config: EulerConfig,
    pub zeta2: Float,
    pub a10: Tracked,
    pub a9: Tracked,
    pub a8: Tracked,
    pub b10: Tracked,
    pub b9: Tracked,
    pub b8: Tracked,
    /// The closed-form product A.
    pub closed_a: Tracked,
    pub sums: PrimeSums,
    /// ℋ(1/q), ℋ′(1/q), ℋ″(1/q) with ℋ(w) = ℋ(w, 1/q²).
    pub h: [Tracked; 3],
    pub c: CPartials,
    /// ∂A/∂z₁ and ∂²A/∂z₁∂z₂ at z = 0.
    pub a_shift: [Tracked; 2],
    pub checks: Vec<IdentityCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantEntry {
    pub value: String,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientReport {
    pub q: u32,
    pub cutoff: u32,
    pub precision: u32,
    pub constants: BTreeMap<String, ConstantEntry>,
    pub checks: Vec<IdentityCheck>,
    pub all_pass: bool,
}

fn digits(v: &Float) -> String {
    format!("{v:.40}")
}

impl CoefficientSet {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn report(&self) -> CoefficientReport {
        let mut constants = BTreeMap::new();
        let mut put = |name: &str, t: &Tracked| {
            constants.insert(
                name.to_string(),
                ConstantEntry {
                    value: digits(&t.value),
                    tail_bound: t.tail_bound,
                },
            );
        };
        for (n, t) in [
            ("a10", &self.a10),
            ("a9", &self.a9),
            ("a8", &self.a8),
            ("b10", &self.b10),
            ("b9", &self.b9),
            ("b8", &self.b8),
            ("A", &self.closed_a),
            ("a", &self.sums.a),
            ("h", &self.sums.h),
            ("b", &self.sums.b),
            ("e", &self.sums.e),
            ("r", &self.sums.r),
            ("f", &self.sums.f),
            ("H", &self.h[0]),
            ("H'", &self.h[1]),
            ("H''", &self.h[2]),
            ("C", &self.c.value),
            ("C_x", &self.c.x),
            ("C_w", &self.c.w),
            ("C_xx", &self.c.xx),
            ("C_xw", &self.c.xw),
            ("C_ww", &self.c.ww),
        ] {
            put(n, t);
        }
        CoefficientReport {
            q: self.config.q,
            cutoff: self.config.cutoff,
            precision: self.config.prec,
            constants,
            checks: self.checks.clone(),
            all_pass: self.all_pass(),
        }
    }
}

pub fn coefficients(cfg: &EulerConfig) -> Result<CoefficientSet> {
    let prec = cfg.prec;
    let fl = |v: f64| Float::with_val(prec, v);
    let qf = Float::with_val(prec, cfg.q);
    let qm1 = Float::with_val(prec, cfg.q - 1);
    let w0 = cfg.q_inv_pow(1);
    let one = Float::with_val(prec, 1);
    let zeta = Float::with_val(prec, cfg.zeta2());
    let lq = Float::with_val(prec, qf.ln_ref());
    let f10 = Float::with_val(prec, FACT10);
    let f10x6 = Float::with_val(prec, FACT10 * 6);

    let a = closed_a(cfg)?.tracked();
    let hj = compute_h_jet(cfg, &w0, &cfg.q_inv_pow(2))?;
    let (h0, h1, h2) = (hj.value(), hj.dx(), hj.dxx());
    let cj = compute_c_jet(cfg, &one, &w0)?;
    let c = CPartials {
        value: cj.value(),
        x: cj.dx(),
        w: cj.dy(),
        xx: cj.dxx(),
        xw: cj.dxy(),
        ww: cj.dyy(),
    };
    let s = prime_sums(cfg);
    let az = a_shift_jet(cfg)?;
    let (a1, a12) = (az.dx(), az.dxy());

    // the ℋ- and 𝒞-jet route
    let hq1 = h1.div(&qf);
    let hq2 = h2.div(&Float::with_val(prec, &qf * &qf));
    let cwq = c.w.div(&qf);
    let lin = |terms: &[(f64, &Tracked)]| -> Tracked {
        let mut acc = Tracked::exact(Float::new(prec));
        for (k, t) in terms {
            acc = &acc + &t.scale_f(*k);
        }
        acc
    };
    let zc = c.value.scale(&zeta);
    let zcx = c.x.scale(&zeta);
    let a10 = (&lin(&[(2048.0, &h0)]).div(&f10) - &lin(&[(7680.0, &c.value)]).div(&f10x6)).div(&zeta);
    let a9 = (&lin(&[(51200.0, &h0), (-10240.0, &hq1)]).div(&f10)
        - &lin(&[(-24000.0, &zc), (216000.0, &c.value), (-13200.0, &cwq), (-24000.0, &c.x)]).div(&f10x6))
        .div(&zeta);
    let cw_qm1 = c.w.div(&qm1);
    let cwwq2 = c.ww.div(&Float::with_val(prec, &qf * &qf));
    let cxwq = c.xw.div(&qf);
    let a8 = (&lin(&[(560640.0, &h0), (-207360.0, &hq1), (23040.0, &hq2)]).div(&f10)
        - &lin(&[
            (-531360.0, &zc),
            (2616480.0, &c.value),
            (-347760.0, &cwq),
            (58320.0, &cw_qm1),
            (-17280.0, &zcx),
            (-531360.0, &c.x),
            (7560.0, &cwwq2),
            (58320.0, &cxwq),
            (-8640.0, &c.xx),
        ])
        .div(&f10x6))
        .div(&zeta);

    // the A / prime-sum route
    let aa = &s.a * &a;
    let a2h = &(&s.a * &s.a) + &s.h;
    let aa2h = &a2h * &a;
    let b10 = a.div(&Float::with_val(prec, &zeta * 4725u32));
    let b9 = lin(&[(10.0, &a), (4.0, &aa)]).div(&Float::with_val(prec, &zeta * 1890u32));
    let b8 = lin(&[(74.0, &a), (60.0, &aa), (12.0, &aa2h)]).div(&Float::with_val(prec, &zeta * 1260u32));

    for (name, t) in [("a10", &a10), ("a9", &a9), ("a8", &a8), ("b10", &b10), ("b9", &b9), ("b8", &b8)] {
        if t.rel_tail() > COEFF_TAIL_LIMIT {
            return Err(Error::InvalidConfig(format!(
                "tail bound on {name} is {:.1e} relative (limit {COEFF_TAIL_LIMIT:.0e}); raise the cutoff degree above {}",
                t.rel_tail(),
                cfg.cutoff
            )));
        }
    }

    // identities; each side from an independent route
    let v = |t: &Tracked| t.value.clone();
    let inv_qm1 = Float::with_val(prec, 1u32 / &qm1);
    let av = v(&s.a);
    let apz = Float::with_val(prec, &av + &inv_qm1);
    let mut checks = Vec::new();
    let mut chk = |name: &str, lhs: Float, rhs: Float, rel: bool, tol: f64, asserted: bool| {
        checks.push(IdentityCheck::new(name, &lhs, &rhs, rel, tol, asserted));
    };
    let av_a = Float::with_val(prec, &av * &a.value);
    chk("H(1/q) = A", v(&h0), v(&a), false, 1e-12, true);
    chk("C(1,1/q) = A", v(&c.value), v(&a), false, 1e-12, true);
    chk("H'(1/q) = -2qaA", v(&h1), Float::with_val(prec, &av_a * &qf) * -2i32, true, 1e-8, true);
    let rhs_h2 = Float::with_val(prec, &qf * &qf) * &a.value * (Float::with_val(prec, &av * &av) * 4u32 + &av * fl(2.0) - v(&s.b) * 2u32);
    chk("H''(1/q) = q^2 A (4a^2 + 2a - 2b)", v(&h2), rhs_h2, true, 1e-8, true);
    let rhs_cw = Float::with_val(prec, &av_a * &qf) * -4i32;
    chk("C_w(1,1/q) = -4qaA", v(&c.w), rhs_cw.clone(), true, 1e-8, true);
    chk("C_w(1,1/q)/q = -4qaA (as printed)", v(&cwq), rhs_cw, true, 1e-8, false);
    chk("C_x(1,1/q) = A(-a - 1/(q-1))", v(&c.x), -Float::with_val(prec, &a.value * &apz), true, 1e-8, true);
    let rhs_cww = Float::with_val(prec, &qf * &qf)
        * &a.value
        * (Float::with_val(prec, &av * &av) * 16u32 - (v(&s.e) - &av) * 4u32);
    chk("C_ww(1,1/q) = q^2 A (16a^2 - 4(e - a))", v(&c.ww), rhs_cww, true, 1e-8, true);
    let rhs_cxx = Float::with_val(prec, &a.value * (Float::with_val(prec, &apz * &apz) - (v(&s.r) - &apz)));
    chk("C_xx(1,1/q) = A((a + 1/(q-1))^2 - (r - a - 1/(q-1)))", v(&c.xx), rhs_cxx, true, 1e-8, true);
    let rhs_cxw = Float::with_val(prec, &qf * &a.value) * (Float::with_val(prec, &av * &apz) * 4u32 - v(&s.f) * 4u32);
    chk("C_xw(1,1/q) = qA(4a(a + 1/(q-1)) - 4f)", v(&c.xw), rhs_cxw, true, 1e-8, true);
    chk("A_1(0) = aA log q", v(&a1), Float::with_val(prec, &av_a * &lq), true, 1e-8, true);
    chk(
        "A_12(0) = A(a^2 + h) log^2 q",
        v(&a12),
        Float::with_val(prec, &aa2h.value * &lq) * &lq,
        true,
        1e-8,
        true,
    );
    chk("sum d/(|P|^2-1) = 1/(q-1)", v(&s.zeta_id1), inv_qm1.clone(), false, 1e-12, true);
    let q_qm1sq = Float::with_val(prec, &qf / Float::with_val(prec, &qm1 * &qm1));
    chk("sum d^2|P|^2/(|P|^2-1)^2 = q/(q-1)^2", v(&s.zeta_id2), q_qm1sq.clone(), false, 1e-12, true);
    let combo = v(&s.e) * fl(3.5) + v(&s.f) * 27u32 - v(&s.r) - v(&s.h) * 24u32 - v(&s.b) * 32u32;
    chk("7e/2 + 27f - r - 24h - 32b = q/(q-1)^2", combo, q_qm1sq, false, 1e-10, true);
    chk("a10 = b10", v(&a10), v(&b10), true, 1e-8, true);
    chk("a9 = b9", v(&a9), v(&b9), true, 1e-8, true);
    chk("a8 = b8", v(&a8), v(&b8), true, 1e-8, true);
    // the same b-coefficients through derivatives of A(z) itself
    let b9_jet = (&a.scale_f(10.0) + &a1.div(&lq).scale_f(4.0)).div(&Float::with_val(prec, &zeta * 1890u32));
    let a12l = a12.div(&Float::with_val(prec, &lq * &lq));
    let b8_jet = lin(&[(74.0, &a), (15.0 * 4.0, &a1.div(&lq)), (2.0 * 6.0, &a12l)])
        .div(&Float::with_val(prec, &zeta * 1260u32));
    chk("b9 from A(z) jets = b9", v(&b9_jet), v(&b9), true, 1e-8, true);
    chk("b8 from A(z) jets = b8", v(&b8_jet), v(&b8), true, 1e-8, true);
    // a9 with the derivative term's coefficient read as the printed 1
    let a9_printed = (&lin(&[(51200.0, &h0), (-1.0, &hq1)]).div(&f10)
        - &lin(&[(-24000.0, &zc), (216000.0, &c.value), (-13200.0, &cwq), (-24000.0, &c.x)]).div(&f10x6))
        .div(&zeta);
    chk("a9 with coefficient 1 on H'/q (as printed) = b9", v(&a9_printed), v(&b9), true, 1e-8, false);

    Ok(CoefficientSet {
        config: *cfg,
        zeta2: zeta,
        a10,
        a9,
        a8,
        b10,
        b9,
        b8,
        closed_a: a,
        sums: s,
        h: [h0, h1, h2],
        c,
        a_shift: [a1, a12],
        checks,
    })
}

/// The residue-side polynomials: M(V=0) ∝ Σ_i (2g)^{10−i} Q_i(α) and
/// M(V=□) ∝ −Σ_i g^{10−i} R_i(α), plus the constants c₉, c₈, f₉, f₈ of the
/// lower-order correction. Derivatives of ℋ enter as ℋ^{(k)}/q^k.
#[derive(Clone, Debug)]
pub struct QrPolynomials {
    pub alpha: f64,
    pub q0: Float,
    pub q1: Float,
    pub q2: Float,
    pub r0: Float,
    pub r1: Float,
    pub r2: Float,
    pub c9: Float,
    pub c8: Float,
    pub f9: Float,
    pub f8: Float,
    /// Coefficient of α²g⁸ in M(V=0) + M(V=□), times 10!ζ_q(2); vanishes
    /// because ℋ(1/q) = 𝒞(1,1/q).
    pub alpha_sq_g8: Float,
    /// Coefficient of αg⁹ in M(V=0) plus the correction term, times 10!ζ_q(2).
    pub alpha_g9_plain: Float,
    /// Same for the square part.
    pub alpha_g9_square: Float,
}

#[derive(Clone, Debug, Serialize)]
pub struct QrReport {
    pub alpha: f64,
    pub values: BTreeMap<String, f64>,
}

impl QrPolynomials {
    pub fn report(&self) -> QrReport {
        let mut values = BTreeMap::new();
        for (n, v) in [
            ("Q0", &self.q0),
            ("Q1", &self.q1),
            ("Q2", &self.q2),
            ("R0", &self.r0),
            ("R1", &self.r1),
            ("R2", &self.r2),
            ("c9", &self.c9),
            ("c8", &self.c8),
            ("f9", &self.f9),
            ("f8", &self.f8),
            ("alpha_sq_g8", &self.alpha_sq_g8),
            ("alpha_g9_plain", &self.alpha_g9_plain),
            ("alpha_g9_square", &self.alpha_g9_square),
        ] {
            values.insert(n.to_string(), v.to_f64());
        }
        QrReport {
            alpha: self.alpha,
            values,
        }
    }
}

pub fn qr_polynomials(cs: &CoefficientSet, alpha: f64) -> QrPolynomials {
    let prec = cs.config.prec;
    let q = Float::with_val(prec, cs.config.q);
    let z = cs.zeta2.clone();
    let al = Float::with_val(prec, alpha);
    let f = |x: f64| Float::with_val(prec, x);
    let h = cs.h[0].value.clone();
    let h1 = Float::with_val(prec, &cs.h[1].value / &q);
    let h2 = Float::with_val(prec, &cs.h[2].value / Float::with_val(prec, &q * &q));
    let c = cs.c.value.value.clone();
    let cx = cs.c.x.value.clone();
    let cw = Float::with_val(prec, &cs.c.w.value / &q);
    let cww = Float::with_val(prec, &cs.c.ww.value / Float::with_val(prec, &q * &q));
    let cxw = Float::with_val(prec, &cs.c.xw.value / &q);
    let cxx = cs.c.xx.value.clone();
    let zc = Float::with_val(prec, &z * &c);
    let zcx = Float::with_val(prec, &z * &cx);
    let zcw = Float::with_val(prec, &z * &cw);
    let al2 = Float::with_val(prec, &al * &al);

    let q0 = h.clone();
    let q1 = Float::with_val(prec, &h * (f(55.0) - &al * f(5.0))) - Float::with_val(prec, &h1 * 10u32);
    let q2 = Float::with_val(prec, &h * &al2) * f(45.0 / 4.0)
        + Float::with_val(prec, &al * (Float::with_val(prec, &h * f(-495.0 / 2.0)) + Float::with_val(prec, &h1 * 45u32)))
        + Float::with_val(prec, &h * 1320u32)
        - Float::with_val(prec, &h1 * 450u32)
        + Float::with_val(prec, &h2 * 45u32);
    let r0 = Float::with_val(prec, &c * 640u32);
    let r1 = Float::with_val(prec, &c * &al) * f(-2100.0) - Float::with_val(prec, &zc * 2000u32)
        + Float::with_val(prec, &c * 20100u32)
        - Float::with_val(prec, &cw * 1100u32)
        - Float::with_val(prec, &cx * 2000u32);
    let r2_alpha = Float::with_val(prec, &zc * 4140u32) - Float::with_val(prec, &c * 57150u32)
        + Float::with_val(prec, &cw * 3690u32)
        + Float::with_val(prec, &cx * 4140u32);
    let r2 = Float::with_val(prec, &c * &al2) * 2880u32 + Float::with_val(prec, &al * &r2_alpha)
        - Float::with_val(prec, &zc * 48420u32)
        + Float::with_val(prec, &c * 269430u32)
        - Float::with_val(prec, &cw * 32670u32)
        + Float::with_val(prec, &zcw * 4860u32)
        + Float::with_val(prec, &cww * 630u32)
        - Float::with_val(prec, &zcx * 1440u32)
        - Float::with_val(prec, &cx * 48420u32)
        + Float::with_val(prec, &cxw * 4860u32)
        - Float::with_val(prec, &cxx * 720u32);
    let c9 = h.clone();
    let c8 = Float::with_val(prec, &h * 45u32) - Float::with_val(prec, &h1 * 9u32);
    let f9 = Float::with_val(prec, &c * -420i32);
    let f8 = Float::with_val(prec, &zc * 828u32) - Float::with_val(prec, &c * 10278u32)
        + Float::with_val(prec, &cw * 738u32)
        + Float::with_val(prec, &cx * 828u32);

    // (2g)^8·(45/4)α²ℋ against g^8·2880α²𝒞
    let alpha_sq_g8 = Float::with_val(prec, &h * 2880u32) - Float::with_val(prec, &c * 2880u32);
    // αg⁹: 2^9·(−5ℋ) from M, and 10·(1/2)·2^9·c₉ from the correction
    let alpha_g9_plain = Float::with_val(prec, &h * -2560i32) + Float::with_val(prec, &c9 * 2560u32);
    // −(−2100𝒞) from M(V=□), and 10·(1/2)·f₉ from the correction
    let alpha_g9_square = Float::with_val(prec, &c * 2100u32) + Float::with_val(prec, &f9 * 5u32);

    QrPolynomials {
        alpha,
        q0,
        q1,
        q2,
        r0,
        r1,
        r2,
        c9,
        c8,
        f9,
        f8,
        alpha_sq_g8,
        alpha_g9_plain,
        alpha_g9_square,
    }
}

/// a₁₀, a₉, a₈ rebuilt from the residue polynomials: the two sums of the
/// approximate functional equation enter at α = 0 and α = 2, so
/// a_{10−i} = [2^{10−i}(Q_i(0) + Q_i(2)) − (R_i(0) + R_i(2))] / (10!·ζ_q(2)).
pub fn theorem_coefficients_from_qr(cs: &CoefficientSet) -> [Float; 3] {
    let prec = cs.config.prec;
    let p0 = qr_polynomials(cs, 0.0);
    let p2 = qr_polynomials(cs, 2.0);
    let den = Float::with_val(prec, &cs.zeta2 * FACT10);
    let one = |qa: &Float, qb: &Float, ra: &Float, rb: &Float, pow2: u32| {
        let qs = Float::with_val(prec, qa + qb) * (1u32 << pow2);
        let rs = Float::with_val(prec, ra + rb);
        Float::with_val(prec, (qs - rs) / &den)
    };
    [
        one(&p0.q0, &p2.q0, &p0.r0, &p2.r0, 10),
        one(&p0.q1, &p2.q1, &p0.r1, &p2.r1, 9),
        one(&p0.q2, &p2.q2, &p0.r2, &p2.r2, 8),
    ]
}
