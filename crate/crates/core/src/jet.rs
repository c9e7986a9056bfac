//! Second-order truncated Taylor arithmetic in two variables over
//! arbitrary-precision floats.
//!
//! A [`Jet2`] at (x₀, y₀) stores the coefficients of
//! `c0 + c1·s + c2·t + c3·s² + c4·s·t + c5·t²` with s = x − x₀, t = y − y₀.
//! Products drop everything of total degree above two, so a chain of
//! operations carries exact first and second partial derivatives.

use rug::Float;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub c: [Float; 6],
}

fn zero(prec: u32) -> Float {
    Float::new(prec)
}

impl Jet2 {
    pub fn constant(v: Float) -> Self {
        let p = v.prec();
        Jet2 {
            c: [v, zero(p), zero(p), zero(p), zero(p), zero(p)],
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        Self::constant(Float::with_val(prec, v))
    }

    /// The coordinate function x at x₀.
    pub fn var_x(x0: Float) -> Self {
        let p = x0.prec();
        let mut j = Self::constant(x0);
        j.c[1] = Float::with_val(p, 1);
        j
    }

    /// The coordinate function y at y₀.
    pub fn var_y(y0: Float) -> Self {
        let p = y0.prec();
        let mut j = Self::constant(y0);
        j.c[2] = Float::with_val(p, 1);
        j
    }

    pub fn prec(&self) -> u32 {
        self.c[0].prec()
    }

    pub fn value(&self) -> &Float {
        &self.c[0]
    }

    pub fn dx(&self) -> Float {
        self.c[1].clone()
    }
    pub fn dy(&self) -> Float {
        self.c[2].clone()
    }
    pub fn dxx(&self) -> Float {
        Float::with_val(self.prec(), &self.c[3] * 2u32)
    }
    pub fn dxy(&self) -> Float {
        self.c[4].clone()
    }
    pub fn dyy(&self) -> Float {
        Float::with_val(self.prec(), &self.c[5] * 2u32)
    }

    /// g∘f for a univariate g given g(f₀), g′(f₀), g″(f₀).
    pub fn compose(&self, g0: Float, g1: &Float, g2: &Float) -> Jet2 {
        let p = self.prec();
        let c = &self.c;
        let half_g2 = Float::with_val(p, g2 / 2u32);
        let lin = |k: usize| Float::with_val(p, g1 * &c[k]);
        let c1 = lin(1);
        let c2 = lin(2);
        let c3 = Float::with_val(p, g1 * &c[3]) + Float::with_val(p, &half_g2 * &c[1]) * &c[1];
        let c4 = Float::with_val(p, g1 * &c[4]) + Float::with_val(p, g2 * &c[1]) * &c[2];
        let c5 = Float::with_val(p, g1 * &c[5]) + Float::with_val(p, &half_g2 * &c[2]) * &c[2];
        Jet2 {
            c: [g0, c1, c2, c3, c4, c5],
        }
    }

    pub fn recip(&self) -> Jet2 {
        let p = self.prec();
        let r = Float::with_val(p, 1u32 / &self.c[0]);
        let r2 = Float::with_val(p, &r * &r);
        let g1 = Float::with_val(p, -&r2);
        let g2 = Float::with_val(p, &r2 * &r) * 2u32;
        self.compose(r, &g1, &g2)
    }

    /// Natural logarithm; the constant term must be positive.
    pub fn ln(&self) -> Jet2 {
        let p = self.prec();
        let g0 = Float::with_val(p, self.c[0].ln_ref());
        let g1 = Float::with_val(p, 1u32 / &self.c[0]);
        let g2 = Float::with_val(p, -Float::with_val(p, &g1 * &g1));
        self.compose(g0, &g1, &g2)
    }

    pub fn exp(&self) -> Jet2 {
        let p = self.prec();
        let e = Float::with_val(p, self.c[0].exp_ref());
        let e1 = e.clone();
        self.compose(e, &e1.clone(), &e1)
    }

    /// Integer power by repeated squaring (well defined at a zero constant
    /// term for n ≥ 0).
    pub fn powi(&self, n: i32) -> Jet2 {
        let p = self.prec();
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet2::from_f64(1.0, p);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, k: &Float) -> Jet2 {
        let p = self.prec();
        Jet2 {
            c: std::array::from_fn(|i| Float::with_val(p, &self.c[i] * k)),
        }
    }

    pub fn add_scalar(&self, k: &Float) -> Jet2 {
        let mut j = self.clone();
        j.c[0] += k;
        j
    }

    /// Round every coefficient to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Jet2 {
        Jet2 {
            c: std::array::from_fn(|i| Float::with_val(prec, &self.c[i])),
        }
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        let p = self.prec();
        Jet2 {
            c: std::array::from_fn(|i| Float::with_val(p, &self.c[i] + &o.c[i])),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        let p = self.prec();
        Jet2 {
            c: std::array::from_fn(|i| Float::with_val(p, &self.c[i] - &o.c[i])),
        }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            c: std::array::from_fn(|i| Float::with_val(self.prec(), -&self.c[i])),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        let p = self.prec();
        let (a, b) = (&self.c, &o.c);
        let m = |i: usize, j: usize| Float::with_val(p, &a[i] * &b[j]);
        let c0 = m(0, 0);
        let c1 = m(0, 1) + m(1, 0);
        let c2 = m(0, 2) + m(2, 0);
        let c3 = m(0, 3) + m(3, 0) + m(1, 1);
        let c4 = m(0, 4) + m(4, 0) + m(1, 2) + m(2, 1);
        let c5 = m(0, 5) + m(5, 0) + m(2, 2);
        Jet2 {
            c: [c0, c1, c2, c3, c4, c5],
        }
    }
}

impl Div for &Jet2 {
    type Output = Jet2;
    fn div(self, o: &Jet2) -> Jet2 {
        self * &o.recip()
    }
}

impl Mul<&Float> for &Jet2 {
    type Output = Jet2;
    fn mul(self, k: &Float) -> Jet2 {
        self.scale(k)
    }
}

impl Mul<f64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, k: f64) -> Jet2 {
        self.scale(&Float::with_val(self.prec(), k))
    }
}

impl Add<f64> for &Jet2 {
    type Output = Jet2;
    fn add(self, k: f64) -> Jet2 {
        self.add_scalar(&Float::with_val(self.prec(), k))
    }
}

/// k − f
impl Sub<&Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, f: &Jet2) -> Jet2 {
        (-f).add_scalar(&Float::with_val(f.prec(), self))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet2 {
            type Output = Jet2;
            fn $m(self, o: Jet2) -> Jet2 {
                (&self).$m(&o)
            }
        }
        impl $tr<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, o: &Jet2) -> Jet2 {
                (&self).$m(o)
            }
        }
        impl $tr<Jet2> for &Jet2 {
            type Output = Jet2;
            fn $m(self, o: Jet2) -> Jet2 {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Mul<&Float> for Jet2 {
    type Output = Jet2;
    fn mul(self, k: &Float) -> Jet2 {
        self.scale(k)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, k: f64) -> Jet2 {
        &self * k
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, k: f64) -> Jet2 {
        &self + k
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, f: Jet2) -> Jet2 {
        self - &f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn f(v: f64) -> Float {
        Float::with_val(P, v)
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn product_of_coordinates() {
        // x·y at (2, 3): value 6, ∂x = 3, ∂y = 2, ∂xy = 1
        let j = &Jet2::var_x(f(2.0)) * &Jet2::var_y(f(3.0));
        assert_eq!(j.value().to_f64(), 6.0);
        assert_eq!(j.dx().to_f64(), 3.0);
        assert_eq!(j.dy().to_f64(), 2.0);
        assert_eq!(j.dxy().to_f64(), 1.0);
        assert_eq!(j.dxx().to_f64(), 0.0);
    }

    #[test]
    fn elementary_functions() {
        let x = Jet2::var_x(f(0.7));
        let e = x.exp();
        assert!(close(&e.dxx(), 0.7f64.exp(), 1e-30));
        let l = x.ln();
        assert!(close(&l.dx(), 1.0 / 0.7, 1e-30));
        assert!(close(&l.dxx(), -1.0 / 0.49, 1e-15));
        let c = x.powi(5);
        assert!(close(&c.dxx(), 20.0 * 0.7f64.powi(3), 1e-15));
        let r = x.recip();
        assert!(close(&r.dxx(), 2.0 / 0.343, 1e-14));
    }

    #[test]
    fn mixed_partial_of_composite() {
        // h(x,y) = exp(x·y²) at (0.3, 0.5): h_xy = e^{xy²}(2y + 2x y³)
        let (x0, y0) = (0.3f64, 0.5f64);
        let x = Jet2::var_x(f(x0));
        let y = Jet2::var_y(f(y0));
        let h = (&x * &(&y * &y)).exp();
        let e = (x0 * y0 * y0).exp();
        assert!(close(h.value(), e, 1e-30));
        assert!(close(&h.dxy(), e * (2.0 * y0 + 2.0 * x0 * y0.powi(3)), 1e-15));
        assert!(close(&h.dyy(), e * (2.0 * x0 + 4.0 * x0 * x0 * y0 * y0), 1e-15));
    }

    fn arb_jet() -> impl Strategy<Value = Jet2> {
        prop::array::uniform6(-2.0f64..2.0).prop_map(|a| {
            let mut j = Jet2::from_f64(a[0] + 3.0, P);
            for i in 1..6 {
                j.c[i] = f(a[i]);
            }
            j
        })
    }

    fn jet_close(a: &Jet2, b: &Jet2, tol: f64) -> bool {
        (0..6).all(|i| {
            let d = Float::with_val(P, &a.c[i] - &b.c[i]).to_f64().abs();
            d <= tol * (1.0 + a.c[i].to_f64().abs())
        })
    }

    proptest! {
        #[test]
        fn ring_laws_and_inverses(a in arb_jet(), b in arb_jet(), c in arb_jet()) {
            prop_assert!(jet_close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-30));
            prop_assert!(jet_close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-30));
            let one = Jet2::from_f64(1.0, P);
            prop_assert!(jet_close(&(&a * &a.recip()), &one, 1e-30));
            prop_assert!(jet_close(&a.ln().exp(), &a, 1e-30));
            prop_assert!(jet_close(&a.powi(3), &(&a * &(&a * &a)), 1e-30));
        }

        #[test]
        fn leibniz_rule(a in arb_jet(), b in arb_jet()) {
            // second-order Leibniz: (ab)_xy = a_xy b + a_x b_y + a_y b_x + a b_xy
            let p = &a * &b;
            let lhs = p.dxy();
            let rhs = a.dxy() * b.value() + a.dx() * b.dy() + a.dy() * b.dx() + b.dxy() * a.value();
            prop_assert!(Float::with_val(P, &lhs - &rhs).to_f64().abs() < 1e-30);
            let lxx = p.dxx();
            let rxx = a.dxx() * b.value() + Float::with_val(P, a.dx() * b.dx()) * 2u32 + b.dxx() * a.value();
            prop_assert!(Float::with_val(P, &lxx - &rxx).to_f64().abs() < 1e-30);
        }
    }
}
