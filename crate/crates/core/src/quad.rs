//! Exact arithmetic in ℚ(√q).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// a + b√q with rational a, b.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "QaRepr", try_from = "QaRepr")]
pub struct QuadraticAlgebraic {
    pub q: u32,
    pub a: BigRational,
    pub b: BigRational,
}

/// Serialized form: canonical fraction strings, never floats.
#[derive(Serialize, Deserialize)]
struct QaRepr {
    q: u32,
    a: String,
    b: String,
}

impl From<QuadraticAlgebraic> for QaRepr {
    fn from(v: QuadraticAlgebraic) -> Self {
        QaRepr {
            q: v.q,
            a: v.a.to_string(),
            b: v.b.to_string(),
        }
    }
}

impl TryFrom<QaRepr> for QuadraticAlgebraic {
    type Error = String;
    fn try_from(r: QaRepr) -> std::result::Result<Self, String> {
        let parse = |s: &str| s.parse::<BigRational>().map_err(|e| format!("bad fraction {s:?}: {e}"));
        Ok(QuadraticAlgebraic::new(r.q, parse(&r.a)?, parse(&r.b)?))
    }
}

impl QuadraticAlgebraic {
    pub fn new(q: u32, a: BigRational, b: BigRational) -> Self {
        QuadraticAlgebraic { q, a, b }
    }
    pub fn zero(q: u32) -> Self {
        Self::new(q, BigRational::zero(), BigRational::zero())
    }
    pub fn one(q: u32) -> Self {
        Self::from_integer(q, 1)
    }
    pub fn from_integer(q: u32, n: i64) -> Self {
        Self::new(q, BigRational::from_integer(n.into()), BigRational::zero())
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// n · q^{−k/2}, exactly.
    pub fn scaled_power(q: u32, n: &BigInt, k: u32) -> Self {
        let qq = BigInt::from(q);
        if k % 2 == 0 {
            let d = num_traits::pow(qq, (k / 2) as usize);
            Self::new(q, BigRational::new(n.clone(), d), BigRational::zero())
        } else {
            // q^{−(2m+1)/2} = √q · q^{−(m+1)}
            let d = num_traits::pow(qq, (k / 2 + 1) as usize);
            Self::new(q, BigRational::zero(), BigRational::new(n.clone(), d))
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.q);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Conjugate a − b√q.
    pub fn conj(&self) -> Self {
        Self::new(self.q, self.a.clone(), -self.b.clone())
    }

    /// Sign of a + b√q, decided exactly by comparing a² with q·b².
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let qb2 = &self.b * &self.b * BigRational::from_integer(self.q.into());
        if a2 > qb2 {
            sa
        } else if a2 < qb2 {
            sb
        } else {
            0
        }
    }

    /// Nearest double; oversized numerators and denominators are rescaled
    /// before conversion.
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * (self.q as f64).sqrt()
    }

    /// (a, b) as exact fraction strings, e.g. "-12/25".
    pub fn to_strings(&self) -> (String, String) {
        (self.a.to_string(), self.b.to_string())
    }
}

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale down huge numerators/denominators by bit length
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap();
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap();
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

impl fmt::Display for QuadraticAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})·√{}", self.a, self.b, self.q)
    }
}

impl Add for &QuadraticAlgebraic {
    type Output = QuadraticAlgebraic;
    fn add(self, o: &QuadraticAlgebraic) -> QuadraticAlgebraic {
        assert_eq!(self.q, o.q, "mixed fields");
        QuadraticAlgebraic::new(self.q, &self.a + &o.a, &self.b + &o.b)
    }
}
impl Sub for &QuadraticAlgebraic {
    type Output = QuadraticAlgebraic;
    fn sub(self, o: &QuadraticAlgebraic) -> QuadraticAlgebraic {
        assert_eq!(self.q, o.q, "mixed fields");
        QuadraticAlgebraic::new(self.q, &self.a - &o.a, &self.b - &o.b)
    }
}
impl Mul for &QuadraticAlgebraic {
    type Output = QuadraticAlgebraic;
    fn mul(self, o: &QuadraticAlgebraic) -> QuadraticAlgebraic {
        assert_eq!(self.q, o.q, "mixed fields");
        let q = BigRational::from_integer(self.q.into());
        QuadraticAlgebraic::new(
            self.q,
            &self.a * &o.a + &self.b * &o.b * q,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}
impl Neg for &QuadraticAlgebraic {
    type Output = QuadraticAlgebraic;
    fn neg(self) -> QuadraticAlgebraic {
        QuadraticAlgebraic::new(self.q, -self.a.clone(), -self.b.clone())
    }
}
impl AddAssign<&QuadraticAlgebraic> for QuadraticAlgebraic {
    fn add_assign(&mut self, o: &QuadraticAlgebraic) {
        assert_eq!(self.q, o.q, "mixed fields");
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl Mul for QuadraticAlgebraic {
    type Output = QuadraticAlgebraic;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qa(q: u32, a: (i64, i64), b: (i64, i64)) -> QuadraticAlgebraic {
        QuadraticAlgebraic::new(
            q,
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
        )
    }

    #[test]
    fn sqrt_q_squares_to_q() {
        let s = qa(5, (0, 1), (1, 1));
        assert_eq!(&s * &s, QuadraticAlgebraic::from_integer(5, 5));
    }

    #[test]
    fn scaled_powers() {
        let n = BigInt::from(3);
        let v = QuadraticAlgebraic::scaled_power(5, &n, 3);
        assert!((v.to_f64() - 3.0 / 5f64.powf(1.5)).abs() < 1e-15);
        let w = QuadraticAlgebraic::scaled_power(5, &n, 4);
        assert_eq!(w, qa(5, (3, 25), (0, 1)));
    }

    #[test]
    fn signum_exact() {
        assert_eq!(qa(5, (2, 1), (-1, 1)).signum(), -1); // 2 − √5 < 0
        assert_eq!(qa(5, (3, 1), (-1, 1)).signum(), 1);
        assert_eq!(qa(4, (2, 1), (-1, 1)).signum(), 0);
    }

    #[test]
    fn serializes_as_fraction_strings() {
        let v = qa(5, (-12, 25), (3, 1));
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"q":5,"a":"-12/25","b":"3"}"#);
        assert_eq!(serde_json::from_str::<QuadraticAlgebraic>(&json).unwrap(), v);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(&big * BigInt::from(3), big.clone() * BigInt::from(2));
        assert!((rat_to_f64(&r) - 1.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn ring_laws(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, e in 1i64..9) {
            let x = qa(13, (a, e), (b, 1));
            let y = qa(13, (c, 1), (d, e));
            let z = qa(13, (b, 1), (a, 1));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert!(((&x * &y).to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-9 * (1.0 + (x.to_f64() * y.to_f64()).abs()));
            // norm multiplicativity: N(xy) = N(x)N(y)
            let n = |v: &QuadraticAlgebraic| (v * &v.conj()).a;
            prop_assert_eq!(n(&(&x * &y)), n(&x) * n(&y));
        }

        #[test]
        fn pow_matches_repeated_product(a in -9i64..9, b in -9i64..9, e in 0u32..7) {
            let x = qa(5, (a, 5), (b, 1));
            let mut r = QuadraticAlgebraic::one(5);
            for _ in 0..e { r = &r * &x; }
            prop_assert_eq!(x.pow(e), r);
        }
    }
}
