//! Quadratic residue symbols, the characters χ_D, the additive character
//! e(·) on 𝔽_q((1/x)), generalized Gauss sums, and exhaustive checks of the
//! Poisson summation formula, the D-sum identity and the Polya–Vinogradov
//! bound.
//!
//! Gauss sums are accumulated exactly in ℤ[ω] (ω = e^{2πi/q}) and only
//! converted to floating point at the end.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::config::{check_budget, qpow};
use crate::error::{Error, Result};
use crate::ffpoly::{
    decode, factor, is_irreducible, legendre, monic_codes, shared_table, Poly, PolySet,
};

/// Euler's criterion in 𝔽_q[x]/P: `(f mod P)^{(|P|−1)/2}` mapped to {−1,0,1}.
pub fn residue_symbol(f: &Poly, p: &Poly) -> Result<i8> {
    if !is_irreducible(p)? {
        return Err(Error::input(format!("{p} is not irreducible")));
    }
    Ok(residue_symbol_unchecked(f, p))
}

pub(crate) fn residue_symbol_unchecked(f: &Poly, p: &Poly) -> i8 {
    let r = f.rem(p).expect("nonzero modulus");
    if r.is_zero() {
        return 0;
    }
    let e = (p.norm() - 1) / 2;
    let v = r.pow_mod(e, p).expect("nonzero modulus");
    if v.is_one() {
        1
    } else {
        debug_assert_eq!(v, Poly::constant(p.q(), p.q() - 1));
        -1
    }
}

/// Jacobi symbol (A/B) for monic B, by reciprocity descent:
/// `(c·A₁/B) = (c/q)^{d(B)} (B mod A₁ / A₁)` for monic A₁, valid because
/// q ≡ 1 (mod 4).
pub fn jacobi_symbol(a: &Poly, b: &Poly) -> Result<i8> {
    if b.is_zero() || !b.is_monic() {
        return Err(Error::input(format!("Jacobi symbol needs a monic modulus, got {b}")));
    }
    Ok(jacobi_unchecked(a, b))
}

pub(crate) fn jacobi_unchecked(a: &Poly, b: &Poly) -> i8 {
    let q = b.q();
    let mut a = a.rem(b).expect("nonzero modulus");
    let mut b = b.clone();
    let mut sign = 1i8;
    loop {
        if b.is_one() {
            return sign;
        }
        if a.is_zero() {
            return 0;
        }
        let (c, a1) = a.make_monic();
        if b.deg().unwrap() % 2 == 1 {
            sign *= legendre(c, q);
        }
        // (a1/b) = (b/a1) = (b mod a1 / a1)
        let r = b.rem(&a1).expect("nonzero");
        b = a1;
        a = r;
    }
}

/// χ_D(f) = (D/f).
pub fn chi(d: &Poly, f: &Poly) -> Result<i8> {
    jacobi_symbol(d, f)
}

/// Laurent coefficients of u/f at x^{−1}, …, x^{−k}, by long division of
/// u·x^k by f in descending powers.
pub fn laurent_tail(u: &Poly, f: &Poly, k: usize) -> Result<Vec<u32>> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let shifted = u * &Poly::monomial(u.q(), 1, k);
    let (quo, _) = shifted.div_rem(f)?;
    // quotient coefficient at x^{k−j} is the coefficient of x^{−j} in u/f
    Ok((1..=k).map(|j| quo.coeff(k - j)).collect())
}

/// The x^{−1} coefficient a₁ of u/f.
pub fn laurent_a1(u: &Poly, f: &Poly) -> Result<u32> {
    Ok(laurent_tail(u, f, 2)?[0])
}

/// e(u/f) = exp(2πi a₁/q).
pub fn exponential(u: &Poly, f: &Poly) -> Result<Complex64> {
    if !f.is_monic() {
        return Err(Error::input("exponential needs a monic denominator"));
    }
    let a1 = laurent_a1(u, f)?;
    Ok(Complex64::from_polar(1.0, 2.0 * PI * a1 as f64 / f.q() as f64))
}

/// An element Σ cₖ ωᵏ of ℤ[ω], ω = e^{2πi/q}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclotomic {
    pub c: Vec<i64>,
}

impl Cyclotomic {
    pub fn zero(q: u32) -> Self {
        Cyclotomic {
            c: vec![0; q as usize],
        }
    }
    pub fn to_complex(&self) -> Complex64 {
        let q = self.c.len() as f64;
        // subtract the mean: Σ ωᵏ = 0, which keeps the float sum well scaled
        let mean = self.c.iter().sum::<i64>() as f64 / q;
        self.c
            .iter()
            .enumerate()
            .map(|(k, &v)| Complex64::from_polar(v as f64 - mean, 2.0 * PI * k as f64 / q))
            .sum()
    }
}

/// Table of the quadratic character r ↦ (r/f) on residues mod a monic f,
/// indexed by residue code, together with the reduction machinery.
pub struct ResidueCharacter {
    q: u32,
    f: Poly,
    n: usize,
    size: usize,
    chi: Vec<i8>,
    /// mulx[s] = code of x·s mod f
    mulx: Vec<u32>,
}

fn mulx_table(q: u32, f: &Poly) -> Vec<u32> {
    let n = f.deg().unwrap();
    let size = qpow(q, n as u32) as usize;
    let mut t = vec![0u32; size];
    if n == 0 {
        return t;
    }
    let mut d = [0u32; 64];
    let fc = f.coeffs();
    let top = qpow(q, n as u32 - 1) as u64;
    for s in 0..size as u64 {
        let lead = (s / top) as u32; // coefficient of x^{n−1}
        let low = s % top;
        // x·s = low·x + lead·x^n ≡ low·x − lead·(f − x^n)
        let mut shifted = low * q as u64;
        if lead != 0 {
            let len = decode(q, shifted, &mut d);
            for v in d.iter_mut().take(n).skip(len) {
                *v = 0;
            }
            for (i, slot) in d.iter_mut().enumerate().take(n) {
                let sub = (lead as u64 * fc[i] as u64 % q as u64) as u32;
                *slot = (*slot + q - sub) % q;
            }
            shifted = crate::ffpoly::encode(q, &d[..n]);
        }
        t[s as usize] = shifted as u32;
    }
    t
}

impl ResidueCharacter {
    pub fn new(f: &Poly, budget: u64) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::input(format!("character modulus must be monic, got {f}")));
        }
        let q = f.q();
        let n = f.deg().unwrap();
        check_budget(format!("residues mod {f}"), f.norm(), budget)?;
        let size = f.norm() as usize;
        let mulx = mulx_table(q, f);
        let mut chi = vec![1i8; size];
        if n > 0 {
            let fac = factor(f)?;
            for (p, e) in &fac.factors {
                let qr = quadratic_residue_table(p);
                let red = reduction_map(q, n, p);
                for r in 0..size {
                    let s = qr[red[r] as usize];
                    chi[r] *= if e % 2 == 1 { s } else { s * s };
                }
            }
        }
        Ok(ResidueCharacter {
            q,
            f: f.clone(),
            n,
            size,
            chi,
            mulx,
        })
    }

    pub fn modulus(&self) -> &Poly {
        &self.f
    }
    pub fn table(&self) -> &[i8] {
        &self.chi
    }

    /// (r/f) for a residue given by code (< |f|).
    #[inline]
    pub fn at(&self, code: u64) -> i8 {
        self.chi[code as usize]
    }

    /// Residue codes of every polynomial with code < `limit`, in code order.
    pub fn reduce_all(&self, limit: u64) -> Vec<u32> {
        let q = self.q as u64;
        let mut red = vec![0u32; limit as usize];
        if self.n == 0 {
            return red;
        }
        for c in 0..limit {
            if c < self.size as u64 {
                red[c as usize] = c as u32;
                continue;
            }
            let parent = red[(c / q) as usize] as u64;
            let t = self.mulx[parent as usize] as u64;
            let d0 = t % q;
            red[c as usize] = (t - d0 + (d0 + c % q) % q) as u32;
        }
        red
    }

    /// Residues of every monic h of degree ≤ max_deg: `out[n][i]` is the
    /// residue code of the polynomial with code qⁿ + i.
    pub fn monic_residues(&self, max_deg: usize) -> Vec<Vec<u32>> {
        let q = self.q as u64;
        let mut out: Vec<Vec<u32>> = Vec::with_capacity(max_deg + 1);
        out.push(vec![if self.n == 0 { 0 } else { 1 }]);
        for n in 1..=max_deg {
            let prev = &out[n - 1];
            let len = qpow(self.q, n as u32) as usize;
            let mut cur = vec![0u32; len];
            if self.n > 0 {
                for (i, slot) in cur.iter_mut().enumerate() {
                    let t = self.mulx[prev[i / q as usize] as usize] as u64;
                    let d0 = t % q;
                    *slot = (t - d0 + (d0 + i as u64 % q) % q) as u32;
                }
            }
            out.push(cur);
        }
        out
    }

    /// Σ_{h∈𝓜_m} (h/f) for m = 0 … top.
    pub fn char_sums_up_to(&self, top: usize) -> Vec<i64> {
        self.monic_residues(top)
            .iter()
            .map(|layer| layer.iter().map(|&r| self.chi[r as usize] as i64).sum())
            .collect()
    }

    /// Exact Σ_{h∈𝓜_m} (h/f).
    pub fn char_sum(&self, m: usize, budget: u64) -> Result<i64> {
        check_budget(format!("M_{m}"), qpow(self.q, m as u32) * 2, budget)?;
        let r = monic_codes(self.q, m);
        let red = self.reduce_all(r.end);
        Ok(r.map(|c| self.chi[red[c as usize] as usize] as i64).sum())
    }

    /// a₁(x^k mod f) for k = 0 … 2n−2.
    fn hankel(&self) -> Vec<u32> {
        let q = self.q as u64;
        let n = self.n;
        let top = qpow(self.q, n as u32 - 1) as u64;
        let mut out = Vec::with_capacity(2 * n);
        let mut cur: u64 = 1 % self.size as u64; // x^0 mod f
        for _ in 0..(2 * n).saturating_sub(1) {
            out.push(((cur / top) % q) as u32);
            cur = self.mulx[cur as usize] as u64;
        }
        out
    }

    /// G(V, χ_f) by direct summation over all |f| residues, exactly in ℤ[ω].
    pub fn gauss_sum_exact(&self, v: &Poly) -> Cyclotomic {
        let q = self.q;
        let mut bins = Cyclotomic::zero(q);
        if self.n == 0 {
            bins.c[0] = 1;
            return bins;
        }
        let v = v.rem(&self.f).expect("nonzero");
        // λ_i = a₁(V·x^i mod f)
        let h = self.hankel();
        let lam: Vec<u32> = (0..self.n)
            .map(|i| {
                (0..self.n).fold(0u64, |acc, j| {
                    acc + v.coeff(j) as u64 * h[i + j] as u64
                }) as u32
                    % q
            })
            .collect();
        let mut arr = vec![0u32; self.size];
        let mut block = 1usize;
        for &l in &lam {
            for j in 1..q as usize {
                for k in 0..block {
                    arr[j * block + k] = (arr[k] + j as u32 * l) % q;
                }
            }
            block *= q as usize;
        }
        for r in 0..self.size {
            bins.c[arr[r] as usize] += self.chi[r] as i64;
        }
        bins
    }

    /// All G(V, χ_f) for V mod f at once (indexed by V's code), exactly in
    /// ℤ[ω]: scatter χ through the Hankel map s = H·r, then an n-dimensional
    /// q-point DFT whose twiddles are cyclic shifts.
    pub fn gauss_sums_all(&self) -> Vec<Cyclotomic> {
        let q = self.q as usize;
        let n = self.n;
        if n == 0 {
            return vec![Cyclotomic { c: {
                let mut c = vec![0; q];
                c[0] = 1;
                c
            } }];
        }
        let h = self.hankel();
        let size = self.size;
        // psi[s] (an integer) placed at ω⁰
        let mut data = vec![0i64; size * q];
        let mut rd = [0u32; 64];
        for r in 0..size {
            if self.chi[r] == 0 {
                continue;
            }
            let len = decode(self.q, r as u64, &mut rd);
            let mut s = 0u64;
            for j in (0..n).rev() {
                let mut sj = 0u64;
                for (i, &ri) in rd.iter().enumerate().take(len) {
                    sj += ri as u64 * h[i + j] as u64;
                }
                s = s * q as u64 + sj % q as u64;
            }
            data[s as usize * q] += self.chi[r] as i64;
        }
        let mut stride = 1usize;
        let mut line_in = vec![0i64; q * q];
        for _ in 0..n {
            for base in 0..size {
                if (base / stride) % q != 0 {
                    continue;
                }
                for t in 0..q {
                    let idx = base + t * stride;
                    line_in[t * q..(t + 1) * q].copy_from_slice(&data[idx * q..(idx + 1) * q]);
                }
                for vv in 0..q {
                    let idx = base + vv * stride;
                    let out = &mut data[idx * q..(idx + 1) * q];
                    out.iter_mut().for_each(|x| *x = 0);
                    for t in 0..q {
                        let shift = vv * t % q;
                        let src = &line_in[t * q..(t + 1) * q];
                        for k in 0..q {
                            out[(k + shift) % q] += src[k];
                        }
                    }
                }
            }
            stride *= q;
        }
        (0..size)
            .map(|v| Cyclotomic {
                c: data[v * q..(v + 1) * q].to_vec(),
            })
            .collect()
    }
}

/// qr[s] = (s/P) for every residue code s mod an irreducible P.
fn quadratic_residue_table(p: &Poly) -> Vec<i8> {
    let q = p.q();
    let size = p.norm() as usize;
    let mut qr = vec![-1i8; size];
    qr[0] = 0;
    for s in 1..size as u64 {
        let sp = Poly::from_code(q, s);
        let sq = (&sp * &sp).rem(p).unwrap().code();
        qr[sq as usize] = 1;
    }
    qr
}

/// red[r] = code of (r mod P) for every code r < q^n.
fn reduction_map(q: u32, n: usize, p: &Poly) -> Vec<u32> {
    let size = qpow(q, n as u32) as usize;
    let mulx = mulx_table(q, p);
    let psize = p.norm() as u64;
    let mut red = vec![0u32; size];
    let qq = q as u64;
    for c in 0..size as u64 {
        if c < psize {
            red[c as usize] = c as u32;
            continue;
        }
        let t = mulx[red[(c / qq) as usize] as usize] as u64;
        let d0 = t % qq;
        red[c as usize] = (t - d0 + (d0 + c % qq) % qq) as u32;
    }
    red
}

#[derive(Clone, Debug)]
pub struct GaussSum {
    pub value: Complex64,
    pub modulus_f: Poly,
    pub shift_v: Poly,
}

/// G(V, χ_f) = Σ_{W mod f} (W/f) e(VW/f) by direct summation.
pub fn gauss_sum(v: &Poly, f: &Poly, budget: u64) -> Result<GaussSum> {
    let rc = ResidueCharacter::new(f, budget)?;
    Ok(GaussSum {
        value: rc.gauss_sum_exact(v).to_complex(),
        modulus_f: f.clone(),
        shift_v: v.clone(),
    })
}

/// Closed form of G(V, χ_{P^i}) with V = V₁P^α, P ∤ V₁.
pub fn gauss_sum_closed(v: &Poly, p: &Poly, i: u32) -> Result<GaussSum> {
    if i == 0 {
        return Err(Error::input("gauss_sum_closed needs i ≥ 1"));
    }
    if !is_irreducible(p)? {
        return Err(Error::input(format!("{p} is not irreducible")));
    }
    let np = p.norm() as f64;
    let fi = p.pow(i);
    // α = ∞ for V ≡ 0
    let (alpha, v1) = if v.is_zero() {
        (u32::MAX, Poly::one(p.q()))
    } else {
        let mut a = 0;
        let mut w = v.clone();
        loop {
            let (quo, r) = w.div_rem(p)?;
            if !r.is_zero() {
                break;
            }
            w = quo;
            a += 1;
        }
        (a, w)
    };
    let value = if i <= alpha {
        if i % 2 == 1 {
            0.0
        } else {
            np.powi(i as i32 - 1) * (np - 1.0)
        }
    } else if i == alpha + 1 {
        if i % 2 == 0 {
            -np.powi(i as i32 - 1)
        } else {
            residue_symbol_unchecked(&v1, p) as f64 * np.powi(i as i32 - 1) * np.sqrt()
        }
    } else {
        0.0
    };
    Ok(GaussSum {
        value: Complex64::new(value, 0.0),
        modulus_f: fi,
        shift_v: v.clone(),
    })
}

/// Exact Σ_{h∈𝓜_m} χ_f(h).
pub fn char_sum(f: &Poly, m: usize, budget: u64) -> Result<i64> {
    ResidueCharacter::new(f, budget)?.char_sum(m, budget)
}

#[derive(Clone, Debug)]
pub struct PoissonCheck {
    pub lhs: i64,
    pub rhs: Complex64,
    pub abs_error: f64,
    pub tolerance: f64,
}

impl PoissonCheck {
    pub fn passed(&self) -> bool {
        self.abs_error <= self.tolerance
    }
}

/// Poisson summation for Σ_{h∈𝓜_m} χ_f(h), using precomputed Gauss sums.
fn poisson_from_table(q: u32, n: usize, m: usize, lhs: i64, g: &[Cyclotomic]) -> PoissonCheck {
    let sum_monic = |deg: usize, acc: &mut Cyclotomic| {
        for c in monic_codes(q, deg) {
            for (a, b) in acc.c.iter_mut().zip(&g[c as usize].c) {
                *a += b;
            }
        }
    };
    let fnorm = (q as f64).powi(n as i32);
    let scale = (q as f64).powi(m as i32) / fnorm;
    let rhs = if n % 2 == 0 {
        let mut low = Cyclotomic::zero(q);
        if n >= m + 2 {
            for d in 0..=(n - m - 2) {
                sum_monic(d, &mut low);
            }
        }
        let mut top = Cyclotomic::zero(q);
        if n > m {
            sum_monic(n - m - 1, &mut top);
        }
        let mut tot = g[0].clone();
        for k in 0..q as usize {
            tot.c[k] += (q as i64 - 1) * low.c[k] - top.c[k];
        }
        tot.to_complex() * scale
    } else {
        let mut top = Cyclotomic::zero(q);
        if n > m {
            sum_monic(n - m - 1, &mut top);
        }
        top.to_complex() * scale * (q as f64).sqrt()
    };
    let abs_error = (rhs - Complex64::new(lhs as f64, 0.0)).norm();
    PoissonCheck {
        lhs,
        rhs,
        abs_error,
        tolerance: 1e-9 * fnorm.sqrt(),
    }
}

pub fn poisson_check(f: &Poly, m: usize, budget: u64) -> Result<PoissonCheck> {
    let n = f.deg().ok_or_else(|| Error::input("zero modulus"))?;
    if n == 0 || !f.is_monic() || m == 0 {
        return Err(Error::input("poisson_check needs monic f of degree ≥ 1 and m ≥ 1"));
    }
    let rc = ResidueCharacter::new(f, budget)?;
    let lhs = rc.char_sum(m, budget)?;
    let g = rc.gauss_sums_all();
    Ok(poisson_from_table(f.q(), n, m, lhs, &g))
}

#[derive(Clone, Debug)]
pub struct PoissonFailure {
    pub f: String,
    pub m: usize,
    pub abs_error: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteSummary {
    pub cases: usize,
    pub max_error: f64,
    pub failures: Vec<PoissonFailure>,
}

/// Exhaustive Poisson check over monic f with 1 ≤ d(f) ≤ max_deg and
/// 1 ≤ m ≤ max_m.
pub fn poisson_suite(q: u32, max_deg: usize, max_m: usize, budget: u64) -> Result<SuiteSummary> {
    let mut s = SuiteSummary::default();
    for n in 1..=max_deg {
        for c in monic_codes(q, n) {
            let f = Poly::from_code(q, c);
            let rc = ResidueCharacter::new(&f, budget)?;
            let g = rc.gauss_sums_all();
            for m in 1..=max_m {
                let lhs = rc.char_sum(m, budget)?;
                let pc = poisson_from_table(q, n, m, lhs, &g);
                s.cases += 1;
                s.max_error = s.max_error.max(pc.abs_error / pc.tolerance * 1e-9);
                if !pc.passed() {
                    s.failures.push(PoissonFailure {
                        f: f.digits(),
                        m,
                        abs_error: pc.abs_error,
                    });
                }
            }
        }
    }
    Ok(s)
}

/// Monic C with every prime factor dividing f and d(C) ≤ max_deg.
pub fn divisors_of_power(f: &Poly, max_deg: usize) -> Result<Vec<Poly>> {
    let q = f.q();
    let primes: Vec<Poly> = factor(f)?.factors.into_iter().map(|(p, _)| p).collect();
    let mut out = vec![Poly::one(q)];
    for p in &primes {
        let dp = p.deg().unwrap();
        let mut next = Vec::new();
        for c in &out {
            let mut cur = c.clone();
            loop {
                next.push(cur.clone());
                if cur.deg().unwrap() + dp > max_deg {
                    break;
                }
                cur = &cur * p;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumdCheck {
    pub lhs: i64,
    pub rhs: i64,
}

/// Σ_{D∈𝓗_{2g+1}} χ_D(f) against the C | f^∞ expansion.
pub fn sumd_check(f: &Poly, g: usize, budget: u64) -> Result<SumdCheck> {
    if !f.is_monic() {
        return Err(Error::input("sumd_check needs monic f"));
    }
    let q = f.q();
    let n = 2 * g + 1;
    check_budget(format!("H_{n}"), qpow(q, n as u32), budget)?;
    let mut lhs = 0i64;
    for d in crate::ffpoly::enumerate(q, PolySet::SquareFree(n), budget)? {
        lhs += jacobi_unchecked(&d, f) as i64;
    }
    let rc = ResidueCharacter::new(f, budget)?;
    let s = |k: i64| -> Result<i64> {
        if k < 0 {
            Ok(0)
        } else {
            rc.char_sum(k as usize, budget)
        }
    };
    let mut rhs = 0i64;
    for c in divisors_of_power(f, g)? {
        let dc = c.deg().unwrap() as i64;
        rhs += s(n as i64 - 2 * dc)? - q as i64 * s(n as i64 - 2 - 2 * dc)?;
    }
    Ok(SumdCheck { lhs, rhs })
}

#[derive(Clone, Debug, Default)]
pub struct PvSummary {
    pub cases: usize,
    pub max_ratio_squarefree: f64,
    pub max_ratio_nonsquare: f64,
    pub violations: Vec<(String, usize, i64)>,
}

/// |Σ_{h∈𝓜_m} χ_f(h)| ≤ √|f| for square-free non-square f, m < d(f); the
/// ratio for general non-square f is recorded.
pub fn polya_vinogradov(q: u32, max_deg: usize, budget: u64) -> Result<PvSummary> {
    let mut s = PvSummary::default();
    for n in 1..=max_deg {
        for c in monic_codes(q, n) {
            let f = Poly::from_code(q, c);
            if f.is_square()? {
                continue;
            }
            let sqf = f.is_squarefree();
            let rc = ResidueCharacter::new(&f, budget)?;
            let root = (f.norm() as f64).sqrt();
            for m in 0..n {
                let v = rc.char_sum(m, budget)?;
                let ratio = v.abs() as f64 / root;
                if sqf {
                    s.cases += 1;
                    s.max_ratio_squarefree = s.max_ratio_squarefree.max(ratio);
                    if ratio > 1.0 {
                        s.violations.push((f.digits(), m, v));
                    }
                } else {
                    s.max_ratio_nonsquare = s.max_ratio_nonsquare.max(ratio);
                }
            }
        }
    }
    Ok(s)
}

/// Compares every closed-form case against the exact all-V transform for
/// primes of degree ≤ max_pdeg and exponents i ≤ max_i. Returns
/// (cases, max abs error).
pub fn gauss_closed_suite(q: u32, max_pdeg: usize, max_i: u32, budget: u64) -> Result<(usize, f64)> {
    let table = shared_table(q, max_pdeg)?;
    let mut cases = 0;
    let mut worst = 0.0f64;
    for d in 1..=max_pdeg {
        for pc in table.primes_of_degree(d).collect::<Vec<_>>() {
            let p = Poly::from_code(q, pc as u64);
            for i in 1..=max_i {
                let f = p.pow(i);
                let rc = ResidueCharacter::new(&f, budget)?;
                let all = rc.gauss_sums_all();
                for (vc, g) in all.iter().enumerate() {
                    let v = Poly::from_code(q, vc as u64);
                    let closed = gauss_sum_closed(&v, &p, i)?.value;
                    worst = worst.max((g.to_complex() - closed).norm());
                    cases += 1;
                }
            }
        }
    }
    Ok((cases, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::enumerate;
    use proptest::prelude::*;

    const B: u64 = u64::MAX;

    fn p(q: u32, c: &[i64]) -> Poly {
        Poly::from_i64(q, c)
    }

    #[test]
    fn residue_symbol_examples() {
        let q = 5;
        assert_eq!(residue_symbol(&Poly::x(q), &p(q, &[1, 1])).unwrap(), 1);
        let pp = p(q, &[2, 0, 1]);
        assert_eq!(residue_symbol(&pp, &pp).unwrap(), 0);
        for c in 1..5 {
            assert_eq!(residue_symbol(&Poly::constant(q, c * c), &pp).unwrap(), 1);
        }
        assert!(residue_symbol(&Poly::x(q), &p(q, &[0, 0, 1])).is_err());
    }

    #[test]
    fn constants_follow_degree_parity() {
        // (c/P) = (c/q)^{d(P)}
        let q = 5;
        for f in enumerate(q, PolySet::Irreducible(3), B).unwrap() {
            for c in 1..q {
                let want = legendre(c, q).pow(3);
                assert_eq!(residue_symbol_unchecked(&Poly::constant(q, c), &f), want);
            }
        }
    }

    #[test]
    fn jacobi_matches_euler_criterion_product() {
        // oracle: multiply Euler-criterion symbols over the factorization of B
        let q = 5;
        let all: Vec<Poly> = enumerate(q, PolySet::MonicUpTo(3), B).unwrap().collect();
        for a in &all {
            for b in &all {
                let fac = factor(b).unwrap();
                let oracle: i8 = fac
                    .factors
                    .iter()
                    .map(|(pp, e)| residue_symbol_unchecked(a, pp).pow(*e))
                    .product();
                assert_eq!(jacobi_symbol(a, b).unwrap(), oracle, "({a}/{b})");
                // non-monic numerators too
                let a2 = a.scale(2);
                let oracle2: i8 = fac
                    .factors
                    .iter()
                    .map(|(pp, e)| residue_symbol_unchecked(&a2, pp).pow(*e))
                    .product();
                assert_eq!(jacobi_symbol(&a2, b).unwrap(), oracle2);
            }
        }
    }

    #[test]
    fn reciprocity_exhaustive() {
        let q = 5;
        let all: Vec<Poly> = enumerate(q, PolySet::MonicUpTo(3), B).unwrap().collect();
        for a in &all {
            for b in &all {
                if !a.gcd(b).is_one() {
                    continue;
                }
                let ab = residue_product(a, b);
                let ba = residue_product(b, a);
                assert_eq!(ab * ba, 1, "({a}/{b})({b}/{a})");
            }
        }
    }

    fn residue_product(a: &Poly, b: &Poly) -> i8 {
        factor(b)
            .unwrap()
            .factors
            .iter()
            .map(|(pp, e)| residue_symbol_unchecked(a, pp).pow(*e))
            .product()
    }

    #[test]
    fn chi_basic_properties() {
        let q = 5;
        let d = p(q, &[0, 1, 0, 1]);
        let all: Vec<Poly> = enumerate(q, PolySet::MonicUpTo(3), B).unwrap().collect();
        for f in &all {
            if f.gcd(&d).is_one() {
                assert_eq!(chi(&d, &(f * f)).unwrap(), 1);
            }
            for g in &all {
                assert_eq!(chi(&d, &(f * g)).unwrap(), chi(&d, f).unwrap() * chi(&d, g).unwrap());
            }
        }
    }

    #[test]
    fn residue_table_matches_jacobi() {
        let q = 5;
        for f in enumerate(q, PolySet::MonicUpTo(4), B).unwrap() {
            let rc = ResidueCharacter::new(&f, B).unwrap();
            for r in 0..f.norm() as u64 {
                let rp = Poly::from_code(q, r);
                assert_eq!(rc.at(r), jacobi_unchecked(&rp, &f), "({rp}/{f})");
            }
            let red = rc.reduce_all(2 * 5u64.pow(5));
            for c in (0..2 * 5u64.pow(5)).step_by(37) {
                assert_eq!(red[c as usize] as u64, Poly::from_code(q, c).rem(&f).unwrap().code());
            }
        }
    }

    #[test]
    fn exponential_examples() {
        let q = 5;
        let f = p(q, &[1, 2, 0, 1]);
        // d(V) < d(f) − 1 → a₁ = 0
        assert!((exponential(&Poly::x(q), &f).unwrap() - 1.0).norm() < 1e-15);
        assert!((exponential(&Poly::zero(q), &f).unwrap() - 1.0).norm() < 1e-15);
        // V = x² gives a₁ = 1
        let w = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        assert!((exponential(&p(q, &[0, 0, 1]), &f).unwrap() - w).norm() < 1e-15);
        // polynomial part does not matter
        let u = &(&f * &p(q, &[3, 1])) + &p(q, &[0, 0, 1]);
        assert!((exponential(&u, &f).unwrap() - w).norm() < 1e-15);
    }

    #[test]
    fn laurent_tail_against_reduction() {
        // a₁(u/f) is the x^{n−1} coefficient of u mod f for monic f
        let q = 13;
        let f = p(q, &[5, 0, 7, 1]);
        for c in (0..13u64.pow(5)).step_by(101) {
            let u = Poly::from_code(q, c);
            let r = u.rem(&f).unwrap();
            assert_eq!(laurent_a1(&u, &f).unwrap(), r.coeff(2));
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let q = 5;
        let pp = p(q, &[2, 0, 1]);
        let g0 = gauss_sum(&Poly::zero(q), &pp.pow(2), B).unwrap().value;
        assert!((g0 - Complex64::new(25.0 * 24.0, 0.0)).norm() < 1e-9);
        let g = gauss_sum(&Poly::x(q), &pp.pow(3), B).unwrap().value;
        assert!(g.norm() < 1e-9);
        let lin = p(q, &[3, 1]);
        let g1 = gauss_sum(&Poly::one(q), &lin, B).unwrap().value;
        assert!((g1.norm() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn squarefree_gauss_sums_are_character_times_root() {
        let q = 5;
        for f in enumerate(q, PolySet::MonicUpTo(3), B).unwrap() {
            if !f.is_squarefree() {
                continue;
            }
            let rc = ResidueCharacter::new(&f, B).unwrap();
            let all = rc.gauss_sums_all();
            let root = (f.norm() as f64).sqrt();
            for (vc, g) in all.iter().enumerate() {
                let want = rc.at(vc as u64) as f64 * root;
                assert!((g.to_complex() - want).norm() < 1e-9, "f={f} V={vc}");
            }
        }
    }

    #[test]
    fn transform_matches_direct_sums() {
        let q = 5;
        for f in enumerate(q, PolySet::MonicUpTo(3), B).unwrap() {
            let rc = ResidueCharacter::new(&f, B).unwrap();
            let all = rc.gauss_sums_all();
            for (vc, g) in all.iter().enumerate() {
                let v = Poly::from_code(q, vc as u64);
                assert_eq!(&rc.gauss_sum_exact(&v), g);
            }
        }
    }

    #[test]
    fn direct_sum_matches_textbook_definition() {
        // fully naive oracle: Σ_W (W/f) e(VW/f) with the long-division a₁
        let q = 5;
        let f = p(q, &[1, 0, 2, 1]); // degree 3, any
        let rc = ResidueCharacter::new(&f, B).unwrap();
        for vc in [0u64, 1, 7, 33, 124] {
            let v = Poly::from_code(q, vc);
            let mut naive = Complex64::new(0.0, 0.0);
            for wc in 0..125u64 {
                let w = Poly::from_code(q, wc);
                naive += jacobi_unchecked(&w, &f) as f64 * exponential(&(&v * &w), &f).unwrap();
            }
            assert!((naive - rc.gauss_sum_exact(&v).to_complex()).norm() < 1e-10);
        }
    }

    #[test]
    fn gauss_sum_multiplicative_exhaustive() {
        let q = 5;
        let all: Vec<Poly> = enumerate(q, PolySet::MonicUpTo(3), B).unwrap().collect();
        for f in &all {
            for h in &all {
                let (df, dh) = (f.deg().unwrap(), h.deg().unwrap());
                if df + dh > 4 || !f.gcd(h).is_one() || df == 0 || dh == 0 || f > h {
                    continue;
                }
                let fh = f * h;
                let (rf, rh, rfh) = (
                    ResidueCharacter::new(f, B).unwrap(),
                    ResidueCharacter::new(h, B).unwrap(),
                    ResidueCharacter::new(&fh, B).unwrap(),
                );
                let all_fh = rfh.gauss_sums_all();
                for (vc, g) in all_fh.iter().enumerate() {
                    let v = Poly::from_code(q, vc as u64);
                    let prod = rf.gauss_sum_exact(&v).to_complex() * rh.gauss_sum_exact(&v).to_complex();
                    assert!((g.to_complex() - prod).norm() < 1e-9, "f={f} h={h} V={v}");
                }
            }
        }
    }

    #[test]
    fn closed_forms_small() {
        let (cases, worst) = gauss_closed_suite(5, 1, 3, B).unwrap();
        assert!(cases > 0 && worst < 1e-9, "worst {worst}");
    }

    #[test]
    fn char_sum_examples() {
        let q = 5;
        let sq = p(q, &[1, 1]).pow(2);
        assert_eq!(char_sum(&sq, 0, B).unwrap(), 1);
        let ns = p(q, &[2, 0, 1]);
        for m in 2..5 {
            assert_eq!(char_sum(&ns, m, B).unwrap(), 0);
        }
        assert!(char_sum(&ns, 1, B).unwrap().abs() <= 5);
        // direct 5-term oracle
        let direct: i64 = (0..5)
            .map(|c| jacobi_unchecked(&p(q, &[c, 1]), &ns) as i64)
            .sum();
        assert_eq!(char_sum(&ns, 1, B).unwrap(), direct);
    }

    #[test]
    fn poisson_small_degrees() {
        let s = poisson_suite(5, 4, 5, B).unwrap();
        assert!(s.failures.is_empty(), "{:?}", &s.failures[..s.failures.len().min(5)]);
        assert_eq!(s.cases, 780 * 5);
    }

    #[test]
    fn sumd_small() {
        let q = 5;
        let one = sumd_check(&Poly::one(q), 1, B).unwrap();
        assert_eq!(one.lhs, 100);
        assert_eq!(one, SumdCheck { lhs: 100, rhs: 100 });
        for f in enumerate(q, PolySet::MonicUpTo(2), B).unwrap() {
            let s = sumd_check(&f, 1, B).unwrap();
            assert_eq!(s.lhs, s.rhs, "f = {f}");
        }
    }

    #[test]
    fn divisors_of_power_examples() {
        let q = 5;
        let pp = p(q, &[1, 1]);
        let qq = p(q, &[2, 0, 1]);
        let f = &pp * &qq;
        let ds = divisors_of_power(&f, 2).unwrap();
        // 1, P, P², Q
        assert_eq!(ds.len(), 4);
        assert_eq!(divisors_of_power(&Poly::one(q), 3).unwrap(), vec![Poly::one(q)]);
    }

    proptest! {
        #[test]
        fn exponential_is_additive(
            u1 in proptest::collection::vec(0u32..5, 0..7),
            u2 in proptest::collection::vec(0u32..5, 0..7),
            f1 in 5u64..2 * 5u64.pow(3),
            f2 in 5u64..2 * 5u64.pow(3),
        ) {
            let q = 5;
            let (u1, u2) = (Poly::new(q, u1), Poly::new(q, u2));
            let (f1, f2) = (Poly::from_code(q, f1).make_monic().1, Poly::from_code(q, f2).make_monic().1);
            let num = &(&u1 * &f2) + &(&u2 * &f1);
            let den = &f1 * &f2;
            let lhs = exponential(&num, &den).unwrap();
            let rhs = exponential(&u1, &f1).unwrap() * exponential(&u2, &f2).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn jacobi_multiplicative_in_numerator(a in 1u64..2 * 5u64.pow(4), b in 1u64..2 * 5u64.pow(4), m in 5u64..2 * 5u64.pow(4)) {
            let q = 5;
            let m = Poly::from_code(q, m).make_monic().1;
            let (a, b) = (Poly::from_code(q, a), Poly::from_code(q, b));
            prop_assert_eq!(
                jacobi_symbol(&(&a * &b), &m).unwrap(),
                jacobi_symbol(&a, &m).unwrap() * jacobi_symbol(&b, &m).unwrap()
            );
        }
    }
}
