//! Laurent polynomials with complex coefficients, and their integer shadows.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{cint, cone, czero, CScalar, ScalarExt};
use crate::error::{Error, Result};

/// Dense Laurent polynomial: `coeffs[i]` multiplies `t^(min_exp + i)`.
/// The first and last stored coefficients are never exactly zero; the zero
/// polynomial stores nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    min_exp: i32,
    coeffs: Vec<CScalar>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { min_exp: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: CScalar) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(c: CScalar, exp: i32) -> Self {
        Self::new(exp, vec![c])
    }

    pub fn new(min_exp: i32, coeffs: Vec<CScalar>) -> Self {
        let mut p = LaurentPoly { min_exp, coeffs };
        p.trim();
        p
    }

    pub fn from_ints(min_exp: i32, coeffs: &[i64]) -> Self {
        Self::new(min_exp, coeffs.iter().map(|&c| cint(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_exact_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.min_exp = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> i32 {
        self.min_exp
    }

    pub fn max_exp(&self) -> i32 {
        self.min_exp + self.coeffs.len() as i32 - 1
    }

    /// Width of the exponent range (the degree once shifted to start at 0).
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients from `t^min_exp` upwards.
    pub fn coeffs(&self) -> &[CScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i32) -> CScalar {
        let i = exp - self.min_exp;
        if i < 0 {
            return czero();
        }
        self.coeffs.get(i as usize).copied().unwrap_or_else(czero)
    }

    pub fn leading(&self) -> CScalar {
        self.coeffs.last().copied().unwrap_or_else(czero)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { min_exp: self.min_exp + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: CScalar) -> Self {
        Self::new(self.min_exp, self.coeffs.iter().map(|&x| x * c).collect())
    }

    pub fn eval(&self, z: CScalar) -> CScalar {
        let mut acc = czero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi_c(self.min_exp as i64)
    }

    /// Substitute t -> 1/t.
    pub fn reciprocal(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(-self.max_exp(), c)
    }

    /// Multiply by ±t^k so that the exponents start at 0 and the constant
    /// term has non-negative real part.
    pub fn normalized(&self) -> Self {
        let mut p = self.shift(-self.min_exp);
        if p.coeffs.first().is_some_and(|c| c.re < 0.0) {
            p = -&p;
        }
        p
    }

    /// Exact division, with the remainder checked against
    /// `tol * ‖num‖∞`.
    pub fn div_exact(&self, den: &LaurentPoly, tol: f64) -> Result<LaurentPoly> {
        if den.is_zero() {
            return Err(Error::NotDivisible { residual: f64::INFINITY });
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let n = self.span();
        let m = den.span();
        if n < m {
            return Err(Error::NotDivisible { residual: 1.0 });
        }
        let mut r = self.coeffs.clone();
        let lead = den.leading();
        let mut q = vec![czero(); n - m + 1];
        for k in (0..=n - m).rev() {
            let qk = r[k + m] / lead;
            q[k] = qk;
            for (j, &d) in den.coeffs.iter().enumerate() {
                r[k + j] -= qk * d;
            }
        }
        let rem = r[..m].iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
        let residual = rem / self.norm_inf();
        if residual > tol {
            return Err(Error::NotDivisible { residual });
        }
        Ok(Self::new(self.min_exp - den.min_exp, q))
    }

    /// Synthetic division by (t - z): quotient and remainder, on the shifted
    /// polynomial part.
    pub fn deflate(&self, z: CScalar) -> (LaurentPoly, CScalar) {
        if self.coeffs.len() <= 1 {
            return (Self::zero(), self.coeffs.first().copied().unwrap_or_else(czero));
        }
        let (q, r) = synthetic_division(&self.coeffs, z);
        (Self::new(self.min_exp, q), r)
    }

    /// How many times (t - z) divides, judging each remainder against
    /// `tol * ‖p‖∞`. Returns the multiplicity, the fully deflated polynomial
    /// and its value at `z`.
    pub fn root_multiplicity(&self, z: CScalar, tol: f64) -> (usize, LaurentPoly, CScalar) {
        let scale = self.norm_inf();
        let mut p = self.clone();
        let mut m = 0;
        loop {
            if p.span() == 0 {
                let v = p.eval(z) * z.powi_c(-(p.min_exp as i64));
                return (m, p, v);
            }
            let (q, r) = p.deflate(z);
            if r.abs_f64() <= tol * scale {
                m += 1;
                p = q;
            } else {
                return (m, p, r);
            }
        }
    }

    /// Round every coefficient to the nearest integer if all are within
    /// `tol` of one (imaginary parts included).
    pub fn integer_round(&self, tol: f64) -> Option<IntPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let re = c.re_f64();
            let r = re.round();
            let frac = f64::from(c.re - super::dd::Dd::from(r)).abs();
            if frac > tol || c.im_f64().abs() > tol || r.abs() > 9.0e15 {
                return None;
            }
            out.push(r as i64);
        }
        Some(IntPoly::new(self.min_exp, out))
    }

    /// Complex roots of the polynomial part (Aberth–Ehrlich iteration).
    pub fn roots(&self) -> Vec<CScalar> {
        aberth(&self.coeffs)
    }

    pub fn display<'a>(&'a self, var: &'a str) -> PolyDisplay<'a> {
        PolyDisplay { p: self, var }
    }
}

fn synthetic_division(coeffs: &[CScalar], z: CScalar) -> (Vec<CScalar>, CScalar) {
    let n = coeffs.len() - 1;
    let mut q = vec![czero(); n];
    let mut acc = coeffs[n];
    for k in (0..n).rev() {
        q[k] = acc;
        acc = coeffs[k] + z * acc;
    }
    (q, acc)
}

fn eval_dense(coeffs: &[CScalar], z: CScalar) -> (CScalar, CScalar) {
    let mut p = czero();
    let mut dp = czero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn aberth(coeffs: &[CScalar]) -> Vec<CScalar> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<CScalar> = coeffs.iter().map(|&c| c / lead).collect();
    // Fujiwara-style radius for the starting circle.
    let mut radius: f64 = 0.0;
    for (k, c) in monic.iter().enumerate().take(n) {
        let a = c.abs_f64();
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / (n - k) as f64));
        }
    }
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<CScalar> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            super::scalar::cs(radius * th.cos(), radius * th.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval_dense(&monic, z[k]);
            if p.is_exact_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = czero();
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if !d.is_exact_zero() {
                        s += cone() / d;
                    }
                }
            }
            let w = ratio / (cone() - ratio * s);
            if !w.abs_f64().is_finite() {
                continue;
            }
            z[k] -= w;
            worst = worst.max(w.abs_f64() / z[k].abs_f64().max(1.0));
        }
        if worst < 1e-30 {
            break;
        }
    }
    z
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.min_exp.min(rhs.min_exp);
        let hi = self.max_exp().max(rhs.max_exp());
        let coeffs = (lo..=hi).map(|e| self.coeff(e) + rhs.coeff(e)).collect();
        LaurentPoly::new(lo, coeffs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { min_exp: self.min_exp, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut out = vec![czero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.min_exp + rhs.min_exp, out)
    }
}

pub struct PolyDisplay<'a> {
    p: &'a LaurentPoly,
    var: &'a str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.p.coeffs.iter().enumerate().rev() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let (re, im) = (c.re_f64(), c.im_f64());
            if im == 0.0 {
                write!(f, "{re}")?;
            } else {
                write!(f, "({re}{im:+}i)")?;
            }
            write_power(f, self.var, self.p.min_exp + i as i32)?;
        }
        Ok(())
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, var: &str, e: i32) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

/// Laurent polynomial with integer coefficients, same layout as
/// [`LaurentPoly`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    pub min_exp: i32,
    pub coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(min_exp: i32, mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|&&c| c == 0).count();
        coeffs.drain(..lead);
        let min_exp = if coeffs.is_empty() { 0 } else { min_exp + lead as i32 };
        IntPoly { min_exp, coeffs }
    }

    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_ints(self.min_exp, &self.coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Multiplicity of the root t = 1, by exact integer deflation.
    pub fn multiplicity_at_one(&self) -> usize {
        let mut c = self.coeffs.clone();
        let mut m = 0;
        while c.len() > 1 {
            match exact_deflate(&c, 1) {
                Some(q) => {
                    c = q;
                    m += 1;
                }
                None => break,
            }
        }
        m
    }

    /// Factor as ± t^k · Π f_i^{e_i} with integer factors, when the leading
    /// coefficient is ±1. Cyclotomic-style factors t ∓ 1 are removed by exact
    /// deflation; the rest are found by grouping numerical roots into
    /// products with integer coefficients. Returns `None` when the grouping
    /// does not close up.
    pub fn factor(&self) -> Option<Factorization> {
        if self.coeffs.is_empty() {
            return None;
        }
        let mut c = self.coeffs.clone();
        let mut sign = 1;
        if *c.last().unwrap() < 0 {
            sign = -1;
            c.iter_mut().for_each(|x| *x = -*x);
        }
        if *c.last().unwrap() != 1 {
            return None;
        }
        let mut factors: Vec<(Vec<i64>, usize)> = Vec::new();
        for root in [1, -1] {
            let mut m = 0;
            while c.len() > 1 {
                match exact_deflate(&c, root) {
                    Some(q) => {
                        c = q;
                        m += 1;
                    }
                    None => break,
                }
            }
            if m > 0 {
                factors.push((vec![-root, 1], m));
            }
        }
        while c.len() > 1 {
            let f = smallest_integer_factor(&c)?;
            let mut m = 0;
            while let Some(q) = exact_divide(&c, &f) {
                c = q;
                m += 1;
            }
            if m == 0 {
                return None;
            }
            factors.push((f, m));
        }
        Some(Factorization {
            sign,
            shift: self.min_exp,
            factors: factors.into_iter().map(|(f, m)| (IntPoly::new(0, f), m)).collect(),
        })
    }

    pub fn display<'a>(&'a self, var: &'a str) -> IntPolyDisplay<'a> {
        IntPolyDisplay { p: self, var }
    }
}

fn exact_deflate(c: &[i64], root: i64) -> Option<Vec<i64>> {
    let n = c.len() - 1;
    let mut q = vec![0i64; n];
    let mut acc = c[n];
    for k in (0..n).rev() {
        q[k] = acc;
        acc = c[k].checked_add(root.checked_mul(acc)?)?;
    }
    (acc == 0).then_some(q)
}

fn exact_divide(c: &[i64], f: &[i64]) -> Option<Vec<i64>> {
    let n = c.len() - 1;
    let m = f.len() - 1;
    if n < m {
        return None;
    }
    let mut r: Vec<i128> = c.iter().map(|&x| x as i128).collect();
    let lead = *f.last()? as i128;
    let mut q = vec![0i64; n - m + 1];
    for k in (0..=n - m).rev() {
        if r[k + m] % lead != 0 {
            return None;
        }
        let qk = r[k + m] / lead;
        q[k] = i64::try_from(qk).ok()?;
        for (j, &d) in f.iter().enumerate() {
            r[k + j] -= qk * d as i128;
        }
    }
    r[..m].iter().all(|&x| x == 0).then_some(q)
}

/// Search subsets of the numerical roots, smallest size first, for a monic
/// product with integer coefficients that divides exactly.
fn smallest_integer_factor(c: &[i64]) -> Option<Vec<i64>> {
    let n = c.len() - 1;
    if n > 16 {
        return None;
    }
    let roots = LaurentPoly::from_ints(0, c).roots();
    for size in 1..=n / 2 {
        for subset in itertools::Itertools::combinations(0..n, size) {
            let mut prod = vec![cone()];
            for &i in &subset {
                let mut next = vec![czero(); prod.len() + 1];
                for (k, &p) in prod.iter().enumerate() {
                    next[k + 1] += p;
                    next[k] -= p * roots[i];
                }
                prod = next;
            }
            let candidate: Option<Vec<i64>> = prod
                .iter()
                .map(|z| {
                    let r = z.re_f64().round();
                    ((z.re_f64() - r).abs() < 1e-6 && z.im_f64().abs() < 1e-6).then_some(r as i64)
                })
                .collect();
            if let Some(f) = candidate {
                if exact_divide(c, &f).is_some() {
                    return Some(f);
                }
            }
        }
    }
    Some(c.to_vec())
}

/// ± t^shift · Π factor^multiplicity
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i64,
    pub shift: i32,
    pub factors: Vec<(IntPoly, usize)>,
}

impl Factorization {
    pub fn display<'a>(&'a self, var: &'a str) -> FactorDisplay<'a> {
        FactorDisplay { f: self, var }
    }
}

pub struct FactorDisplay<'a> {
    f: &'a Factorization,
    var: &'a str,
}

impl fmt::Display for FactorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.f.shift != 0 {
            let mut s = String::new();
            s.push_str(self.var);
            if self.f.shift != 1 {
                s.push_str(&format!("^{}", self.f.shift));
            }
            parts.push(s);
        }
        for (p, m) in &self.f.factors {
            let body = p.display(self.var).to_string();
            let wrapped = if self.f.factors.len() > 1 || *m > 1 || self.f.shift != 0 || self.f.sign < 0 {
                format!("({body})")
            } else {
                body
            };
            parts.push(if *m > 1 { format!("{wrapped}^{m}") } else { wrapped });
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        let sign = if self.f.sign < 0 { "-" } else { "" };
        write!(f, "{sign}{}", parts.join(" "))
    }
}

pub struct IntPolyDisplay<'a> {
    p: &'a IntPoly,
    var: &'a str,
}

impl fmt::Display for IntPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.p.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let e = self.p.min_exp + i as i32;
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            }
            first = false;
            if mag != 1 || e == 0 {
                write!(f, "{mag}")?;
            }
            write_power(f, self.var, e)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::scalar::cs;
    use super::*;

    fn ip(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_ints(0, c)
    }

    #[test]
    fn trims_and_spans() {
        let p = LaurentPoly::new(-2, vec![czero(), cint(3), cint(0), cint(1), czero()]);
        assert_eq!(p.min_exp(), -1);
        assert_eq!(p.max_exp(), 1);
        assert_eq!(p.span(), 2);
        assert!(LaurentPoly::new(5, vec![czero()]).is_zero());
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = ip(&[1, 1]);
        let q = &p * &p;
        assert_eq!(q, ip(&[1, 2, 1]));
        let z = cs(0.3, -1.1);
        assert!((q.eval(z) - p.eval(z) * p.eval(z)).abs_f64() < 1e-28);
        let r = LaurentPoly::from_ints(-2, &[1, 0, 5]);
        assert!((r.eval(cs(2.0, 0.0)) - cs(5.25, 0.0)).abs_f64() < 1e-28);
        assert!((&q - &q).is_zero());
    }

    #[test]
    fn exact_division() {
        let num = &(&ip(&[1, -2, 1]) * &ip(&[1, 1])) * &ip(&[3, 0, 1]);
        let q = num.div_exact(&ip(&[1, -2, 1]), 1e-12).unwrap();
        assert_eq!(q.integer_round(1e-9).unwrap(), IntPoly::new(0, vec![3, 3, 1, 1]));
        assert!(ip(&[1, 0, 1]).div_exact(&ip(&[1, -1]), 1e-9).is_err());
    }

    #[test]
    fn division_by_high_power_of_one_minus_t_is_clean() {
        // (1 - t)^16 (t^2 + 3t + 1): the division that breaks in plain f64.
        let mut den = ip(&[1]);
        for _ in 0..16 {
            den = &den * &ip(&[1, -1]);
        }
        let num = &den * &ip(&[1, 3, 1]);
        let q = num.div_exact(&den, 1e-12).unwrap();
        assert_eq!(q.integer_round(1e-12).unwrap().coeffs, vec![1, 3, 1]);
    }

    #[test]
    fn multiplicity_at_one() {
        // (t - 1)^3 (t^2 - 18t + 1)
        let mut p = ip(&[1, -18, 1]);
        for _ in 0..3 {
            p = &p * &ip(&[-1, 1]);
        }
        let (m, _, v) = p.root_multiplicity(cone(), 1e-6);
        assert_eq!(m, 3);
        assert!((v - cint(-16)).abs_f64() < 1e-20);
        assert_eq!(p.integer_round(1e-9).unwrap().multiplicity_at_one(), 3);
    }

    #[test]
    fn normalization_and_reciprocal() {
        let p = LaurentPoly::from_ints(-3, &[-1, 4, 2]);
        let n = p.normalized();
        assert_eq!(n.min_exp(), 0);
        assert_eq!(n.integer_round(0.0).unwrap().coeffs, vec![1, -4, -2]);
        assert_eq!(p.reciprocal().integer_round(0.0).unwrap(), IntPoly::new(1, vec![2, 4, -1]));
    }

    #[test]
    fn integer_rounding_rejects_fractions() {
        assert!(LaurentPoly::constant(cs(2.5, 0.0)).integer_round(1e-6).is_none());
        assert!(LaurentPoly::constant(cs(2.0, 1e-3)).integer_round(1e-6).is_none());
        assert!(LaurentPoly::constant(cs(2.0 + 1e-9, 0.0)).integer_round(1e-6).is_some());
    }

    #[test]
    fn aberth_finds_roots() {
        let p = &(&ip(&[-1, 1]) * &ip(&[1, 1, 1])) * &ip(&[2, 0, 1]);
        let roots = p.roots();
        assert_eq!(roots.len(), 5);
        for r in roots {
            assert!(p.eval(r).abs_f64() < 1e-25);
        }
    }

    #[test]
    fn factors_relative_polynomial() {
        // -(t - 1)^5 (t^2 - 18t + 1)^2 (t^6 - 114t^5 - 17t^4 - 316t^3 - 17t^2 - 114t + 1)
        let p = IntPoly::new(
            0,
            vec![
                1, -155, 5173, -60479, 240077, -565551, 1010497, -1394867, 1394867, -1010497, 565551, -240077, 60479,
                -5173, 155, -1,
            ],
        );
        let f = p.factor().unwrap();
        assert_eq!(f.sign, -1);
        let shown = f.display("t").to_string();
        assert!(shown.starts_with("-(t - 1)^5"), "{shown}");
        assert!(shown.contains("(t^2 - 18t + 1)^2"), "{shown}");
        assert_eq!(f.factors.iter().map(|(q, m)| q.degree() * m).sum::<usize>(), 15);
    }

    #[test]
    fn int_display() {
        assert_eq!(IntPoly::new(0, vec![1, -18, 1]).display("t").to_string(), "t^2 - 18t + 1");
        assert_eq!(IntPoly::new(0, vec![-1, 0, 0, 1]).display("x").to_string(), "x^3 - 1");
    }
}
