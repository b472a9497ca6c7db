//! Complex double-double scalars.
//!
//! Every matrix entry and polynomial coefficient is a complex number whose
//! real and imaginary parts carry about 32 significant digits. Plain f64 is
//! not enough: the bundle determinants divide by (1 - t)^n with n up to 16,
//! which amplifies rounding error by roughly 1e13.

use num_complex::Complex;

use super::dd::Dd;

pub type Real = Dd;
pub type CScalar = Complex<Dd>;

pub fn cs(re: f64, im: f64) -> CScalar {
    Complex::new(Dd::from(re), Dd::from(im))
}

pub fn cint(n: i64) -> CScalar {
    Complex::new(Dd::from(n), Dd::from(0.0))
}

pub fn czero() -> CScalar {
    cs(0.0, 0.0)
}

pub fn cone() -> CScalar {
    cs(1.0, 0.0)
}

pub trait ScalarExt: Sized {
    fn abs_f64(&self) -> f64;
    fn abs_dd(&self) -> Dd;
    fn re_f64(&self) -> f64;
    fn im_f64(&self) -> f64;
    fn pair(&self) -> [f64; 2] {
        [self.re_f64(), self.im_f64()]
    }
    fn is_exact_zero(&self) -> bool;
    /// Principal square root, computed from real square roots only.
    fn sqrt_principal(&self) -> Self;
    fn powi_c(&self, n: i64) -> Self;
}

impl ScalarExt for CScalar {
    fn abs_f64(&self) -> f64 {
        self.abs_dd().to_f64()
    }

    fn abs_dd(&self) -> Dd {
        self.norm_sqr().sqrt()
    }

    fn re_f64(&self) -> f64 {
        f64::from(self.re)
    }

    fn im_f64(&self) -> f64 {
        f64::from(self.im)
    }

    fn is_exact_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn sqrt_principal(&self) -> Self {
        let r = self.abs_dd();
        let two = Dd::from(2.0);
        let re = ((r + self.re) / two).sqrt();
        let mut im = ((r - self.re) / two).sqrt();
        if self.im < 0.0 {
            im = -im;
        }
        Complex::new(re, im)
    }

    fn powi_c(&self, n: i64) -> Self {
        let base = if n < 0 { cone() / *self } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = cone();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc *= sq;
            }
            sq = sq * sq;
            e >>= 1;
        }
        acc
    }
}

/// exp(2πik/n) to full double-double accuracy: an f64 seed polished by
/// Newton steps on z^n = 1.
pub fn root_of_unity(k: usize, n: usize) -> CScalar {
    let theta = 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
    let mut z = cs(theta.cos(), theta.sin());
    let nn = cint(n as i64);
    for _ in 0..3 {
        let zn1 = z.powi_c(n as i64 - 1);
        let f = zn1 * z - cone();
        z -= f / (nn * zn1);
    }
    z
}
