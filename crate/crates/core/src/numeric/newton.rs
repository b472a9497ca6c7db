//! Multi-start Newton iteration for square polynomial systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::CMatrix;
use super::scalar::{cs, CScalar, ScalarExt};
use crate::error::{Error, Result};

/// A square system F: C^n -> C^n with an analytic Jacobian.
pub trait PolySystem {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[CScalar]) -> Vec<CScalar>;
    fn jacobian(&self, x: &[CScalar]) -> CMatrix;
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub starts: usize,
    pub seed: u64,
    /// Starts are drawn uniformly from the box |Re|, |Im| <= radius.
    pub radius: f64,
    pub max_iter: usize,
    /// A converged point is accepted when every residual is below this.
    pub residual_tol: f64,
    /// Points closer than this (max-norm) are the same root.
    pub dedupe: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { starts: 64, seed: 0, radius: 3.0, max_iter: 200, residual_tol: 1e-10, dedupe: 1e-6 }
    }
}

fn max_abs(v: &[CScalar]) -> f64 {
    v.iter().map(|z| z.abs_f64()).fold(0.0, f64::max)
}

/// Damped Newton from one start. Returns the final point and its residual.
pub fn newton<S: PolySystem>(sys: &S, start: Vec<CScalar>, max_iter: usize) -> (Vec<CScalar>, f64) {
    let n = sys.dim();
    let mut x = start;
    let mut f = sys.residual(&x);
    let mut fnorm = max_abs(&f);
    for _ in 0..max_iter {
        let j = sys.jacobian(&x);
        let rhs = CMatrix::from_fn(n, 1, |i, _| f[i]);
        let step = match j.solve(&rhs) {
            Ok(s) => s.column(0),
            Err(_) => break,
        };
        let step_norm = max_abs(&step);
        if !step_norm.is_finite() {
            break;
        }
        // Backtrack while the residual grows, but never refuse the full step
        // near convergence where the residual is pure rounding.
        let mut lambda = 1.0;
        let mut trial;
        let mut tnorm;
        loop {
            let l = cs(lambda, 0.0);
            trial = x.iter().zip(&step).map(|(&xi, &si)| xi - l * si).collect::<Vec<_>>();
            let tf = sys.residual(&trial);
            tnorm = max_abs(&tf);
            if tnorm <= fnorm || lambda < 1e-3 || fnorm < 1e-20 {
                f = tf;
                break;
            }
            lambda *= 0.5;
        }
        x = trial;
        fnorm = tnorm;
        let scale = 1.0 + max_abs(&x);
        if step_norm * lambda <= 1e-29 * scale || scale > 1e8 {
            break;
        }
    }
    (x, fnorm)
}

/// Run Newton from `starts` seeded random points and return the distinct
/// roots whose residual passes, sorted lexicographically.
pub fn newton_multistart<S: PolySystem>(sys: &S, opts: &NewtonOptions) -> Result<Vec<Vec<CScalar>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut roots: Vec<Vec<CScalar>> = Vec::new();
    for _ in 0..opts.starts {
        let start: Vec<CScalar> = (0..sys.dim())
            .map(|_| cs(rng.gen_range(-opts.radius..opts.radius), rng.gen_range(-opts.radius..opts.radius)))
            .collect();
        let (x, res) = newton(sys, start, opts.max_iter);
        if res.is_nan() || res > opts.residual_tol {
            continue;
        }
        let dup = roots.iter().any(|r| r.iter().zip(&x).all(|(a, b)| (*a - *b).abs_f64() <= opts.dedupe));
        if !dup {
            roots.push(x);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRoots { starts: opts.starts });
    }
    roots.sort_by(|a, b| {
        let ka: Vec<f64> = a.iter().flat_map(|z| z.pair()).collect();
        let kb: Vec<f64> = b.iter().flat_map(|z| z.pair()).collect();
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::super::scalar::{cint, czero};
    use super::*;

    /// {A - B, B - C, A^2 + B^2 + C^2 - ABC}
    struct Diagonal;

    impl PolySystem for Diagonal {
        fn dim(&self) -> usize {
            3
        }
        fn residual(&self, x: &[CScalar]) -> Vec<CScalar> {
            let (a, b, c) = (x[0], x[1], x[2]);
            vec![a - b, b - c, a * a + b * b + c * c - a * b * c]
        }
        fn jacobian(&self, x: &[CScalar]) -> CMatrix {
            let (a, b, c) = (x[0], x[1], x[2]);
            let two = cint(2);
            let mut j = CMatrix::zeros(3, 3);
            j[(0, 0)] = cint(1);
            j[(0, 1)] = cint(-1);
            j[(1, 1)] = cint(1);
            j[(1, 2)] = cint(-1);
            j[(2, 0)] = two * a - b * c;
            j[(2, 1)] = two * b - a * c;
            j[(2, 2)] = two * c - a * b;
            j
        }
    }

    #[test]
    fn finds_markov_triple() {
        let roots = newton_multistart(&Diagonal, &NewtonOptions::default()).unwrap();
        assert!(roots.iter().any(|r| r.iter().all(|z| (*z - cint(3)).abs_f64() < 1e-20)));
        for r in &roots {
            assert!(max_abs(&Diagonal.residual(r)) <= 1e-10);
        }
    }

    #[test]
    fn same_seed_same_roots() {
        let o = NewtonOptions { starts: 16, seed: 42, ..Default::default() };
        assert_eq!(newton_multistart(&Diagonal, &o).unwrap(), newton_multistart(&Diagonal, &o).unwrap());
    }

    #[test]
    fn zero_starts_is_an_error() {
        let o = NewtonOptions { starts: 0, ..Default::default() };
        assert!(matches!(newton_multistart(&Diagonal, &o), Err(Error::NoRoots { .. })));
        let _ = czero();
    }
}
