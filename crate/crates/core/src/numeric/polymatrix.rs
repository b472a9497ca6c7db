//! Matrices of Laurent polynomials and their determinants.

use super::matrix::CMatrix;
use super::poly::LaurentPoly;
use super::scalar::{cint, cone, cs, czero, root_of_unity, CScalar, ScalarExt};
use crate::error::{Error, Result};

/// Coefficients below this fraction of the largest one, sitting at either end
/// of an interpolated determinant, are treated as rounding noise from an
/// over-estimated degree bound.
const NOISE_FLOOR: f64 = 1e-20;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![LaurentPoly::zero(); rows * cols] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> LaurentPoly>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, entries }
    }

    /// `Σ t^k · M_k` for the given (exponent, matrix) terms.
    pub fn from_terms(rows: usize, cols: usize, terms: &[(i32, CMatrix)]) -> Self {
        let mut out = Self::zeros(rows, cols);
        for (e, m) in terms {
            assert_eq!((m.rows(), m.cols()), (rows, cols), "term shape mismatch");
            for i in 0..rows {
                for j in 0..cols {
                    if !m[(i, j)].is_exact_zero() {
                        let cur = out.get(i, j);
                        out.set(i, j, &cur + &LaurentPoly::monomial(m[(i, j)], *e));
                    }
                }
            }
        }
        out
    }

    pub fn constant(m: &CMatrix) -> Self {
        Self::from_terms(m.rows(), m.cols(), &[(0, m.clone())])
    }

    /// Assemble from a grid of equally sized blocks.
    pub fn from_blocks(blocks: &[Vec<PolyMatrix>]) -> Self {
        let br = blocks[0][0].rows;
        let bc = blocks[0][0].cols;
        let rows = br * blocks.len();
        let cols = bc * blocks[0].len();
        Self::from_fn(rows, cols, |i, j| blocks[i / br][j / bc].get(i % br, j % bc))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> LaurentPoly {
        self.entries[i * self.cols + j].clone()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn eval(&self, z: CScalar) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).eval(z))
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j) - other.entry(i, j))
    }

    /// Drop column `k`.
    pub fn without_column(&self, k: usize) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols - 1, |i, j| self.get(i, if j < k { j } else { j + 1 }))
    }

    pub fn columns(&self, cols: std::ops::Range<usize>) -> PolyMatrix {
        let c0 = cols.start;
        PolyMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, c0 + j))
    }

    /// Exponent range of the nonzero entries in row `i`.
    fn row_range(&self, i: usize) -> Option<(i32, i32)> {
        (0..self.cols).map(|j| self.entry(i, j)).filter(|p| !p.is_zero()).fold(None, |acc, p| match acc {
            None => Some((p.min_exp(), p.max_exp())),
            Some((lo, hi)) => Some((lo.min(p.min_exp()), hi.max(p.max_exp()))),
        })
    }

    /// Sum over rows of each row's exponent width: an upper bound on the
    /// span of the determinant.
    pub fn degree_bound(&self) -> usize {
        (0..self.rows).filter_map(|i| self.row_range(i)).map(|(lo, hi)| (hi - lo) as usize).sum()
    }

    pub fn det(&self, tol: f64) -> Result<LaurentPoly> {
        self.det_with_bound(self.degree_bound(), tol)
    }

    /// Determinant by evaluation at roots of unity and inverse DFT. Each row
    /// is first multiplied by a power of t so its exponents start at 0; the
    /// result is validated at two extra points off the unit circle.
    pub fn det_with_bound(&self, bound: usize, tol: f64) -> Result<LaurentPoly> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square polynomial matrix");
        let n = self.rows;
        if n == 0 {
            return Ok(LaurentPoly::constant(cone()));
        }
        let mut shifts = Vec::with_capacity(n);
        for i in 0..n {
            match self.row_range(i) {
                Some((lo, _)) => shifts.push(lo),
                None => return Ok(LaurentPoly::zero()),
            }
        }
        let total_shift: i32 = shifts.iter().sum();
        let shifted_det = |z: CScalar| -> CScalar {
            let m = CMatrix::from_fn(n, n, |i, j| {
                let p = self.entry(i, j);
                if p.is_zero() {
                    czero()
                } else {
                    p.shift(-shifts[i]).eval(z)
                }
            });
            m.det()
        };
        let samples = bound + 1;
        let nodes: Vec<CScalar> = (0..samples).map(|k| root_of_unity(k, samples)).collect();
        let values: Vec<CScalar> = nodes.iter().map(|&z| shifted_det(z)).collect();
        let inv_n = cone() / cint(samples as i64);
        let mut coeffs = vec![czero(); samples];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = czero();
            for (j, v) in values.iter().enumerate() {
                acc += *v * nodes[(j * k) % samples].conj();
            }
            *c = acc * inv_n;
        }
        chop_ends(&mut coeffs);
        let poly = LaurentPoly::new(0, coeffs);

        let mut scale = values.iter().map(|v| v.abs_f64()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for z in [cs(1.1 * 0.7f64.cos(), 1.1 * 0.7f64.sin()), cs(0.9 * 2.1f64.cos(), 0.9 * 2.1f64.sin())] {
            let direct = shifted_det(z);
            scale = scale.max(direct.abs_f64());
            worst = worst.max((poly.eval(z) - direct).abs_f64());
        }
        if scale > 0.0 && worst > tol * scale {
            return Err(Error::Interpolation { residual: worst / scale });
        }
        Ok(poly.shift(total_shift))
    }
}

fn chop_ends(coeffs: &mut Vec<CScalar>) {
    let max = coeffs.iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
    let floor = max * NOISE_FLOOR;
    while coeffs.last().is_some_and(|c| c.abs_f64() <= floor) {
        coeffs.pop();
    }
    let lead = coeffs.iter().take_while(|c| c.abs_f64() <= floor).count();
    for c in coeffs.iter_mut().take(lead) {
        *c = czero();
    }
}

/// det(M - tI), with the leading coefficient (-1)^n set exactly.
pub fn char_poly(m: &CMatrix, tol: f64) -> Result<LaurentPoly> {
    let n = m.rows();
    let pm = PolyMatrix::from_fn(n, n, |i, j| {
        let mut p = LaurentPoly::constant(m[(i, j)]);
        if i == j {
            p = &p - &LaurentPoly::monomial(cone(), 1);
        }
        p
    });
    let p = pm.det_with_bound(n, tol)?;
    let mut coeffs: Vec<CScalar> = (0..=n as i32).map(|e| p.coeff(e)).collect();
    coeffs[n] = cint(if n.is_multiple_of(2) { 1 } else { -1 });
    Ok(LaurentPoly::new(0, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(min: i32, c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_ints(min, c)
    }

    #[test]
    fn determinant_of_polynomial_matrix() {
        // [[1 - t, t^-1], [2, t + 3]] -> (1 - t)(t + 3) - 2 t^-1
        let m = PolyMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => lp(0, &[1, -1]),
            (0, 1) => lp(-1, &[1]),
            (1, 0) => lp(0, &[2]),
            _ => lp(0, &[3, 1]),
        });
        let d = m.det(1e-8).unwrap();
        let expect = &(&lp(0, &[1, -1]) * &lp(0, &[3, 1])) - &lp(-1, &[2]);
        assert!((&d - &expect).norm_inf() < 1e-25, "{}", d.display("t"));
        assert_eq!(d.min_exp(), -1);
    }

    #[test]
    fn overestimated_bound_is_harmless() {
        let m = PolyMatrix::from_fn(1, 1, |_, _| lp(0, &[2, 5]));
        let d = m.det_with_bound(9, 1e-8).unwrap();
        assert_eq!(d.integer_round(1e-12).unwrap().coeffs, vec![2, 5]);
    }

    #[test]
    fn zero_row_gives_zero() {
        let m = PolyMatrix::from_fn(2, 2, |i, _| if i == 0 { LaurentPoly::zero() } else { lp(0, &[1]) });
        assert!(m.det(1e-8).unwrap().is_zero());
    }

    #[test]
    fn char_poly_of_unipotent() {
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let p = char_poly(&m, 1e-8).unwrap();
        assert_eq!(p.integer_round(1e-12).unwrap().coeffs, vec![1, -2, 1]);
        let m3 = CMatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let p3 = char_poly(&m3, 1e-8).unwrap();
        assert_eq!(p3.integer_round(1e-12).unwrap(), crate::numeric::IntPoly::new(3, vec![-1]));
    }
}
