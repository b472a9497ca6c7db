//! Dense complex matrices: products, LU, and nullspaces by one-sided Jacobi
//! SVD.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use super::dd::Dd;
use super::scalar::{cone, cs, czero, CScalar, ScalarExt};
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CScalar>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { cone() } else { czero() })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> CScalar>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| cs(rows[i][j], 0.0))
    }

    /// From nested `[re, im]` pairs; rows must be equally long.
    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Representation("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| cs(rows[i][j][0], rows[i][j][1])))
    }

    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].pair()).collect()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn scale(&self, c: CScalar) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> CScalar {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(czero(), |a, b| a + b)
    }

    pub fn column(&self, j: usize) -> Vec<CScalar> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn hstack(parts: &[&CMatrix]) -> Self {
        let rows = parts[0].rows;
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    pub fn vstack(parts: &[&CMatrix]) -> Self {
        let cols = parts[0].cols;
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    /// Max-entry distance, for residual checks.
    pub fn dist(&self, other: &CMatrix) -> f64 {
        (self - other).norm_max()
    }

    fn lu(&self) -> (Vec<CScalar>, Vec<usize>, bool, bool) {
        assert!(self.is_square(), "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut singular = false;
        for k in 0..n {
            let (p, best) =
                (k..n).map(|i| (i, a[i * n + k].abs_f64())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f.is_exact_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= f * u;
                }
            }
        }
        (a, perm, odd, singular)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> CScalar {
        let n = self.rows;
        if n == 0 {
            return cone();
        }
        let (a, _, odd, singular) = self.lu();
        if singular {
            return czero();
        }
        let d = (0..n).fold(cone(), |acc, i| acc * a[i * n + i]);
        if odd {
            -d
        } else {
            d
        }
    }

    /// Solve `self · X = rhs`.
    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let n = self.rows;
        let (a, perm, _, singular) = self.lu();
        if singular {
            return Err(Error::Singular);
        }
        let mut x = CMatrix::from_fn(n, rhs.cols, |i, j| rhs[(perm[i], j)]);
        for c in 0..rhs.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= a[i * n + k] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= a[i * n + k] * x[(k, c)];
                }
                x[(i, c)] = s / a[i * n + i];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.solve(&CMatrix::identity(self.rows))
    }

    /// One-sided Jacobi SVD: returns the singular values (unsorted, one per
    /// column) and the right singular vectors as columns.
    pub fn svd_right(&self) -> (Vec<f64>, CMatrix) {
        let n = self.cols;
        // Work column-major for cache-friendly column rotations.
        let mut u: Vec<Vec<CScalar>> = (0..n).map(|j| self.column(j)).collect();
        let mut v: Vec<Vec<CScalar>> =
            (0..n).map(|j| (0..n).map(|i| if i == j { cone() } else { czero() }).collect()).collect();
        let two = Dd::from(2.0);
        let one = Dd::from(1.0);
        // Columns this small are already null; rotating against them only
        // feeds underflowed products into the rotation angle.
        let col_max = u.iter().map(|col| col.iter().map(|z| z.norm_sqr().to_f64()).sum::<f64>()).fold(0.0, f64::max);
        let negligible = 1e-120 * col_max;
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let mut alpha = Dd::from(0.0);
                    let mut beta = Dd::from(0.0);
                    let mut gamma = czero();
                    for (x, y) in u[p].iter().zip(&u[q]) {
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    if alpha.to_f64() <= negligible || beta.to_f64() <= negligible {
                        continue;
                    }
                    let g = gamma.abs_dd();
                    if g == 0.0 || f64::from(g) <= 1e-30 * f64::from((alpha * beta).sqrt()) {
                        continue;
                    }
                    rotated = true;
                    let phase = Complex::new(gamma.re / g, -gamma.im / g);
                    let zeta = (beta - alpha) / (two * g);
                    let sgn = if zeta < 0.0 { -one } else { one };
                    let t = sgn / (zeta.abs() + (one + zeta * zeta).sqrt());
                    let c = one / (one + t * t).sqrt();
                    let s = c * t;
                    let (cc, sc) = (Complex::new(c, Dd::from(0.0)), Complex::new(s, Dd::from(0.0)));
                    for col in [&mut u, &mut v] {
                        let (head, tail) = col.split_at_mut(q);
                        for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                            let (up, uq) = (*x, *y * phase);
                            *x = cc * up - sc * uq;
                            *y = sc * up + cc * uq;
                        }
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let sigma =
            u.iter().map(|col| f64::from(col.iter().fold(Dd::from(0.0), |a, z| a + z.norm_sqr()).sqrt())).collect();
        let vm = CMatrix::from_fn(n, n, |i, j| v[j][i]);
        (sigma, vm)
    }

    /// Orthonormal basis (columns) of the kernel: right singular vectors whose
    /// singular value is at most `tol` times the largest one.
    pub fn nullspace(&self, tol: f64) -> CMatrix {
        let n = self.cols;
        if self.rows == 0 {
            return CMatrix::identity(n);
        }
        let (sigma, v) = self.svd_right();
        let smax = sigma.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..n).filter(|&j| sigma[j] <= tol * smax || smax == 0.0).collect();
        CMatrix::from_fn(n, keep.len(), |i, k| v[(i, keep[k])])
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.cols - self.nullspace(tol).cols
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = CScalar;
    fn index(&self, (i, j): (usize, usize)) -> &CScalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CScalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_exact_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-cone())
    }
}
