//! Dense complex linear algebra: Hermitian eigensolvers, polynomial roots,
//! Pfaffians and a block-tridiagonal window solver for strip Hamiltonians.

mod band;
mod eig;
mod pfaffian;
mod poly;

pub use band::{BandLu, BlockTridiag, Cluster};
pub use eig::{eig_hermitian, eigvals_hermitian, Eigen};
pub use pfaffian::pfaffian;
pub use poly::{poly_eval, poly_roots, PolyRoots};

#[allow(unused_imports)]
use num_traits::Float;
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
use num_traits::Zero;

/// Absolute floor under every relative tolerance.
pub const TOL_FLOOR: f64 = 1e-14;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds from row slices; all rows must share one length.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| C64::new(values[i * cols + j], 0.0))
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entry of `|M - M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= rel_tol * self.max_abs().max(TOL_FLOOR)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| self[(i / p, j / q)] * other[(i % p, j % q)])
    }

    /// `self * other + other * self`.
    pub fn anticommutator(&self, other: &ComplexMatrix) -> Self {
        &(self * other) + &(other * self)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch { what: "det of non-square matrix" });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm())).unwrap();
            if a[(p, k)].norm() == 0.0 {
                return Ok(C64::zero());
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= l * t;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * x = b` for square `self` by LU with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return Err(Error::ShapeMismatch { what: "solve" });
        }
        let mut a = self.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let p = (k..n).max_by(|&u, &v| a[(u, k)].norm().total_cmp(&a[(v, k)].norm())).unwrap();
            if a[(p, k)].norm() == 0.0 {
                return Err(Error::DidNotConverge { what: "singular linear solve" });
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                x.swap(k, p);
            }
            for i in k + 1..n {
                let l = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= l * t;
                }
                let t = x[k];
                x[i] -= l * t;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= a[(k, j)] * x[j];
            }
            x[k] = s / a[(k, k)];
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Smallest singular value of a tall matrix: Householder QR, then the
/// eigenvalues `±σᵢ` of `[[0, R], [R†, 0]]`, which avoids squaring.
pub fn smallest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols || cols == 0 {
        return Err(Error::ShapeMismatch { what: "smallest singular value needs rows >= cols" });
    }
    let mut a = m.clone();
    for j in 0..cols {
        let x: Vec<C64> = (j..rows).map(|i| a[(i, j)]).collect();
        let nx = norm(&x);
        if nx == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * nx;
        let nv = norm(&v);
        for z in v.iter_mut() {
            *z /= nv;
        }
        for c in j..cols {
            let col: Vec<C64> = (j..rows).map(|i| a[(i, c)]).collect();
            let s = dot(&v, &col) * 2.0;
            for (t, i) in (j..rows).enumerate() {
                a[(i, c)] -= v[t] * s;
            }
        }
    }
    let mut aug = ComplexMatrix::zeros(2 * cols, 2 * cols);
    for i in 0..cols {
        for j in i..cols {
            aug[(i, cols + j)] = a[(i, j)];
            aug[(cols + j, i)] = a[(i, j)].conj();
        }
    }
    let ev = eigvals_hermitian(&aug)?;
    Ok(ev[cols].abs().min(ev[cols - 1].abs()))
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalizes `vs` in place by modified Gram-Schmidt applied twice.
/// Returns false if a vector is numerically dependent on its predecessors.
pub(crate) fn orthonormalize(vs: &mut [Vec<C64>]) -> bool {
    for j in 0..vs.len() {
        let before = norm(&vs[j]);
        for _ in 0..2 {
            for i in 0..j {
                let (head, tail) = vs.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                for (x, &y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&vs[j]);
        if nv <= 1e-13 * before.max(TOL_FLOOR) || nv == 0.0 {
            return false;
        }
        for x in vs[j].iter_mut() {
            *x /= nv;
        }
    }
    true
}

pub(crate) fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}
