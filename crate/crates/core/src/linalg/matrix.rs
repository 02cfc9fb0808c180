use num_traits::{Float, One, Zero};
use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::scalar::{Real, Scalar};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major storage.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major storage has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable access to two distinct rows at once.
    pub fn two_rows_mut(&mut self, a: usize, b: usize) -> (&mut [S], &mut [S]) {
        assert!(a < b && b < self.rows);
        let (lo, hi) = self.data.split_at_mut(b * self.cols);
        (&mut lo[a * self.cols..(a + 1) * self.cols], &mut hi[..self.cols])
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(S) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn to_complex(&self) -> Matrix<Complex<S::Real>> {
        self.map(Scalar::to_complex)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == S::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(S::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn scaled(&self, s: S) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    pub fn frobenius_norm(&self) -> S::Real {
        self.data.iter().map(|x| x.abs_sq()).fold(S::Real::zero(), |a, b| a + b).sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> S::Real {
        self.data.iter().map(|x| x.modulus()).fold(S::Real::zero(), |a, b| a.max(b))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)])
    }
}

impl<T: Real> Matrix<T> {
    /// Spectral norm `‖A‖₂` by power iteration on `AᵀA`.
    ///
    /// Iterates until the Rayleigh quotient is stationary to machine
    /// precision; the result is accurate to a few ulps for matrices whose two
    /// largest singular values are not nearly degenerate.
    pub fn spectral_norm(&self) -> T {
        spectral_norm_impl(self)
    }
}

impl<T: Real> Matrix<Complex<T>> {
    pub fn spectral_norm(&self) -> T {
        spectral_norm_impl(self)
    }
}

fn spectral_norm_impl<S: Scalar>(a: &Matrix<S>) -> S::Real {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return S::Real::zero();
    }
    let adj = a.adjoint();
    // Deterministic, generic starting vector.
    let mut v: Vec<S> = (0..n).map(|j| S::from_real(S::Real::one() + S::Real::from_count(j).sqrt())).collect();
    let mut sigma_sq = S::Real::zero();
    let tol = S::Real::epsilon() * S::Real::lit(4.0);
    for _ in 0..20_000 {
        let norm = v.iter().map(|x| x.abs_sq()).fold(S::Real::zero(), |s, x| s + x).sqrt();
        if norm == S::Real::zero() {
            return S::Real::zero();
        }
        for x in &mut v {
            *x = x.scale(norm.recip());
        }
        let av = a.matvec(&v);
        let next = av.iter().map(|x| x.abs_sq()).fold(S::Real::zero(), |s, x| s + x);
        v = adj.matvec(&av);
        if (next - sigma_sq).abs() <= tol * next {
            sigma_sq = next;
            break;
        }
        sigma_sq = next;
    }
    sigma_sq.sqrt()
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_against_hand_product() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(a.matmul(&b), Matrix::from_rows(&[vec![2.0, 1.0], vec![4.0, 3.0]]));
    }

    #[test]
    fn spectral_norm_of_diagonal_and_rank_one() {
        let d = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -5.0]]);
        assert!((d.spectral_norm() - 5.0_f64).abs() < 1e-14);
        // u vᵀ with |u| = √2, |v| = √5
        let r = Matrix::from_fn(2, 2, |i, j| [1.0, 1.0][i] * [1.0, 2.0][j]);
        assert!((r.spectral_norm() - 10.0_f64.sqrt()).abs() < 1e-13);
    }
}
