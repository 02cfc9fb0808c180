use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Scalar;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    lu: Matrix<S>,
    perm: Vec<usize>,
    sign_flips: usize,
}

impl<S: Scalar> Lu<S> {
    pub fn new(mut a: Matrix<S>) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs1().partial_cmp(&a[(j, k)].abs1()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(k);
            if a[(p, k)] == S::zero() {
                return Err(LinalgError::Singular { pivot: k });
            }
            if p != k {
                let (rk, rp) = a.two_rows_mut(k, p);
                rk.swap_with_slice(rp);
                perm.swap(k, p);
                sign_flips += 1;
            }
            let inv = S::one() / a[(k, k)];
            for i in k + 1..n {
                let (rk, ri) = a.two_rows_mut(k, i);
                let f = ri[k] * inv;
                ri[k] = f;
                for (x, &y) in ri[k + 1..].iter_mut().zip(&rk[k + 1..]) {
                    *x -= f * y;
                }
            }
        }
        Ok(Self { lu: a, perm, sign_flips })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = (0..i).fold(S::zero(), |acc, j| acc + row[j] * x[j]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = (i + 1..n).fold(S::zero(), |acc, j| acc + row[j] * x[j]);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ x = b` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, b: &[S]) -> Vec<S> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, then Lᵀ w = y, then x = Pᵀ w.
        let mut y = b.to_vec();
        for i in 0..n {
            let s = (0..i).fold(S::zero(), |acc, j| acc + self.lu[(j, i)] * y[j]);
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(S::zero(), |acc, j| acc + self.lu[(j, i)] * y[j]);
            y[i] -= s;
        }
        let mut x = vec![S::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    pub fn det(&self) -> S {
        let d = (0..self.dim()).fold(S::one(), |acc, i| acc * self.lu[(i, i)]);
        if self.sign_flips % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Matrix<S> {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e.fill(S::zero());
            e[j] = S::one();
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn solves_and_transposed_solves() {
        let a: Matrix<f64> = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let lu = Lu::new(a.clone()).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = lu.solve(&b);
        let ax = a.matvec(&x);
        let xt = lu.solve_transpose(&b);
        let atx = a.transpose().matvec(&xt);
        for i in 0..3 {
            assert!((ax[i] - b[i]).abs() < 1e-14);
            assert!((atx[i] - b[i]).abs() < 1e-14);
        }
        // det by cofactor expansion: 0·1 − 2·(1 − 0) + 1·(0 − 3) = −5
        assert!((lu.det() + 5.0).abs() < 1e-14);
    }

    #[test]
    fn complex_inverse() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = Matrix::from_rows(&[vec![one, i], vec![-i, 2.0 * one + i]]);
        let inv = Lu::new(a.clone()).unwrap().inverse();
        let prod = a.matmul(&inv);
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { one } else { Complex64::new(0.0, 0.0) };
                assert!((prod[(r, c)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(Lu::new(a), Err(LinalgError::Singular { .. })));
    }
}
