use num_traits::Zero;
use num_complex::Complex;

use crate::scalar::{Real, Scalar};
use crate::linalg::Matrix;

/// Right eigenvectors of an upper-triangular matrix.
///
/// Column `k` of the returned unit upper-triangular `V` solves
/// `(T − t_kk) v = 0` with `v_k = 1`. Near-zero denominators are perturbed to
/// `max(ulp·|t_kk|, smlnum)` as in LAPACK's `ztrevc`.
pub fn triangular_eigenvectors<T: Real>(t: &Matrix<Complex<T>>) -> Matrix<Complex<T>> {
    let n = t.rows();
    let ulp = T::epsilon();
    let smlnum = T::min_positive_value() * (T::from_count(n.max(1)) / ulp);
    let mut v = Matrix::<Complex<T>>::zeros(n, n);
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..n {
        let lambda = t[(k, k)];
        let smin = (ulp * lambda.abs1()).max(smlnum);
        x[k] = Complex::new(T::one(), T::zero());
        for j in (0..k).rev() {
            let row = t.row(j);
            let mut s = Complex::new(T::zero(), T::zero());
            for m in j + 1..=k {
                s += row[m] * x[m];
            }
            let mut den = row[j] - lambda;
            if den.abs1() < smin {
                den = Complex::new(smin, T::zero());
            }
            x[j] = -s / den;
        }
        for j in 0..=k {
            v[(j, k)] = x[j];
        }
    }
    v
}

/// Inverse of a unit upper-triangular matrix, returned row by row.
///
/// Row `n` of `V⁻¹` is the left eigenvector paired with column `n` of `V`
/// under the bi-orthonormality `wₙ·vₘ = δₙₘ`.
pub fn unit_upper_inverse<S: Scalar>(v: &Matrix<S>) -> Matrix<S> {
    let n = v.rows();
    let mut w = Matrix::<S>::zeros(n, n);
    for r in 0..n {
        let row = w.row_mut(r);
        row[r] = S::one();
        for k in r + 1..n {
            let mut s = S::zero();
            for m in r..k {
                s += row[m] * v[(m, k)];
            }
            row[k] = -s;
        }
    }
    w
}

/// Self-overlaps `Oₙₙ = ‖wₙ‖²‖vₙ‖²` from right eigenvector columns `V` and
/// left eigenvector rows `W = V⁻¹`.
pub fn self_overlaps<S: Scalar>(v: &Matrix<S>, w: &Matrix<S>) -> Vec<S::Real> {
    let n = v.rows();
    (0..n)
        .map(|k| {
            let vn = (0..n).fold(S::Real::zero(), |acc, i| acc + v[(i, k)].abs_sq());
            let wn = w.row(k).iter().fold(S::Real::zero(), |acc, x| acc + x.abs_sq());
            vn * wn
        })
        .collect()
}

/// Full overlap matrix `Oₙₘ = (wₙ·w̄ₘ)(v̄ₘ·vₙ)`.
pub fn overlap_matrix<T: Real>(v: &Matrix<Complex<T>>, w: &Matrix<Complex<T>>) -> Matrix<Complex<T>> {
    let n = v.rows();
    let vt = v.transpose();
    Matrix::from_fn(n, n, |a, b| {
        let left = w.row(a).iter().zip(w.row(b)).fold(Complex::new(T::zero(), T::zero()), |acc, (&x, &y)| acc + x * y.conj());
        let right = vt.row(b).iter().zip(vt.row(a)).fold(Complex::new(T::zero(), T::zero()), |acc, (&x, &y)| acc + x.conj() * y);
        left * right
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn two_by_two_overlap_matches_hand_algebra() {
        // [[d, a], [0, −d]]: O = 1 + a²/(4d²)
        let (a, d) = (3.0, 0.5);
        let c = |x: f64| Complex64::new(x, 0.0);
        let t = Matrix::from_rows(&[vec![c(d), c(a)], vec![c(0.0), c(-d)]]);
        let v = triangular_eigenvectors(&t);
        let w = unit_upper_inverse(&v);
        let o = self_overlaps(&v, &w);
        let want = 1.0 + a * a / (4.0 * d * d);
        assert!((o[0] - want).abs() < 1e-13 && (o[1] - want).abs() < 1e-13);
    }

    #[test]
    fn overlap_rows_sum_to_one() {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        let t = Matrix::from_rows(&[
            vec![c(1.0, 0.5), c(0.3, -1.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(-0.5, 0.2), c(0.7, 0.7)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.1, -1.0)],
        ]);
        let v = triangular_eigenvectors(&t);
        let w = unit_upper_inverse(&v);
        let o = overlap_matrix(&v, &w);
        for r in 0..3 {
            let s: Complex64 = (0..3).map(|m| o[(r, m)]).sum();
            assert!((s - c(1.0, 0.0)).norm() < 1e-13);
        }
        let tv = t.matmul(&v);
        for k in 0..3 {
            for i in 0..3 {
                assert!((tv[(i, k)] - t[(k, k)] * v[(i, k)]).norm() < 1e-13);
            }
        }
    }
}
